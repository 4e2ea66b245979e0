// Copyright 2026 The semdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMDEC_TOOLS_CLI_HPP
#define SEMDEC_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semdec/corpus.hpp"
#include "semdec/decoder.hpp"
#include "semdec/eval.hpp"
#include "semdec/extraction.hpp"
#include "semdec/kmeans.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/model.hpp"
#include "semdec/preprocess.hpp"
#include "semdec/service.hpp"
#include "semdec/synthetic.hpp"

namespace semdec::cli {

namespace fs = std::filesystem;

// Writes to `path`, or to `out` when the path is empty.
inline void emit(const fs::path& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    detail::write_file_atomic(path, text);
  }
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  for (const auto& raw : detail::split(detail::read_file(path), '\n')) {
    std::string_view line = detail::chomp(raw);
    lines.emplace_back(line);
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// Class catalog file: the first column of each line ("class_id" or the
// cluster output "class_id<TAB>members").
inline std::set<std::string> read_class_ids(const fs::path& path) {
  std::set<std::string> ids;
  for (const auto& line : read_lines(path)) {
    if (detail::is_comment_or_blank(line)) continue;
    ids.insert(nfc(detail::trim(detail::split(line, '\t')[0])));
  }
  return ids;
}

struct ConstraintOptions {
  fs::path blank_words;
  std::string field;
  fs::path classes;
  fs::path refwords;
  std::vector<std::string> type_markers;
  std::vector<std::string> only;
  std::vector<std::string> disable;
};

inline std::optional<Constraint> parse_constraint(const std::string& id) {
  for (std::size_t i = 0; i < kConstraintCount; ++i) {
    if (constraint_id(static_cast<Constraint>(i)) == id) return static_cast<Constraint>(i);
  }
  return std::nullopt;
}

// One builder for the CLI and the service so both run the same rules.
inline ConstraintConfig make_constraint_config(const ConstraintOptions& o) {
  ConstraintConfig cfg;
  if (!o.only.empty()) cfg.enabled.fill(false);
  for (const auto& id : o.only) {
    auto c = parse_constraint(id);
    if (!c) throw std::invalid_argument("unknown constraint '" + id + "'");
    cfg.set(*c, true);
  }
  for (const auto& id : o.disable) {
    auto c = parse_constraint(id);
    if (!c) throw std::invalid_argument("unknown constraint '" + id + "'");
    cfg.set(*c, false);
  }
  if (!o.blank_words.empty()) cfg.blank_words = parse_blank_words(detail::read_file(o.blank_words));
  if (!o.field.empty()) cfg.application_field = o.field;
  if (!o.classes.empty()) cfg.class_catalog = read_class_ids(o.classes);
  if (!o.refwords.empty()) {
    for (const auto& r : parse_reference_words(detail::read_file(o.refwords))) {
      cfg.reference_words.push_back(r.tokens);
    }
  }
  for (const auto& m : o.type_markers) cfg.type_markers.insert(nfc(m));
  return cfg;
}

inline void add_constraint_options(CLI::App* cmd, ConstraintOptions& o) {
  cmd->add_option("--blank-words", o.blank_words, "Blank-word file (enables C6)")->check(CLI::ExistingFile);
  cmd->add_option("--field", o.field, "Application field (enables C4)");
  cmd->add_option("--classes", o.classes, "Class catalog file (enables C2)")->check(CLI::ExistingFile);
  cmd->add_option("--refwords", o.refwords, "Reference-word file (checked by C8)")->check(CLI::ExistingFile);
  cmd->add_option("--type-marker", o.type_markers, "Declared type marker (C8), repeatable");
  cmd->add_option("--only", o.only, "Run only these constraints (e.g. C1)");
  cmd->add_option("--disable", o.disable, "Skip these constraints");
}

inline std::string format_violations(const std::vector<ConstraintViolation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    out += v.constraint_id + '\t' + detail::join(v.entries, ",") + '\t' + v.message + '\n';
  }
  return out;
}

inline PlantedSpec planted_spec_from_json(const nlohmann::json& j) {
  auto word = [](const nlohmann::json& w) {
    return PlantedWord{w.at("surface").get<std::string>(), w.at("class").get<std::string>(),
                       w.at("micro_trait").get<std::string>()};
  };
  PlantedSpec s;
  s.field = j.value("field", s.field);
  for (const auto& t : j.at("types")) {
    PlantedType pt{t.at("id").get<std::string>(), t.at("prior").get<double>(), {}};
    for (const auto& phrase : t.at("reference_phrases")) {
      std::vector<PlantedWord> words;
      for (const auto& w : phrase) words.push_back(word(w));
      pt.reference_phrases.push_back(std::move(words));
    }
    s.types.push_back(std::move(pt));
  }
  for (const auto& f : j.value("fillers", nlohmann::json::array())) s.fillers.push_back(word(f));
  for (const auto& a : j.value("triggered", nlohmann::json::array())) {
    TriggeredWord tw{a.at("surface").get<std::string>(), {}};
    for (const auto& r : a.at("rules")) {
      tw.rules.push_back({word(r.at("trigger")), r.at("class").get<std::string>(),
                          r.at("micro_trait").get<std::string>(), r.at("weight").get<double>()});
    }
    s.triggered.push_back(std::move(tw));
  }
  for (const auto& w : j.value("typed", nlohmann::json::array())) {
    TypedWord tw{w.at("surface").get<std::string>(), {}};
    for (const auto& [type_id, sense] : w.at("senses").items()) {
      tw.senses[type_id] = {sense.at("class").get<std::string>(),
                            sense.at("micro_trait").get<std::string>()};
    }
    s.typed.push_back(std::move(tw));
  }
  s.min_gap = j.value("min_gap", s.min_gap);
  s.max_gap = j.value("max_gap", s.max_gap);
  s.max_lead = j.value("max_lead", s.max_lead);
  s.max_tail = j.value("max_tail", s.max_tail);
  return s;
}

// Runs one invocation. args[0] is the program name. Diagnostics go to
// `err` prefixed with "error:".
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"semdec: semantic decoder for transcribed utterances"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // preprocess
  fs::path pre_input, pre_output, blank_words, merge_rules;
  auto* pre = app.add_subcommand("preprocess", "Tokenize and filter raw utterances");
  pre->add_option("--input", pre_input, "Raw utterances, one per line")->required()->check(CLI::ExistingFile);
  pre->add_option("--blank-words", blank_words, "Blank-word file")->check(CLI::ExistingFile);
  pre->add_option("--merge-rules", merge_rules, "Merge-rule file")->check(CLI::ExistingFile);
  pre->add_option("--output", pre_output, "Output file (default stdout)");

  // extract-refwords
  fs::path ex_corpus, ex_output;
  bool ex_labeled = false;
  ExtractionConfig ex_cfg;
  auto* ex = app.add_subcommand("extract-refwords", "Extract reference words per utterance type");
  ex->add_option("--corpus", ex_corpus, "Typed corpus file")->required()->check(CLI::ExistingFile);
  ex->add_flag("--labeled", ex_labeled, "Corpus is in labeled format");
  ex->add_option("--threshold", ex_cfg.threshold, "Weight threshold")->check(CLI::NonNegativeNumber);
  ex->add_option("--max-ngram", ex_cfg.max_ngram, "Longest reference word")->check(CLI::Range(1, 3));
  ex->add_option("--max-gap", ex_cfg.max_gap, "Tokens allowed between components")->check(CLI::NonNegativeNumber);
  ex->add_option("--output", ex_output, "Output file (default stdout)");

  // cluster
  fs::path cl_corpus, cl_output;
  bool cl_labeled = false;
  KMeansConfig km;
  auto* cl = app.add_subcommand("cluster", "Induce semantic classes with k-means");
  cl->add_option("--corpus", cl_corpus, "Typed corpus file")->required()->check(CLI::ExistingFile);
  cl->add_flag("--labeled", cl_labeled, "Corpus is in labeled format");
  cl->add_option("--k", km.k, "Number of classes")->check(CLI::PositiveNumber);
  cl->add_option("--max-iters", km.max_iters, "Lloyd iteration cap")->check(CLI::PositiveNumber);
  cl->add_option("--seed", km.seed, "Random seed");
  cl->add_option("--context-vocab", km.context_vocab, "Embedding dimensions")->check(CLI::PositiveNumber);
  cl->add_option("--restarts", km.restarts, "Seeded restarts")->check(CLI::PositiveNumber);
  cl->add_option("--output", cl_output, "Output file (default stdout)");

  // train
  fs::path tr_corpus, tr_lexicon, tr_refwords, tr_output;
  std::string tr_strategy = "PERTINENT";
  std::string tr_field = "application";
  TrainConfig tr_cfg;
  auto* tr = app.add_subcommand("train", "Estimate the decoder count tables");
  tr->add_option("--corpus", tr_corpus, "Labeled corpus")->required()->check(CLI::ExistingFile);
  tr->add_option("--lexicon", tr_lexicon, "Lexicon file")->check(CLI::ExistingFile);
  tr->add_option("--refwords", tr_refwords, "Reference words (default: extracted)")->check(CLI::ExistingFile);
  tr->add_option("--threshold", tr_cfg.extraction.threshold, "Reference-word threshold")->check(CLI::NonNegativeNumber);
  tr->add_option("--max-ngram", tr_cfg.extraction.max_ngram, "Longest reference word")->check(CLI::Range(1, 3));
  tr->add_option("--max-gap", tr_cfg.extraction.max_gap, "Tokens allowed between components")->check(CLI::NonNegativeNumber);
  tr->add_option("--window", tr_cfg.window, "Co-occurrence window")->check(CLI::PositiveNumber);
  tr->add_option("--delta", tr_cfg.delta, "Additive smoothing")->check(CLI::NonNegativeNumber);
  tr->add_option("--strategy", tr_strategy, "LEX, LEX+TYPE, FIXED-1, FIXED-2 or PERTINENT");
  tr->add_option("--field", tr_field, "Application field stamped on labels");
  tr->add_option("--output", tr_output, "Model file")->required();

  // decode
  fs::path de_model, de_lexicon, de_input, de_output;
  std::string de_format = "raw";
  auto* de = app.add_subcommand("decode", "Label utterances with a trained model");
  de->add_option("--model", de_model, "Model file")->required()->check(CLI::ExistingFile);
  de->add_option("--lexicon", de_lexicon, "Lexicon file")->check(CLI::ExistingFile);
  de->add_option("--input", de_input, "Utterances, one per line")->required()->check(CLI::ExistingFile);
  de->add_option("--input-format", de_format, "raw, typed or labeled")
      ->check(CLI::IsMember({"raw", "typed", "labeled"}));
  de->add_option("--blank-words", blank_words, "Blank-word file (raw input)")->check(CLI::ExistingFile);
  de->add_option("--merge-rules", merge_rules, "Merge-rule file (raw input)")->check(CLI::ExistingFile);
  de->add_option("--output", de_output, "Output file (default stdout)");

  // evaluate
  fs::path ev_gold, ev_model, ev_lexicon, ev_decoded, ev_train, ev_report, ev_csv;
  std::vector<std::string> ev_strategies;
  TrainConfig ev_cfg;
  auto* ev = app.add_subcommand("evaluate", "Score decoded output or compare context strategies");
  ev->add_option("--gold", ev_gold, "Gold labeled corpus")->required()->check(CLI::ExistingFile);
  ev->add_option("--model", ev_model, "Decode gold with this model")->check(CLI::ExistingFile);
  ev->add_option("--lexicon", ev_lexicon, "Lexicon file")->check(CLI::ExistingFile);
  ev->add_option("--decoded", ev_decoded, "Score this decoded file")->check(CLI::ExistingFile);
  ev->add_option("--train", ev_train, "Train every strategy on this corpus and compare")->check(CLI::ExistingFile);
  ev->add_option("--strategies", ev_strategies, "Strategies to compare (default all)");
  ev->add_option("--window", ev_cfg.window, "Co-occurrence window")->check(CLI::PositiveNumber);
  ev->add_option("--delta", ev_cfg.delta, "Additive smoothing")->check(CLI::NonNegativeNumber);
  ev->add_option("--report", ev_report, "Write the JSON report here");
  ev->add_option("--csv", ev_csv, "Write strategy,error_rate CSV here");

  // validate
  fs::path va_lexicon;
  ConstraintOptions va_opts;
  auto* va = app.add_subcommand("validate", "Check lexicon integrity constraints");
  va->add_option("--lexicon", va_lexicon, "Lexicon file")->required()->check(CLI::ExistingFile);
  add_constraint_options(va, va_opts);

  // gen-corpus
  fs::path gc_output, gc_lexicon, gc_spec;
  std::size_t gc_size = 500;
  std::uint64_t gc_seed = 1;
  auto* gc = app.add_subcommand("gen-corpus", "Generate a planted synthetic labeled corpus");
  gc->add_option("--size", gc_size, "Number of utterances");
  gc->add_option("--seed", gc_seed, "Random seed");
  gc->add_option("--spec", gc_spec, "Planted spec JSON (default: built-in)")->check(CLI::ExistingFile);
  gc->add_option("--output", gc_output, "Output file (default stdout)");
  gc->add_option("--lexicon-output", gc_lexicon, "Also write the unambiguous-word lexicon");

  // serve
  fs::path sv_lexicon, sv_corpus, sv_model;
  std::string sv_host = "127.0.0.1";
  int sv_port = 8080;
  ConstraintOptions sv_opts;
  auto* sv = app.add_subcommand("serve", "Run the annotation HTTP service");
  sv->add_option("--lexicon", sv_lexicon, "Lexicon file (created if missing)")->required();
  sv->add_option("--corpus", sv_corpus, "Labeled corpus for suggestions")->check(CLI::ExistingFile);
  sv->add_option("--model", sv_model, "Model file for decode preview");
  sv->add_option("--host", sv_host, "Listen address");
  sv->add_option("--port", sv_port, "Listen port")->check(CLI::Range(0, 65535));
  add_constraint_options(sv, sv_opts);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::ostringstream help;
      app.exit(e, help, help);
      out << help.str();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*pre) {
      auto cfg = load_preprocess_config(blank_words, merge_rules);
      std::string text;
      for (const auto& line : read_lines(pre_input)) {
        text += detail::join(surfaces(preprocess(line, cfg)), " ") + '\n';
      }
      emit(pre_output, text, out);
    } else if (*ex) {
      TypedCorpus corpus = ex_labeled ? read_labeled_corpus(ex_corpus).typed() : read_typed_corpus(ex_corpus);
      emit(ex_output, serialize_reference_words(extract_reference_words(corpus, ex_cfg)), out);
    } else if (*cl) {
      TypedCorpus corpus = cl_labeled ? read_labeled_corpus(cl_corpus).typed() : read_typed_corpus(cl_corpus);
      emit(cl_output, serialize_class_catalog(kmeans_classes(corpus, km)), out);
    } else if (*tr) {
      auto strategy = parse_strategy(tr_strategy);
      if (!strategy) throw std::invalid_argument("unknown strategy '" + tr_strategy + "'");
      tr_cfg.strategy = *strategy;
      auto corpus = read_labeled_corpus(tr_corpus);
      Lexicon lex = tr_lexicon.empty() ? Lexicon{} : read_lexicon(tr_lexicon);
      Catalogs catalogs = Catalogs::collect(corpus, lex, tr_field);
      if (!tr_refwords.empty()) {
        catalogs.reference_words =
            parse_reference_words(detail::read_file(tr_refwords), tr_cfg.extraction.max_gap);
      }
      write_model(tr_output, train(corpus, lex, catalogs, tr_cfg));
    } else if (*de) {
      auto model = read_model(de_model);
      Lexicon lex = de_lexicon.empty() ? Lexicon{} : read_lexicon(de_lexicon);
      auto pcfg = load_preprocess_config(blank_words, merge_rules);
      std::string text;
      for (const auto& line : read_lines(de_input)) {
        if (detail::trim(line).empty()) {
          text += '\n';
          continue;
        }
        DecodedUtterance d;
        if (de_format == "raw") {
          d = analyze(model, lex, pcfg, line);
        } else {
          auto tab = line.find('\t');
          if (tab == std::string::npos) throw FormatError("missing TAB in '" + line + "'");
          std::vector<std::string> tokens;
          for (const auto& item : detail::split_ws(nfc(line.substr(tab + 1)))) {
            tokens.push_back(de_format == "labeled" ? parse_labeled_word(item).surface : item);
          }
          d = decode(model, lex, tokens);
        }
        text += format_labeled_utterance(d.labeled()) + '\n';
      }
      emit(de_output, text, out);
    } else if (*ev) {
      auto gold = read_labeled_corpus(ev_gold);
      Lexicon lex = ev_lexicon.empty() ? Lexicon{} : read_lexicon(ev_lexicon);
      EvalReport report;
      report.utterances = gold.utterances.size();
      report.words = gold.word_count();
      int modes = !ev_model.empty() + !ev_decoded.empty() + !ev_train.empty();
      if (modes != 1) throw std::invalid_argument("give exactly one of --model, --decoded, --train");
      if (!ev_decoded.empty()) {
        auto decoded = read_labeled_corpus(ev_decoded);
        report.strategies.push_back(score("decoded", gold, decoded.utterances));
      } else if (!ev_model.empty()) {
        report.strategies.push_back(evaluate(read_model(ev_model), lex, gold));
      } else {
        std::vector<ContextStrategy> strategies;
        for (const auto& name : ev_strategies) {
          auto s = parse_strategy(name);
          if (!s) throw std::invalid_argument("unknown strategy '" + name + "'");
          strategies.push_back(*s);
        }
        if (strategies.empty()) strategies.assign(kAllStrategies.begin(), kAllStrategies.end());
        report = compare_strategies(read_labeled_corpus(ev_train), gold, lex, ev_cfg, strategies);
      }
      out << format_report_table(report);
      if (!ev_report.empty()) detail::write_file_atomic(ev_report, report_to_json(report).dump(2) + "\n");
      if (!ev_csv.empty()) detail::write_file_atomic(ev_csv, format_report_csv(report));
    } else if (*va) {
      auto violations = validate(read_lexicon(va_lexicon), make_constraint_config(va_opts));
      out << format_violations(violations);
      if (!violations.empty()) {
        err << "error: " << violations.size() << " constraint violation(s)\n";
        return 1;
      }
    } else if (*gc) {
      PlantedSpec spec = gc_spec.empty()
                             ? default_planted_spec()
                             : planted_spec_from_json(nlohmann::json::parse(detail::read_file(gc_spec)));
      emit(gc_output, serialize_labeled_corpus(generate_synthetic_corpus(spec, gc_size, gc_seed)), out);
      if (!gc_lexicon.empty()) write_lexicon(gc_lexicon, planted_lexicon(spec));
    } else if (*sv) {
      AnnotationService::Config cfg;
      cfg.lexicon_path = sv_lexicon;
      cfg.corpus_path = sv_corpus;
      cfg.model_path = sv_model;
      cfg.constraints = make_constraint_config(sv_opts);
      ServiceHandle handle(cfg, sv_host, sv_port);
      err << "listening on " << sv_host << ':' << handle.port() << '\n';
      handle.wait();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace semdec::cli

#endif  // SEMDEC_TOOLS_CLI_HPP
