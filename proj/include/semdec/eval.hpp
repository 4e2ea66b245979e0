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

#ifndef SEMDEC_EVAL_HPP
#define SEMDEC_EVAL_HPP

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "semdec/corpus.hpp"
#include "semdec/decoder.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/model.hpp"

namespace semdec {

struct ClassTally {
  std::size_t words = 0;
  std::size_t errors = 0;

  bool operator==(const ClassTally&) const = default;
};

// Scores of one decoder on one gold corpus. A word is an error when its
// (class, trait) pair differs from gold.
struct StrategyReport {
  std::string name;
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::size_t errors = 0;
  std::size_t class_errors = 0;
  std::size_t type_correct = 0;
  // Keyed by gold class.
  std::map<std::string, ClassTally> confusion;

  double error_rate() const { return words ? static_cast<double>(errors) / words : 0.0; }
  double class_error_rate() const {
    return words ? static_cast<double>(class_errors) / words : 0.0;
  }
  double type_accuracy() const {
    return utterances ? static_cast<double>(type_correct) / utterances : 0.0;
  }

  bool operator==(const StrategyReport&) const = default;
};

struct EvalReport {
  std::size_t utterances = 0;
  std::size_t words = 0;
  std::vector<StrategyReport> strategies;

  const StrategyReport& at(const std::string& name) const {
    for (const auto& s : strategies) {
      if (s.name == name) return s;
    }
    throw std::out_of_range("no strategy '" + name + "' in report");
  }

  bool operator==(const EvalReport&) const = default;
};

// Scores decoded utterances against gold, pairwise.
inline StrategyReport score(const std::string& name, const LabeledCorpus& gold,
                            const std::vector<LabeledUtterance>& decoded) {
  if (decoded.size() != gold.utterances.size()) {
    throw std::invalid_argument("decoded " + std::to_string(decoded.size()) +
                                " utterances but gold has " +
                                std::to_string(gold.utterances.size()));
  }
  StrategyReport r;
  r.name = name;
  for (std::size_t u = 0; u < decoded.size(); ++u) {
    const auto& g = gold.utterances[u];
    const auto& d = decoded[u];
    if (d.words.size() != g.words.size()) {
      throw std::invalid_argument("utterance " + std::to_string(u + 1) + ": decoded " +
                                  std::to_string(d.words.size()) + " words, gold has " +
                                  std::to_string(g.words.size()));
    }
    ++r.utterances;
    if (d.type_id == g.type_id) ++r.type_correct;
    for (std::size_t i = 0; i < g.words.size(); ++i) {
      const auto& gw = g.words[i];
      const auto& dw = d.words[i];
      if (dw.surface != gw.surface) {
        throw std::invalid_argument("utterance " + std::to_string(u + 1) + ": token '" +
                                    dw.surface + "' does not match gold '" + gw.surface + "'");
      }
      bool class_ok = dw.semantic_class == gw.semantic_class;
      bool ok = class_ok && dw.micro_trait == gw.micro_trait;
      ++r.words;
      auto& tally = r.confusion[gw.semantic_class];
      ++tally.words;
      if (!ok) {
        ++r.errors;
        ++tally.errors;
      }
      if (!class_ok) ++r.class_errors;
    }
  }
  return r;
}

// Decodes every gold utterance with `decode_fn` (tokens -> DecodedUtterance
// or LabeledUtterance) and scores it.
template <typename DecodeFn>
StrategyReport evaluate(const std::string& name, const LabeledCorpus& gold, DecodeFn&& decode_fn) {
  std::vector<LabeledUtterance> decoded;
  decoded.reserve(gold.utterances.size());
  for (const auto& u : gold.utterances) {
    auto out = decode_fn(u.surfaces());
    if constexpr (std::is_same_v<std::decay_t<decltype(out)>, DecodedUtterance>) {
      decoded.push_back(out.labeled());
    } else {
      decoded.push_back(std::move(out));
    }
  }
  return score(name, gold, decoded);
}

// Gold labels must exist in the model's catalogs.
inline StrategyReport evaluate(const TrainedModel& model, const Lexicon& lexicon,
                               const LabeledCorpus& gold) {
  for (std::size_t u = 0; u < gold.utterances.size(); ++u) {
    for (const auto& w : gold.utterances[u].words) {
      if (!model.catalogs.has_sense(w.semantic_class, w.micro_trait)) {
        throw std::invalid_argument("utterance " + std::to_string(u + 1) + ": gold label " +
                                    w.semantic_class + "/" + w.micro_trait +
                                    " is not in the model catalogs");
      }
    }
  }
  // Decoding is read-only on the model, so utterances are split across
  // workers; each writes its own slot and scoring stays sequential.
  std::vector<LabeledUtterance> decoded(gold.utterances.size());
  std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  workers = std::min(workers, std::max<std::size_t>(1, gold.utterances.size() / 64));
  std::vector<std::exception_ptr> failures(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t u = w; u < gold.utterances.size(); u += workers) {
        decoded[u] = decode(model, lexicon, gold.utterances[u].surfaces()).labeled();
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return score(to_string(model.config.strategy), gold, decoded);
}

// Trains one model per strategy on `train_corpus` and scores each on `test`.
inline EvalReport compare_strategies(const LabeledCorpus& train_corpus, const LabeledCorpus& test,
                                     const Lexicon& lexicon, const TrainConfig& base,
                                     const std::vector<ContextStrategy>& strategies =
                                         {kAllStrategies.begin(), kAllStrategies.end()},
                                     const std::string& field = "application") {
  LabeledCorpus both = train_corpus;
  both.utterances.insert(both.utterances.end(), test.utterances.begin(), test.utterances.end());
  Catalogs catalogs = Catalogs::collect(both, lexicon, field);
  if (base.extraction.max_ngram >= 1) {
    for (auto& [_, refs] : extract_reference_words(train_corpus.typed(), base.extraction)) {
      for (auto& r : refs) catalogs.reference_words.push_back(std::move(r));
    }
  }

  EvalReport report;
  report.utterances = test.utterances.size();
  report.words = test.word_count();
  for (auto s : strategies) {
    TrainConfig cfg = base;
    cfg.strategy = s;
    auto model = train(train_corpus, lexicon, catalogs, cfg);
    report.strategies.push_back(evaluate(model, lexicon, test));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output.

inline nlohmann::json report_to_json(const EvalReport& r) {
  using nlohmann::json;
  json strategies = json::array();
  for (const auto& s : r.strategies) {
    json confusion = json::object();
    for (const auto& [c, t] : s.confusion) confusion[c] = {{"words", t.words}, {"errors", t.errors}};
    strategies.push_back({{"name", s.name},
                          {"utterances", s.utterances},
                          {"words", s.words},
                          {"errors", s.errors},
                          {"class_errors", s.class_errors},
                          {"type_correct", s.type_correct},
                          {"error_rate", s.error_rate()},
                          {"class_error_rate", s.class_error_rate()},
                          {"type_accuracy", s.type_accuracy()},
                          {"confusion", confusion}});
  }
  return {{"corpus", {{"utterances", r.utterances}, {"words", r.words}}},
          {"strategies", strategies}};
}

inline std::string format_report_table(const EvalReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %8s %10s %12s %10s\n", "strategy", "words",
                "error", "class_error", "type_acc");
  out += line;
  for (const auto& s : r.strategies) {
    std::snprintf(line, sizeof(line), "%-10s %8zu %9.2f%% %11.2f%% %9.2f%%\n", s.name.c_str(),
                  s.words, 100 * s.error_rate(), 100 * s.class_error_rate(),
                  100 * s.type_accuracy());
    out += line;
  }
  return out;
}

inline std::string format_report_csv(const EvalReport& r) {
  std::string out = "strategy,error_rate\n";
  for (const auto& s : r.strategies) out += s.name + "," + detail::format_double(s.error_rate()) + "\n";
  return out;
}

}  // namespace semdec

#endif  // SEMDEC_EVAL_HPP
