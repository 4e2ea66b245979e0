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

#ifndef SEMDEC_MODEL_HPP
#define SEMDEC_MODEL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semdec/affinity.hpp"
#include "semdec/corpus.hpp"
#include "semdec/extraction.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/text_io.hpp"

namespace semdec {

// How the class/trait context of a word is chosen.
enum class ContextStrategy {
  kLex,        // no context, no utterance type
  kLexType,    // utterance type only
  kFixed1,     // type + literal previous word
  kFixed2,     // type + two literal previous words
  kPertinent,  // type + affinity-ranked preceding words
};

inline constexpr std::array<ContextStrategy, 5> kAllStrategies = {
    ContextStrategy::kFixed1, ContextStrategy::kFixed2, ContextStrategy::kLex,
    ContextStrategy::kLexType, ContextStrategy::kPertinent};

inline std::string to_string(ContextStrategy s) {
  switch (s) {
    case ContextStrategy::kLex: return "LEX";
    case ContextStrategy::kLexType: return "LEX+TYPE";
    case ContextStrategy::kFixed1: return "FIXED-1";
    case ContextStrategy::kFixed2: return "FIXED-2";
    case ContextStrategy::kPertinent: break;
  }
  return "PERTINENT";
}

inline std::optional<ContextStrategy> parse_strategy(std::string_view s) {
  for (auto st : kAllStrategies) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

inline bool uses_type(ContextStrategy s) { return s != ContextStrategy::kLex; }

// Type key used in class contexts when the strategy ignores utterance type.
inline const std::string kAnyType = "*";

using Sense = std::pair<std::string, std::string>;  // (class, trait)

// Ids a model may emit or condition on.
struct Catalogs {
  std::string field = "application";
  std::set<std::string> types;
  // Valid traits per class.
  std::map<std::string, std::set<std::string>> traits;
  std::vector<ReferenceWord> reference_words;

  bool has_sense(const std::string& c, const std::string& t) const {
    auto it = traits.find(c);
    return it != traits.end() && it->second.count(t) > 0;
  }

  std::set<std::string> classes() const {
    std::set<std::string> out;
    for (const auto& [c, _] : traits) out.insert(c);
    return out;
  }

  // Types and senses seen in the corpus and lexicon.
  static Catalogs collect(const LabeledCorpus& corpus, const Lexicon& lexicon,
                          std::string field = "application") {
    Catalogs cat;
    cat.field = std::move(field);
    for (const auto& u : corpus.utterances) {
      cat.types.insert(u.type_id);
      for (const auto& w : u.words) cat.traits[w.semantic_class].insert(w.micro_trait);
    }
    for (const auto& [_, e] : lexicon.entries()) {
      cat.traits[e.fse.semantic_class].insert(e.fse.micro_trait);
    }
    return cat;
  }

  bool operator==(const Catalogs&) const = default;
};

struct TrainConfig {
  ContextStrategy strategy = ContextStrategy::kPertinent;
  // Co-occurrence window (preceding tokens) for affinity statistics.
  std::size_t window = 5;
  // Additive smoothing for class and trait conditionals.
  double delta = 0.5;
  // Pseudo-count per cell for pairs never seen together.
  double unseen_pseudo = 0.5;
  // Used when the catalogs carry no reference words.
  ExtractionConfig extraction{};

  bool operator==(const TrainConfig& o) const {
    return strategy == o.strategy && window == o.window && delta == o.delta &&
           unseen_pseudo == o.unseen_pseudo && extraction.threshold == o.extraction.threshold &&
           extraction.max_ngram == o.extraction.max_ngram &&
           extraction.max_gap == o.extraction.max_gap;
  }
};

using CountRow = std::map<std::string, std::uint64_t>;
// (type or kAnyType, cp1, cp2)
using ClassContextKey = std::array<std::string, 3>;
// (class, fsep class, fsep trait)
using TraitContextKey = std::array<std::string, 3>;

inline constexpr int kModelFormatVersion = 1;

// Count tables behind the three factors of the interpretation probability,
// plus the co-occurrence statistics used for context selection. Immutable
// once trained.
struct TrainedModel {
  TrainConfig config;
  Catalogs catalogs;

  // Reference word -> N(type, Mr) and N(Mr).
  std::map<Ngram, CountRow> type_counts;
  std::map<Ngram, std::uint64_t> reference_totals;

  // N(type, C, cp1, cp2) and N(type, cp1, cp2).
  std::map<ClassContextKey, CountRow> class_counts;
  std::map<ClassContextKey, std::uint64_t> class_totals;
  CountRow class_unigram;

  // N((C, TM), FSeP) and N(C, FSeP).
  std::map<TraitContextKey, CountRow> trait_counts;
  std::map<TraitContextKey, std::uint64_t> trait_totals;
  std::map<Sense, std::uint64_t> sense_unigram;

  // Senses each surface received in training or from the lexicon.
  std::map<std::string, std::set<Sense>> word_senses;

  CooccurrenceStats cooccurrence;

  // Lookup tables derived from the counts and catalogs: coarser rows for
  // unseen contexts, the class list, and the allowed gap per reference
  // word. Rebuilt on load, never serialized.
  struct Backoff {
    std::set<std::string> classes;
    std::map<Ngram, int> reference_gap;
    int widest_reference_gap = 0;
    std::size_t longest_reference = 0;
    std::map<std::pair<std::string, std::string>, CountRow> class_by_type_cp1;
    std::map<std::string, CountRow> class_by_type;
    std::map<std::pair<std::string, std::string>, CountRow> trait_by_class_fsep;
    bool operator==(const Backoff&) const = default;
  } backoff;

  void derive_backoff() {
    backoff = {};
    backoff.classes = catalogs.classes();
    for (const auto& r : catalogs.reference_words) {
      auto [it, inserted] = backoff.reference_gap.emplace(r.tokens, r.max_gap);
      if (!inserted) it->second = std::max(it->second, r.max_gap);
      backoff.widest_reference_gap = std::max(backoff.widest_reference_gap, it->second);
      backoff.longest_reference = std::max(backoff.longest_reference, r.tokens.size());
    }
    for (const auto& [key, row] : class_counts) {
      for (const auto& [c, n] : row) {
        backoff.class_by_type_cp1[{key[0], key[1]}][c] += n;
        backoff.class_by_type[key[0]][c] += n;
      }
    }
    for (const auto& [key, row] : trait_counts) {
      for (const auto& [t, n] : row) backoff.trait_by_class_fsep[{key[0], key[1]}][t] += n;
    }
  }

  AffinityScorer scorer() const { return {&cooccurrence, config.unseen_pseudo}; }

  bool operator==(const TrainedModel&) const = default;
};

// ---------------------------------------------------------------------------
// Model file: one JSON document. Counts are integers; keys are emitted in
// sorted order so identical models serialize to identical bytes.

namespace detail {

using nlohmann::json;

inline json rows_to_json(const auto& rows, const auto& totals) {
  json arr = json::array();
  for (const auto& [key, row] : rows) {
    json counts = json::object();
    for (const auto& [k, v] : row) counts[k] = v;
    arr.push_back({{"context", key}, {"total", totals.at(key)}, {"counts", counts}});
  }
  return arr;
}

template <typename Key>
void rows_from_json(const json& arr, std::map<Key, CountRow>& rows,
                    std::map<Key, std::uint64_t>& totals) {
  for (const auto& item : arr) {
    Key key = item.at("context").template get<Key>();
    totals[key] = item.at("total").template get<std::uint64_t>();
    rows[key] = item.at("counts").template get<CountRow>();
  }
}

}  // namespace detail

inline std::string serialize_model(const TrainedModel& m) {
  using nlohmann::json;
  json j;
  j["format"] = "semdec-model";
  j["format_version"] = kModelFormatVersion;
  j["config"] = {{"strategy", to_string(m.config.strategy)},
                 {"window", m.config.window},
                 {"delta", m.config.delta},
                 {"unseen_pseudo", m.config.unseen_pseudo},
                 {"threshold", m.config.extraction.threshold},
                 {"max_ngram", m.config.extraction.max_ngram},
                 {"max_gap", m.config.extraction.max_gap}};

  json refs = json::array();
  for (const auto& r : m.catalogs.reference_words) {
    refs.push_back({{"tokens", r.tokens}, {"type", r.type_id}, {"weight", r.weight},
                    {"max_gap", r.max_gap}});
  }
  json traits = json::object();
  for (const auto& [c, ts] : m.catalogs.traits) traits[c] = ts;
  j["catalogs"] = {{"field", m.catalogs.field},
                   {"types", m.catalogs.types},
                   {"traits", traits},
                   {"reference_words", refs}};

  json type_table = json::array();
  for (const auto& [gram, n] : m.reference_totals) {
    auto row = m.type_counts.find(gram);
    type_table.push_back({{"ngram", gram},
                          {"total", n},
                          {"counts", row == m.type_counts.end() ? CountRow{} : row->second}});
  }
  j["type_table"] = type_table;
  j["class_table"] = detail::rows_to_json(m.class_counts, m.class_totals);
  j["class_unigram"] = m.class_unigram;
  j["trait_table"] = detail::rows_to_json(m.trait_counts, m.trait_totals);
  json senses = json::array();
  for (const auto& [s, n] : m.sense_unigram) senses.push_back({s.first, s.second, n});
  j["sense_unigram"] = senses;
  json word_senses = json::object();
  for (const auto& [w, ss] : m.word_senses) {
    json list = json::array();
    for (const auto& s : ss) list.push_back({s.first, s.second});
    word_senses[w] = list;
  }
  j["word_senses"] = word_senses;

  json joints = json::array();
  for (const auto& [pair, n] : m.cooccurrence.joints()) joints.push_back({pair.first, pair.second, n});
  j["cooccurrence"] = {{"window", m.cooccurrence.window()},
                       {"total", m.cooccurrence.total()},
                       {"marginals", m.cooccurrence.marginals()},
                       {"joints", joints}};
  return j.dump(1) + "\n";
}

// Parses and checks a model file: every conditional row must sum to its
// stored denominator.
inline TrainedModel parse_model(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "semdec-model") throw FormatError("not a semdec model file");
    int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + std::to_string(version));
    }
    TrainedModel m;
    const auto& cfg = j.at("config");
    auto strategy = parse_strategy(cfg.at("strategy").get<std::string>());
    if (!strategy) throw FormatError("unknown strategy in model file");
    m.config.strategy = *strategy;
    m.config.window = cfg.at("window").get<std::size_t>();
    m.config.delta = cfg.at("delta").get<double>();
    m.config.unseen_pseudo = cfg.at("unseen_pseudo").get<double>();
    m.config.extraction.threshold = cfg.at("threshold").get<double>();
    m.config.extraction.max_ngram = cfg.at("max_ngram").get<int>();
    m.config.extraction.max_gap = cfg.at("max_gap").get<int>();

    const auto& cat = j.at("catalogs");
    m.catalogs.field = cat.at("field").get<std::string>();
    m.catalogs.types = cat.at("types").get<std::set<std::string>>();
    for (const auto& [c, ts] : cat.at("traits").items()) {
      m.catalogs.traits[c] = ts.get<std::set<std::string>>();
    }
    for (const auto& r : cat.at("reference_words")) {
      m.catalogs.reference_words.push_back({r.at("tokens").get<Ngram>(), r.at("type").get<std::string>(),
                                            r.at("weight").get<double>(), r.at("max_gap").get<int>()});
    }

    for (const auto& item : j.at("type_table")) {
      Ngram gram = item.at("ngram").get<Ngram>();
      m.reference_totals[gram] = item.at("total").get<std::uint64_t>();
      auto counts = item.at("counts").get<CountRow>();
      if (!counts.empty()) m.type_counts[gram] = std::move(counts);
    }
    detail::rows_from_json(j.at("class_table"), m.class_counts, m.class_totals);
    m.class_unigram = j.at("class_unigram").get<CountRow>();
    detail::rows_from_json(j.at("trait_table"), m.trait_counts, m.trait_totals);
    for (const auto& s : j.at("sense_unigram")) {
      m.sense_unigram[{s.at(0).get<std::string>(), s.at(1).get<std::string>()}] =
          s.at(2).get<std::uint64_t>();
    }
    for (const auto& [w, list] : j.at("word_senses").items()) {
      auto& ss = m.word_senses[w];
      for (const auto& s : list) ss.insert({s.at(0).get<std::string>(), s.at(1).get<std::string>()});
    }

    const auto& co = j.at("cooccurrence");
    std::map<std::pair<std::string, std::string>, std::uint64_t> joints;
    for (const auto& t : co.at("joints")) {
      joints[{t.at(0).get<std::string>(), t.at(1).get<std::string>()}] = t.at(2).get<std::uint64_t>();
    }
    m.cooccurrence = CooccurrenceStats::from_counts(
        co.at("window").get<std::size_t>(), co.at("total").get<std::uint64_t>(),
        co.at("marginals").get<CountRow>(), std::move(joints));

    auto check_rows = [](const auto& rows, const auto& totals, const char* name) {
      for (const auto& [key, row] : rows) {
        std::uint64_t s = 0;
        for (const auto& [_, v] : row) s += v;
        if (s != totals.at(key)) {
          throw FormatError(std::string(name) + " row does not sum to its total");
        }
      }
    };
    check_rows(m.type_counts, m.reference_totals, "type_table");
    for (const auto& [gram, n] : m.reference_totals) {
      if (n > 0 && !m.type_counts.count(gram)) throw FormatError("type_table row does not sum to its total");
    }
    check_rows(m.class_counts, m.class_totals, "class_table");
    check_rows(m.trait_counts, m.trait_totals, "trait_table");
    m.derive_backoff();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

inline TrainedModel read_model(const std::filesystem::path& path) {
  return parse_model(detail::read_file(path));
}

inline void write_model(const std::filesystem::path& path, const TrainedModel& m) {
  detail::write_file_atomic(path, serialize_model(m));
}

}  // namespace semdec

#endif  // SEMDEC_MODEL_HPP
