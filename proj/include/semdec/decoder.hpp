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

#ifndef SEMDEC_DECODER_HPP
#define SEMDEC_DECODER_HPP

#include <algorithm>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "semdec/affinity.hpp"
#include "semdec/corpus.hpp"
#include "semdec/extraction.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/model.hpp"
#include "semdec/preprocess.hpp"

namespace semdec {

using Distribution = std::map<std::string, double>;

// Context of word `i` given the labeled prefix, under the model's strategy.
inline PertinentContext select_context(ContextStrategy strategy, const AffinityScorer& scorer,
                                       std::span<const LabeledWord> prefix,
                                       const std::string& target) {
  switch (strategy) {
    case ContextStrategy::kLex:
    case ContextStrategy::kLexType:
      return {};
    case ContextStrategy::kFixed1:
      return fixed_context(prefix, 1);
    case ContextStrategy::kFixed2:
      return fixed_context(prefix, 2);
    case ContextStrategy::kPertinent:
      break;
  }
  return pertinent_context(scorer, prefix, target);
}

inline ClassContextKey class_key(const TrainedModel& m, const std::string& type_id,
                                 const PertinentContext& ctx) {
  return {uses_type(m.config.strategy) ? type_id : kAnyType, ctx.cp1, ctx.cp2};
}

inline TraitContextKey trait_key(const std::string& semantic_class, const PertinentContext& ctx) {
  return {semantic_class, ctx.fsep_class, ctx.fsep_trait};
}

// Calls fn(reference word) once per match tuple of a catalog reference word
// in `tokens` (the same tuples count_matches counts).
template <typename Fn>
void for_each_reference_match(const TrainedModel& m, const std::vector<std::string>& tokens,
                              Fn&& fn) {
  const auto& index = m.backoff.reference_gap;
  if (index.empty()) return;
  for (std::size_t len = 1; len <= m.backoff.longest_reference; ++len) {
    detail::for_each_match(tokens, len, m.backoff.widest_reference_gap,
                           [&](const Ngram& g, int widest) {
                             auto it = index.find(g);
                             if (it != index.end() && widest <= it->second) fn(it->first);
                           });
  }
}

// Fills every count table in one pass over the corpus. Each word's context
// comes from its gold-labeled prefix.
inline TrainedModel train(const LabeledCorpus& corpus, const Lexicon& lexicon, Catalogs catalogs,
                          const TrainConfig& config = {}) {
  if (config.delta < 0) throw std::invalid_argument("delta must be >= 0");
  if (config.window < 1) throw std::invalid_argument("window must be >= 1");

  for (std::size_t u = 0; u < corpus.utterances.size(); ++u) {
    const auto& utt = corpus.utterances[u];
    auto where = "utterance " + std::to_string(u + 1);
    if (!catalogs.types.count(utt.type_id)) {
      throw std::invalid_argument(where + ": type '" + utt.type_id + "' is not in the catalog");
    }
    for (const auto& w : utt.words) {
      if (w.semantic_class == kBegin || !catalogs.traits.count(w.semantic_class)) {
        throw std::invalid_argument(where + ": class '" + w.semantic_class +
                                    "' is not in the catalog");
      }
      if (!catalogs.has_sense(w.semantic_class, w.micro_trait)) {
        throw std::invalid_argument(where + ": trait '" + w.micro_trait + "' of class '" +
                                    w.semantic_class + "' is not in the catalog");
      }
    }
  }

  TrainedModel m;
  m.config = config;
  if (catalogs.reference_words.empty() && !corpus.utterances.empty()) {
    for (auto& [_, refs] : extract_reference_words(corpus.typed(), config.extraction)) {
      for (auto& r : refs) catalogs.reference_words.push_back(std::move(r));
    }
  }
  m.catalogs = std::move(catalogs);

  m.cooccurrence = CooccurrenceStats(config.window);
  for (const auto& utt : corpus.utterances) m.cooccurrence.add_utterance(utt.surfaces());

  m.derive_backoff();
  for (const auto& [gram, _] : m.backoff.reference_gap) m.reference_totals[gram] = 0;

  const AffinityScorer scorer = m.scorer();
  for (const auto& utt : corpus.utterances) {
    for_each_reference_match(m, utt.surfaces(), [&](const Ngram& gram) {
      ++m.type_counts[gram][utt.type_id];
      ++m.reference_totals[gram];
    });

    std::span<const LabeledWord> words(utt.words);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto& w = words[i];
      auto ctx = select_context(config.strategy, scorer, words.first(i), w.surface);
      auto ck = class_key(m, utt.type_id, ctx);
      ++m.class_counts[ck][w.semantic_class];
      ++m.class_totals[ck];
      ++m.class_unigram[w.semantic_class];
      auto tk = trait_key(w.semantic_class, ctx);
      ++m.trait_counts[tk][w.micro_trait];
      ++m.trait_totals[tk];
      ++m.sense_unigram[{w.semantic_class, w.micro_trait}];
      m.word_senses[w.surface].insert({w.semantic_class, w.micro_trait});
    }
  }
  for (const auto& [surface, e] : lexicon.entries()) {
    if (m.catalogs.has_sense(e.fse.semantic_class, e.fse.micro_trait)) {
      m.word_senses[surface].insert({e.fse.semantic_class, e.fse.micro_trait});
    }
  }
  m.derive_backoff();
  return m;
}

// Utterance-type distribution from the reference words present. Each match
// contributes N(type, Mr) / N(Mr); matches combine by product and are
// renormalized. Without matches the result is uniform. When every product
// is zero (matches point to disjoint types) the per-match distributions
// are averaged instead.
inline Distribution prob_type(const TrainedModel& m, const std::vector<std::string>& tokens) {
  Distribution uniform;
  for (const auto& t : m.catalogs.types) {
    uniform[t] = 1.0 / static_cast<double>(m.catalogs.types.size());
  }

  std::set<Ngram> present;
  for_each_reference_match(m, tokens, [&](const Ngram& g) { present.insert(g); });

  std::vector<Distribution> matches;
  for (const auto& gram : present) {
    auto total = m.reference_totals.find(gram);
    if (total == m.reference_totals.end() || total->second == 0) continue;
    Distribution d;
    const auto& row = m.type_counts.at(gram);
    for (const auto& t : m.catalogs.types) {
      auto it = row.find(t);
      d[t] = it == row.end() ? 0.0
                             : static_cast<double>(it->second) / static_cast<double>(total->second);
    }
    matches.push_back(std::move(d));
  }
  if (matches.empty()) return uniform;

  auto normalize = [](Distribution& d) {
    double s = 0;
    for (const auto& [_, p] : d) s += p;
    if (s <= 0) return false;
    for (auto& [_, p] : d) p /= s;
    return true;
  };

  Distribution product;
  for (const auto& t : m.catalogs.types) product[t] = 1.0;
  for (const auto& d : matches) {
    for (auto& [t, p] : product) p *= d.at(t);
  }
  if (normalize(product)) return product;

  Distribution mixture;
  for (const auto& t : m.catalogs.types) mixture[t] = 0.0;
  for (const auto& d : matches) {
    for (auto& [t, p] : mixture) p += d.at(t);
  }
  normalize(mixture);
  return mixture;
}

namespace detail {

inline std::uint64_t mass(const CountRow& row, const std::set<std::string>& support) {
  std::uint64_t n = 0;
  for (const auto& x : support) {
    auto it = row.find(x);
    if (it != row.end()) n += it->second;
  }
  return n;
}

// Add-delta estimate (row[x] + delta) / (N + delta * |support|) from the
// first row in `chain` with positive mass on the support; uniform when
// every row is empty.
inline Distribution smoothed(const std::set<std::string>& support,
                             std::initializer_list<const CountRow*> chain, double delta) {
  const CountRow* use = nullptr;
  std::uint64_t denom = 0;
  for (const CountRow* row : chain) {
    if (row == nullptr) continue;
    denom = mass(*row, support);
    if (denom > 0) {
      use = row;
      break;
    }
  }
  Distribution d;
  const double k = static_cast<double>(support.size());
  const double z = static_cast<double>(denom) + delta * k;
  for (const auto& x : support) {
    double c = 0.0;
    if (use) {
      auto it = use->find(x);
      if (it != use->end()) c = static_cast<double>(it->second);
    }
    d[x] = z > 0 ? (c + delta) / z : 1.0 / k;
  }
  return d;
}

template <typename Map, typename Key>
const CountRow* find_row(const Map& map, const Key& key) {
  auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

}  // namespace detail

// P(C | type, cp1, cp2) over every catalog class. An unseen context backs
// off to (type, cp1), then to the type alone, then to the class unigram.
inline Distribution prob_class(const TrainedModel& m, const std::string& type_id,
                               const std::string& cp1, const std::string& cp2) {
  PertinentContext ctx;
  ctx.cp1 = cp1;
  ctx.cp2 = cp2;
  auto key = class_key(m, type_id, ctx);
  return detail::smoothed(m.backoff.classes,
                          {detail::find_row(m.class_counts, key),
                           detail::find_row(m.backoff.class_by_type_cp1, std::pair{key[0], key[1]}),
                           detail::find_row(m.backoff.class_by_type, key[0]), &m.class_unigram},
                          m.config.delta);
}

// P(TM | C, FSeP) over the traits of class C. The numerator counts the full
// (C, TM) pair, so the ratio is a proper conditional. Unseen contexts back
// off to (C, FSeP class) and then to the sense unigram of C.
inline Distribution prob_trait(const TrainedModel& m, const std::string& semantic_class,
                               const std::string& fsep_class, const std::string& fsep_trait) {
  auto traits = m.catalogs.traits.find(semantic_class);
  if (traits == m.catalogs.traits.end() || traits->second.empty()) {
    throw std::invalid_argument("class '" + semantic_class + "' has no known traits");
  }
  CountRow unigram;
  for (const auto& t : traits->second) {
    auto it = m.sense_unigram.find({semantic_class, t});
    if (it != m.sense_unigram.end()) unigram[t] = it->second;
  }
  TraitContextKey key{semantic_class, fsep_class, fsep_trait};
  return detail::smoothed(
      traits->second,
      {detail::find_row(m.trait_counts, key),
       detail::find_row(m.backoff.trait_by_class_fsep, std::pair{semantic_class, fsep_class}),
       &unigram},
      m.config.delta);
}

struct DecodedWord {
  std::string surface;
  std::string semantic_class;
  std::string micro_trait;
  double probability = 0.0;

  bool operator==(const DecodedWord&) const = default;
};

struct DecodedUtterance {
  std::string type_id;
  double type_probability = 0.0;
  Distribution type_distribution;
  std::vector<DecodedWord> labels;
  std::vector<std::string> skipped;
  // Application field stamped on every label.
  std::string field;

  bool operator==(const DecodedUtterance&) const = default;

  LabeledUtterance labeled() const {
    LabeledUtterance u{type_id, {}};
    for (const auto& l : labels) u.words.push_back({l.surface, l.semantic_class, l.micro_trait});
    return u;
  }
};

// Senses considered for a surface: those seen in training or given by the
// lexicon; the full catalog grid when there are none.
inline std::vector<Sense> candidate_senses(const TrainedModel& m, const Lexicon& lexicon,
                                           const std::string& surface) {
  std::set<Sense> out;
  if (auto it = m.word_senses.find(surface); it != m.word_senses.end()) {
    out.insert(it->second.begin(), it->second.end());
  }
  if (auto e = lexicon.lookup(surface)) {
    if (m.catalogs.has_sense(e->fse.semantic_class, e->fse.micro_trait)) {
      out.insert({e->fse.semantic_class, e->fse.micro_trait});
    }
  }
  if (out.empty()) {
    for (const auto& [c, ts] : m.catalogs.traits) {
      for (const auto& t : ts) out.insert({c, t});
    }
  }
  return {out.begin(), out.end()};
}

// Labels the significant tokens left to right. The utterance type is fixed
// once; each word takes the sense maximizing
//   P(type | Mr) * P(C | type, cp1, cp2) * P(TM | C, FSeP)
// with the context chosen from the already-decoded prefix.
inline DecodedUtterance decode(const TrainedModel& m, const Lexicon& lexicon,
                               const std::vector<std::string>& tokens) {
  DecodedUtterance out;
  out.field = m.catalogs.field;
  out.type_distribution = prob_type(m, tokens);
  for (const auto& [t, p] : out.type_distribution) {
    if (out.type_id.empty() || p > out.type_probability) {
      out.type_id = t;
      out.type_probability = p;
    }
  }
  const double type_factor = uses_type(m.config.strategy) ? out.type_probability : 1.0;

  const AffinityScorer scorer = m.scorer();
  std::vector<LabeledWord> prefix;
  for (const auto& surface : tokens) {
    auto ctx = select_context(m.config.strategy, scorer, prefix, surface);
    auto classes = prob_class(m, out.type_id, ctx.cp1, ctx.cp2);
    std::map<std::string, Distribution> trait_dists;

    DecodedWord best{surface, "", "", -1.0};
    for (const auto& [c, t] : candidate_senses(m, lexicon, surface)) {
      auto td = trait_dists.find(c);
      if (td == trait_dists.end()) {
        td = trait_dists.emplace(c, prob_trait(m, c, ctx.fsep_class, ctx.fsep_trait)).first;
      }
      double p = type_factor * classes.at(c) * td->second.at(t);
      if (p > best.probability) best = {surface, c, t, p};
    }
    prefix.push_back({surface, best.semantic_class, best.micro_trait});
    out.labels.push_back(std::move(best));
  }
  return out;
}

inline DecodedUtterance decode(const TrainedModel& m, const Lexicon& lexicon,
                               const std::vector<Token>& tokens) {
  return decode(m, lexicon, surfaces(tokens));
}

// Raw utterance text through preprocessing and decoding.
inline DecodedUtterance analyze(const TrainedModel& m, const Lexicon& lexicon,
                                const PreprocessConfig& pre, std::string_view raw) {
  auto filtered = filter_tokens(tokenize(raw, pre), pre);
  auto out = decode(m, lexicon, filtered.kept);
  out.skipped = surfaces(filtered.skipped);
  return out;
}

}  // namespace semdec

#endif  // SEMDEC_DECODER_HPP
