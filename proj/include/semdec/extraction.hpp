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

#ifndef SEMDEC_EXTRACTION_HPP
#define SEMDEC_EXTRACTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semdec/corpus.hpp"
#include "semdec/text_io.hpp"

namespace semdec {

using Ngram = std::vector<std::string>;

inline constexpr int kDefaultMaxGap = 3;

// Number of ordered position tuples p1 < ... < pm in `tokens` spelling
// `ngram`, with at most `max_gap` tokens between consecutive components.
// With max_gap = 0 this is the ordinary contiguous n-gram count.
inline std::uint64_t count_matches(const std::vector<std::string>& tokens, const Ngram& ngram,
                                   int max_gap) {
  if (ngram.empty()) return 0;
  // ways[p] = number of partial matches of ngram[0..k] ending at p.
  std::vector<std::uint64_t> ways(tokens.size(), 0);
  for (std::size_t p = 0; p < tokens.size(); ++p) ways[p] = tokens[p] == ngram[0] ? 1 : 0;
  for (std::size_t k = 1; k < ngram.size(); ++k) {
    std::vector<std::uint64_t> next(tokens.size(), 0);
    for (std::size_t p = 0; p < tokens.size(); ++p) {
      if (tokens[p] != ngram[k]) continue;
      std::size_t lo = p >= static_cast<std::size_t>(max_gap) + 1 ? p - max_gap - 1 : 0;
      for (std::size_t q = lo; q < p; ++q) next[p] += ways[q];
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

// The adapted TfxIdf weight from raw statistics:
//   tf * ln(n / df) / (tf + 0.5 + 1.5 * (l_j / avg_l) * ln(n + 1))
// where avg_l is the mean type length total_length / n.
inline double adapted_tfidf(std::uint64_t tf, std::uint64_t df, std::size_t n_types,
                            std::uint64_t type_length, std::uint64_t total_length) {
  if (tf == 0 || df == 0 || df >= n_types) return 0.0;
  const double n = static_cast<double>(n_types);
  const double avg_l = static_cast<double>(total_length) / n;
  const double rel_len = avg_l > 0 ? static_cast<double>(type_length) / avg_l : 0.0;
  const double t = static_cast<double>(tf);
  return t * std::log(n / static_cast<double>(df)) / (t + 0.5 + 1.5 * rel_len * std::log(n + 1.0));
}

struct TermWeight {
  double value = 0.0;
  // The term occurs nowhere in the corpus (df = 0); value is 0.
  bool absent = false;
};

// Weight of `term` for type `type_id` over the whole corpus.
inline TermWeight tfidf_weight(const Ngram& term, const std::string& type_id,
                               const TypedCorpus& corpus, int max_gap = kDefaultMaxGap) {
  if (term.empty()) throw std::invalid_argument("tfidf_weight: empty term");
  if (corpus.types.empty()) throw std::invalid_argument("tfidf_weight: corpus has no types");
  corpus.type_index(type_id);

  std::map<std::string, std::uint64_t> length;
  std::set<std::string> containing;
  std::uint64_t tf = 0;
  std::uint64_t total_length = 0;
  for (const auto& u : corpus.utterances) {
    length[u.type_id] += u.tokens.size();
    total_length += u.tokens.size();
    std::uint64_t c = count_matches(u.tokens, term, max_gap);
    if (c > 0) containing.insert(u.type_id);
    if (u.type_id == type_id) tf += c;
  }
  TermWeight w;
  w.absent = containing.empty();
  w.value = adapted_tfidf(tf, containing.size(), corpus.types.size(), length[type_id], total_length);
  return w;
}

struct ReferenceWord {
  Ngram tokens;
  std::string type_id;
  double weight = 0.0;
  int max_gap = 0;

  bool operator==(const ReferenceWord&) const = default;
};

struct ExtractionConfig {
  double threshold = 0.0;
  int max_ngram = 3;
  int max_gap = kDefaultMaxGap;
};

namespace detail {

// Calls fn(ngram, widest_gap) for every gapped match tuple of length m in
// `tokens`; widest_gap is the largest number of tokens skipped between two
// consecutive components of that tuple.
template <typename Fn>
void for_each_match(const std::vector<std::string>& tokens, std::size_t m, int max_gap, Fn&& fn) {
  Ngram current;
  auto rec = [&](auto&& self, std::size_t from, std::size_t limit, int widest) -> void {
    if (current.size() == m) {
      fn(static_cast<const Ngram&>(current), widest);
      return;
    }
    for (std::size_t p = from; p < limit && p < tokens.size(); ++p) {
      int gap = current.empty() ? 0 : static_cast<int>(p - from);
      current.push_back(tokens[p]);
      self(self, p + 1, p + 2 + static_cast<std::size_t>(max_gap), std::max(widest, gap));
      current.pop_back();
    }
  };
  rec(rec, 0, tokens.size(), 0);
}

}  // namespace detail

// Reference words per type: every 1..max_ngram gram (gapped up to max_gap)
// whose weight exceeds the threshold, heaviest first. Every corpus type
// gets a (possibly empty) list.
inline std::map<std::string, std::vector<ReferenceWord>> extract_reference_words(
    const TypedCorpus& corpus, const ExtractionConfig& cfg = {}) {
  if (cfg.threshold < 0) throw std::invalid_argument("threshold must be >= 0");
  if (cfg.max_ngram < 1 || cfg.max_ngram > 3) throw std::invalid_argument("max_ngram must be 1..3");
  if (cfg.max_gap < 0) throw std::invalid_argument("max_gap must be >= 0");

  std::map<std::string, std::vector<ReferenceWord>> out;
  if (corpus.utterances.empty()) return out;
  for (const auto& t : corpus.types) out[t];

  std::map<std::string, std::uint64_t> length;
  std::uint64_t total_length = 0;
  // tf[ngram][type]
  std::map<Ngram, std::map<std::string, std::uint64_t>> tf;
  for (const auto& u : corpus.utterances) {
    length[u.type_id] += u.tokens.size();
    total_length += u.tokens.size();
    for (int m = 1; m <= cfg.max_ngram; ++m) {
      detail::for_each_match(u.tokens, static_cast<std::size_t>(m), cfg.max_gap,
                             [&](const Ngram& g, int) { ++tf[g][u.type_id]; });
    }
  }

  for (const auto& [gram, per_type] : tf) {
    for (const auto& [type_id, count] : per_type) {
      double w = adapted_tfidf(count, per_type.size(), corpus.types.size(), length[type_id],
                               total_length);
      if (w > cfg.threshold) {
        out[type_id].push_back({gram, type_id, w, gram.size() > 1 ? cfg.max_gap : 0});
      }
    }
  }
  for (auto& [_, refs] : out) {
    std::sort(refs.begin(), refs.end(), [](const ReferenceWord& a, const ReferenceWord& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.tokens < b.tokens;
    });
  }
  return out;
}

// "type_id<TAB>ngram<TAB>weight" lines, grouped by type.
inline std::string serialize_reference_words(
    const std::map<std::string, std::vector<ReferenceWord>>& refs) {
  std::string out;
  for (const auto& [type_id, list] : refs) {
    for (const auto& r : list) {
      out += type_id + '\t' + detail::join(r.tokens, " ") + '\t' + detail::format_double(r.weight) +
             '\n';
    }
  }
  return out;
}

inline std::vector<ReferenceWord> parse_reference_words(std::string_view text,
                                                        int max_gap = kDefaultMaxGap) {
  std::vector<ReferenceWord> out;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw FormatError("reference word needs 'type<TAB>ngram[<TAB>weight]'", lineno);
    }
    ReferenceWord r;
    r.type_id = nfc(detail::trim(cols[0]));
    r.tokens = detail::split_ws(nfc(cols[1]));
    if (r.type_id.empty() || r.tokens.empty() || r.tokens.size() > 3) {
      throw FormatError("reference word must have a type and 1-3 tokens", lineno);
    }
    if (cols.size() == 3) {
      try {
        r.weight = std::stod(cols[2]);
      } catch (const std::exception&) {
        throw FormatError("bad weight '" + cols[2] + "'", lineno);
      }
    }
    r.max_gap = r.tokens.size() > 1 ? max_gap : 0;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace semdec

#endif  // SEMDEC_EXTRACTION_HPP
