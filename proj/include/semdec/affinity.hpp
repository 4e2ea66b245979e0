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

#ifndef SEMDEC_AFFINITY_HPP
#define SEMDEC_AFFINITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semdec/corpus.hpp"

namespace semdec {

// Reserved class and trait filling context slots before the first word.
inline const std::string kBegin = "<BEGIN>";

// 2x2 cell probabilities for the indicators of two words w and v.
struct JointTable {
  double both = 0;      // w and v
  double only_w = 0;    // w, not v
  double only_v = 0;    // v, not w
  double neither = 0;

  double sum() const { return both + only_w + only_v + neither; }
};

// Mutual information (bits) of two binary indicators given their joint
// table: the four-cell sum of p * log2(p / (row * col)), with 0 log 0 = 0.
inline double average_mutual_information(const JointTable& t) {
  const double pw = t.both + t.only_w;
  const double pnw = t.only_v + t.neither;
  const double pv = t.both + t.only_v;
  const double pnv = t.only_w + t.neither;
  auto term = [](double p, double row, double col) {
    return p > 0 ? p * std::log2(p / (row * col)) : 0.0;
  };
  // Grouped so that swapping w and v gives bit-identical results; the
  // clamp removes rounding residue below zero.
  return std::max(0.0, (term(t.both, pw, pv) + term(t.neither, pnw, pnv)) +
                           (term(t.only_w, pw, pnv) + term(t.only_v, pnw, pv)));
}

// Co-occurrence statistics over sliding windows. Every token position i of
// an utterance is one observation whose window is the token at i and its
// `window` predecessors. A word "occurs" in an observation when it is in
// that window; two words co-occur when both are. All four cell counts of a
// pair are therefore over the same observations.
class CooccurrenceStats {
 public:
  CooccurrenceStats() = default;
  explicit CooccurrenceStats(std::size_t window) : window_(window) {}

  void add_utterance(const std::vector<std::string>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::size_t lo = i >= window_ ? i - window_ : 0;
      std::set<std::string> seen(tokens.begin() + static_cast<std::ptrdiff_t>(lo),
                                 tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      ++total_;
      for (const auto& w : seen) ++marginal_[w];
      for (auto a = seen.begin(); a != seen.end() && std::next(a) != seen.end(); ++a) {
        auto& row = joint_[*a];
        for (auto b = std::next(a); b != seen.end(); ++b) ++row[*b];
      }
    }
  }

  template <typename Corpus>
  static CooccurrenceStats from_corpus(const Corpus& utterances, std::size_t window) {
    CooccurrenceStats s(window);
    for (const auto& u : utterances) s.add_utterance(u);
    return s;
  }

  std::size_t window() const { return window_; }
  std::uint64_t total() const { return total_; }

  std::uint64_t count(const std::string& w) const {
    auto it = marginal_.find(w);
    return it == marginal_.end() ? 0 : it->second;
  }

  std::uint64_t joint(const std::string& w, const std::string& v) const {
    if (w == v) return count(w);
    const auto& lo = w < v ? w : v;
    const auto& hi = w < v ? v : w;
    auto row = joint_.find(lo);
    if (row == joint_.end()) return 0;
    auto it = row->second.find(hi);
    return it == row->second.end() ? 0 : it->second;
  }

  // Cell probabilities, optionally with `pseudo` added to each cell count.
  JointTable table(const std::string& w, const std::string& v, double pseudo = 0.0) const {
    const double a = static_cast<double>(joint(w, v));
    const double b = static_cast<double>(count(w)) - a;
    const double c = static_cast<double>(count(v)) - a;
    const double d = static_cast<double>(total_) - a - b - c;
    const double n = static_cast<double>(total_) + 4 * pseudo;
    return {(a + pseudo) / n, (b + pseudo) / n, (c + pseudo) / n, (d + pseudo) / n};
  }

  const std::map<std::string, std::uint64_t>& marginals() const { return marginal_; }
  // Joint counts of distinct pairs, keyed (lesser, greater).
  std::map<std::pair<std::string, std::string>, std::uint64_t> joints() const {
    std::map<std::pair<std::string, std::string>, std::uint64_t> out;
    for (const auto& [a, row] : joint_) {
      for (const auto& [b, n] : row) out[{a, b}] = n;
    }
    return out;
  }

  // Rebuilds from stored counts (model loading).
  static CooccurrenceStats from_counts(std::size_t window, std::uint64_t total,
                                       std::map<std::string, std::uint64_t> marginal,
                                       std::map<std::pair<std::string, std::string>, std::uint64_t> joint) {
    CooccurrenceStats s(window);
    s.total_ = total;
    s.marginal_ = std::move(marginal);
    for (auto& [pair, n] : joint) {
      const auto& [a, b] = pair;
      s.joint_[a < b ? a : b][a < b ? b : a] = n;
    }
    return s;
  }

  bool operator==(const CooccurrenceStats&) const = default;

 private:
  std::size_t window_ = 5;
  std::uint64_t total_ = 0;
  std::map<std::string, std::uint64_t> marginal_;
  // joint_[a][b] with a < b.
  std::map<std::string, std::map<std::string, std::uint64_t>> joint_;
};

struct MiScore {
  double bits = 0.0;
  // Neither word was ever observed; bits is 0 by convention.
  bool degenerate = false;
};

// Average mutual information of the occurrence indicators of w and v.
inline MiScore im_avg(const CooccurrenceStats& stats, const std::string& w, const std::string& v,
                      double pseudo = 0.0) {
  if (stats.total() == 0) throw std::invalid_argument("im_avg: no observations");
  if (stats.count(w) == 0 && stats.count(v) == 0) return {0.0, true};
  return {average_mutual_information(stats.table(w, v, pseudo)), false};
}

// Pointwise mutual information log2(P(w,v) / (P(w) P(v))); -inf when the
// pair never co-occurs.
inline double im_pointwise(const CooccurrenceStats& stats, const std::string& w,
                           const std::string& v) {
  if (stats.count(w) == 0 || stats.count(v) == 0) {
    throw std::invalid_argument("im_pointwise: P(w) and P(v) must be positive");
  }
  const double n = static_cast<double>(stats.total());
  const double joint = static_cast<double>(stats.joint(w, v)) / n;
  if (joint == 0) return -std::numeric_limits<double>::infinity();
  const double pw = static_cast<double>(stats.count(w)) / n;
  const double pv = static_cast<double>(stats.count(v)) / n;
  return std::log2(joint / (pw * pv));
}

// Affinity used to rank context words: average MI, with add-`pseudo`
// smoothing of the four cells for pairs never seen together.
struct AffinityScorer {
  const CooccurrenceStats* stats = nullptr;
  double unseen_pseudo = 0.5;

  double operator()(const std::string& target, const std::string& candidate) const {
    if (stats->total() == 0) return 0.0;
    double pseudo = stats->joint(target, candidate) == 0 ? unseen_pseudo : 0.0;
    return im_avg(*stats, target, candidate, pseudo).bits;
  }
};

struct Affinity {
  std::size_t position = 0;
  double score = 0.0;

  bool operator==(const Affinity&) const = default;
};

// Index of the maximum score; equal maxima resolve to the latest index.
inline std::size_t select_max(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("select_max: no scores");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] >= scores[best]) best = j;
  }
  return best;
}

// Strongest-affinity candidate for `target` among the preceding words.
inline Affinity max_affinity(const AffinityScorer& scorer, const std::string& target,
                             std::span<const std::string> candidates) {
  if (candidates.empty()) throw std::invalid_argument("max_affinity: no candidates");
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(scorer(target, c));
  std::size_t j = select_max(scores);
  return {j, scores[j]};
}

// Context fed to the class and trait estimators for one word.
struct PertinentContext {
  std::string cp1 = kBegin;
  std::string cp2 = kBegin;
  // Class and trait of the strongest-affinity word (fsep_class == cp1).
  std::string fsep_class = kBegin;
  std::string fsep_trait = kBegin;
  // Prefix positions supplying cp1 and cp2, strongest first.
  std::vector<std::size_t> sources;

  bool operator==(const PertinentContext&) const = default;
};

// Ranks the labeled prefix by affinity with the target (ties go to the
// nearer word) and takes the top two.
inline PertinentContext pertinent_context(const AffinityScorer& scorer,
                                          std::span<const LabeledWord> prefix,
                                          const std::string& target) {
  PertinentContext ctx;
  if (prefix.empty()) return ctx;
  std::vector<double> scores;
  scores.reserve(prefix.size());
  for (const auto& w : prefix) scores.push_back(scorer(target, w.surface));
  std::vector<std::size_t> order(prefix.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a > b;
  });
  const auto& top = prefix[order[0]];
  ctx.cp1 = top.semantic_class;
  ctx.fsep_class = top.semantic_class;
  ctx.fsep_trait = top.micro_trait;
  ctx.sources.push_back(order[0]);
  if (order.size() > 1) {
    ctx.cp2 = prefix[order[1]].semantic_class;
    ctx.sources.push_back(order[1]);
  }
  return ctx;
}

// The literal previous `depth` words (1 or 2) as context.
inline PertinentContext fixed_context(std::span<const LabeledWord> prefix, int depth) {
  PertinentContext ctx;
  if (depth >= 1 && !prefix.empty()) {
    const auto& prev = prefix.back();
    ctx.cp1 = prev.semantic_class;
    ctx.fsep_class = prev.semantic_class;
    ctx.fsep_trait = prev.micro_trait;
    ctx.sources.push_back(prefix.size() - 1);
  }
  if (depth >= 2 && prefix.size() >= 2) {
    ctx.cp2 = prefix[prefix.size() - 2].semantic_class;
    ctx.sources.push_back(prefix.size() - 2);
  }
  return ctx;
}

}  // namespace semdec

#endif  // SEMDEC_AFFINITY_HPP
