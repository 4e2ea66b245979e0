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

#ifndef SEMDEC_KMEANS_HPP
#define SEMDEC_KMEANS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "semdec/corpus.hpp"
#include "semdec/text_io.hpp"

namespace semdec {

struct WordClass {
  std::string class_id;
  std::vector<std::string> members;

  bool operator==(const WordClass&) const = default;
};

struct ClassCatalog {
  std::vector<WordClass> classes;
  std::size_t k = 0;
  // Sum of squared distances after each Lloyd iteration of the kept run.
  std::vector<double> objective_trace;

  bool operator==(const ClassCatalog&) const = default;
};

struct KMeansConfig {
  std::size_t k = 2;
  int max_iters = 100;
  std::uint64_t seed = 0;
  // Number of most frequent words used as embedding dimensions.
  std::size_t context_vocab = 100;
  // Co-occurrence window radius in tokens.
  std::size_t window = 2;
  // Independent seeded restarts; the lowest final objective wins.
  int restarts = 10;
};

// Co-occurrence embedding: one row per vocabulary word (sorted), one column
// per frequent context word.
struct WordEmbedding {
  std::vector<std::string> vocabulary;
  std::vector<std::string> context_words;
  std::vector<std::vector<double>> rows;
};

inline WordEmbedding embed_words(const TypedCorpus& corpus, std::size_t context_vocab,
                                 std::size_t window) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& u : corpus.utterances) {
    for (const auto& t : u.tokens) ++freq[t];
  }
  WordEmbedding emb;
  for (const auto& [w, _] : freq) emb.vocabulary.push_back(w);

  std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > context_vocab) ranked.resize(context_vocab);
  std::map<std::string, std::size_t> column;
  for (const auto& [w, _] : ranked) {
    column[w] = emb.context_words.size();
    emb.context_words.push_back(w);
  }

  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < emb.vocabulary.size(); ++i) row[emb.vocabulary[i]] = i;
  emb.rows.assign(emb.vocabulary.size(), std::vector<double>(emb.context_words.size(), 0.0));
  for (const auto& u : corpus.utterances) {
    const auto& toks = u.tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      std::size_t lo = i >= window ? i - window : 0;
      std::size_t hi = std::min(toks.size(), i + window + 1);
      for (std::size_t j = lo; j < hi; ++j) {
        if (j == i) continue;
        auto c = column.find(toks[j]);
        if (c != column.end()) emb.rows[row[toks[i]]][c->second] += 1.0;
      }
    }
  }
  return emb;
}

namespace detail {

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct LloydRun {
  std::vector<std::size_t> assignment;
  std::vector<double> trace;
};

inline LloydRun lloyd(const std::vector<std::vector<double>>& points, std::size_t k, int max_iters,
                      std::mt19937_64& rng) {
  const std::size_t n = points.size();
  const std::size_t dim = points.empty() ? 0 : points[0].size();

  // k distinct starting points, uniform without replacement.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<std::vector<double>> centroids;
  for (std::size_t i = 0; i < k; ++i) centroids.push_back(points[idx[i]]);

  LloydRun run;
  run.assignment.assign(n, k);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<std::size_t> next(n);
    std::vector<double> dist(n);
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d = squared_distance(points[p], centroids[c]);
        if (d < best_d) {  // strict: ties keep the lowest index
          best_d = d;
          best = c;
        }
      }
      next[p] = best;
      dist[p] = best_d;
    }

    // An empty cluster takes the point farthest from its centroid, drawn
    // from a cluster that can spare one.
    std::vector<std::size_t> sizes(k, 0);
    for (auto c : next) ++sizes[c];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t p = 0; p < n; ++p) {
        if (sizes[next[p]] < 2) continue;
        if (far == n || dist[p] > dist[far]) far = p;
      }
      --sizes[next[far]];
      next[far] = c;
      dist[far] = 0;
      ++sizes[c];
    }

    bool changed = next != run.assignment;
    run.assignment = std::move(next);

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t d = 0; d < dim; ++d) centroids[run.assignment[p]][d] += points[p][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (auto& v : centroids[c]) v /= static_cast<double>(sizes[c]);
    }
    double objective = 0;
    for (std::size_t p = 0; p < n; ++p) {
      objective += squared_distance(points[p], centroids[run.assignment[p]]);
    }
    run.trace.push_back(objective);
    if (!changed) break;
  }
  return run;
}

}  // namespace detail

// Partitions the corpus vocabulary into k semantic classes with Lloyd's
// algorithm over co-occurrence vectors. Classes are named class_1..class_k
// in order of their alphabetically first member.
inline ClassCatalog kmeans_classes(const TypedCorpus& corpus, const KMeansConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("k must be >= 1");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  WordEmbedding emb = embed_words(corpus, cfg.context_vocab, cfg.window);
  if (emb.vocabulary.size() < cfg.k) {
    throw std::invalid_argument("vocabulary size " + std::to_string(emb.vocabulary.size()) +
                                " is smaller than k = " + std::to_string(cfg.k));
  }

  std::mt19937_64 rng(cfg.seed);
  detail::LloydRun best;
  for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
    auto run = detail::lloyd(emb.rows, cfg.k, cfg.max_iters, rng);
    if (best.trace.empty() || run.trace.back() < best.trace.back()) best = std::move(run);
  }

  std::vector<std::vector<std::string>> groups(cfg.k);
  for (std::size_t p = 0; p < emb.vocabulary.size(); ++p) {
    groups[best.assignment[p]].push_back(emb.vocabulary[p]);
  }
  std::sort(groups.begin(), groups.end());

  ClassCatalog catalog;
  catalog.k = cfg.k;
  catalog.objective_trace = best.trace;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    catalog.classes.push_back({"class_" + std::to_string(c + 1), std::move(groups[c])});
  }
  return catalog;
}

// "class_id<TAB>member member ..."
inline std::string serialize_class_catalog(const ClassCatalog& catalog) {
  std::string out;
  for (const auto& c : catalog.classes) out += c.class_id + '\t' + detail::join(c.members, " ") + '\n';
  return out;
}

}  // namespace semdec

#endif  // SEMDEC_KMEANS_HPP
