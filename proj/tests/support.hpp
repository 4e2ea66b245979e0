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

// Fixtures and independent oracles shared by the unit tests and the
// acceptance runner. The oracles recompute quantities with plain loops and
// never call the library routine they check.

#ifndef SEMDEC_TESTS_SUPPORT_HPP
#define SEMDEC_TESTS_SUPPORT_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "semdec/semdec.hpp"

namespace semdec::testing {

// ---------------------------------------------------------------------------
// Scratch directories.

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("semdec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Corpora.

inline TypedCorpus typed_corpus(const std::vector<std::pair<std::string, std::string>>& lines) {
  TypedCorpus c;
  std::set<std::string> seen;
  for (const auto& [type, text] : lines) {
    if (seen.insert(type).second) c.types.push_back(type);
    c.utterances.push_back({type, detail::split_ws(text)});
  }
  return c;
}

// Two types: D1 = [a b a], D2 = [c b].
inline TypedCorpus tiny_typed_corpus() { return typed_corpus({{"D1", "a b a"}, {"D2", "c b"}}); }

inline TypedCorpus booking_typed_corpus() {
  return typed_corpus({{"book", "urid hajz tadhkira"},
                       {"book", "urid hajz maqad ghadan"},
                       {"book", "nahjiz tadhkira"},
                       {"time", "mata qitar tunis"},
                       {"time", "mata yasil qitar"},
                       {"time", "urid mata qitar"},
                       {"cancel", "algh hajz"},
                       {"cancel", "urid algh tadhkira ghadan"}});
}

struct TfidfCase {
  const char* corpus;  // "tiny" or "booking"
  const char* term;
  const char* type;
  int max_gap;
  double expected;
};

// Frozen from a separate scratch evaluation that enumerates position tuples
// with itertools and applies the weight formula directly.
inline const std::vector<TfidfCase>& tfidf_cases() {
  static const std::vector<TfidfCase> cases = {
      {"tiny", "a", "D1", 3, 0.3096133344193552},
      {"tiny", "a", "D2", 3, 0.0},  // tf = 0
      {"tiny", "b", "D1", 3, 0.0},  // df = n
      {"tiny", "c", "D2", 3, 0.2459421051544395},
      {"tiny", "a b", "D1", 3, 0.19932329491697243},
      {"tiny", "b a", "D1", 3, 0.19932329491697243},
      {"tiny", "a a", "D1", 3, 0.19932329491697243},
      {"tiny", "a a", "D1", 0, 0.0},
      {"tiny", "z", "D1", 3, 0.0},  // absent
      {"booking", "urid hajz", "book", 3, 0.4540309564818463},
      {"booking", "urid", "book", 3, 0.0},
      {"booking", "urid tadhkira", "book", 3, 0.1056071503773271},
      {"booking", "urid tadhkira", "book", 0, 0.0},
      {"booking", "urid tadhkira", "cancel", 3, 0.13252307665661564},
      {"booking", "mata qitar", "time", 3, 0.5644163474974808},
      {"booking", "mata qitar", "time", 0, 0.4540309564818463},
      {"booking", "urid hajz tadhkira", "book", 3, 0.2861437663948188},
      {"booking", "hajz", "cancel", 3, 0.13252307665661564},
      {"booking", "tadhkira", "book", 3, 0.1675693169949419},
      {"booking", "qitar", "time", 3, 0.5644163474974808},
  };
  return cases;
}

inline const TypedCorpus& tfidf_case_corpus(const TfidfCase& c) {
  static const TypedCorpus tiny = tiny_typed_corpus();
  static const TypedCorpus booking = booking_typed_corpus();
  return std::string(c.corpus) == "tiny" ? tiny : booking;
}

// Random typed corpus with at most `max_tokens` tokens over a small
// vocabulary, so that n-grams repeat.
inline TypedCorpus random_typed_corpus(std::mt19937_64& rng, std::size_t max_tokens) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<int> n_types(2, 3), utt_len(1, 5), pick(0, 4);
  TypedCorpus c;
  int k = n_types(rng);
  for (int t = 0; t < k; ++t) c.types.push_back("T" + std::to_string(t));
  std::size_t used = 0;
  for (int t = 0; used < max_tokens; t = (t + 1) % k) {
    std::size_t len = static_cast<std::size_t>(utt_len(rng));
    if (used + len > max_tokens) break;
    TypedUtterance u{c.types[static_cast<std::size_t>(t)], {}};
    for (std::size_t i = 0; i < len; ++i) u.tokens.push_back(vocab[static_cast<std::size_t>(pick(rng))]);
    used += len;
    c.utterances.push_back(std::move(u));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Extraction oracle: every n-gram over the vocabulary (all of V^n), weighed
// one at a time, kept when above the threshold.

struct RefKey {
  std::string type_id;
  Ngram tokens;
  auto operator<=>(const RefKey&) const = default;
};

inline std::map<RefKey, double> brute_force_reference_words(const TypedCorpus& corpus,
                                                            double threshold, int max_ngram,
                                                            int max_gap) {
  std::set<std::string> vocab_set;
  for (const auto& u : corpus.utterances) vocab_set.insert(u.tokens.begin(), u.tokens.end());
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::map<RefKey, double> out;
  for (int n = 1; n <= max_ngram; ++n) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (!vocab.empty()) {
      Ngram g;
      for (auto i : idx) g.push_back(vocab[i]);
      for (const auto& t : corpus.types) {
        double w = tfidf_weight(g, t, corpus, max_gap).value;
        if (w > threshold) out[{t, g}] = w;
      }
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == vocab.size()) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
  }
  return out;
}

inline std::map<RefKey, double> flatten(const std::map<std::string, std::vector<ReferenceWord>>& refs) {
  std::map<RefKey, double> out;
  for (const auto& [t, list] : refs) {
    for (const auto& r : list) out[{t, r.tokens}] = r.weight;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mutual-information oracle: the four cells written out one by one.

inline double four_term_mi(double p11, double p10, double p01, double p00) {
  const double pw = p11 + p10, pnw = p01 + p00, pv = p11 + p01, pnv = p10 + p00;
  double s = 0;
  if (p11 > 0) s += p11 * (std::log(p11 / (pw * pv)) / std::log(2.0));
  if (p10 > 0) s += p10 * (std::log(p10 / (pw * pnv)) / std::log(2.0));
  if (p01 > 0) s += p01 * (std::log(p01 / (pnw * pv)) / std::log(2.0));
  if (p00 > 0) s += p00 * (std::log(p00 / (pnw * pnv)) / std::log(2.0));
  return s;
}

// ---------------------------------------------------------------------------
// Naive recount of every table a trained model holds.

struct RecountTables {
  std::map<Ngram, std::map<std::string, std::uint64_t>> type_counts;
  std::map<Ngram, std::uint64_t> reference_totals;
  std::map<std::array<std::string, 3>, std::map<std::string, std::uint64_t>> class_counts;
  std::map<std::array<std::string, 3>, std::uint64_t> class_totals;
  std::map<std::string, std::uint64_t> class_unigram;
  std::map<std::array<std::string, 3>, std::map<std::string, std::uint64_t>> trait_counts;
  std::map<std::array<std::string, 3>, std::uint64_t> trait_totals;
  std::map<std::pair<std::string, std::string>, std::uint64_t> sense_unigram;
  std::uint64_t total = 0;
  std::map<std::string, std::uint64_t> marginal;
  std::map<std::pair<std::string, std::string>, std::uint64_t> joint;
};

// Ordered position tuples of `gram` in `tokens` with at most `gap` tokens
// between neighbours, enumerated recursively.
inline std::uint64_t count_tuples(const std::vector<std::string>& tokens, const Ngram& gram,
                                  int gap, std::size_t k = 0, long prev = -1) {
  if (k == gram.size()) return 1;
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    long p = static_cast<long>(i);
    if (k > 0 && (p <= prev || p - prev - 1 > gap)) continue;
    if (tokens[i] == gram[k]) n += count_tuples(tokens, gram, gap, k + 1, p);
  }
  return n;
}

inline RecountTables naive_recount(const LabeledCorpus& corpus, ContextStrategy strategy,
                                   std::size_t window, double unseen_pseudo,
                                   const std::vector<ReferenceWord>& refs) {
  RecountTables r;
  const std::string begin = "<BEGIN>";

  // Windows: token i and its `window` predecessors.
  for (const auto& u : corpus.utterances) {
    for (std::size_t i = 0; i < u.words.size(); ++i) {
      std::set<std::string> win;
      for (std::size_t j = (i >= window ? i - window : 0); j <= i; ++j) win.insert(u.words[j].surface);
      ++r.total;
      for (const auto& a : win) {
        ++r.marginal[a];
        for (const auto& b : win) {
          if (a < b) ++r.joint[{a, b}];
        }
      }
    }
  }
  auto joint_of = [&](const std::string& a, const std::string& b) -> double {
    if (a == b) return static_cast<double>(r.marginal.count(a) ? r.marginal.at(a) : 0);
    auto it = r.joint.find({std::min(a, b), std::max(a, b)});
    return it == r.joint.end() ? 0.0 : static_cast<double>(it->second);
  };
  auto marg = [&](const std::string& a) -> double {
    auto it = r.marginal.find(a);
    return it == r.marginal.end() ? 0.0 : static_cast<double>(it->second);
  };
  auto affinity = [&](const std::string& w, const std::string& v) {
    double a = joint_of(w, v);
    double b = marg(w) - a, c = marg(v) - a;
    double d = static_cast<double>(r.total) - a - b - c;
    double ps = a == 0 ? unseen_pseudo : 0.0;
    double n = static_cast<double>(r.total) + 4 * ps;
    return four_term_mi((a + ps) / n, (b + ps) / n, (c + ps) / n, (d + ps) / n);
  };

  std::map<Ngram, int> gaps;
  for (const auto& ref : refs) gaps[ref.tokens] = std::max(gaps[ref.tokens], ref.max_gap);
  for (const auto& [g, _] : gaps) r.reference_totals[g] = 0;

  for (const auto& u : corpus.utterances) {
    auto toks = u.surfaces();
    for (const auto& [g, gap] : gaps) {
      auto n = count_tuples(toks, g, gap);
      if (n > 0) {
        r.type_counts[g][u.type_id] += n;
        r.reference_totals[g] += n;
      }
    }
    for (std::size_t i = 0; i < u.words.size(); ++i) {
      std::string cp1 = begin, cp2 = begin, fc = begin, ft = begin;
      if (strategy == ContextStrategy::kFixed1 || strategy == ContextStrategy::kFixed2) {
        if (i >= 1) {
          cp1 = fc = u.words[i - 1].semantic_class;
          ft = u.words[i - 1].micro_trait;
        }
        if (strategy == ContextStrategy::kFixed2 && i >= 2) cp2 = u.words[i - 2].semantic_class;
      } else if (strategy == ContextStrategy::kPertinent && i >= 1) {
        // Best and runner-up by affinity; later positions win ties.
        long best = -1, second = -1;
        double bs = 0, ss = 0;
        for (std::size_t j = 0; j < i; ++j) {
          double s = affinity(u.words[i].surface, u.words[j].surface);
          if (best < 0 || s >= bs) {
            second = best;
            ss = bs;
            best = static_cast<long>(j);
            bs = s;
          } else if (second < 0 || s >= ss) {
            second = static_cast<long>(j);
            ss = s;
          }
        }
        cp1 = fc = u.words[static_cast<std::size_t>(best)].semantic_class;
        ft = u.words[static_cast<std::size_t>(best)].micro_trait;
        if (second >= 0) cp2 = u.words[static_cast<std::size_t>(second)].semantic_class;
      }
      std::string type = strategy == ContextStrategy::kLex ? "*" : u.type_id;
      const auto& w = u.words[i];
      ++r.class_counts[{type, cp1, cp2}][w.semantic_class];
      ++r.class_totals[{type, cp1, cp2}];
      ++r.class_unigram[w.semantic_class];
      ++r.trait_counts[{w.semantic_class, fc, ft}][w.micro_trait];
      ++r.trait_totals[{w.semantic_class, fc, ft}];
      ++r.sense_unigram[{w.semantic_class, w.micro_trait}];
    }
  }
  return r;
}

// Number of table cells where the model and the recount disagree.
inline std::size_t recount_mismatches(const TrainedModel& m, const RecountTables& r) {
  std::size_t bad = 0;
  auto cmp = [&](const auto& a, const auto& b) { bad += a == b ? 0 : 1; };
  cmp(m.type_counts, r.type_counts);
  cmp(m.reference_totals, r.reference_totals);
  cmp(m.class_counts, r.class_counts);
  cmp(m.class_totals, r.class_totals);
  cmp(m.class_unigram, r.class_unigram);
  cmp(m.trait_counts, r.trait_counts);
  cmp(m.trait_totals, r.trait_totals);
  std::map<std::pair<std::string, std::string>, std::uint64_t> senses(m.sense_unigram.begin(),
                                                                      m.sense_unigram.end());
  cmp(senses, r.sense_unigram);
  cmp(m.cooccurrence.total(), r.total);
  cmp(m.cooccurrence.marginals(), r.marginal);
  cmp(m.cooccurrence.joints(), r.joint);
  return bad;
}

// ---------------------------------------------------------------------------
// Deterministic toy corpus: every word has one sense except "dhahab",
// whose sense is fixed by the word two positions before it.

inline LabeledCorpus toy_labeled_corpus() {
  return parse_labeled_corpus(
      "booking\turid/request/want hajz/action/reserve mahatta/place/station qitar/vehicle/train "
      "dhahab/trip/outbound\n"
      "booking\turid/request/want hajz/action/reserve saa/clock/hour ghadan/day/tomorrow "
      "dhahab/schedule/departure\n"
      "timetable\tmata/question/when saa/clock/hour qitar/vehicle/train dhahab/schedule/departure\n"
      "timetable\tmata/question/when mahatta/place/station tunis/city/tunis dhahab/trip/outbound\n"
      "cancellation\talgh/action/cancel hajz/action/reserve ghadan/day/tomorrow\n");
}

// A trained model plus the catalogs it was built from.
inline TrainedModel train_on(const LabeledCorpus& corpus, ContextStrategy strategy,
                             const Lexicon& lexicon = {}) {
  TrainConfig cfg;
  cfg.strategy = strategy;
  return train(corpus, lexicon, Catalogs::collect(corpus, lexicon), cfg);
}

}  // namespace semdec::testing

#endif  // SEMDEC_TESTS_SUPPORT_HPP
