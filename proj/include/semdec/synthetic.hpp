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

#ifndef SEMDEC_SYNTHETIC_HPP
#define SEMDEC_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "semdec/corpus.hpp"
#include "semdec/lexicon.hpp"

namespace semdec {

// Ground-truth generator for labeled corpora whose word senses depend on
// a non-adjacent trigger word (recoverable only through affinity-ranked
// context) or on the utterance type.
//
// Utterance template:
//   reference phrase of the type
//   [0..max_lead fillers]
//   trigger  <gap fillers>  ambiguous word     (gap in [min_gap, max_gap])
//   [0..max_tail fillers]
//   type-dependent word
//   [0..max_tail fillers]
struct PlantedWord {
  std::string surface;
  std::string semantic_class;
  std::string micro_trait;
};

struct PlantedType {
  std::string id;
  double prior = 0.0;
  std::vector<std::vector<PlantedWord>> reference_phrases;
};

struct TriggerRule {
  PlantedWord trigger;
  std::string semantic_class;  // sense the ambiguous word takes
  std::string micro_trait;
  double weight = 0.0;
};

struct TriggeredWord {
  std::string surface;
  std::vector<TriggerRule> rules;
};

struct TypedWord {
  std::string surface;
  // type id -> (class, trait)
  std::map<std::string, std::pair<std::string, std::string>> senses;
};

struct PlantedSpec {
  std::string field = "train_information";
  std::vector<PlantedType> types;
  std::vector<PlantedWord> fillers;
  std::vector<TriggeredWord> triggered;
  std::vector<TypedWord> typed;
  int min_gap = 1;
  int max_gap = 2;
  int max_lead = 1;
  int max_tail = 1;
};

// Throws std::invalid_argument describing the first inconsistency.
inline void check_spec(const PlantedSpec& spec) {
  auto fail = [](const std::string& why) { throw std::invalid_argument("planted spec: " + why); };
  if (spec.types.empty()) fail("no types");
  double prior = 0;
  for (const auto& t : spec.types) {
    if (t.prior < 0) fail("negative prior for type " + t.id);
    if (t.reference_phrases.empty()) fail("type " + t.id + " has no reference phrase");
    prior += t.prior;
  }
  if (std::abs(prior - 1.0) > 1e-9) fail("type priors sum to " + std::to_string(prior));
  for (const auto& w : spec.triggered) {
    if (w.rules.empty()) fail("ambiguous word " + w.surface + " has no trigger rules");
    double s = 0;
    for (const auto& r : w.rules) {
      if (r.weight < 0) fail("negative trigger weight for " + w.surface);
      s += r.weight;
    }
    if (std::abs(s - 1.0) > 1e-9) fail("trigger weights of " + w.surface + " sum to " + std::to_string(s));
  }
  for (const auto& w : spec.typed) {
    for (const auto& t : spec.types) {
      if (!w.senses.count(t.id)) fail("word " + w.surface + " has no sense for type " + t.id);
    }
  }
  if (spec.min_gap < 0 || spec.max_gap < spec.min_gap) fail("bad gap range");
  if (spec.max_lead < 0 || spec.max_tail < 0) fail("negative filler counts");
  bool needs_fillers = spec.max_gap > 0 || spec.max_lead > 0 || spec.max_tail > 0;
  if (needs_fillers && spec.fillers.empty()) fail("filler slots but no fillers");
}

inline LabeledCorpus generate_synthetic_corpus(const PlantedSpec& spec, std::size_t size,
                                               std::uint64_t seed) {
  check_spec(spec);
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  auto between = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto weighted = [&](const std::vector<double>& w) {
    std::discrete_distribution<std::size_t> d(w.begin(), w.end());
    return d(rng);
  };

  std::vector<double> priors;
  for (const auto& t : spec.types) priors.push_back(t.prior);

  LabeledCorpus corpus;
  for (std::size_t n = 0; n < size; ++n) {
    const auto& type = spec.types[weighted(priors)];
    LabeledUtterance u{type.id, {}};
    auto emit = [&](const PlantedWord& w) {
      u.words.push_back({w.surface, w.semantic_class, w.micro_trait});
    };
    auto fillers = [&](int count) {
      for (int i = 0; i < count; ++i) emit(spec.fillers[uniform(spec.fillers.size())]);
    };

    for (const auto& w : type.reference_phrases[uniform(type.reference_phrases.size())]) emit(w);
    fillers(between(0, spec.max_lead));
    if (!spec.triggered.empty()) {
      const auto& amb = spec.triggered[uniform(spec.triggered.size())];
      std::vector<double> weights;
      for (const auto& r : amb.rules) weights.push_back(r.weight);
      const auto& rule = amb.rules[weighted(weights)];
      emit(rule.trigger);
      fillers(between(spec.min_gap, spec.max_gap));
      u.words.push_back({amb.surface, rule.semantic_class, rule.micro_trait});
    }
    fillers(between(0, spec.max_tail));
    if (!spec.typed.empty()) {
      const auto& w = spec.typed[uniform(spec.typed.size())];
      const auto& sense = w.senses.at(type.id);
      u.words.push_back({w.surface, sense.first, sense.second});
    }
    fillers(between(0, spec.max_tail));
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

// Lexicon entries for every word of a planted spec that has exactly one sense.
inline Lexicon planted_lexicon(const PlantedSpec& spec) {
  std::map<std::string, std::vector<PlantedWord>> senses;
  auto note = [&](const PlantedWord& w) { senses[w.surface].push_back(w); };
  for (const auto& t : spec.types) {
    for (const auto& phrase : t.reference_phrases) {
      for (const auto& w : phrase) note(w);
    }
  }
  for (const auto& f : spec.fillers) note(f);
  for (const auto& a : spec.triggered) {
    for (const auto& r : a.rules) {
      note(r.trigger);
      note({a.surface, r.semantic_class, r.micro_trait});
    }
  }
  for (const auto& w : spec.typed) {
    for (const auto& [_, s] : w.senses) note({w.surface, s.first, s.second});
  }
  Lexicon lex;
  for (const auto& [surface, list] : senses) {
    bool unique = true;
    for (const auto& w : list) {
      unique = unique && w.semantic_class == list[0].semantic_class &&
               w.micro_trait == list[0].micro_trait;
    }
    if (!unique) continue;
    lex.add({surface, {spec.field, list[0].semantic_class, list[0].micro_trait},
             {Gender::kUnspecified, Number::kUnspecified, "name"}, std::nullopt});
  }
  return lex;
}

// A small train-information domain with three request types.
inline PlantedSpec default_planted_spec() {
  PlantedSpec s;
  const PlantedWord urid{"urid", "request", "want"};
  s.types = {
      {"booking", 0.40,
       {{urid, {"hajz", "action", "reserve"}}, {{"nahjiz", "action", "reserve_now"}}}},
      {"timetable", 0.35,
       {{urid, {"maarifa", "action", "inquire"}}, {{"mata", "question", "when"}}}},
      {"cancellation", 0.25,
       {{urid, {"ilgha", "action", "cancel"}}, {{"algh", "action", "cancel_now"}}}},
  };
  s.fillers = {
      {"qitar", "vehicle", "train"},      {"tunis", "city", "tunis"},
      {"sousse", "city", "sousse"},       {"sfax", "city", "sfax"},
      {"ghadan", "day", "tomorrow"},      {"alyawm", "day", "today"},
      {"wahid", "quantity", "one"},       {"ithnan", "quantity", "two"},
      {"sabahan", "daypart", "morning"},  {"masaan", "daypart", "evening"},
  };
  s.triggered = {
      {"dhahab",
       {{{"mahatta", "place_kind", "station"}, "trip", "outbound", 0.5},
        {{"saa", "clock", "hour"}, "schedule", "departure_time", 0.5}}},
      {"maqad",
       {{{"araba", "carriage", "coach"}, "seating", "seat", 0.5},
        {{"shubbak", "counter", "window"}, "service", "appointment", 0.5}}},
  };
  s.typed = {
      {"waqt",
       {{"booking", {"slot", "reserved_slot"}},
        {"timetable", {"timing", "schedule_hour"}},
        {"cancellation", {"refund", "refund_window"}}}},
      {"raqm",
       {{"booking", {"ticket_ref", "new_booking"}},
        {"timetable", {"train_ref", "train_number"}},
        {"cancellation", {"booking_ref", "existing_booking"}}}},
      {"tadhkira",
       {{"booking", {"ticket", "purchase"}},
        {"timetable", {"ticket", "information"}},
        {"cancellation", {"ticket", "return"}}}},
  };
  return s;
}

}  // namespace semdec

#endif  // SEMDEC_SYNTHETIC_HPP
