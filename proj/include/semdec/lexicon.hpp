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

#ifndef SEMDEC_LEXICON_HPP
#define SEMDEC_LEXICON_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "semdec/text_io.hpp"
#include "semdec/unicode.hpp"

namespace semdec {

// Semantic feature group: application field, semantic class, micro trait.
struct FSeGroup {
  std::string field;
  std::string semantic_class;
  std::string micro_trait;

  auto operator<=>(const FSeGroup&) const = default;
};

enum class Gender { kMasculine, kFeminine, kUnspecified };
enum class Number { kSingular, kDual, kPlural, kUnspecified };

// Syntactic feature group. Stored and validated; the decoder ignores it.
struct FsyGroup {
  Gender gender = Gender::kUnspecified;
  Number number = Number::kUnspecified;
  std::string nature;

  auto operator<=>(const FsyGroup&) const = default;
};

struct LexiconEntry {
  std::string surface;
  FSeGroup fse;
  FsyGroup fsy;
  std::optional<std::string> synonym_set;

  auto operator<=>(const LexiconEntry&) const = default;
};

struct ConstraintViolation {
  std::string constraint_id;
  std::vector<std::string> entries;
  std::string message;

  auto operator<=>(const ConstraintViolation&) const = default;
};

// Thrown by Lexicon::add for an entry missing a required field.
class InvalidEntry : public std::invalid_argument {
 public:
  explicit InvalidEntry(std::string field)
      : std::invalid_argument("invalid lexicon entry: empty " + field),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline std::string to_string(Gender g) {
  switch (g) {
    case Gender::kMasculine: return "masculine";
    case Gender::kFeminine: return "feminine";
    case Gender::kUnspecified: break;
  }
  return "unspecified";
}

inline std::string to_string(Number n) {
  switch (n) {
    case Number::kSingular: return "singular";
    case Number::kDual: return "dual";
    case Number::kPlural: return "plural";
    case Number::kUnspecified: break;
  }
  return "unspecified";
}

inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "masculine") return Gender::kMasculine;
  if (s == "feminine") return Gender::kFeminine;
  if (s == "unspecified" || s.empty()) return Gender::kUnspecified;
  return std::nullopt;
}

inline std::optional<Number> parse_number(std::string_view s) {
  if (s == "singular") return Number::kSingular;
  if (s == "dual") return Number::kDual;
  if (s == "plural") return Number::kPlural;
  if (s == "unspecified" || s.empty()) return Number::kUnspecified;
  return std::nullopt;
}

// The sense representation structure: one entry per surface form.
class Lexicon {
 public:
  using Map = std::map<std::string, LexiconEntry>;

  // Stores the entry, replacing any prior entry with the same surface.
  void add(LexiconEntry entry) {
    if (entry.surface.empty()) throw InvalidEntry("surface");
    if (entry.fse.field.empty()) throw InvalidEntry("field");
    if (entry.fse.semantic_class.empty()) throw InvalidEntry("semantic_class");
    if (entry.fse.micro_trait.empty()) throw InvalidEntry("micro_trait");
    if (entry.fsy.nature.empty()) throw InvalidEntry("nature");
    if (entry.synonym_set && entry.synonym_set->empty()) entry.synonym_set.reset();
    std::string key = entry.surface;
    entries_.insert_or_assign(std::move(key), std::move(entry));
  }

  bool remove(const std::string& surface) { return entries_.erase(surface) > 0; }

  std::optional<LexiconEntry> lookup(const std::string& surface) const {
    auto it = entries_.find(surface);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& surface) const { return entries_.count(surface) > 0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }

  bool operator==(const Lexicon&) const = default;

 private:
  Map entries_;
};

// Identifiers of the integrity constraints, in report order.
enum class Constraint {
  kDuplicateFse = 0,     // C1
  kUnknownClass,         // C2
  kTraitCollision,       // C3
  kForeignField,         // C4
  kSplitSynonymSet,      // C5
  kBlankWordEntry,       // C6
  kUnknownNature,        // C7
  kUnanchoredReference,  // C8
};

inline constexpr std::size_t kConstraintCount = 8;

inline std::string constraint_id(Constraint c) {
  return "C" + std::to_string(static_cast<int>(c) + 1);
}

inline const std::set<std::string>& default_nature_tags() {
  static const std::set<std::string> tags = {
      "name", "verb", "adjective", "adverb", "particle",
      "pronoun", "numeral", "proper_noun", "preposition", "expression"};
  return tags;
}

// Which constraints run, plus the reference data some of them need. A
// constraint whose reference data is absent is skipped.
struct ConstraintConfig {
  std::array<bool, kConstraintCount> enabled{true, true, true, true,
                                             true, true, true, true};
  std::optional<std::set<std::string>> class_catalog;      // C2
  std::optional<std::string> application_field;            // C4
  std::set<std::string> blank_words;                       // C6
  std::optional<std::set<std::string>> nature_tags = default_nature_tags();  // C7
  std::vector<std::vector<std::string>> reference_words;   // C8
  std::set<std::string> type_markers;                      // C8

  bool is_enabled(Constraint c) const { return enabled[static_cast<std::size_t>(c)]; }
  ConstraintConfig& set(Constraint c, bool on) {
    enabled[static_cast<std::size_t>(c)] = on;
    return *this;
  }

  // Only the duplicate-FSe rule.
  static ConstraintConfig duplicate_fse_only() {
    ConstraintConfig cfg;
    cfg.enabled.fill(false);
    cfg.set(Constraint::kDuplicateFse, true);
    return cfg;
  }
};

namespace detail {

// A group of entries is coherent when all of them carry the same
// synonym_set identifier.
inline bool one_synonym_set(const std::vector<const LexiconEntry*>& group) {
  const auto& first = group.front()->synonym_set;
  if (!first) return false;
  return std::all_of(group.begin(), group.end(),
                     [&](const LexiconEntry* e) { return e->synonym_set == first; });
}

inline std::vector<std::string> surfaces_of(const std::vector<const LexiconEntry*>& group) {
  std::vector<std::string> out;
  for (const auto* e : group) out.push_back(e->surface);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string describe(const FSeGroup& f) {
  return "{" + f.field + ", " + f.semantic_class + ", " + f.micro_trait + "}";
}

}  // namespace detail

// Reports every violation of the enabled constraints. The result is sorted,
// so it does not depend on insertion order.
inline std::vector<ConstraintViolation> validate(const Lexicon& lexicon,
                                                 const ConstraintConfig& cfg = {}) {
  std::vector<ConstraintViolation> out;
  const auto& entries = lexicon.entries();

  if (cfg.is_enabled(Constraint::kDuplicateFse)) {
    std::map<FSeGroup, std::vector<const LexiconEntry*>> by_fse;
    for (const auto& [_, e] : entries) by_fse[e.fse].push_back(&e);
    for (const auto& [fse, group] : by_fse) {
      if (group.size() < 2 || detail::one_synonym_set(group)) continue;
      out.push_back({constraint_id(Constraint::kDuplicateFse), detail::surfaces_of(group),
                     "distinct words share FSe " + detail::describe(fse) +
                         " without being declared synonyms"});
    }
  }

  if (cfg.is_enabled(Constraint::kUnknownClass) && cfg.class_catalog) {
    for (const auto& [surface, e] : entries) {
      if (!cfg.class_catalog->count(e.fse.semantic_class)) {
        out.push_back({constraint_id(Constraint::kUnknownClass), {surface},
                       "semantic class '" + e.fse.semantic_class + "' is not in the class catalog"});
      }
    }
  }

  // Same (class, trait) under different fields. Identical full groups are
  // already the duplicate-FSe rule's business.
  if (cfg.is_enabled(Constraint::kTraitCollision)) {
    std::map<std::pair<std::string, std::string>, std::vector<const LexiconEntry*>> by_trait;
    for (const auto& [_, e] : entries) {
      by_trait[{e.fse.semantic_class, e.fse.micro_trait}].push_back(&e);
    }
    for (const auto& [key, group] : by_trait) {
      if (group.size() < 2 || detail::one_synonym_set(group)) continue;
      std::set<std::string> fields;
      for (const auto* e : group) fields.insert(e->fse.field);
      if (fields.size() < 2) continue;
      out.push_back({constraint_id(Constraint::kTraitCollision), detail::surfaces_of(group),
                     "micro trait '" + key.second + "' of class '" + key.first +
                         "' is reused across fields by non-synonyms"});
    }
  }

  if (cfg.is_enabled(Constraint::kForeignField) && cfg.application_field) {
    for (const auto& [surface, e] : entries) {
      if (e.fse.field != *cfg.application_field) {
        out.push_back({constraint_id(Constraint::kForeignField), {surface},
                       "field '" + e.fse.field + "' differs from application field '" +
                           *cfg.application_field + "'"});
      }
    }
  }

  if (cfg.is_enabled(Constraint::kSplitSynonymSet)) {
    std::map<std::string, std::vector<const LexiconEntry*>> by_set;
    for (const auto& [_, e] : entries) {
      if (e.synonym_set) by_set[*e.synonym_set].push_back(&e);
    }
    for (const auto& [set_id, group] : by_set) {
      std::set<FSeGroup> groups;
      for (const auto* e : group) groups.insert(e->fse);
      if (groups.size() < 2) continue;
      out.push_back({constraint_id(Constraint::kSplitSynonymSet), detail::surfaces_of(group),
                     "synonym set '" + set_id + "' spans " + std::to_string(groups.size()) +
                         " different FSe groups"});
    }
  }

  if (cfg.is_enabled(Constraint::kBlankWordEntry)) {
    for (const auto& [surface, e] : entries) {
      if (cfg.blank_words.count(surface)) {
        out.push_back({constraint_id(Constraint::kBlankWordEntry), {surface},
                       "blank word has a lexicon entry"});
      }
    }
  }

  if (cfg.is_enabled(Constraint::kUnknownNature) && cfg.nature_tags) {
    for (const auto& [surface, e] : entries) {
      if (!cfg.nature_tags->count(e.fsy.nature)) {
        out.push_back({constraint_id(Constraint::kUnknownNature), {surface},
                       "nature tag '" + e.fsy.nature + "' is not in the tag set"});
      }
    }
  }

  if (cfg.is_enabled(Constraint::kUnanchoredReference)) {
    std::set<std::vector<std::string>> seen;
    for (const auto& ref : cfg.reference_words) {
      if (!seen.insert(ref).second) continue;
      std::vector<std::string> missing;
      for (const auto& tok : ref) {
        if (!lexicon.contains(tok) && !cfg.type_markers.count(tok)) missing.push_back(tok);
      }
      if (missing.empty()) continue;
      std::sort(missing.begin(), missing.end());
      missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
      out.push_back({constraint_id(Constraint::kUnanchoredReference), missing,
                     "reference word '" + detail::join(ref, " ") +
                         "' has components that are neither entries nor type markers"});
    }
  }

  std::sort(out.begin(), out.end(), [](const ConstraintViolation& a, const ConstraintViolation& b) {
    auto ka = std::stoi(a.constraint_id.substr(1));
    auto kb = std::stoi(b.constraint_id.substr(1));
    if (ka != kb) return ka < kb;
    return std::tie(a.entries, a.message) < std::tie(b.entries, b.message);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon file: surface, field, class, micro_trait, gender, number, nature,
// optional synonym_set; tab separated, '#' comments.

inline Lexicon parse_lexicon(std::string_view text) {
  Lexicon lex;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() == 8 && cols[7].empty()) cols.pop_back();
    if (cols.size() != 7 && cols.size() != 8) {
      throw FormatError("expected 7 or 8 tab-separated fields, got " +
                            std::to_string(cols.size()), lineno);
    }
    LexiconEntry e;
    e.surface = nfc(cols[0]);
    e.fse = {nfc(cols[1]), nfc(cols[2]), nfc(cols[3])};
    auto g = parse_gender(cols[4]);
    if (!g) throw FormatError("unknown gender '" + cols[4] + "'", lineno);
    auto n = parse_number(cols[5]);
    if (!n) throw FormatError("unknown number '" + cols[5] + "'", lineno);
    e.fsy = {*g, *n, nfc(cols[6])};
    if (cols.size() == 8) e.synonym_set = nfc(cols[7]);
    try {
      lex.add(std::move(e));
    } catch (const InvalidEntry& err) {
      throw FormatError(err.what(), lineno);
    }
  }
  return lex;
}

inline std::string serialize_lexicon(const Lexicon& lex) {
  std::string out = "# surface\tfield\tclass\tmicro_trait\tgender\tnumber\tnature\tsynonym_set\n";
  for (const auto& [surface, e] : lex.entries()) {
    out += surface + '\t' + e.fse.field + '\t' + e.fse.semantic_class + '\t' +
           e.fse.micro_trait + '\t' + to_string(e.fsy.gender) + '\t' + to_string(e.fsy.number) +
           '\t' + e.fsy.nature;
    if (e.synonym_set) out += '\t' + *e.synonym_set;
    out += '\n';
  }
  return out;
}

inline Lexicon read_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(detail::read_file(path));
}

inline void write_lexicon(const std::filesystem::path& path, const Lexicon& lex) {
  detail::write_file_atomic(path, serialize_lexicon(lex));
}

}  // namespace semdec

#endif  // SEMDEC_LEXICON_HPP
