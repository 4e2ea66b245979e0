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

#ifndef SEMDEC_CORPUS_HPP
#define SEMDEC_CORPUS_HPP

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semdec/text_io.hpp"
#include "semdec/unicode.hpp"

namespace semdec {

// Utterances grouped by request type. `types` lists every type id once.
struct TypedUtterance {
  std::string type_id;
  std::vector<std::string> tokens;

  bool operator==(const TypedUtterance&) const = default;
};

struct TypedCorpus {
  std::vector<std::string> types;
  std::vector<TypedUtterance> utterances;

  bool operator==(const TypedCorpus&) const = default;

  std::size_t type_index(const std::string& type_id) const {
    auto it = std::find(types.begin(), types.end(), type_id);
    if (it == types.end()) throw std::out_of_range("unknown type '" + type_id + "'");
    return static_cast<std::size_t>(it - types.begin());
  }
};

struct LabeledWord {
  std::string surface;
  std::string semantic_class;
  std::string micro_trait;

  bool operator==(const LabeledWord&) const = default;
};

struct LabeledUtterance {
  std::string type_id;
  std::vector<LabeledWord> words;

  bool operator==(const LabeledUtterance&) const = default;

  std::vector<std::string> surfaces() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.surface);
    return out;
  }
};

struct LabeledCorpus {
  std::vector<LabeledUtterance> utterances;

  bool operator==(const LabeledCorpus&) const = default;

  // Sorted distinct type ids.
  std::vector<std::string> types() const {
    std::set<std::string> s;
    for (const auto& u : utterances) s.insert(u.type_id);
    return {s.begin(), s.end()};
  }

  std::size_t word_count() const {
    std::size_t n = 0;
    for (const auto& u : utterances) n += u.words.size();
    return n;
  }

  TypedCorpus typed() const {
    TypedCorpus out;
    out.types = types();
    for (const auto& u : utterances) out.utterances.push_back({u.type_id, u.surfaces()});
    return out;
  }
};

// Typed-corpus file: "type_id<TAB>token token ...".
inline TypedCorpus parse_typed_corpus(std::string_view text) {
  TypedCorpus corpus;
  std::set<std::string> types;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError("missing TAB after type id", lineno);
    std::string type_id(detail::trim(line.substr(0, tab)));
    if (type_id.empty()) throw FormatError("empty type id", lineno);
    TypedUtterance u{nfc(type_id), detail::split_ws(nfc(line.substr(tab + 1)))};
    types.insert(u.type_id);
    corpus.utterances.push_back(std::move(u));
  }
  corpus.types.assign(types.begin(), types.end());
  return corpus;
}

inline std::string serialize_typed_corpus(const TypedCorpus& corpus) {
  std::string out;
  for (const auto& u : corpus.utterances) {
    out += u.type_id + '\t' + detail::join(u.tokens, " ") + '\n';
  }
  return out;
}

// "surface/class/trait"; the surface may itself contain '/', so the two
// labels are taken from the right.
inline LabeledWord parse_labeled_word(std::string_view item, std::size_t lineno = 0) {
  auto last = item.rfind('/');
  if (last == std::string_view::npos || last == 0) {
    throw FormatError("labeled token '" + std::string(item) + "' is not surface/class/trait", lineno);
  }
  auto mid = item.rfind('/', last - 1);
  if (mid == std::string_view::npos) {
    throw FormatError("labeled token '" + std::string(item) + "' is not surface/class/trait", lineno);
  }
  LabeledWord w{std::string(item.substr(0, mid)), std::string(item.substr(mid + 1, last - mid - 1)),
                std::string(item.substr(last + 1))};
  if (w.surface.empty() || w.semantic_class.empty() || w.micro_trait.empty()) {
    throw FormatError("labeled token '" + std::string(item) + "' has an empty part", lineno);
  }
  return w;
}

inline std::string format_labeled_word(const LabeledWord& w) {
  return w.surface + '/' + w.semantic_class + '/' + w.micro_trait;
}

// Labeled-corpus file: "type_id<TAB>token/class/trait ...".
inline LabeledCorpus parse_labeled_corpus(std::string_view text) {
  LabeledCorpus corpus;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw FormatError("missing TAB after type id", lineno);
    LabeledUtterance u;
    u.type_id = nfc(detail::trim(line.substr(0, tab)));
    if (u.type_id.empty()) throw FormatError("empty type id", lineno);
    for (const auto& item : detail::split_ws(nfc(line.substr(tab + 1)))) {
      u.words.push_back(parse_labeled_word(item, lineno));
    }
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

inline std::string format_labeled_utterance(const LabeledUtterance& u) {
  std::string out = u.type_id + '\t';
  for (std::size_t i = 0; i < u.words.size(); ++i) {
    if (i) out += ' ';
    out += format_labeled_word(u.words[i]);
  }
  return out;
}

inline std::string serialize_labeled_corpus(const LabeledCorpus& corpus) {
  std::string out;
  for (const auto& u : corpus.utterances) out += format_labeled_utterance(u) + '\n';
  return out;
}

inline LabeledCorpus read_labeled_corpus(const std::filesystem::path& path) {
  return parse_labeled_corpus(detail::read_file(path));
}

inline TypedCorpus read_typed_corpus(const std::filesystem::path& path) {
  return parse_typed_corpus(detail::read_file(path));
}

}  // namespace semdec

#endif  // SEMDEC_CORPUS_HPP
