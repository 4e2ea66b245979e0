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

#ifndef SEMDEC_PREPROCESS_HPP
#define SEMDEC_PREPROCESS_HPP

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semdec/text_io.hpp"
#include "semdec/unicode.hpp"

namespace semdec {

// A positioned word of an utterance. `span` holds code point offsets
// [begin, end) into the (normalized) utterance text.
struct Token {
  std::string surface;
  std::size_t position = 0;
  std::pair<std::size_t, std::size_t> span{0, 0};

  bool operator==(const Token&) const = default;
};

// Rewrites a run of consecutive surfaces into one entry.
struct MergeRule {
  std::vector<std::string> sequence;
  std::string merged;

  bool operator==(const MergeRule&) const = default;
};

struct PreprocessConfig {
  std::set<std::string> blank_words;
  std::vector<MergeRule> merge_rules;
  bool normalize = true;
};

namespace detail {

// Underscore and similar joiners stay inside words so merged surfaces
// like "a_b" survive re-tokenization.
inline bool detaches(char32_t c) {
  return is_punct(c) && u_charType(static_cast<UChar32>(c)) != U_CONNECTOR_PUNCTUATION;
}

}  // namespace detail

// Whitespace split with punctuation marks detached as separate tokens.
inline std::vector<Token> tokenize(std::string_view raw, const PreprocessConfig& config = {}) {
  std::string text = config.normalize ? nfc(raw) : std::string(raw);
  auto cps = code_points(text);
  std::vector<Token> out;

  std::size_t word_begin = 0;
  bool in_word = false;
  auto flush = [&](std::size_t end) {
    if (!in_word) return;
    Token t;
    t.surface = text.substr(cps[word_begin].byte_begin,
                            cps[end - 1].byte_end - cps[word_begin].byte_begin);
    t.position = out.size();
    t.span = {word_begin, end};
    out.push_back(std::move(t));
    in_word = false;
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    char32_t c = cps[i].value;
    if (is_space(c)) {
      flush(i);
    } else if (detail::detaches(c)) {
      flush(i);
      Token t;
      t.surface = text.substr(cps[i].byte_begin, cps[i].byte_end - cps[i].byte_begin);
      t.position = out.size();
      t.span = {i, i + 1};
      out.push_back(std::move(t));
    } else if (!in_word) {
      in_word = true;
      word_begin = i;
    }
  }
  flush(cps.size());
  return out;
}

// Result of the lexical filter: the significant tokens and the eliminated
// ones, both re-indexed.
struct FilteredTokens {
  std::vector<Token> kept;
  std::vector<Token> skipped;
};

// Applies merge rules (greedy, leftmost-longest, earlier rule wins a tie),
// then removes blank words, then renumbers positions from 0.
inline FilteredTokens filter_tokens(const std::vector<Token>& tokens,
                                    const PreprocessConfig& config) {
  std::vector<Token> merged;
  merged.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    const MergeRule* best = nullptr;
    for (const auto& rule : config.merge_rules) {
      const auto& seq = rule.sequence;
      if (seq.empty() || i + seq.size() > tokens.size()) continue;
      if (best && seq.size() <= best->sequence.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < seq.size() && match; ++k) {
        match = tokens[i + k].surface == seq[k];
      }
      if (match) best = &rule;
    }
    if (best) {
      std::size_t n = best->sequence.size();
      Token t;
      t.surface = best->merged;
      t.span = {tokens[i].span.first, tokens[i + n - 1].span.second};
      merged.push_back(std::move(t));
      i += n;
    } else {
      merged.push_back(tokens[i]);
      ++i;
    }
  }

  FilteredTokens out;
  for (auto& t : merged) {
    auto& dst = config.blank_words.count(t.surface) ? out.skipped : out.kept;
    t.position = dst.size();
    dst.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Token> filter_and_merge(const std::vector<Token>& tokens,
                                           const PreprocessConfig& config) {
  return filter_tokens(tokens, config).kept;
}

inline std::vector<Token> preprocess(std::string_view raw, const PreprocessConfig& config) {
  return filter_and_merge(tokenize(raw, config), config);
}

inline std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

// Blank-word file: one surface per line, '#' comments.
inline std::set<std::string> parse_blank_words(std::string_view text) {
  std::set<std::string> out;
  for (const auto& raw : detail::split(text, '\n')) {
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    out.insert(nfc(detail::trim(line)));
  }
  return out;
}

// Merge-rule file: "w1 w2 ...<TAB>merged".
inline std::vector<MergeRule> parse_merge_rules(std::string_view text) {
  std::vector<MergeRule> out;
  std::size_t lineno = 0;
  for (const auto& raw : detail::split(text, '\n')) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (detail::is_comment_or_blank(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2) throw FormatError("merge rule needs 'sequence<TAB>merged'", lineno);
    MergeRule rule;
    for (auto& w : detail::split_ws(nfc(cols[0]))) rule.sequence.push_back(std::move(w));
    rule.merged = nfc(detail::trim(cols[1]));
    if (rule.sequence.empty()) throw FormatError("merge rule with empty sequence", lineno);
    if (rule.merged.empty() || contains_space(rule.merged)) {
      throw FormatError("merged surface must be a single non-empty word", lineno);
    }
    out.push_back(std::move(rule));
  }
  return out;
}

inline PreprocessConfig load_preprocess_config(const std::filesystem::path& blank_words,
                                               const std::filesystem::path& merge_rules) {
  PreprocessConfig cfg;
  if (!blank_words.empty()) cfg.blank_words = parse_blank_words(detail::read_file(blank_words));
  if (!merge_rules.empty()) cfg.merge_rules = parse_merge_rules(detail::read_file(merge_rules));
  return cfg;
}

}  // namespace semdec

#endif  // SEMDEC_PREPROCESS_HPP
