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

#ifndef SEMDEC_UNICODE_HPP
#define SEMDEC_UNICODE_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace semdec {

// Canonical composition (NFC) of a UTF-8 string.
inline std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalization failed");
  }
  std::string out;
  dst.toUTF8String(out);
  return out;
}

inline bool is_nfc(std::string_view utf8) { return nfc(utf8) == utf8; }

// One decoded code point and its byte range in the source string.
struct CodePoint {
  char32_t value;
  std::size_t byte_begin;
  std::size_t byte_end;
};

// Decodes UTF-8; malformed sequences become U+FFFD covering one byte.
inline std::vector<CodePoint> code_points(std::string_view utf8) {
  std::vector<CodePoint> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    int32_t begin = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(begin),
                   static_cast<std::size_t>(i)});
  }
  return out;
}

inline bool is_space(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

// Unicode punctuation (general category P*), which covers the Arabic
// comma, semicolon and question mark as well as ASCII marks.
inline bool is_punct(char32_t c) {
  return u_ispunct(static_cast<UChar32>(c)) != 0;
}

// True when the string contains any whitespace code point.
inline bool contains_space(std::string_view utf8) {
  for (const auto& cp : code_points(utf8)) {
    if (is_space(cp.value)) return true;
  }
  return false;
}

}  // namespace semdec

#endif  // SEMDEC_UNICODE_HPP
