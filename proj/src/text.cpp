/*
 * Copyright 2026 The capot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "capot/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cctype>

#include "capot/errors.hpp"

namespace capot::text {

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw DataError("NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw DataError("invalid UTF-8 in text");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(char32_t codepoint) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(codepoint), error);
  if (error) throw DataError("code point cannot be encoded as UTF-8");
  return std::string(reinterpret_cast<const char*>(buf), n);
}

std::string to_utf8(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t c : codepoints) out += to_utf8(c);
  return out;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

char32_t lower(char32_t c) {
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));
}

std::string lower(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (char32_t c : to_u32(utf8)) out += to_utf8(lower(c));
  return out;
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : to_u32(utf8)) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(to_utf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(to_utf8(current));
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string trim(std::string_view utf8) {
  std::u32string s = to_u32(utf8);
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return to_utf8(std::u32string_view(s).substr(b, e - b));
}

bool is_ascii_alpha(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (!std::isalpha(c) || c >= 0x80) return false;
  }
  return true;
}

TokenParts split_token(std::string_view token) {
  std::u32string s = to_u32(token);
  std::size_t b = 0;
  std::size_t e = s.size();
  auto is_word = [](char32_t c) { return u_isalnum(static_cast<UChar32>(c)); };
  while (b < e && !is_word(s[b])) ++b;
  while (e > b && !is_word(s[e - 1])) --e;
  std::u32string_view view(s);
  return TokenParts{to_utf8(view.substr(0, b)), to_utf8(view.substr(b, e - b)),
                    to_utf8(view.substr(e))};
}

std::string match_case(std::string_view model, std::string_view word) {
  if (model.empty() || word.empty()) return std::string(word);
  bool all_upper = true;
  bool any_alpha = false;
  for (unsigned char c : model) {
    if (std::isalpha(c)) {
      any_alpha = true;
      if (!std::isupper(c)) all_upper = false;
    }
  }
  std::string out(word);
  if (any_alpha && all_upper && model.size() > 1) {
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (std::isupper(static_cast<unsigned char>(model.front()))) {
    out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
  }
  return out;
}

}  // namespace capot::text
