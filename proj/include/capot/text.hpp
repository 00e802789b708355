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

#ifndef CAPOT_TEXT_HPP_
#define CAPOT_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace capot::text {

// Unicode canonical composition (NFC). Invalid UTF-8 raises DataError.
std::string nfc(std::string_view utf8);

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view codepoints);
std::string to_utf8(char32_t codepoint);

bool is_space(char32_t c);

// Full Unicode simple lowercasing, code point by code point.
std::string lower(std::string_view utf8);
char32_t lower(char32_t c);

// Splits on runs of whitespace; leading/trailing whitespace is dropped.
std::vector<std::string> split_whitespace(std::string_view utf8);

std::string join(const std::vector<std::string>& tokens,
                 std::string_view sep = " ");

std::string trim(std::string_view utf8);

bool is_ascii_alpha(std::string_view s);

// A token split into leading punctuation, core, and trailing punctuation, so
// "punishment?" looks up as "punishment" and reattaches the "?".
struct TokenParts {
  std::string prefix;
  std::string core;
  std::string suffix;

  std::string joined() const { return prefix + core + suffix; }
};
TokenParts split_token(std::string_view token);

// Applies the case pattern of `model` (all-caps or leading capital) to the
// lowercase ASCII word `word`.
std::string match_case(std::string_view model, std::string_view word);

}  // namespace capot::text

#endif  // CAPOT_TEXT_HPP_
