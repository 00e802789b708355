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

// Porter, "An algorithm for suffix stripping", 1980. The rule tables follow
// the published algorithm exactly (ABLI -> ABLE, no LOGI rule).

#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include "capot/text.hpp"
#include "capot/text_resources.hpp"

namespace capot {
namespace {

class PorterWord {
 public:
  explicit PorterWord(std::string w) : w_(std::move(w)) {}

  std::string release() && { return std::move(w_); }

  void step1a() {
    if (ends("sses")) {
      set_suffix(4, "ss");
    } else if (ends("ies")) {
      set_suffix(3, "i");
    } else if (ends("ss")) {
      // unchanged
    } else if (ends("s")) {
      set_suffix(1, "");
    }
  }

  void step1b() {
    bool trimmed = false;
    if (ends("eed")) {
      if (measure(w_.size() - 3) > 0) set_suffix(3, "ee");
    } else if (ends("ed")) {
      if (has_vowel(w_.size() - 2)) {
        set_suffix(2, "");
        trimmed = true;
      }
    } else if (ends("ing")) {
      if (has_vowel(w_.size() - 3)) {
        set_suffix(3, "");
        trimmed = true;
      }
    }
    if (!trimmed) return;
    if (ends("at")) {
      set_suffix(2, "ate");
    } else if (ends("bl")) {
      set_suffix(2, "ble");
    } else if (ends("iz")) {
      set_suffix(2, "ize");
    } else if (ends_double_consonant(w_.size())) {
      char last = w_.back();
      if (last != 'l' && last != 's' && last != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && ends_cvc(w_.size())) {
      w_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(w_.size() - 1)) set_suffix(1, "i");
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                20>
        kRules{{{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
                {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
                {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
                {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
                {"iviti", "ive"},   {"biliti", "ble"}}};
    apply_measured(kRules, 0);
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                7>
        kRules{{{"icate", "ic"},
                {"ative", ""},
                {"alize", "al"},
                {"iciti", "ic"},
                {"ical", "ic"},
                {"ful", ""},
                {"ness", ""}}};
    apply_measured(kRules, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes{
        "al",  "ance", "ence", "er",  "ic",  "able", "ible",
        "ant", "ement", "ment", "ent", "ion", "ou",   "ism",
        "ate", "iti",  "ous",  "ive", "ize"};
    // Longest match wins, so test candidates longest first.
    std::string_view match;
    for (std::string_view s : kSuffixes) {
      if (ends(s) && s.size() > match.size()) match = s;
    }
    if (match.empty()) return;
    const std::size_t stem_len = w_.size() - match.size();
    if (measure(stem_len) <= 1) return;
    if (match == "ion") {
      if (stem_len == 0) return;
      char before = w_[stem_len - 1];
      if (before != 's' && before != 't') return;
    }
    w_.resize(stem_len);
  }

  void step5() {
    if (ends("e")) {
      const std::size_t stem_len = w_.size() - 1;
      const int m = measure(stem_len);
      if (m > 1 || (m == 1 && !ends_cvc(stem_len))) w_.resize(stem_len);
    }
    if (measure(w_.size()) > 1 && ends_double_consonant(w_.size()) &&
        w_.back() == 'l') {
      w_.pop_back();
    }
  }

 private:
  bool is_consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC){m}[V] for the prefix w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < len; ++i) {
      bool consonant = is_consonant(i);
      if (consonant && prev_vowel) ++m;
      prev_vowel = !consonant;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool ends_double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && is_consonant(len - 1);
  }

  // *o: prefix ends consonant-vowel-consonant, last not w, x or y.
  bool ends_cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!is_consonant(len - 3) || is_consonant(len - 2) ||
        !is_consonant(len - 1)) {
      return false;
    }
    char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) const {
    return w_.size() >= suffix.size() &&
           std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
  }

  void set_suffix(std::size_t strip, std::string_view replacement) {
    w_.resize(w_.size() - strip);
    w_ += replacement;
  }

  // First rule whose suffix matches is the only candidate; it fires when the
  // remaining stem has measure > min_measure.
  template <std::size_t N>
  void apply_measured(
      const std::array<std::pair<std::string_view, std::string_view>, N>& rules,
      int min_measure) {
    for (const auto& [suffix, replacement] : rules) {
      if (ends(suffix)) {
        if (measure(w_.size() - suffix.size()) > min_measure) {
          set_suffix(suffix.size(), replacement);
        }
        return;
      }
    }
  }

  std::string w_;
};

}  // namespace

std::string porter_stem(std::string_view token) {
  if (!text::is_ascii_alpha(token)) return std::string(token);
  std::string lowered(token);
  for (char& c : lowered) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (lowered.size() <= 2) return lowered;
  PorterWord w(std::move(lowered));
  w.step1a();
  w.step1b();
  w.step1c();
  w.step2();
  w.step3();
  w.step4();
  w.step5();
  return std::move(w).release();
}

}  // namespace capot
