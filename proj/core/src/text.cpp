// Copyright 2026 The unifair Authors.
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

#include "unifair/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <set>
#include <unordered_map>

namespace unifair::text {
namespace {

// Unaccented lower-case ASCII for U+00C0..U+017F. Empty entries are
// non-letters (multiplication and division signs) and become spaces.
constexpr std::array<const char*, 0x180 - 0xC0> kLatinFold = {
    // U+00C0
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    // U+00D0
    "d", "n", "o", "o", "o", "o", "o", "", "o", "u", "u", "u", "u", "y", "th", "ss",
    // U+00E0
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    // U+00F0
    "d", "n", "o", "o", "o", "o", "o", "", "o", "u", "u", "u", "u", "y", "th", "y",
    // U+0100
    "a", "a", "a", "a", "a", "a", "c", "c", "c", "c", "c", "c", "c", "c", "d", "d",
    // U+0110
    "d", "d", "e", "e", "e", "e", "e", "e", "e", "e", "e", "e", "g", "g", "g", "g",
    // U+0120
    "g", "g", "g", "g", "h", "h", "h", "h", "i", "i", "i", "i", "i", "i", "i", "i",
    // U+0130
    "i", "i", "ij", "ij", "j", "j", "k", "k", "k", "l", "l", "l", "l", "l", "l", "l",
    // U+0140
    "l", "l", "l", "n", "n", "n", "n", "n", "n", "n", "n", "n", "o", "o", "o", "o",
    // U+0150
    "o", "o", "oe", "oe", "r", "r", "r", "r", "r", "r", "s", "s", "s", "s", "s", "s",
    // U+0160
    "s", "s", "t", "t", "t", "t", "t", "t", "u", "u", "u", "u", "u", "u", "u", "u",
    // U+0170
    "u", "u", "u", "u", "w", "w", "y", "y", "y", "z", "z", "z", "z", "z", "z", "s",
};

// Decodes one code point starting at s[i] and advances i. Malformed or
// truncated sequences decode as the single lead byte.
std::uint32_t next_code_point(std::string_view s, std::size_t& i,
                              std::size_t& length) {
  const auto lead = static_cast<unsigned char>(s[i]);
  std::size_t extra = 0;
  std::uint32_t cp = lead;
  if (lead >= 0xF0 && lead < 0xF8) {
    extra = 3;
    cp = lead & 0x07;
  } else if (lead >= 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if (lead >= 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  }
  if (lead >= 0x80 && lead < 0xC0) extra = 0;
  if (extra > 0 && i + extra >= s.size()) {
    extra = 0;
    cp = lead;
  }
  for (std::size_t k = 1; k <= extra; ++k) {
    const auto c = static_cast<unsigned char>(s[i + k]);
    if ((c & 0xC0) != 0x80) {
      extra = 0;
      cp = lead;
      break;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  length = extra + 1;
  i += length;
  return cp;
}

bool is_apostrophe(std::uint32_t cp) {
  return cp == '\'' || cp == 0x2018 || cp == 0x2019 || cp == 0x02BC ||
         cp == '`';
}

// Dashes, quotes, bullets and other general punctuation.
bool is_unicode_punct(std::uint32_t cp) {
  return (cp >= 0x2000 && cp <= 0x206F) || cp == 0x00A0 || cp == 0x00AB ||
         cp == 0x00BB || cp == 0x00B7 || cp == 0x00BF || cp == 0x00A1 ||
         cp == 0x3000 || (cp >= 0x3001 && cp <= 0x3003) || cp == 0xFF0C;
}

const std::unordered_map<std::string, std::string>& abbreviations() {
  static const std::unordered_map<std::string, std::string> kMap = {
      {"univ", "university"},     {"uni", "university"},
      {"u", "university"},        {"inst", "institute"},
      {"tech", "technology"},     {"technol", "technology"},
      {"natl", "national"},       {"nat", "national"},
      {"intl", "international"},  {"st", "saint"},
      {"ste", "sainte"},          {"coll", "college"},
      {"sch", "school"},          {"dept", "department"},
      {"centre", "center"},       {"universitat", "university"},
      {"universite", "university"}, {"universidad", "university"},
      {"universita", "university"}, {"universidade", "university"},
      {"universiteit", "university"},
  };
  return kMap;
}

}  // namespace

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view glue) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(glue);
    out.append(parts[i]);
  }
  return out;
}

std::string fold(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const std::size_t start = i;
    std::size_t length = 0;
    const std::uint32_t cp = next_code_point(utf8, i, length);
    if (cp < 0x80) {
      out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    } else if (cp >= 0xC0 && cp < 0x180) {
      const char* mapped = kLatinFold[cp - 0xC0];
      out.append(*mapped != '\0' ? mapped : " ");
    } else if (cp >= 0x218 && cp <= 0x21B) {
      out.push_back(cp < 0x21A ? 's' : 't');
    } else {
      out.append(utf8.substr(start, length));
    }
  }
  return out;
}

std::vector<std::string> words(std::string_view utf8) {
  std::vector<std::string> out;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  const std::string folded = fold(utf8);
  std::size_t i = 0;
  while (i < folded.size()) {
    const std::size_t start = i;
    std::size_t length = 0;
    const std::uint32_t cp = next_code_point(folded, i, length);
    if (is_apostrophe(cp)) continue;
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (std::isalnum(static_cast<unsigned char>(c))) {
        current.push_back(c);
      } else if (c == '&') {
        flush();
        out.emplace_back("and");
      } else {
        flush();
      }
    } else if (is_unicode_punct(cp)) {
      flush();
    } else {
      current.append(folded.substr(start, length));
    }
  }
  flush();
  return out;
}

std::string name_key(std::string_view utf8) {
  std::vector<std::string> kept;
  for (auto& word : words(utf8)) {
    if (word == "the") continue;
    const auto& abbr = abbreviations();
    if (auto it = abbr.find(word); it != abbr.end()) {
      kept.push_back(it->second);
    } else {
      kept.push_back(std::move(word));
    }
  }
  return join(kept, " ");
}

double indel_similarity(std::string_view a, std::string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 1.0;
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const std::size_t lcs = prev[b.size()];
  return 1.0 - static_cast<double>(total - 2 * lcs) / static_cast<double>(total);
}

double token_set_similarity(std::string_view key_a, std::string_view key_b) {
  std::set<std::string> ta, tb;
  for (auto& t : split(key_a, ' ')) {
    if (!t.empty()) ta.insert(std::move(t));
  }
  for (auto& t : split(key_b, ' ')) {
    if (!t.empty()) tb.insert(std::move(t));
  }
  std::vector<std::string> shared, only_a, only_b;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(),
                        std::back_inserter(shared));
  std::set_difference(ta.begin(), ta.end(), tb.begin(), tb.end(),
                      std::back_inserter(only_a));
  std::set_difference(tb.begin(), tb.end(), ta.begin(), ta.end(),
                      std::back_inserter(only_b));
  std::vector<std::string> left = shared, right = shared;
  left.insert(left.end(), only_a.begin(), only_a.end());
  right.insert(right.end(), only_b.begin(), only_b.end());
  return indel_similarity(join(left, " "), join(right, " "));
}

bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace unifair::text
