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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace unifair::text {

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char delimiter);

std::string join(const std::vector<std::string>& parts, std::string_view glue);

// Lower-cases ASCII and maps Latin-1 / Latin Extended-A letters onto their
// unaccented ASCII base ("Zürich" -> "zurich", "Łódź" -> "lodz"). Code points
// outside those blocks pass through unchanged.
std::string fold(std::string_view utf8);

// fold() followed by punctuation removal and whitespace collapsing.
// Apostrophes are deleted ("King's" -> "kings"), '&' becomes "and", every
// other punctuation character becomes a word break.
std::vector<std::string> words(std::string_view utf8);

// Normalized name key used for catalog lookups: words() with common
// abbreviations expanded and the article "the" dropped, joined by spaces.
std::string name_key(std::string_view utf8);

// 1 - indel(a, b) / (|a| + |b|), where indel counts single-character
// insertions and deletions. Two empty strings score 1.
double indel_similarity(std::string_view a, std::string_view b);

// Token-set similarity over name keys: both sides are rewritten as
// "shared tokens + own remaining tokens" (each part sorted) and compared with
// indel_similarity.
double token_set_similarity(std::string_view key_a, std::string_view key_b);

// True when `needle` occurs in `haystack` on word boundaries (both operands
// are word lists).
bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle);

}  // namespace unifair::text
