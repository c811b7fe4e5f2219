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

#include "unifair/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <fmt/format.h>

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

std::string slug(std::string_view name) {
  auto key = text::name_key(name);
  std::replace(key.begin(), key.end(), ' ', '-');
  return key;
}

std::size_t unique_token_length(std::string_view key) {
  std::set<std::string> tokens;
  for (auto& t : text::split(key, ' ')) {
    if (!t.empty()) tokens.insert(std::move(t));
  }
  std::size_t length = 0;
  for (const auto& t : tokens) length += t.size();
  return length + (tokens.empty() ? 0 : tokens.size() - 1);
}

std::optional<int> to_int(std::string_view s) {
  s = text::trim(s);
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::string_view to_string(MatchStatus status) {
  switch (status) {
    case MatchStatus::kExact:
      return "exact";
    case MatchStatus::kAlias:
      return "alias";
    case MatchStatus::kFuzzy:
      return "fuzzy";
    case MatchStatus::kUnmatched:
      return "unmatched";
  }
  return "unmatched";
}

std::optional<MatchStatus> parse_match_status(std::string_view text) {
  for (auto s : {MatchStatus::kExact, MatchStatus::kAlias, MatchStatus::kFuzzy,
                 MatchStatus::kUnmatched}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

ParsedRank parse_rank(std::string_view cell) {
  cell = text::trim(cell);
  ParsedRank parsed;
  if (cell.empty() || cell == "-" || cell == "n/a" || cell == "N/A" ||
      cell == "unranked") {
    return parsed;
  }
  if (cell.front() == '=') {
    parsed.tied = true;
    cell.remove_prefix(1);
  }
  if (!cell.empty() && cell.back() == '+') {
    parsed.banded = true;
    cell.remove_suffix(1);
  }
  if (const auto dash = cell.find('-'); dash != std::string_view::npos) {
    const auto low = to_int(cell.substr(0, dash));
    const auto high = to_int(cell.substr(dash + 1));
    if (!low || !high || *high < *low) {
      throw DataError("invalid rank band '" + std::string(cell) + "'");
    }
    parsed.banded = true;
    parsed.rank = *low;
  } else {
    parsed.rank = to_int(cell);
    if (!parsed.rank) throw DataError("invalid rank '" + std::string(cell) + "'");
  }
  if (*parsed.rank < 1) {
    throw DataError("rank must be >= 1, got '" + std::string(cell) + "'");
  }
  return parsed;
}

Catalog::Catalog(std::vector<University> universities,
                 const CapitalTable& capitals, CatalogOptions options)
    : options_(options) {
  if (!(options_.fuzzy_threshold > 0.0 && options_.fuzzy_threshold <= 1.0)) {
    throw UsageError("fuzzy threshold must be in (0, 1]");
  }
  std::set<std::string> missing;
  for (auto& u : universities) {
    if (text::trim(u.canonical_name).empty()) {
      throw DataError("university with empty name");
    }
    u.canonical_name = std::string(text::trim(u.canonical_name));
    u.country = CountryNames::builtin().canonical(u.country);
    if (const auto* capital = capitals.find(u.country)) {
      u.country = capital->country;
    } else {
      missing.insert(u.country);
      continue;
    }
    const auto key = text::name_key(u.canonical_name);
    if (auto it = by_name_key_.find(key); it != by_name_key_.end()) {
      auto& kept = universities_[it->second];
      warnings_.push_back(fmt::format("duplicate university '{}' merged", u.canonical_name));
      if (u.country != kept.country) {
        warnings_.push_back(fmt::format(
            "duplicate '{}' listed under both '{}' and '{}'; keeping '{}'",
            u.canonical_name, kept.country, u.country, kept.country));
      }
      if (u.qs_rank && (!kept.qs_rank || *u.qs_rank < *kept.qs_rank)) {
        kept.qs_rank = u.qs_rank;
        kept.rank_tied = u.rank_tied;
        kept.rank_banded = u.rank_banded;
      }
      for (auto& alias : u.aliases) kept.aliases.push_back(std::move(alias));
      continue;
    }
    u.id = slug(u.canonical_name);
    by_name_key_.emplace(key, universities_.size());
    by_id_.emplace(u.id, universities_.size());
    universities_.push_back(std::move(u));
  }
  if (!missing.empty()) {
    throw DataError("catalog countries absent from the capitals table: " +
                    text::join({missing.begin(), missing.end()}, ", "));
  }

  for (std::size_t i = 0; i < universities_.size(); ++i) {
    const auto& u = universities_[i];
    ++per_country_counts_[u.country];
    if (u.qs_rank) {
      auto [it, inserted] =
          rank_ranges_.try_emplace(u.country, *u.qs_rank, *u.qs_rank);
      if (!inserted) {
        it->second.first = std::min(it->second.first, *u.qs_rank);
        it->second.second = std::max(it->second.second, *u.qs_rank);
      }
    }
    const auto key = text::name_key(u.canonical_name);
    fuzzy_keys_.push_back({key, unique_token_length(key), i});
  }
  for (std::size_t i = 0; i < universities_.size(); ++i) {
    for (const auto& alias : universities_[i].aliases) {
      index_alias(alias, i, false);
    }
  }
}

void Catalog::index_alias(std::string_view alias, std::size_t index, bool override) {
  const auto key = text::name_key(alias);
  if (key.empty()) return;
  auto [it, inserted] = by_alias_key_.try_emplace(key, index);
  if (!inserted && it->second != index) {
    if (override) {
      it->second = index;
    } else {
      warnings_.push_back(fmt::format(
          "alias '{}' claimed by both '{}' and '{}'; keeping the first",
          alias, universities_[it->second].canonical_name,
          universities_[index].canonical_name));
      return;
    }
  }
  fuzzy_keys_.push_back({key, unique_token_length(key), index});
}

Catalog Catalog::parse(std::string_view csv_content, const CapitalTable& capitals,
                       CatalogOptions options, const std::string& source) {
  const auto table = csv::Table::from_string(csv_content, source);
  const auto name_col = table.require_column("name");
  const auto country_col = table.require_column("country");
  const auto rank_col = table.require_column("qs_rank");
  const auto aliases_col = table.column("aliases");
  if (table.rows().empty()) throw DataError(source + ": catalog has no rows");

  std::vector<University> universities;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    const auto where = fmt::format("{}:{}", source, table.line_of(r));
    University u;
    u.canonical_name = std::string(text::trim(row[name_col]));
    u.country = std::string(text::trim(row[country_col]));
    if (u.canonical_name.empty()) throw DataError(where + ": empty name");
    if (u.country.empty()) throw DataError(where + ": empty country");
    try {
      const auto rank = parse_rank(row[rank_col]);
      u.qs_rank = rank.rank;
      u.rank_tied = rank.tied;
      u.rank_banded = rank.banded;
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (aliases_col) {
      for (const auto& alias : text::split(row[*aliases_col], '|')) {
        if (!text::trim(alias).empty()) {
          u.aliases.emplace_back(text::trim(alias));
        }
      }
    }
    universities.push_back(std::move(u));
  }
  return Catalog(std::move(universities), capitals, options);
}

Catalog Catalog::load(const std::filesystem::path& path,
                      const CapitalTable& capitals, CatalogOptions options) {
  return parse(csv::read_text(path), capitals, options, path.string());
}

void Catalog::add_alias(std::string_view alias, std::string_view canonical_name) {
  auto it = by_name_key_.find(text::name_key(canonical_name));
  if (it == by_name_key_.end()) {
    throw DataError("alias '" + std::string(alias) +
                    "' refers to unknown university '" +
                    std::string(canonical_name) + "'");
  }
  universities_[it->second].aliases.emplace_back(text::trim(alias));
  index_alias(alias, it->second, true);
}

void Catalog::add_aliases_from_csv(std::string_view csv_content,
                                   const std::string& source) {
  if (text::trim(csv_content).empty()) return;
  const auto table = csv::Table::from_string(csv_content, source);
  const auto alias_col = table.require_column("alias");
  const auto name_col = table.require_column("canonical_name");
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    if (text::trim(row[alias_col]).empty()) continue;
    try {
      add_alias(row[alias_col], row[name_col]);
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", source, table.line_of(r), e.what()));
    }
  }
}

void Catalog::add_aliases_from_file(const std::filesystem::path& path) {
  add_aliases_from_csv(csv::read_text(path), path.string());
}

std::size_t Catalog::country_count(std::string_view country) const {
  const auto canonical = CountryNames::builtin().canonical(country);
  if (auto it = per_country_counts_.find(canonical); it != per_country_counts_.end()) {
    return it->second;
  }
  return 0;
}

const University* Catalog::find_by_id(std::string_view id) const {
  if (auto it = by_id_.find(std::string(id)); it != by_id_.end()) {
    return &universities_[it->second];
  }
  return nullptr;
}

const University* Catalog::find_by_name(std::string_view name) const {
  if (auto it = by_name_key_.find(text::name_key(name)); it != by_name_key_.end()) {
    return &universities_[it->second];
  }
  return nullptr;
}

std::optional<std::pair<int, int>> Catalog::country_rank_range(
    std::string_view country) const {
  const auto canonical = CountryNames::builtin().canonical(country);
  if (auto it = rank_ranges_.find(canonical); it != rank_ranges_.end()) {
    return it->second;
  }
  return std::nullopt;
}

MatchResult Catalog::make_result(MatchStatus status, double similarity,
                                 std::size_t index) const {
  const auto& u = universities_[index];
  return MatchResult{status, similarity, u.id, u.canonical_name, u.country};
}

MatchResult Catalog::resolve(std::string_view freeform_name) const {
  return resolve(freeform_name, options_.fuzzy_threshold);
}

MatchResult Catalog::resolve(std::string_view freeform_name, double threshold) const {
  const auto key = text::name_key(freeform_name);
  if (key.empty()) return {};
  if (auto it = by_name_key_.find(key); it != by_name_key_.end()) {
    return make_result(MatchStatus::kExact, 1.0, it->second);
  }
  if (auto it = by_alias_key_.find(key); it != by_alias_key_.end()) {
    return make_result(MatchStatus::kAlias, 1.0, it->second);
  }

  // Indel similarity is bounded by the length difference of the compared
  // strings, which rules out most candidates without running the DP.
  const auto query_length = unique_token_length(key);
  double best = -1.0;
  std::optional<std::size_t> best_index;
  for (const auto& candidate : fuzzy_keys_) {
    const double total = static_cast<double>(query_length + candidate.unique_length);
    const double gap = query_length > candidate.unique_length
                           ? static_cast<double>(query_length - candidate.unique_length)
                           : static_cast<double>(candidate.unique_length - query_length);
    if (total > 0 && 1.0 - gap / total < threshold) continue;
    const double score = text::token_set_similarity(key, candidate.key);
    if (score > best ||
        (score == best && best_index && candidate.university < *best_index)) {
      best = score;
      best_index = candidate.university;
    }
  }
  if (best_index && best >= threshold) {
    return make_result(MatchStatus::kFuzzy, best, *best_index);
  }
  MatchResult unmatched;
  unmatched.similarity = std::max(best, 0.0);
  return unmatched;
}

double reputation(const University& university) {
  if (!university.qs_rank || *university.qs_rank > kGlobalWorstRank) return 0.0;
  return static_cast<double>(kGlobalWorstRank - *university.qs_rank) /
         static_cast<double>(kGlobalWorstRank - kGlobalBestRank);
}

double local_reputation(const University& university, const Catalog& catalog) {
  if (!university.qs_rank) return 0.0;
  const auto range = catalog.country_rank_range(university.country);
  if (!range) return 0.0;
  const auto [best, worst] = *range;
  if (worst == best) return 1.0;
  const double score = static_cast<double>(worst - *university.qs_rank) /
                       static_cast<double>(worst - best);
  return std::clamp(score, 0.0, 1.0);
}

double availability(std::string_view country, const Catalog& catalog) {
  const auto count = catalog.country_count(country);
  if (count == 0) throw NoCoverageError(std::string(text::trim(country)));
  return static_cast<double>(count) / static_cast<double>(catalog.global_count());
}

}  // namespace unifair
