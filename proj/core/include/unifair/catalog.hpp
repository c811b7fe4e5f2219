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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unifair/geodesy.hpp"

namespace unifair {

struct University {
  std::string id;  // slug of the canonical name, unique within a catalog
  std::string canonical_name;
  std::string country;  // canonical country name
  std::optional<int> qs_rank;  // absent = unranked
  bool rank_tied = false;    // "=17" style entries
  bool rank_banded = false;  // "1201-1400" style entries, stored as the lower bound
  std::vector<std::string> aliases;
};

enum class MatchStatus { kExact, kAlias, kFuzzy, kUnmatched };

std::string_view to_string(MatchStatus status);
std::optional<MatchStatus> parse_match_status(std::string_view text);

// Outcome of resolving a free-form university name. Unmatched results carry
// empty identity fields.
struct MatchResult {
  MatchStatus status = MatchStatus::kUnmatched;
  double similarity = 0.0;
  std::string university_id;
  std::string canonical_name;
  std::string country;

  bool matched() const { return status != MatchStatus::kUnmatched; }
};

inline constexpr int kGlobalBestRank = 1;
inline constexpr int kGlobalWorstRank = 1200;
inline constexpr double kDefaultFuzzyThreshold = 0.85;

struct CatalogOptions {
  double fuzzy_threshold = kDefaultFuzzyThreshold;
};

// University corpus with per-country counts and name indexes. Immutable once
// built; every query is safe to call concurrently.
class Catalog {
 public:
  // Builds the catalog. Universities whose country is not in `capitals` are a
  // DataError; duplicate names are merged and reported in warnings().
  Catalog(std::vector<University> universities, const CapitalTable& capitals,
          CatalogOptions options = {});

  // CSV `name,country,qs_rank,aliases` (aliases `|`-separated, optional).
  static Catalog load(const std::filesystem::path& path,
                      const CapitalTable& capitals, CatalogOptions options = {});
  static Catalog parse(std::string_view csv_content, const CapitalTable& capitals,
                       CatalogOptions options = {},
                       const std::string& source = "<catalog>");

  // Extra aliases from an `alias,canonical_name` CSV. Unknown canonical names
  // are a DataError. Later aliases replace earlier ones.
  void add_aliases_from_file(const std::filesystem::path& path);
  void add_aliases_from_csv(std::string_view csv_content,
                            const std::string& source = "<aliases>");
  void add_alias(std::string_view alias, std::string_view canonical_name);

  const std::vector<University>& universities() const { return universities_; }
  std::size_t global_count() const { return universities_.size(); }
  const std::map<std::string, std::size_t>& per_country_counts() const {
    return per_country_counts_;
  }
  // 0 when the country has no universities.
  std::size_t country_count(std::string_view country) const;

  const University* find_by_id(std::string_view id) const;
  const University* find_by_name(std::string_view name) const;

  // Best and worst rank among the ranked universities of a country.
  std::optional<std::pair<int, int>> country_rank_range(std::string_view country) const;

  double fuzzy_threshold() const { return options_.fuzzy_threshold; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  MatchResult resolve(std::string_view freeform_name) const;
  MatchResult resolve(std::string_view freeform_name, double threshold) const;

 private:
  struct FuzzyKey {
    std::string key;
    std::size_t unique_length;  // length of the deduplicated token string
    std::size_t university;
  };

  MatchResult make_result(MatchStatus status, double similarity,
                          std::size_t index) const;
  void index_alias(std::string_view alias, std::size_t index, bool override);

  CatalogOptions options_;
  std::vector<University> universities_;
  std::map<std::string, std::size_t> per_country_counts_;
  std::map<std::string, std::pair<int, int>> rank_ranges_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_name_key_;
  std::unordered_map<std::string, std::size_t> by_alias_key_;
  std::vector<FuzzyKey> fuzzy_keys_;
  std::vector<std::string> warnings_;
};

// Global reputation, linear in rank between 1 (score 1) and 1200 (score 0).
// Unranked and beyond-1200 universities score 0.
double reputation(const University& university);

// Reputation normalized over the ranked universities of the university's own
// country. A country with a single distinct rank scores its ranked members 1.
double local_reputation(const University& university, const Catalog& catalog);

// Share of the catalog located in `country`. Throws NoCoverageError when the
// country has no universities.
double availability(std::string_view country, const Catalog& catalog);

inline MatchResult resolve(std::string_view freeform_name, const Catalog& catalog) {
  return catalog.resolve(freeform_name);
}

// Parses a QS rank cell: "17", "=17", "1201-1400", "1401+", or blank.
struct ParsedRank {
  std::optional<int> rank;
  bool tied = false;
  bool banded = false;
};
ParsedRank parse_rank(std::string_view cell);

}  // namespace unifair
