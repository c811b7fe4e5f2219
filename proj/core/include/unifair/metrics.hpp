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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unifair/catalog.hpp"
#include "unifair/geodesy.hpp"
#include "unifair/profiles.hpp"
#include "unifair/taxonomy.hpp"

namespace unifair {

// Distance-decay rates per economic class, per km.
struct LambdaTable {
  double high = 0.0001;
  double moderate = 0.0005;
  double low = 0.001;

  double at(EconomicClass economic_class) const;
};

double lambda_for(EconomicClass economic_class, const LambdaTable& table = {});

// exp(-lambda * d). Throws std::invalid_argument on negative inputs.
double accessibility(double lambda, double distance_km);

// Accessibility between the student's nationality and the university's
// country, using capital-to-capital geodesic distance. Throws
// UnknownCountryError.
double accessibility(EconomicClass economic_class, std::string_view nationality,
                     std::string_view university_country,
                     const CapitalTable& capitals, const LambdaTable& lambdas = {});

// |student ∩ program| / |student ∪ program|. Throws std::invalid_argument when
// both sets are empty.
double academic_alignment(TagSet student, TagSet program);

struct DrsWeights {
  double acc = 1.0 / 3.0;
  double rep = 1.0 / 3.0;
  double acad = 1.0 / 3.0;

  // Throws UsageError unless non-negative and summing to 1 within 1e-12.
  void validate() const;
};

// Components of one recommendation's DRS. Absent components are dropped and
// the remaining weights renormalized.
struct DrsComponents {
  std::optional<double> acc;
  std::optional<double> rep;
  std::optional<double> acad;
  DrsWeights weights;
};

// Throws std::invalid_argument when no component is present or every present
// component has zero weight.
double drs(const DrsComponents& components);

inline constexpr double kStabilityEpsilon = 1e-6;

// min(1, recommended / total). Throws std::invalid_argument when total is 0.
double representation(std::size_t recommended_distinct, std::size_t country_total);

// Representation of `country` from its distinct recommended catalog ids.
// Throws NoCoverageError for a country without catalog universities.
double representation(std::string_view country, std::size_t recommended_distinct,
                      const Catalog& catalog);

double scaled_representation(double repr, double avail,
                             double epsilon = kStabilityEpsilon);

struct WeightedReputation {
  double local_reputation = 0.0;
  std::size_t count = 0;
};

// Recommendation-count-weighted mean of local reputation; nullopt when the
// total count is zero.
std::optional<double> reputational_coverage(std::span<const WeightedReputation> items);

// Same, from university-id -> recommendation count.
std::optional<double> reputational_coverage(
    const std::map<std::string, std::size_t>& counts_by_university,
    const Catalog& catalog);

// sqrt(scaled_repr * rep_covg).
double grs(double scaled_repr, double rep_covg);

struct CountryGrsResult {
  std::string country;
  double repr = 0.0;
  double avail = 0.0;
  double scaled_repr = 0.0;
  double rep_covg = 0.0;
  bool rep_covg_defined = false;  // false when nothing in the country was recommended
  double grs = 0.0;
  std::size_t recommended_set_size = 0;
  std::size_t recommendation_count = 0;
};

// All GRS quantities for one country from its recommendation multiplicities
// (university id -> count, ids must belong to `country`). Throws
// NoCoverageError.
CountryGrsResult country_grs(std::string_view country,
                             const std::map<std::string, std::size_t>& counts_by_university,
                             const Catalog& catalog,
                             double epsilon = kStabilityEpsilon);

}  // namespace unifair
