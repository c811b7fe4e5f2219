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

#include "unifair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unifair/errors.hpp"

namespace unifair {

double LambdaTable::at(EconomicClass economic_class) const {
  switch (economic_class) {
    case EconomicClass::kHigh:
      return high;
    case EconomicClass::kModerate:
      return moderate;
    case EconomicClass::kLow:
      return low;
  }
  return low;
}

double lambda_for(EconomicClass economic_class, const LambdaTable& table) {
  return table.at(economic_class);
}

double accessibility(double lambda, double distance_km) {
  if (lambda < 0.0 || distance_km < 0.0) {
    throw std::invalid_argument("accessibility: negative lambda or distance");
  }
  return std::exp(-lambda * distance_km);
}

double accessibility(EconomicClass economic_class, std::string_view nationality,
                     std::string_view university_country,
                     const CapitalTable& capitals, const LambdaTable& lambdas) {
  const auto d = country_distance(nationality, university_country, capitals);
  return accessibility(lambdas.at(economic_class), d.km);
}

double academic_alignment(TagSet student, TagSet program) {
  const auto united = (student | program).size();
  if (united == 0) {
    throw std::invalid_argument("academic_alignment: both tag sets are empty");
  }
  return static_cast<double>((student & program).size()) /
         static_cast<double>(united);
}

void DrsWeights::validate() const {
  if (acc < 0.0 || rep < 0.0 || acad < 0.0) {
    throw UsageError("DRS weights must be non-negative");
  }
  if (std::abs(acc + rep + acad - 1.0) > 1e-12) {
    throw UsageError("DRS weights must sum to 1");
  }
}

double drs(const DrsComponents& c) {
  double weighted = 0.0;
  double weight = 0.0;
  const auto add = [&](const std::optional<double>& value, double w) {
    if (!value) return;
    weighted += w * *value;
    weight += w;
  };
  add(c.acc, c.weights.acc);
  add(c.rep, c.weights.rep);
  add(c.acad, c.weights.acad);
  if (weight <= 0.0) {
    throw std::invalid_argument("drs: no weighted component present");
  }
  return weighted / weight;
}

double representation(std::size_t recommended_distinct, std::size_t country_total) {
  if (country_total == 0) {
    throw std::invalid_argument("representation: country has no universities");
  }
  return std::min(1.0, static_cast<double>(recommended_distinct) /
                           static_cast<double>(country_total));
}

double representation(std::string_view country, std::size_t recommended_distinct,
                      const Catalog& catalog) {
  const auto total = catalog.country_count(country);
  if (total == 0) throw NoCoverageError(std::string(country));
  return representation(recommended_distinct, total);
}

double scaled_representation(double repr, double avail, double epsilon) {
  return std::min(1.0, repr / (avail + epsilon));
}

std::optional<double> reputational_coverage(std::span<const WeightedReputation> items) {
  double numerator = 0.0;
  std::size_t total = 0;
  for (const auto& item : items) {
    numerator += static_cast<double>(item.count) * item.local_reputation;
    total += item.count;
  }
  if (total == 0) return std::nullopt;
  return numerator / static_cast<double>(total);
}

std::optional<double> reputational_coverage(
    const std::map<std::string, std::size_t>& counts_by_university,
    const Catalog& catalog) {
  std::vector<WeightedReputation> items;
  items.reserve(counts_by_university.size());
  for (const auto& [id, count] : counts_by_university) {
    const auto* u = catalog.find_by_id(id);
    if (u == nullptr) throw DataError("unknown university id '" + id + "'");
    items.push_back({local_reputation(*u, catalog), count});
  }
  return reputational_coverage(items);
}

double grs(double scaled_repr, double rep_covg) {
  return std::sqrt(scaled_repr * rep_covg);
}

CountryGrsResult country_grs(std::string_view country,
                             const std::map<std::string, std::size_t>& counts_by_university,
                             const Catalog& catalog, double epsilon) {
  CountryGrsResult r;
  r.country = CountryNames::builtin().canonical(country);
  r.avail = availability(r.country, catalog);
  for (const auto& [id, count] : counts_by_university) {
    if (count == 0) continue;
    const auto* u = catalog.find_by_id(id);
    if (u == nullptr) throw DataError("unknown university id '" + id + "'");
    if (u->country != r.country) {
      throw DataError("university '" + u->canonical_name + "' is not in " + r.country);
    }
    ++r.recommended_set_size;
    r.recommendation_count += count;
  }
  r.repr = representation(r.country, r.recommended_set_size, catalog);
  r.scaled_repr = scaled_representation(r.repr, r.avail, epsilon);
  if (auto covg = reputational_coverage(counts_by_university, catalog)) {
    r.rep_covg = *covg;
    r.rep_covg_defined = true;
  }
  r.grs = grs(r.scaled_repr, r.rep_covg);
  return r;
}

}  // namespace unifair
