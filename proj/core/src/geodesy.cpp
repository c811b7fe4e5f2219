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

#include "unifair/geodesy.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap_pi(double radians) {
  radians = std::remainder(radians, 2.0 * std::numbers::pi);
  return radians;
}

std::optional<double> vincenty_inverse_m(const GeoPoint& p1,
                                         const GeoPoint& p2) {
  const double a = wgs84::kSemiMajorAxisM;
  const double f = wgs84::kFlattening;
  const double b = a * (1.0 - f);

  const double lon_diff = wrap_pi((p2.longitude() - p1.longitude()) * kDegToRad);
  const double reduced1 = std::atan((1.0 - f) * std::tan(p1.latitude() * kDegToRad));
  const double reduced2 = std::atan((1.0 - f) * std::tan(p2.latitude() * kDegToRad));
  const double sin_u1 = std::sin(reduced1), cos_u1 = std::cos(reduced1);
  const double sin_u2 = std::sin(reduced2), cos_u2 = std::cos(reduced2);

  double lambda = lon_diff;
  double sin_sigma = 0, cos_sigma = 0, sigma = 0, cos_sq_alpha = 0,
         cos_2sigma_m = 0;
  bool converged = false;
  for (int iter = 0; iter < kVincentyMaxIterations; ++iter) {
    const double sin_lambda = std::sin(lambda), cos_lambda = std::cos(lambda);
    const double t1 = cos_u2 * sin_lambda;
    const double t2 = cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda;
    sin_sigma = std::sqrt(t1 * t1 + t2 * t2);
    if (sin_sigma == 0.0) return 0.0;
    cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
    sigma = std::atan2(sin_sigma, cos_sigma);
    const double sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
    cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
    // Equatorial lines have cos^2(alpha) = 0.
    cos_2sigma_m =
        cos_sq_alpha != 0.0 ? cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha : 0.0;
    const double c = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha));
    const double previous = lambda;
    lambda = lon_diff +
             (1.0 - c) * f * sin_alpha *
                 (sigma + c * sin_sigma *
                              (cos_2sigma_m +
                               c * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
    if (std::abs(lambda) > std::numbers::pi || !std::isfinite(lambda)) {
      return std::nullopt;
    }
    if (std::abs(lambda - previous) < kVincentyTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) return std::nullopt;

  const double u_sq = cos_sq_alpha * (a * a - b * b) / (b * b);
  const double big_a =
      1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
  const double big_b =
      u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
  const double c2 = cos_2sigma_m * cos_2sigma_m;
  const double delta_sigma =
      big_b * sin_sigma *
      (cos_2sigma_m +
       big_b / 4.0 *
           (cos_sigma * (-1.0 + 2.0 * c2) -
            big_b / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma * sin_sigma) *
                (-3.0 + 4.0 * c2)));
  return b * big_a * (sigma - delta_sigma);
}

}  // namespace

GeoPoint::GeoPoint(double latitude, double longitude)
    : latitude_(latitude), longitude_(longitude) {
  if (!(latitude >= -90.0 && latitude <= 90.0)) {
    throw DataError(fmt::format("latitude {} outside [-90, 90]", latitude));
  }
  if (!(longitude >= -180.0 && longitude <= 180.0)) {
    throw DataError(fmt::format("longitude {} outside [-180, 180]", longitude));
  }
}

double great_circle_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.latitude() * kDegToRad;
  const double phi2 = b.latitude() * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.longitude() - a.longitude()) * kDegToRad;
  const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) *
                       std::sin(dlambda / 2);
  return 2.0 * wgs84::kMeanRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

GeodesicDistance vincenty_distance(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return {};
  // Fixed argument order makes the result bit-for-bit symmetric.
  const bool swap = std::pair(a.latitude(), a.longitude()) >
                    std::pair(b.latitude(), b.longitude());
  const GeoPoint& first = swap ? b : a;
  const GeoPoint& second = swap ? a : b;
  if (auto metres = vincenty_inverse_m(first, second)) {
    return {*metres / 1000.0, false};
  }
  return {great_circle_km(first, second), true};
}

const CountryNames& CountryNames::builtin() {
  static const CountryNames kNames = [] {
    CountryNames names;
    const std::pair<const char*, const char*> kAliases[] = {
        {"USA", "United States"},
        {"US", "United States"},
        {"U.S.", "United States"},
        {"U.S.A.", "United States"},
        {"United States of America", "United States"},
        {"America", "United States"},
        {"UK", "United Kingdom"},
        {"U.K.", "United Kingdom"},
        {"Great Britain", "United Kingdom"},
        {"Britain", "United Kingdom"},
        {"England", "United Kingdom"},
        {"Scotland", "United Kingdom"},
        {"Wales", "United Kingdom"},
        {"Northern Ireland", "United Kingdom"},
        {"Korea", "South Korea"},
        {"Republic of Korea", "South Korea"},
        {"Korea, Republic of", "South Korea"},
        {"Korea (South)", "South Korea"},
        {"Russian Federation", "Russia"},
        {"Czechia", "Czech Republic"},
        {"Türkiye", "Turkey"},
        {"Turkiye", "Turkey"},
        {"Hong Kong", "Hong Kong SAR"},
        {"Hong Kong SAR, China", "Hong Kong SAR"},
        {"Macau", "Macau SAR"},
        {"Macao", "Macau SAR"},
        {"Macao SAR", "Macau SAR"},
        {"Viet Nam", "Vietnam"},
        {"UAE", "United Arab Emirates"},
        {"Mainland China", "China"},
        {"China (Mainland)", "China"},
        {"People's Republic of China", "China"},
        {"PRC", "China"},
        {"KSA", "Saudi Arabia"},
        {"The Netherlands", "Netherlands"},
        {"Holland", "Netherlands"},
        {"Iran, Islamic Republic of", "Iran"},
        {"Brunei Darussalam", "Brunei"},
        {"Côte d'Ivoire", "Ivory Coast"},
        {"Slovak Republic", "Slovakia"},
        {"Palestinian Territory, Occupied", "Palestine"},
        {"Republic of Ireland", "Ireland"},
        {"PNG", "Papua New Guinea"},
        {"NZ", "New Zealand"},
        {"Aotearoa", "New Zealand"},
    };
    for (const auto& [alias, canonical] : kAliases) {
      names.add_alias(alias, canonical);
    }
    return names;
  }();
  return kNames;
}

std::string CountryNames::canonical(std::string_view name) const {
  const auto trimmed = text::trim(name);
  if (auto it = aliases_.find(text::name_key(trimmed)); it != aliases_.end()) {
    return it->second;
  }
  return std::string(trimmed);
}

void CountryNames::add_alias(std::string_view alias,
                             std::string_view canonical_name) {
  aliases_[text::name_key(alias)] = std::string(canonical_name);
}

CapitalTable::CapitalTable(std::vector<Capital> capitals)
    : capitals_(std::move(capitals)) {
  for (std::size_t i = 0; i < capitals_.size(); ++i) {
    const auto key = text::name_key(capitals_[i].country);
    if (!index_.emplace(key, i).second) {
      throw DataError("duplicate capital entry for country '" +
                      capitals_[i].country + "'");
    }
  }
}

namespace {

std::vector<Capital> capitals_from(const csv::Table& table) {
  const auto& source = table.source();
  const auto country_col = table.require_column("country");
  const auto capital_col = table.require_column("capital");
  const auto lat_col = table.require_column("lat");
  const auto lon_col = table.require_column("lon");
  const auto iso_col = table.column("iso2");

  std::vector<Capital> capitals;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    const auto where = fmt::format("{}:{}", source, table.line_of(r));
    const std::string country(text::trim(row[country_col]));
    if (country.empty()) throw DataError(where + ": empty country");
    double lat = 0, lon = 0;
    try {
      std::size_t used = 0;
      const std::string lat_text(text::trim(row[lat_col]));
      lat = std::stod(lat_text, &used);
      if (used != lat_text.size()) throw std::invalid_argument("lat");
      const std::string lon_text(text::trim(row[lon_col]));
      lon = std::stod(lon_text, &used);
      if (used != lon_text.size()) throw std::invalid_argument("lon");
    } catch (const std::logic_error&) {
      throw DataError(where + ": invalid coordinates for '" + country + "'");
    }
    try {
      capitals.push_back(Capital{
          CountryNames::builtin().canonical(country),
          std::string(text::trim(row[capital_col])), GeoPoint(lat, lon),
          iso_col ? std::string(text::trim(row[*iso_col])) : std::string()});
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return capitals;
}

}  // namespace

CapitalTable CapitalTable::parse(std::string_view csv_content,
                                 const std::string& source) {
  return CapitalTable(capitals_from(csv::Table::from_string(csv_content, source)));
}

CapitalTable CapitalTable::load(const std::filesystem::path& path) {
  return CapitalTable(capitals_from(csv::Table::read_file(path)));
}

const Capital* CapitalTable::find(std::string_view country) const {
  const auto canonical = CountryNames::builtin().canonical(country);
  if (auto it = index_.find(text::name_key(canonical)); it != index_.end()) {
    return &capitals_[it->second];
  }
  return nullptr;
}

const Capital& CapitalTable::at(std::string_view country) const {
  if (const auto* capital = find(country)) return *capital;
  throw UnknownCountryError(std::string(text::trim(country)));
}

void CapitalTable::require_all(const std::vector<std::string>& required) const {
  std::vector<std::string> missing;
  for (const auto& country : required) {
    if (!contains(country)) missing.push_back(country);
  }
  if (!missing.empty()) {
    throw DataError("capitals table is missing: " + text::join(missing, ", "));
  }
}

GeodesicDistance country_distance(std::string_view from, std::string_view to,
                                  const CapitalTable& table) {
  const auto& a = table.at(from);
  const auto& b = table.at(to);
  if (&a == &b) return {};
  return vincenty_distance(a.location, b.location);
}

}  // namespace unifair
