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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unifair {

// Geographic coordinate in decimal degrees.
class GeoPoint {
 public:
  // Throws DataError when latitude is outside [-90, 90] or longitude is
  // outside [-180, 180].
  GeoPoint(double latitude, double longitude);

  double latitude() const { return latitude_; }
  double longitude() const { return longitude_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double latitude_;
  double longitude_;
};

struct GeodesicDistance {
  double km = 0.0;
  // Set when the ellipsoidal iteration did not converge and the value is a
  // great-circle distance on the mean-radius sphere.
  bool approximate = false;
};

namespace wgs84 {
inline constexpr double kSemiMajorAxisM = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kMeanRadiusKm = 6371.0088;
}  // namespace wgs84

inline constexpr int kVincentyMaxIterations = 200;
inline constexpr double kVincentyTolerance = 1e-12;

// Inverse geodesic distance on the WGS-84 ellipsoid (Vincenty, 1975), with a
// spherical fallback for near-antipodal pairs where the lambda iteration
// fails to converge.
GeodesicDistance vincenty_distance(const GeoPoint& a, const GeoPoint& b);

// Haversine distance on a sphere of the WGS-84 mean radius.
double great_circle_km(const GeoPoint& a, const GeoPoint& b);

// Canonical country names. Aliases such as "USA" or "U.K." map onto the
// canonical spelling used by the capitals and catalog files.
class CountryNames {
 public:
  static const CountryNames& builtin();

  // Returns the canonical spelling when `name` is a known alias, otherwise the
  // trimmed input unchanged.
  std::string canonical(std::string_view name) const;

  void add_alias(std::string_view alias, std::string_view canonical_name);

 private:
  std::map<std::string, std::string> aliases_;  // keyed by text::name_key
};

struct Capital {
  std::string country;
  std::string name;
  GeoPoint location;
  std::string iso2;  // empty when the file has no iso2 column
};

// Country -> capital lookup. Loaded once and immutable afterwards.
class CapitalTable {
 public:
  CapitalTable() = default;
  explicit CapitalTable(std::vector<Capital> capitals);

  // CSV with header `country,capital,lat,lon` (an optional `iso2` column is
  // kept for exports). Throws DataError on malformed rows or duplicate
  // countries.
  static CapitalTable load(const std::filesystem::path& path);
  static CapitalTable parse(std::string_view csv_content,
                            const std::string& source = "<capitals>");

  // Throws UnknownCountryError.
  const Capital& at(std::string_view country) const;
  const Capital* find(std::string_view country) const;
  bool contains(std::string_view country) const { return find(country) != nullptr; }

  // Throws DataError listing every country in `required` that is missing.
  void require_all(const std::vector<std::string>& required) const;

  std::size_t size() const { return capitals_.size(); }
  const std::vector<Capital>& capitals() const { return capitals_; }

 private:
  std::vector<Capital> capitals_;
  std::map<std::string, std::size_t> index_;  // canonical country -> slot
};

// Distance between the capitals of two countries; 0 for the same country.
// Throws UnknownCountryError naming the missing country.
GeodesicDistance country_distance(std::string_view from, std::string_view to,
                                  const CapitalTable& table);

}  // namespace unifair
