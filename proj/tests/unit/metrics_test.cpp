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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "unifair/errors.hpp"
#include "test_support.hpp"

namespace unifair {
namespace {

using enum SubjectTag;
using testing::capitals;
using testing::desk_catalog;

TEST(Accessibility, DefaultLambdas) {
  EXPECT_EQ(lambda_for(EconomicClass::kHigh), 0.0001);
  EXPECT_EQ(lambda_for(EconomicClass::kModerate), 0.0005);
  EXPECT_EQ(lambda_for(EconomicClass::kLow), 0.001);
}

TEST(Accessibility, ClosedForm) {
  EXPECT_EQ(accessibility(0.001, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(accessibility(0.001, 1000.0), std::exp(-1.0));
  EXPECT_THROW(accessibility(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(accessibility(0.1, -1.0), std::invalid_argument);
  const double d = country_distance("United Kingdom", "France", capitals()).km;
  EXPECT_DOUBLE_EQ(accessibility(EconomicClass::kLow, "UK", "France", capitals()),
                   std::exp(-0.001 * d));
  EXPECT_EQ(accessibility(EconomicClass::kLow, "Kenya", "Kenya", capitals()), 1.0);
}

TEST(Accessibility, MonotoneInDistanceAndLambda) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.0, 0.01), dist(0.0, 20040.0);
  for (int i = 0; i < 1000; ++i) {
    const double l = lam(rng), d1 = dist(rng), d2 = dist(rng);
    const double a1 = accessibility(l, d1), a2 = accessibility(l, d2);
    EXPECT_GE(a1, 0.0);
    EXPECT_LE(a1, 1.0);
    if (d1 < d2) EXPECT_GE(a1, a2);
    if (d1 > d2) EXPECT_LE(a1, a2);
    EXPECT_GE(accessibility(l / 2, d1), a1);
  }
}

TEST(Jaccard, BoundsAndSymmetry) {
  for (unsigned a = 0; a < 32; ++a) {
    for (unsigned b = 0; b < 32; ++b) {
      TagSet ta, tb;
      for (auto t : kAllSubjectTags) {
        if (a & (1u << static_cast<unsigned>(t))) ta.insert(t);
        if (b & (1u << static_cast<unsigned>(t))) tb.insert(t);
      }
      if (ta.empty() && tb.empty()) {
        EXPECT_THROW(academic_alignment(ta, tb), std::invalid_argument);
        continue;
      }
      const double j = academic_alignment(ta, tb);
      EXPECT_GE(j, 0.0);
      EXPECT_LE(j, 1.0);
      EXPECT_EQ(j, academic_alignment(tb, ta));
      EXPECT_EQ(j == 1.0, ta == tb);
    }
  }
  EXPECT_DOUBLE_EQ(academic_alignment({kNaturalSciences, kEngineeringTechnology},
                                      {kEngineeringTechnology}),
                   0.5);
}

TEST(Reputation, MonotoneOverRanks) {
  double previous = 2.0;
  for (int r = 1; r <= 1200; ++r) {
    University u;
    u.qs_rank = r;
    const double rep = reputation(u);
    EXPECT_LT(rep, previous);
    EXPECT_GE(rep, 0.0);
    previous = rep;
  }
  University top, last, beyond, unranked;
  top.qs_rank = 1;
  last.qs_rank = 1200;
  beyond.qs_rank = 1401;
  EXPECT_EQ(reputation(top), 1.0);
  EXPECT_EQ(reputation(last), 0.0);
  EXPECT_EQ(reputation(beyond), 0.0);
  EXPECT_EQ(reputation(unranked), 0.0);
}

TEST(Drs, RenormalizesOverPresentComponents) {
  EXPECT_DOUBLE_EQ(drs({0.3, 0.6, 0.9, {}}), 0.6);
  EXPECT_DOUBLE_EQ(drs({0.1786, 0.7355, std::nullopt, {}}), (0.1786 + 0.7355) / 2);
  EXPECT_DOUBLE_EQ(drs({std::nullopt, 0.4, std::nullopt, {}}), 0.4);
  EXPECT_DOUBLE_EQ(drs({0.2, 0.4, 1.0, DrsWeights{0.5, 0.25, 0.25}}), 0.45);
  EXPECT_DOUBLE_EQ(drs({0.2, std::nullopt, 1.0, DrsWeights{0.5, 0.25, 0.25}}),
                   (0.1 + 0.25) / 0.75);
  EXPECT_THROW(drs({std::nullopt, std::nullopt, std::nullopt, {}}), std::invalid_argument);
  EXPECT_THROW(drs({std::nullopt, 0.5, std::nullopt, DrsWeights{1.0, 0.0, 0.0}}),
               std::invalid_argument);
}

TEST(Drs, WeightValidation) {
  EXPECT_NO_THROW(DrsWeights{}.validate());
  EXPECT_THROW((DrsWeights{0.5, 0.5, 0.5}.validate()), UsageError);
  EXPECT_THROW((DrsWeights{1.5, -0.5, 0.0}.validate()), UsageError);
}

TEST(Grs, ScaledRepresentationClipsAtOne) {
  EXPECT_EQ(scaled_representation(0.5, 0.1), 1.0);
  EXPECT_EQ(scaled_representation(0.0, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(scaled_representation(0.05, 0.1), 0.05 / (0.1 + 1e-6));
  // Epsilon keeps a tiny availability finite.
  EXPECT_EQ(scaled_representation(1e-9, 0.0), 1e-9 / 1e-6);
  EXPECT_EQ(representation(5, 4), 1.0);
  EXPECT_DOUBLE_EQ(representation(1, 4), 0.25);
  EXPECT_THROW(representation(1, 0), std::invalid_argument);
}

TEST(Grs, GeometricMeanBelowArithmeticMean) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = u(rng), c = u(rng);
    const double g = grs(s, c);
    EXPECT_LE(g, (s + c) / 2 + 1e-15);
    EXPECT_GE(g, std::min(s, c) - 1e-15);
    EXPECT_LE(g, 1.0);
  }
  EXPECT_EQ(grs(1.0, 0.0), 0.0);
  EXPECT_EQ(grs(1.0, 1.0), 1.0);
}

TEST(Grs, ReputationalCoverageIsCountWeighted) {
  const WeightedReputation items[] = {{1.0, 3}, {0.0, 1}};
  EXPECT_DOUBLE_EQ(*reputational_coverage(items), 0.75);
  EXPECT_FALSE(reputational_coverage(std::span<const WeightedReputation>{}));
}

TEST(Grs, CountryResultOnDeskCatalog) {
  const auto cat = desk_catalog();
  const auto r = country_grs(
      "UK", {{"university-of-oxford", 3}, {"university-of-hull", 1}}, cat);
  EXPECT_EQ(r.country, "United Kingdom");
  EXPECT_EQ(r.recommended_set_size, 2u);
  EXPECT_EQ(r.recommendation_count, 4u);
  EXPECT_DOUBLE_EQ(r.repr, 0.5);
  EXPECT_DOUBLE_EQ(r.avail, 0.4);
  EXPECT_EQ(r.scaled_repr, 1.0);
  EXPECT_DOUBLE_EQ(r.rep_covg, 0.75);
  EXPECT_TRUE(r.rep_covg_defined);
  EXPECT_DOUBLE_EQ(r.grs, std::sqrt(0.75));

  const auto empty = country_grs("Nigeria", {}, cat);
  EXPECT_EQ(empty.grs, 0.0);
  EXPECT_FALSE(empty.rep_covg_defined);
  EXPECT_THROW(country_grs("India", {}, cat), NoCoverageError);
  EXPECT_THROW(country_grs("Nigeria", {{"university-of-oxford", 1}}, cat), DataError);
  EXPECT_THROW(country_grs("Nigeria", {{"nowhere", 1}}, cat), DataError);
}

}  // namespace
}  // namespace unifair
