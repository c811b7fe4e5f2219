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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "unifair/assets.hpp"
#include "unifair/catalog.hpp"
#include "unifair/geodesy.hpp"
#include "unifair/ingest.hpp"
#include "unifair/profiles.hpp"
#include "unifair/score.hpp"

namespace {

using namespace unifair;

const CapitalTable& capitals() {
  static const CapitalTable t = CapitalTable::parse(assets::capitals_csv());
  return t;
}

// Synthetic catalog of n universities spread across every capital.
Catalog synthetic_catalog(std::size_t n) {
  std::vector<University> unis;
  const auto& caps = capitals().capitals();
  for (std::size_t i = 0; i < n; ++i) {
    University u;
    u.canonical_name = "University of " + caps[i % caps.size()].name + " Campus " +
                       std::to_string(i);
    u.country = caps[i % caps.size()].country;
    if (i % 4 != 0) u.qs_rank = static_cast<int>(1 + i % 1400);
    unis.push_back(std::move(u));
  }
  return Catalog(std::move(unis), capitals());
}

void BM_Vincenty(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-180, 180);
  std::vector<std::pair<GeoPoint, GeoPoint>> pairs;
  for (int i = 0; i < 1024; ++i) pairs.emplace_back(GeoPoint(lat(rng), lon(rng)),
                                                     GeoPoint(lat(rng), lon(rng)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 1023];
    benchmark::DoNotOptimize(vincenty_distance(a, b));
  }
}
BENCHMARK(BM_Vincenty);

void BM_ResolveExact(benchmark::State& state) {
  const auto catalog = synthetic_catalog(static_cast<std::size_t>(state.range(0)));
  const auto name = catalog.universities()[catalog.global_count() / 2].canonical_name;
  for (auto _ : state) benchmark::DoNotOptimize(catalog.resolve(name));
}
BENCHMARK(BM_ResolveExact)->Arg(1500);

void BM_ResolveFuzzy(benchmark::State& state) {
  const auto catalog = synthetic_catalog(static_cast<std::size_t>(state.range(0)));
  auto name = catalog.universities()[catalog.global_count() / 2].canonical_name;
  name[3] = 'x';
  for (auto _ : state) benchmark::DoNotOptimize(catalog.resolve(name));
}
BENCHMARK(BM_ResolveFuzzy)->Arg(1500);

void BM_ParseResponse(benchmark::State& state) {
  const std::string text =
      "Here are three options:\n\n1. **University of Oxford** \xE2\x80\x93 MSc Social Policy\n"
      "2. **ETH Zurich** \xE2\x80\x93 Robotics, Systems and Control\n"
      "3. **University of Cape Town** \xE2\x80\x93 Public Health\n\nGood luck!";
  for (auto _ : state) benchmark::DoNotOptimize(parse_response(text));
}
BENCHMARK(BM_ParseResponse);

void BM_ScoreRecords(benchmark::State& state) {
  const auto catalog = synthetic_catalog(1500);
  const auto registry = profile_registry({});
  const auto profiles = enumerate_profiles({});
  std::vector<RecommendationRecord> records;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
    RecommendationRecord r;
    r.profile_id = profiles[i % profiles.size()].id;
    r.model_id = "bench";
    r.variant = i % 2 ? PromptVariant::kBase : PromptVariant::kBackground;
    r.position = static_cast<int>(i % 3) + 1;
    const auto& u = catalog.universities()[(i * 7919) % catalog.global_count()];
    r.raw_university = u.canonical_name;
    r.match = catalog.resolve(u.canonical_name);
    r.program_tags = TagSet{SubjectTag::kEngineeringTechnology};
    records.push_back(std::move(r));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_records(records, catalog, capitals(), registry));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreRecords)->Arg(10800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
