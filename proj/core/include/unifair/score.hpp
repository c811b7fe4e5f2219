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

#include "unifair/catalog.hpp"
#include "unifair/geodesy.hpp"
#include "unifair/ingest.hpp"
#include "unifair/metrics.hpp"
#include "unifair/profiles.hpp"

namespace unifair {

struct ScoringOptions {
  LambdaTable lambdas;
  DrsWeights weights;
  ProfileGridConfig grid;  // source of the background-variant interests
  unsigned threads = 0;    // 0 = hardware concurrency
};

// A recommendation with the profile it was made to and its DRS components.
// Absent components: acc when the university is unmatched or the profile has
// no class or nationality; acad when either tag set is empty.
struct ScoredRecord {
  RecommendationRecord record;
  ProfileAttributes profile;
  TagSet student_tags;
  std::optional<double> acc;
  double rep = 0.0;
  std::optional<double> acad;
  double drs = 0.0;
};

// Scores every record. Throws DataError for records whose profile id is not
// in `profiles`, UnknownCountryError for a nationality without a capital.
std::vector<ScoredRecord> score_records(
    const std::vector<RecommendationRecord>& records, const Catalog& catalog,
    const CapitalTable& capitals,
    const std::map<std::string, ProfileAttributes>& profiles,
    const ScoringOptions& options = {});

std::string to_json_line(const ScoredRecord& record);
ScoredRecord scored_from_json_line(std::string_view line);

void write_scored(const std::vector<ScoredRecord>& records,
                  const std::filesystem::path& path);
std::vector<ScoredRecord> read_scored(const std::filesystem::path& path);

}  // namespace unifair
