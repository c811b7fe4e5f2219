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

#include "unifair/score.hpp"

#include <algorithm>
#include <fstream>
#include <thread>
#include <utility>

#include <fmt/format.h>

#include "json.hpp"

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

using nlohmann::json;

using DistanceCache = std::map<std::pair<std::string, std::string>, double>;

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json tags_json(const TagSet& tags) {
  json out = json::array();
  for (auto t : tags.tags()) out.push_back(tag_id(t));
  return out;
}

TagSet tags_from_json(const json& j) {
  TagSet out;
  for (const auto& t : j) {
    const auto tag = parse_tag(t.get<std::string>());
    if (!tag) throw DataError("unknown tag " + t.get<std::string>());
    out.insert(*tag);
  }
  return out;
}

void score_range(std::vector<ScoredRecord>& out, std::size_t begin, std::size_t end,
                 const Catalog& catalog, const DistanceCache& distances,
                 const ScoringOptions& options) {
  for (std::size_t i = begin; i < end; ++i) {
    auto& s = out[i];
    const auto& r = s.record;
    const University* u =
        r.match.matched() ? catalog.find_by_id(r.match.university_id) : nullptr;
    if (u != nullptr) {
      s.rep = reputation(*u);
      if (s.profile.economic_class && s.profile.nationality) {
        const double d = distances.at({*s.profile.nationality, u->country});
        s.acc = accessibility(options.lambdas.at(*s.profile.economic_class), d);
      }
    }
    if (!s.student_tags.empty() && !r.program_tags.empty()) {
      s.acad = academic_alignment(s.student_tags, r.program_tags);
    }
    s.drs = drs({s.acc, s.rep, s.acad, options.weights});
  }
}

}  // namespace

std::vector<ScoredRecord> score_records(
    const std::vector<RecommendationRecord>& records, const Catalog& catalog,
    const CapitalTable& capitals,
    const std::map<std::string, ProfileAttributes>& profiles,
    const ScoringOptions& options) {
  options.weights.validate();
  std::vector<ScoredRecord> out;
  out.reserve(records.size());
  DistanceCache distances;
  for (const auto& r : records) {
    auto it = profiles.find(r.profile_id);
    if (it == profiles.end()) throw DataError("unknown profile_id '" + r.profile_id + "'");
    ScoredRecord s;
    s.record = r;
    s.profile = it->second;
    s.student_tags = student_interests(it->second, r.variant, options.grid);
    if (r.match.matched() && s.profile.nationality) {
      const University* u = catalog.find_by_id(r.match.university_id);
      if (u == nullptr) {
        throw DataError("record refers to unknown university id '" +
                        r.match.university_id + "'");
      }
      auto key = std::pair(*s.profile.nationality, u->country);
      if (!distances.contains(key)) {
        distances.emplace(key, country_distance(key.first, key.second, capitals).km);
      }
    }
    out.push_back(std::move(s));
  }

  // Each record is scored independently, so chunking does not affect results.
  unsigned threads = options.threads != 0 ? options.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kMinChunk = 2048;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, (out.size() + kMinChunk - 1) / kMinChunk));
  if (threads <= 1) {
    score_range(out, 0, out.size(), catalog, distances, options);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (out.size() + threads - 1) / threads;
  for (std::size_t begin = 0; begin < out.size(); begin += chunk) {
    pool.emplace_back([&, begin] {
      score_range(out, begin, std::min(out.size(), begin + chunk), catalog, distances,
                  options);
    });
  }
  return out;
}

std::string to_json_line(const ScoredRecord& s) {
  auto j = json::parse(to_json_line(s.record));
  json profile;
  profile["gender"] = s.profile.gender ? json(to_string(*s.profile.gender)) : json(nullptr);
  profile["economic_class"] = s.profile.economic_class
                                  ? json(to_string(*s.profile.economic_class))
                                  : json(nullptr);
  profile["nationality"] = s.profile.nationality ? json(*s.profile.nationality) : json(nullptr);
  profile["interest_tags"] = tags_json(s.profile.interest_tags);
  j["profile"] = profile;
  j["student_tags"] = tags_json(s.student_tags);
  j["scores"] = json{{"acc", optional_json(s.acc)},
                     {"rep", s.rep},
                     {"acad", optional_json(s.acad)},
                     {"drs", s.drs}};
  return j.dump();
}

ScoredRecord scored_from_json_line(std::string_view line) {
  ScoredRecord s;
  s.record = record_from_json_line(line);
  try {
    const auto j = json::parse(line);
    const auto& p = j.at("profile");
    if (!p.at("gender").is_null()) {
      s.profile.gender = parse_gender(p.at("gender").get<std::string>());
      if (!s.profile.gender) throw DataError("unknown gender");
    }
    if (!p.at("economic_class").is_null()) {
      s.profile.economic_class =
          parse_economic_class(p.at("economic_class").get<std::string>());
      if (!s.profile.economic_class) throw DataError("unknown economic class");
    }
    if (!p.at("nationality").is_null()) {
      s.profile.nationality = p.at("nationality").get<std::string>();
    }
    s.profile.interest_tags = tags_from_json(p.value("interest_tags", json::array()));
    s.student_tags = tags_from_json(j.at("student_tags"));
    const auto& scores = j.at("scores");
    s.acc = optional_number(scores, "acc");
    s.rep = scores.at("rep").get<double>();
    s.acad = optional_number(scores, "acad");
    s.drs = scores.at("drs").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scored record: ") + e.what());
  }
  return s;
}

void write_scored(const std::vector<ScoredRecord>& records,
                  const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<ScoredRecord> read_scored(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::vector<ScoredRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(scored_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

}  // namespace unifair
