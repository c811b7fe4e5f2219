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
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "unifair/catalog.hpp"
#include "unifair/profiles.hpp"
#include "unifair/taxonomy.hpp"

namespace unifair {

struct ParseFlags {
  bool reformatted = false;  // not in the strict "N. <University> - <Program>" shape
  bool truncated = false;    // fewer than three pairs
  bool extra_items = false;  // more than three pairs; the surplus was dropped

  std::vector<std::string> names() const;
  static ParseFlags from_names(const std::vector<std::string>& names);
  ParseFlags& operator|=(const ParseFlags& other);
  friend bool operator==(const ParseFlags&, const ParseFlags&) = default;
};

struct ParsedPair {
  std::string university;
  std::string program;
  bool reformatted = false;
};

struct ParsedResponse {
  std::vector<ParsedPair> pairs;  // at most kMaxPairs
  ParseFlags flags;
};

inline constexpr std::size_t kMaxPairs = 3;

// Extracts (university, program) pairs from free-form model output. Accepts
// numbered lists, bullets and markdown emphasis. Hyphen, en or em dash and
// colon separators are recognised. Never throws.
ParsedResponse parse_response(std::string_view raw);

struct DecodeParams {
  double temperature = 0.75;
  double top_p = 0.95;
  int max_new_tokens = 300;

  friend bool operator==(const DecodeParams&, const DecodeParams&) = default;
};

// One model call as stored in the raw-response JSONL.
struct RawResponse {
  std::string profile_id;
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  int run_index = 1;
  std::string prompt_text;
  std::string response_text;
  DecodeParams decode;
  std::string timestamp;
  int attempts = 0;    // endpoint calls made, 0 when unknown
  std::string usage;   // endpoint usage object as JSON text, may be empty
};

std::string to_json_line(const RawResponse& response);
// Throws DataError on malformed JSON or schema violations.
RawResponse raw_response_from_json_line(std::string_view line);

struct ResponseKey {
  std::string profile_id;
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  int run_index = 1;

  auto operator<=>(const ResponseKey&) const = default;
  std::string to_string() const;
};

struct RecommendationRecord {
  std::string profile_id;
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  int run_index = 1;
  int position = 1;  // 1..3
  std::string raw_university;
  std::string raw_program;
  MatchResult match;
  TagSet program_tags;
  ParseFlags parse_flags;

  ResponseKey key() const { return {profile_id, model_id, variant, run_index}; }
};

std::string to_json_line(const RecommendationRecord& record);
RecommendationRecord record_from_json_line(std::string_view line);

// Per-response bookkeeping, kept so refusals (zero pairs) stay visible.
struct ResponseSummary {
  ResponseKey key;
  std::size_t pair_count = 0;
  ParseFlags flags;
  DecodeParams decode;
  std::string timestamp;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct RunManifest {
  std::string source;
  std::set<std::string> models;
  std::set<std::string> variants;
  std::vector<DecodeParams> decode_params;  // distinct, in first-seen order
  std::string first_timestamp;
  std::string last_timestamp;
};

struct RunLog {
  RunManifest manifest;
  std::vector<ResponseSummary> responses;
  std::vector<RecommendationRecord> records;
  std::vector<LineError> errors;
  std::size_t unmatched = 0;
  std::size_t untagged = 0;
};

struct IngestContext {
  // Known profile ids; null disables the referential check.
  const std::map<std::string, ProfileAttributes>* profiles = nullptr;
  const OverrideTable* overrides = nullptr;
};

// Parses, resolves and tags every line. Malformed lines become LineErrors and
// ingestion continues.
RunLog ingest_run(std::istream& in, const Catalog& catalog, const RuleSet& rules,
                  const IngestContext& context, const std::string& source = "<stdin>");
RunLog ingest_run(const std::filesystem::path& path, const Catalog& catalog,
                  const RuleSet& rules, const IngestContext& context);

// Parsed-record JSONL at `path` plus `<path>.manifest.json` holding the
// manifest and response summaries.
void write_run_log(const RunLog& log, const std::filesystem::path& path);
RunLog read_run_log(const std::filesystem::path& path);

std::filesystem::path manifest_path_for(const std::filesystem::path& records_path);

}  // namespace unifair
