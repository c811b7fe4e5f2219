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
#include <vector>

#include "unifair/catalog.hpp"
#include "unifair/geodesy.hpp"
#include "unifair/llmclient.hpp"
#include "unifair/metrics.hpp"
#include "unifair/profiles.hpp"
#include "unifair/report.hpp"
#include "unifair/taxonomy.hpp"

namespace unifair {

// Empty optionals fall back to the built-in assets; the catalog has no
// built-in default.
struct RunPaths {
  std::optional<std::filesystem::path> catalog;
  std::optional<std::filesystem::path> aliases;
  std::optional<std::filesystem::path> capitals;
  std::optional<std::filesystem::path> rules;
  std::optional<std::filesystem::path> overrides;
  std::optional<std::filesystem::path> templates;
  std::optional<std::filesystem::path> development_status;
  std::filesystem::path output_dir = ".";
};

// Everything a pipeline run needs, read from one INI-style file:
//
//   [paths]      catalog, aliases, capitals, rules, overrides, templates,
//                development_status, output_dir
//   [metrics]    lambda_high, lambda_moderate, lambda_low, w_acc, w_rep,
//                w_acad, fuzzy_threshold, epsilon, grs_scope, top_n
//   [profiles]   genders, economic_classes, nationalities,
//                background_interests (comma separated)
//   [endpoint.<name>]  base_url, model_id, api_key_env, temperature, top_p,
//                max_new_tokens, repeats, max_parallel, max_attempts,
//                initial_backoff_ms, backoff_multiplier, max_backoff_ms,
//                timeout_s
//
// Relative paths resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path source;  // empty for defaults
  RunPaths paths;
  LambdaTable lambdas;
  DrsWeights weights;
  double fuzzy_threshold = kDefaultFuzzyThreshold;
  double epsilon = kStabilityEpsilon;
  GrsScope scope = GrsScope::kGlobal;
  std::size_t top_n = 20;
  ProfileGridConfig grid;
  std::vector<ModelEndpointConfig> endpoints;

  // Throws UsageError on unknown keys, bad values or unreadable files.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(std::string_view content, const std::filesystem::path& base_dir,
                         const std::string& source = "<config>");

  // By section name or model id. Throws UsageError.
  const ModelEndpointConfig& endpoint(std::string_view name) const;

  // Problems that would stop a run: missing files and out-of-range values.
  std::vector<std::string> problems() const;
};

struct Assets {
  CapitalTable capitals;
  RuleSet rules;
  OverrideTable overrides;
  TemplateSet templates = TemplateSet::builtin();
  std::optional<Catalog> catalog;
  std::map<std::string, std::string> development_status;
  std::vector<std::string> warnings;

  // Throws UsageError when no catalog is configured.
  const Catalog& require_catalog() const;
};

// Loads every configured file. The catalog is only loaded when
// `with_catalog` is set.
Assets load_assets(const RunConfig& config, bool with_catalog = true);

}  // namespace unifair
