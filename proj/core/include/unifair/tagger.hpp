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

#include <string>
#include <string_view>

#include "unifair/llmclient.hpp"
#include "unifair/taxonomy.hpp"

namespace unifair {

struct ExternalTagging {
  TagSet tags;
  bool from_model = false;  // false when the rule tagger answered instead
  std::string raw_reply;
};

// Tags from a model reply such as "Natural Sciences | Engineering & Technology".
// nullopt when the reply is empty or names anything outside the taxonomy.
std::optional<TagSet> parse_tag_reply(std::string_view reply);

// Asks the endpoint to tag one program. Out-of-vocabulary or failed replies
// fall back to the rule tagger. A non-empty result is stored in `overrides`
// when given, so later runs reuse it without another call.
ExternalTagging classify_external(std::string_view program_name,
                                  const ModelEndpointConfig& cfg,
                                  ChatTransport& transport, const RuleSet& rules,
                                  OverrideTable* overrides, const Sleeper& sleep);

}  // namespace unifair
