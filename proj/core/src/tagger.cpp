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

#include "unifair/tagger.hpp"

#include "unifair/assets.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {

std::optional<TagSet> parse_tag_reply(std::string_view reply) {
  // Only the first non-empty line counts; models like to explain themselves.
  std::string first;
  for (const auto& l : text::split(reply, '\n')) {
    if (!text::trim(l).empty()) {
      first = std::string(text::trim(l));
      break;
    }
  }
  std::string_view line = first;
  if (line.empty()) return std::nullopt;
  if (line.substr(0, 5) == "Tags:") line = text::trim(line.substr(5));
  TagSet tags;
  for (const char sep : {'|', ',', ';'}) {
    if (line.find(sep) == std::string_view::npos) continue;
    for (const auto& part : text::split(line, sep)) {
      const auto t = text::trim(part);
      if (t.empty()) continue;
      const auto tag = parse_tag(t);
      if (!tag) return std::nullopt;
      tags.insert(*tag);
    }
    return tags.empty() ? std::nullopt : std::optional(tags);
  }
  const auto tag = parse_tag(line);
  if (!tag) return std::nullopt;
  tags.insert(*tag);
  return tags;
}

ExternalTagging classify_external(std::string_view program_name,
                                  const ModelEndpointConfig& cfg,
                                  ChatTransport& transport, const RuleSet& rules,
                                  OverrideTable* overrides, const Sleeper& sleep) {
  if (text::trim(program_name).empty()) {
    throw std::invalid_argument("program name is empty");
  }
  if (overrides != nullptr) {
    if (const auto* known = overrides->find(program_name)) return {*known, false, {}};
  }
  std::string prompt(assets::tagger_prompt());
  const auto at = prompt.find("{program}");
  if (at != std::string::npos) prompt.replace(at, 9, text::trim(program_name));

  ExternalTagging result;
  try {
    const auto c = complete(prompt, cfg, transport, cfg.api_key(), sleep);
    result.raw_reply = c.text;
    if (auto tags = parse_tag_reply(c.text)) {
      result.tags = *tags;
      result.from_model = true;
    }
  } catch (const EndpointError&) {
    // fall through to the rule tagger
  }
  if (!result.from_model) result.tags = tag_program(program_name, rules);
  if (overrides != nullptr && !result.tags.empty()) overrides->set(program_name, result.tags);
  return result;
}

}  // namespace unifair
