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

#include "unifair/taxonomy.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "unifair/assets.hpp"
#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

struct TagNames {
  SubjectTag tag;
  std::string_view id;
  std::string_view display;
};

constexpr std::array<TagNames, 5> kTagNames = {{
    {SubjectTag::kArtsHumanities, "ArtsHumanities", "Arts & Humanities"},
    {SubjectTag::kEngineeringTechnology, "EngineeringTechnology",
     "Engineering & Technology"},
    {SubjectTag::kLifeSciencesMedicine, "LifeSciencesMedicine",
     "Life Sciences & Medicine"},
    {SubjectTag::kNaturalSciences, "NaturalSciences", "Natural Sciences"},
    {SubjectTag::kSocialSciencesManagement, "SocialSciencesManagement",
     "Social Sciences & Management"},
}};

// Degree designations carry no subject ("Master of Arts in Economics").
const std::vector<std::vector<std::string>>& degree_phrases() {
  static const std::vector<std::vector<std::string>> kPhrases = [] {
    std::vector<std::vector<std::string>> out;
    for (const char* phrase :
         {"master of arts", "master of science", "bachelor of arts",
          "bachelor of science", "master of philosophy", "doctor of philosophy",
          "master of research", "master of studies"}) {
      out.push_back(text::words(phrase));
    }
    return out;
  }();
  return kPhrases;
}

std::string override_key(std::string_view name) {
  return text::join(text::words(name), " ");
}

}  // namespace

std::string_view tag_id(SubjectTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)].id;
}

std::string_view tag_display_name(SubjectTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)].display;
}

std::optional<SubjectTag> parse_tag(std::string_view name) {
  const auto key = text::join(text::words(name), "");
  if (key.empty()) return std::nullopt;
  for (const auto& entry : kTagNames) {
    if (key == text::join(text::words(entry.id), "") ||
        key == text::join(text::words(entry.display), "")) {
      return entry.tag;
    }
  }
  return std::nullopt;
}

TagSet::TagSet(std::initializer_list<SubjectTag> tags) {
  for (auto tag : tags) insert(tag);
}

TagSet TagSet::parse(std::string_view text) {
  TagSet set;
  for (const auto& part : text::split(text, '|')) {
    const auto trimmed = text::trim(part);
    if (trimmed.empty()) continue;
    const auto tag = parse_tag(trimmed);
    if (!tag) throw DataError("unknown subject tag '" + std::string(trimmed) + "'");
    set.insert(*tag);
  }
  return set;
}

std::size_t TagSet::size() const {
  return static_cast<std::size_t>(std::popcount(bits_));
}

std::vector<SubjectTag> TagSet::tags() const {
  std::vector<SubjectTag> out;
  for (auto tag : kAllSubjectTags) {
    if (contains(tag)) out.push_back(tag);
  }
  return out;
}

std::string TagSet::to_string() const {
  std::vector<std::string> names;
  for (auto tag : tags()) names.emplace_back(tag_id(tag));
  return text::join(names, "|");
}

std::string TagSet::to_prose() const {
  const auto list = tags();
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += (i + 1 == list.size()) ? " and " : ", ";
    out += tag_display_name(list[i]);
  }
  return out;
}

RuleSet::RuleSet(std::vector<TagRule> rules) {
  std::vector<std::vector<std::string>> words;
  for (const auto& rule : rules) {
    auto w = text::words(rule.pattern);
    if (w.empty()) throw DataError("tag rule with empty pattern");
    if (rule.tags.empty()) {
      throw DataError("tag rule '" + rule.pattern + "' has no tags");
    }
    words.push_back(std::move(w));
  }
  std::vector<std::size_t> order(rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rules[a].priority != rules[b].priority) {
      return rules[a].priority > rules[b].priority;
    }
    return words[a].size() > words[b].size();
  });
  for (auto i : order) {
    rules_.push_back(rules[i]);
    rule_words_.push_back(words[i]);
  }
}

RuleSet RuleSet::parse(std::string_view csv_content, const std::string& source) {
  const auto table = csv::Table::from_string(csv_content, source);
  const auto pattern_col = table.require_column("pattern");
  const auto tags_col = table.require_column("tags");
  const auto priority_col = table.column("priority");
  std::vector<TagRule> rules;
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    const auto& row = table.rows()[r];
    const auto where = fmt::format("{}:{}", source, table.line_of(r));
    TagRule rule;
    rule.pattern = std::string(text::trim(row[pattern_col]));
    try {
      rule.tags = TagSet::parse(row[tags_col]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (priority_col && !text::trim(row[*priority_col]).empty()) {
      try {
        rule.priority = std::stoi(std::string(text::trim(row[*priority_col])));
      } catch (const std::logic_error&) {
        throw DataError(where + ": invalid priority");
      }
    }
    if (rule.pattern.empty()) throw DataError(where + ": empty pattern");
    if (rule.tags.empty()) throw DataError(where + ": rule has no tags");
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
  return parse(csv::read_text(path), path.string());
}

const RuleSet& RuleSet::builtin() {
  static const RuleSet kRules =
      parse(assets::subject_rules_csv(), "<builtin subject_rules.csv>");
  return kRules;
}

TagSet apply_rules(const RuleSet& rules, std::string_view program_name) {
  auto words = text::words(program_name);
  std::vector<bool> claimed(words.size(), false);

  const auto claim_matches = [&](const std::vector<std::string>& phrase) {
    bool matched = false;
    if (phrase.size() > words.size()) return false;
    for (std::size_t start = 0; start + phrase.size() <= words.size(); ++start) {
      bool ok = true;
      for (std::size_t k = 0; k < phrase.size() && ok; ++k) {
        ok = !claimed[start + k] && words[start + k] == phrase[k];
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < phrase.size(); ++k) claimed[start + k] = true;
      matched = true;
    }
    return matched;
  };

  for (const auto& phrase : degree_phrases()) claim_matches(phrase);

  TagSet result;
  for (std::size_t i = 0; i < rules.rules_.size(); ++i) {
    if (claim_matches(rules.rule_words_[i])) result |= rules.rules_[i].tags;
  }
  return result;
}

TagSet tag_program(std::string_view program_name, const RuleSet& rules,
                   const OverrideTable* overrides) {
  if (text::trim(program_name).empty()) {
    throw std::invalid_argument("tag_program: empty program name");
  }
  if (overrides != nullptr) {
    if (const auto* tags = overrides->find(program_name)) return *tags;
  }
  return apply_rules(rules, program_name);
}

OverrideTable OverrideTable::parse(std::string_view csv_content,
                                   std::vector<std::string>* warnings,
                                   const std::string& source) {
  OverrideTable table;
  if (text::trim(csv_content).empty()) return table;
  const auto csv_table = csv::Table::from_string(csv_content, source);
  const auto name_col = csv_table.require_column("program_name");
  const auto tags_col = csv_table.require_column("tags");
  for (std::size_t r = 0; r < csv_table.rows().size(); ++r) {
    const auto& row = csv_table.rows()[r];
    const auto where = fmt::format("{}:{}", source, csv_table.line_of(r));
    const auto name = text::trim(row[name_col]);
    if (name.empty()) continue;
    TagSet tags;
    try {
      tags = TagSet::parse(row[tags_col]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (table.find(name) != nullptr && warnings != nullptr) {
      warnings->push_back(where + ": duplicate override for '" +
                          std::string(name) + "', last row wins");
    }
    table.set(name, tags);
  }
  return table;
}

OverrideTable OverrideTable::load(const std::filesystem::path& path,
                                  std::vector<std::string>* warnings) {
  return parse(csv::read_text(path), warnings, path.string());
}

const TagSet* OverrideTable::find(std::string_view program_name) const {
  if (auto it = entries_.find(override_key(program_name)); it != entries_.end()) {
    return &it->second.tags;
  }
  return nullptr;
}

void OverrideTable::set(std::string_view program_name, TagSet tags) {
  entries_[override_key(program_name)] =
      Entry{std::string(text::trim(program_name)), tags};
}

void OverrideTable::save(const std::filesystem::path& path) const {
  auto out = csv::open_output(path);
  out << "program_name,tags\n";
  for (const auto& [key, entry] : entries_) {
    out << csv::format_row({entry.display_name, entry.tags.to_string()}) << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace unifair
