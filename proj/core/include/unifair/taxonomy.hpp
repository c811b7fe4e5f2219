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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unifair {

// The five broad subject areas of the QS subject rankings.
enum class SubjectTag : std::uint8_t {
  kArtsHumanities,
  kEngineeringTechnology,
  kLifeSciencesMedicine,
  kNaturalSciences,
  kSocialSciencesManagement,
};

inline constexpr std::array<SubjectTag, 5> kAllSubjectTags = {
    SubjectTag::kArtsHumanities, SubjectTag::kEngineeringTechnology,
    SubjectTag::kLifeSciencesMedicine, SubjectTag::kNaturalSciences,
    SubjectTag::kSocialSciencesManagement};

// "EngineeringTechnology"
std::string_view tag_id(SubjectTag tag);
// "Engineering & Technology"
std::string_view tag_display_name(SubjectTag tag);
// Accepts identifiers and display names, case- and punctuation-insensitive.
std::optional<SubjectTag> parse_tag(std::string_view name);

// Small value set over the five tags.
class TagSet {
 public:
  TagSet() = default;
  TagSet(std::initializer_list<SubjectTag> tags);

  // `|`-separated tag names; throws DataError on an unknown name.
  static TagSet parse(std::string_view text);

  void insert(SubjectTag tag) { bits_ |= bit(tag); }
  bool contains(SubjectTag tag) const { return (bits_ & bit(tag)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::vector<SubjectTag> tags() const;

  // Tag identifiers joined by '|', in enum order.
  std::string to_string() const;
  // Display names joined for prose: "A", "A and B", "A, B and C".
  std::string to_prose() const;

  TagSet operator|(TagSet other) const { return TagSet(bits_ | other.bits_); }
  TagSet operator&(TagSet other) const { return TagSet(bits_ & other.bits_); }
  TagSet& operator|=(TagSet other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend bool operator==(TagSet, TagSet) = default;

  std::uint8_t bits() const { return bits_; }

 private:
  explicit TagSet(std::uint8_t bits) : bits_(bits) {}
  static std::uint8_t bit(SubjectTag tag) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(tag));
  }

  std::uint8_t bits_ = 0;
};

struct TagRule {
  std::string pattern;  // keyword or phrase, matched on whole words
  TagSet tags;
  int priority = 0;
};

// Keyword rules, ordered for evaluation: higher priority first, then longer
// phrases, then file order. A rule that matches claims the words it covered,
// so "social science" wins over a bare "science" rule.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<TagRule> rules);

  // CSV `pattern,tags,priority`, tags `|`-separated.
  static RuleSet load(const std::filesystem::path& path);
  static RuleSet parse(std::string_view csv_content,
                       const std::string& source = "<rules>");
  // The shipped default table.
  static const RuleSet& builtin();

  const std::vector<TagRule>& rules() const { return rules_; }

 private:
  std::vector<TagRule> rules_;
  std::vector<std::vector<std::string>> rule_words_;

  friend TagSet apply_rules(const RuleSet&, std::string_view);
};

// Manually reviewed program-name -> tags assignments; consulted before rules.
// Keys are normalized program names (case and punctuation folded).
class OverrideTable {
 public:
  // CSV `program_name,tags`. Duplicate names: last row wins and a warning is
  // appended to `warnings`. Unknown tag names throw DataError.
  static OverrideTable load(const std::filesystem::path& path,
                            std::vector<std::string>* warnings = nullptr);
  static OverrideTable parse(std::string_view csv_content,
                             std::vector<std::string>* warnings = nullptr,
                             const std::string& source = "<overrides>");

  const TagSet* find(std::string_view program_name) const;
  void set(std::string_view program_name, TagSet tags);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Writes `program_name,tags` rows sorted by program name.
  void save(const std::filesystem::path& path) const;

 private:
  struct Entry {
    std::string display_name;
    TagSet tags;
  };
  std::map<std::string, Entry> entries_;
};

TagSet apply_rules(const RuleSet& rules, std::string_view program_name);

// Overrides first, then the rule table. An empty result means no rule matched.
// Throws std::invalid_argument on an empty name.
TagSet tag_program(std::string_view program_name, const RuleSet& rules,
                   const OverrideTable* overrides = nullptr);

}  // namespace unifair
