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

#include "unifair/taxonomy.hpp"

namespace unifair {

enum class Gender { kMale, kFemale, kTransgender };
enum class EconomicClass { kLow, kModerate, kHigh };

std::string_view to_string(Gender gender);
std::string_view to_string(EconomicClass economic_class);
std::optional<Gender> parse_gender(std::string_view text);
// Accepts "low", "moderate" (or "middle"), "high", with an optional "-class".
std::optional<EconomicClass> parse_economic_class(std::string_view text);

inline constexpr Gender kAllGenders[] = {Gender::kMale, Gender::kFemale,
                                         Gender::kTransgender};
inline constexpr EconomicClass kAllEconomicClasses[] = {
    EconomicClass::kLow, EconomicClass::kModerate, EconomicClass::kHigh};

// The 40 prompt nationalities, in the order they are enumerated.
const std::vector<std::string>& default_nationalities();

enum class PromptVariant {
  kBase,
  kRegional,
  kBackground,
  kReducedGender,
  kReducedClass,
  kReducedNationality,
};

inline constexpr PromptVariant kAllVariants[] = {
    PromptVariant::kBase,          PromptVariant::kRegional,
    PromptVariant::kBackground,    PromptVariant::kReducedGender,
    PromptVariant::kReducedClass,  PromptVariant::kReducedNationality};

std::string_view to_string(PromptVariant variant);
std::optional<PromptVariant> parse_variant(std::string_view text);
bool is_reduced(PromptVariant variant);

enum class DemographicAttribute { kGender, kEconomicClass, kNationality };
std::string_view to_string(DemographicAttribute attribute);
// Throws UsageError for anything but gender / economic_class / nationality.
DemographicAttribute parse_attribute(std::string_view text);

// Demographic facts known about whoever a prompt describes. Grid profiles set
// all three; reduced-context prompts set exactly one.
struct ProfileAttributes {
  std::optional<Gender> gender;
  std::optional<EconomicClass> economic_class;
  std::optional<std::string> nationality;
  TagSet interest_tags;

  bool complete() const { return gender && economic_class && nationality; }
};

struct StudentProfile {
  std::string id;
  Gender gender = Gender::kMale;
  EconomicClass economic_class = EconomicClass::kLow;
  std::string nationality;
  TagSet interest_tags;

  ProfileAttributes attributes() const {
    return {gender, economic_class, nationality, interest_tags};
  }
};

struct ProfileGridConfig {
  std::vector<Gender> genders{std::begin(kAllGenders), std::end(kAllGenders)};
  std::vector<EconomicClass> economic_classes{std::begin(kAllEconomicClasses),
                                              std::end(kAllEconomicClasses)};
  std::vector<std::string> nationalities = default_nationalities();
  // Interests used by the background variant when a profile has none.
  TagSet background_interests{SubjectTag::kEngineeringTechnology};
};

// "female-low-nigeria"
std::string profile_id(Gender gender, EconomicClass economic_class,
                       std::string_view nationality);
// "only-gender-female", "only-class-low", "only-nationality-nigeria"
std::string reduced_profile_id(const ProfileAttributes& single_attribute);

// Cartesian product in gender-major, class, nationality order. Throws
// UsageError on an empty axis or a duplicated value.
std::vector<StudentProfile> enumerate_profiles(const ProfileGridConfig& config);

// Interests that define T_s for a prompt: the profile's own tags, or the
// configured default for the background variant, or nothing.
TagSet student_interests(const ProfileAttributes& profile, PromptVariant variant,
                         const ProfileGridConfig& config);

// Every profile id the grid and its reduced-context prompts can produce.
std::map<std::string, ProfileAttributes> profile_registry(
    const ProfileGridConfig& config);

struct PromptInstance {
  std::string profile_id;
  PromptVariant variant = PromptVariant::kBase;
  std::string text;
  std::map<std::string, std::string> placeholder_values;
};

// One text fragment per file stem (base, regional, background,
// reduced_gender, reduced_class, reduced_nationality, format). Placeholders are
// {gender}, {economic_class}, {nationality} and {interests}; anything else is
// rejected at construction, as is a reduced template that references an
// attribute other than its own.
class TemplateSet {
 public:
  explicit TemplateSet(std::map<std::string, std::string> fragments);

  static const TemplateSet& builtin();
  // Reads <stem>.txt from `directory`; missing files keep the built-in text.
  static TemplateSet load(const std::filesystem::path& directory);

  const std::string& fragment(std::string_view stem) const;

 private:
  std::map<std::string, std::string, std::less<>> fragments_;
};

std::vector<std::string> placeholders_in(std::string_view text);

PromptInstance render_prompt(const StudentProfile& profile, PromptVariant variant,
                             const TemplateSet& templates,
                             const ProfileGridConfig& config = {});

// One prompt per value of `attribute` (3 genders, 3 classes, or every
// configured nationality).
std::vector<PromptInstance> reduced_context_profiles(
    DemographicAttribute attribute, const TemplateSet& templates,
    const ProfileGridConfig& config = {});

std::string to_json_line(const StudentProfile& profile);
std::string to_json_line(const PromptInstance& prompt);
// Throws DataError on malformed input.
PromptInstance prompt_from_json_line(std::string_view line);

}  // namespace unifair
