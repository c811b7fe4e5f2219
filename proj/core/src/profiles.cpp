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

#include "unifair/profiles.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "unifair/assets.hpp"
#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

using nlohmann::json;

constexpr std::string_view kTemplateStems[] = {
    "base",           "regional",      "background",         "reduced_gender",
    "reduced_class",  "reduced_nationality", "format"};

std::string slug(std::string_view text) {
  return text::join(text::words(text), "-");
}

std::string_view template_stem(PromptVariant variant) {
  return to_string(variant);
}

// Placeholders each reduced template may reference.
std::string_view reduced_placeholder(std::string_view stem) {
  if (stem == "reduced_gender") return "gender";
  if (stem == "reduced_class") return "economic_class";
  if (stem == "reduced_nationality") return "nationality";
  return {};
}

bool is_placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || c == '_';
}

std::string substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& values,
                       std::map<std::string, std::string>& used) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_placeholder_char(tmpl[j])) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        const std::string name(tmpl.substr(i + 1, j - i - 1));
        auto it = values.find(name);
        if (it == values.end()) {
          throw DataError("template placeholder {" + name +
                          "} has no value for this prompt");
        }
        out += it->second;
        used[name] = it->second;
        i = j + 1;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

void append_sentence(std::string& text, std::string_view sentence) {
  const auto trimmed = text::trim(sentence);
  if (trimmed.empty()) return;
  if (!text.empty()) text.push_back(' ');
  text.append(trimmed);
}

}  // namespace

std::string_view to_string(Gender gender) {
  switch (gender) {
    case Gender::kMale:
      return "male";
    case Gender::kFemale:
      return "female";
    case Gender::kTransgender:
      return "transgender";
  }
  return "male";
}

std::string_view to_string(EconomicClass economic_class) {
  switch (economic_class) {
    case EconomicClass::kLow:
      return "low";
    case EconomicClass::kModerate:
      return "moderate";
    case EconomicClass::kHigh:
      return "high";
  }
  return "low";
}

std::optional<Gender> parse_gender(std::string_view text) {
  const auto key = text::join(text::words(text), " ");
  for (auto g : kAllGenders) {
    if (key == to_string(g)) return g;
  }
  return std::nullopt;
}

std::optional<EconomicClass> parse_economic_class(std::string_view text) {
  auto words = text::words(text);
  if (words.size() == 2 && words[1] == "class") words.pop_back();
  if (words.size() != 1) return std::nullopt;
  if (words[0] == "middle") return EconomicClass::kModerate;
  for (auto c : kAllEconomicClasses) {
    if (words[0] == to_string(c)) return c;
  }
  return std::nullopt;
}

const std::vector<std::string>& default_nationalities() {
  static const std::vector<std::string> kNationalities = {
      "Nigeria",      "Egypt",          "South Africa", "Kenya",
      "Ghana",        "Ethiopia",       "Algeria",      "Morocco",
      "China",        "India",          "Japan",        "South Korea",
      "Indonesia",    "Thailand",       "Saudi Arabia", "Vietnam",
      "France",       "Germany",        "Italy",        "Spain",
      "United Kingdom", "Sweden",       "Poland",       "Greece",
      "United States", "Canada",        "Mexico",       "Cuba",
      "Costa Rica",   "Jamaica",        "Brazil",       "Argentina",
      "Chile",        "Peru",           "Colombia",     "Australia",
      "New Zealand",  "Fiji",           "Papua New Guinea", "Tonga"};
  return kNationalities;
}

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kBase:
      return "base";
    case PromptVariant::kRegional:
      return "regional";
    case PromptVariant::kBackground:
      return "background";
    case PromptVariant::kReducedGender:
      return "reduced_gender";
    case PromptVariant::kReducedClass:
      return "reduced_class";
    case PromptVariant::kReducedNationality:
      return "reduced_nationality";
  }
  return "base";
}

std::optional<PromptVariant> parse_variant(std::string_view text) {
  const auto trimmed = text::trim(text);
  for (auto v : kAllVariants) {
    if (trimmed == to_string(v)) return v;
  }
  return std::nullopt;
}

bool is_reduced(PromptVariant variant) {
  return variant == PromptVariant::kReducedGender ||
         variant == PromptVariant::kReducedClass ||
         variant == PromptVariant::kReducedNationality;
}

std::string_view to_string(DemographicAttribute attribute) {
  switch (attribute) {
    case DemographicAttribute::kGender:
      return "gender";
    case DemographicAttribute::kEconomicClass:
      return "economic_class";
    case DemographicAttribute::kNationality:
      return "nationality";
  }
  return "gender";
}

DemographicAttribute parse_attribute(std::string_view text) {
  const auto trimmed = text::trim(text);
  for (auto a : {DemographicAttribute::kGender, DemographicAttribute::kEconomicClass,
                 DemographicAttribute::kNationality}) {
    if (trimmed == to_string(a)) return a;
  }
  throw UsageError("invalid demographic attribute '" + std::string(trimmed) +
                   "' (expected gender, economic_class or nationality)");
}

std::string profile_id(Gender gender, EconomicClass economic_class,
                       std::string_view nationality) {
  return std::string(to_string(gender)) + "-" +
         std::string(to_string(economic_class)) + "-" + slug(nationality);
}

std::string reduced_profile_id(const ProfileAttributes& single_attribute) {
  if (single_attribute.gender) {
    return "only-gender-" + std::string(to_string(*single_attribute.gender));
  }
  if (single_attribute.economic_class) {
    return "only-class-" + std::string(to_string(*single_attribute.economic_class));
  }
  if (single_attribute.nationality) {
    return "only-nationality-" + slug(*single_attribute.nationality);
  }
  throw std::invalid_argument("reduced_profile_id: no attribute set");
}

std::vector<StudentProfile> enumerate_profiles(const ProfileGridConfig& config) {
  if (config.genders.empty() || config.economic_classes.empty() ||
      config.nationalities.empty()) {
    throw UsageError("profile grid has an empty axis");
  }
  std::set<Gender> genders(config.genders.begin(), config.genders.end());
  if (genders.size() != config.genders.size()) {
    throw UsageError("duplicate gender in profile config");
  }
  std::set<EconomicClass> classes(config.economic_classes.begin(),
                                  config.economic_classes.end());
  if (classes.size() != config.economic_classes.size()) {
    throw UsageError("duplicate economic class in profile config");
  }
  std::set<std::string> seen;
  for (const auto& n : config.nationalities) {
    if (!seen.insert(slug(n)).second) {
      throw UsageError("duplicate nationality in profile config: '" + n + "'");
    }
  }

  std::vector<StudentProfile> out;
  out.reserve(config.genders.size() * config.economic_classes.size() *
              config.nationalities.size());
  for (auto g : config.genders) {
    for (auto c : config.economic_classes) {
      for (const auto& n : config.nationalities) {
        out.push_back(StudentProfile{profile_id(g, c, n), g, c, n, {}});
      }
    }
  }
  return out;
}

TagSet student_interests(const ProfileAttributes& profile, PromptVariant variant,
                         const ProfileGridConfig& config) {
  if (!profile.interest_tags.empty()) return profile.interest_tags;
  if (variant == PromptVariant::kBackground) return config.background_interests;
  return {};
}

std::map<std::string, ProfileAttributes> profile_registry(
    const ProfileGridConfig& config) {
  std::map<std::string, ProfileAttributes> registry;
  for (const auto& p : enumerate_profiles(config)) {
    registry.emplace(p.id, p.attributes());
  }
  for (auto g : config.genders) {
    ProfileAttributes a;
    a.gender = g;
    registry.emplace(reduced_profile_id(a), a);
  }
  for (auto c : config.economic_classes) {
    ProfileAttributes a;
    a.economic_class = c;
    registry.emplace(reduced_profile_id(a), a);
  }
  for (const auto& n : config.nationalities) {
    ProfileAttributes a;
    a.nationality = n;
    registry.emplace(reduced_profile_id(a), a);
  }
  return registry;
}

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_placeholder_char(text[j])) ++j;
    if (j < text.size() && text[j] == '}' && j > i + 1) {
      out.emplace_back(text.substr(i + 1, j - i - 1));
      i = j;
    }
  }
  return out;
}

TemplateSet::TemplateSet(std::map<std::string, std::string> fragments) {
  static const std::set<std::string, std::less<>> kAllowed = {
      "gender", "economic_class", "nationality", "interests"};
  for (auto stem : kTemplateStems) {
    auto it = fragments.find(std::string(stem));
    if (it == fragments.end()) {
      throw DataError("missing prompt template '" + std::string(stem) + "'");
    }
    for (const auto& name : placeholders_in(it->second)) {
      if (!kAllowed.contains(name)) {
        throw DataError("template '" + std::string(stem) +
                        "' has unknown placeholder {" + name + "}");
      }
      const auto own = reduced_placeholder(stem);
      if (!own.empty() && name != own) {
        throw DataError("reduced template '" + std::string(stem) +
                        "' may only reference {" + std::string(own) + "}");
      }
      if (stem == "format") {
        throw DataError("format template may not contain placeholders");
      }
    }
    fragments_.emplace(std::string(stem), std::move(it->second));
  }
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet kBuiltin = [] {
    std::map<std::string, std::string> fragments;
    for (auto stem : kTemplateStems) {
      fragments.emplace(std::string(stem), std::string(assets::prompt_template(stem)));
    }
    return TemplateSet(std::move(fragments));
  }();
  return kBuiltin;
}

TemplateSet TemplateSet::load(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) {
    throw DataError("template directory not found: " + directory.string());
  }
  std::map<std::string, std::string> fragments;
  for (auto stem : kTemplateStems) {
    const auto path = directory / (std::string(stem) + ".txt");
    fragments.emplace(std::string(stem),
                      std::filesystem::exists(path)
                          ? csv::read_text(path)
                          : std::string(assets::prompt_template(stem)));
  }
  return TemplateSet(std::move(fragments));
}

const std::string& TemplateSet::fragment(std::string_view stem) const {
  auto it = fragments_.find(stem);
  if (it == fragments_.end()) {
    throw DataError("no prompt template '" + std::string(stem) + "'");
  }
  return it->second;
}

namespace {

PromptInstance render_attributes(const ProfileAttributes& attrs,
                                 std::string id, PromptVariant variant,
                                 const TemplateSet& templates,
                                 const ProfileGridConfig& config) {
  std::map<std::string, std::string> values;
  if (attrs.gender) values["gender"] = std::string(to_string(*attrs.gender));
  if (attrs.economic_class) {
    values["economic_class"] = std::string(to_string(*attrs.economic_class));
  }
  if (attrs.nationality) values["nationality"] = *attrs.nationality;
  const auto interests = student_interests(attrs, variant, config);
  if (!interests.empty()) values["interests"] = interests.to_prose();

  PromptInstance prompt;
  prompt.profile_id = std::move(id);
  prompt.variant = variant;
  std::string text;
  if (is_reduced(variant)) {
    append_sentence(text, substitute(templates.fragment(template_stem(variant)),
                                     values, prompt.placeholder_values));
  } else {
    append_sentence(text, substitute(templates.fragment("base"), values,
                                     prompt.placeholder_values));
    if (variant != PromptVariant::kBase) {
      append_sentence(text, substitute(templates.fragment(template_stem(variant)),
                                       values, prompt.placeholder_values));
    }
  }
  append_sentence(text, templates.fragment("format"));
  prompt.text = std::move(text);
  return prompt;
}

ProfileAttributes only(const StudentProfile& profile, PromptVariant variant) {
  ProfileAttributes a;
  switch (variant) {
    case PromptVariant::kReducedGender:
      a.gender = profile.gender;
      break;
    case PromptVariant::kReducedClass:
      a.economic_class = profile.economic_class;
      break;
    case PromptVariant::kReducedNationality:
      a.nationality = profile.nationality;
      break;
    default:
      return profile.attributes();
  }
  return a;
}

}  // namespace

PromptInstance render_prompt(const StudentProfile& profile, PromptVariant variant,
                             const TemplateSet& templates,
                             const ProfileGridConfig& config) {
  if (!is_reduced(variant)) {
    return render_attributes(profile.attributes(), profile.id, variant, templates,
                             config);
  }
  const auto attrs = only(profile, variant);
  return render_attributes(attrs, reduced_profile_id(attrs), variant, templates,
                           config);
}

std::vector<PromptInstance> reduced_context_profiles(DemographicAttribute attribute,
                                                     const TemplateSet& templates,
                                                     const ProfileGridConfig& config) {
  std::vector<PromptInstance> out;
  const auto emit = [&](const ProfileAttributes& a, PromptVariant v) {
    out.push_back(render_attributes(a, reduced_profile_id(a), v, templates, config));
  };
  switch (attribute) {
    case DemographicAttribute::kGender:
      for (auto g : config.genders) {
        ProfileAttributes a;
        a.gender = g;
        emit(a, PromptVariant::kReducedGender);
      }
      break;
    case DemographicAttribute::kEconomicClass:
      for (auto c : config.economic_classes) {
        ProfileAttributes a;
        a.economic_class = c;
        emit(a, PromptVariant::kReducedClass);
      }
      break;
    case DemographicAttribute::kNationality:
      for (const auto& n : config.nationalities) {
        ProfileAttributes a;
        a.nationality = n;
        emit(a, PromptVariant::kReducedNationality);
      }
      break;
  }
  return out;
}

std::string to_json_line(const StudentProfile& profile) {
  json j;
  j["id"] = profile.id;
  j["gender"] = to_string(profile.gender);
  j["economic_class"] = to_string(profile.economic_class);
  j["nationality"] = profile.nationality;
  json tags = json::array();
  for (auto t : profile.interest_tags.tags()) tags.push_back(tag_id(t));
  j["interest_tags"] = tags;
  return j.dump();
}

std::string to_json_line(const PromptInstance& prompt) {
  json j;
  j["profile_id"] = prompt.profile_id;
  j["variant"] = to_string(prompt.variant);
  j["text"] = prompt.text;
  j["placeholder_values"] = prompt.placeholder_values;
  return j.dump();
}

PromptInstance prompt_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    PromptInstance p;
    p.profile_id = j.at("profile_id").get<std::string>();
    const auto variant = parse_variant(j.at("variant").get<std::string>());
    if (!variant) throw DataError("unknown variant in prompt line");
    p.variant = *variant;
    p.text = j.at("text").get<std::string>();
    if (j.contains("placeholder_values")) {
      p.placeholder_values =
          j.at("placeholder_values").get<std::map<std::string, std::string>>();
    }
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prompt line: ") + e.what());
  }
}

}  // namespace unifair
