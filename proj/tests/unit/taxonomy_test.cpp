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

#include <gtest/gtest.h>

#include "unifair/errors.hpp"
#include "test_support.hpp"

namespace unifair {
namespace {

using enum SubjectTag;

TagSet tags_of(std::string_view program) {
  return tag_program(program, RuleSet::builtin());
}

TEST(Taxonomy, TagNamesRoundTrip) {
  for (auto tag : kAllSubjectTags) {
    EXPECT_EQ(parse_tag(tag_id(tag)), tag);
    EXPECT_EQ(parse_tag(tag_display_name(tag)), tag);
  }
  EXPECT_EQ(parse_tag("arts and humanities"), kArtsHumanities);
  EXPECT_EQ(parse_tag("Engineering-Technology"), kEngineeringTechnology);
  EXPECT_FALSE(parse_tag("Sports"));
  EXPECT_FALSE(parse_tag(""));
}

TEST(Taxonomy, TagSetOperations) {
  TagSet a{kNaturalSciences, kArtsHumanities};
  TagSet b{kNaturalSciences};
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ((a & b), b);
  EXPECT_EQ((a | b), a);
  EXPECT_EQ(a.to_string(), "ArtsHumanities|NaturalSciences");
  EXPECT_EQ(TagSet::parse(a.to_string()), a);
  EXPECT_EQ(TagSet::parse(""), TagSet{});
  EXPECT_THROW(TagSet::parse("ArtsHumanities|Cooking"), DataError);
  EXPECT_EQ(a.to_prose(), "Arts & Humanities and Natural Sciences");
  EXPECT_EQ((TagSet{kArtsHumanities, kNaturalSciences, kLifeSciencesMedicine}).to_prose(),
            "Arts & Humanities, Life Sciences & Medicine and Natural Sciences");
}

TEST(Taxonomy, BuiltinRules) {
  EXPECT_EQ(tags_of("MSc Computer Science"), TagSet{kEngineeringTechnology});
  EXPECT_EQ(tags_of("Data Science"), (TagSet{kEngineeringTechnology, kNaturalSciences}));
  EXPECT_EQ(tags_of("Public Health"),
            (TagSet{kLifeSciencesMedicine, kSocialSciencesManagement}));
  EXPECT_EQ(tags_of("Master of Arts in History"), TagSet{kArtsHumanities});
  EXPECT_EQ(tags_of("Bachelor of Science in Nursing"), TagSet{kLifeSciencesMedicine});
  EXPECT_EQ(tags_of("Economics & Finance"), TagSet{kSocialSciencesManagement});
  EXPECT_EQ(tags_of("Philosophy, Politics and Economics"),
            (TagSet{kArtsHumanities, kSocialSciencesManagement}));
  EXPECT_TRUE(tags_of("General Studies").empty());
}

TEST(Taxonomy, PhrasesClaimWordsBeforeKeywords) {
  // "science" alone is not a keyword; "environmental science" is a phrase.
  EXPECT_EQ(tags_of("Environmental Science"), TagSet{kNaturalSciences});
  // "data" inside "data science" must not add a second match of its own.
  EXPECT_EQ(tags_of("Data Science and Data"),
            (TagSet{kEngineeringTechnology, kNaturalSciences}));
}

TEST(Taxonomy, WholeWordMatching) {
  // "art" must not fire inside "Particle", nor "law" inside "Lawn".
  EXPECT_TRUE(tags_of("Particle Lawn").empty());
}

TEST(Taxonomy, EmptyProgramIsProgrammerError) {
  EXPECT_THROW(tags_of("   "), std::invalid_argument);
}

TEST(Taxonomy, CustomRules) {
  const auto rules = RuleSet::parse(
      "pattern,tags,priority\nwine,LifeSciencesMedicine,5\nwine making,ArtsHumanities,20\n");
  EXPECT_EQ(tag_program("Wine Making", rules), TagSet{kArtsHumanities});
  EXPECT_EQ(tag_program("Wine", rules), TagSet{kLifeSciencesMedicine});
  EXPECT_THROW(RuleSet::parse("pattern,tags,priority\nx,Bogus,1\n"), DataError);
}

TEST(Taxonomy, OverridesWinAndNormalizeKeys) {
  std::vector<std::string> warnings;
  const auto overrides = OverrideTable::parse(
      "program_name,tags\nGeneral Studies,ArtsHumanities\n"
      "general  studies,SocialSciencesManagement\n",
      &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_EQ(overrides.size(), 1u);
  EXPECT_EQ(tag_program("GENERAL STUDIES", RuleSet::builtin(), &overrides),
            TagSet{kSocialSciencesManagement});
  EXPECT_EQ(tag_program("Physics", RuleSet::builtin(), &overrides),
            TagSet{kNaturalSciences});
}

TEST(Taxonomy, OverrideSaveLoadRoundTrip) {
  testing::TempDir dir;
  OverrideTable table;
  table.set("Zoology", TagSet{kLifeSciencesMedicine});
  table.set("Aesthetics", TagSet{kArtsHumanities});
  table.save(dir / "o.csv");
  const auto loaded = OverrideTable::load(dir / "o.csv");
  ASSERT_NE(loaded.find("zoology"), nullptr);
  EXPECT_EQ(*loaded.find("aesthetics"), TagSet{kArtsHumanities});
  EXPECT_EQ(loaded.size(), 2u);
}

}  // namespace
}  // namespace unifair
