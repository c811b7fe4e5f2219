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

#include "unifair/csv.hpp"

#include <gtest/gtest.h>

#include "unifair/errors.hpp"

namespace unifair::csv {
namespace {

TEST(Csv, QuotedFieldsAndNewlines) {
  const auto rows = parse("a,\"b,c\",\"d\"\"e\"\n\"multi\nline\",x,\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (Row{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (Row{"multi\nline", "x", ""}));
}

TEST(Csv, BomAndBlankLines) {
  const auto t = Table::from_string("\xEF\xBB\xBFname,rank\n\nOxford,3\n\nMIT,1\n", "t.csv");
  EXPECT_EQ(t.header(), (Row{"name", "rank"}));
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.line_of(0), 3u);
  EXPECT_EQ(t.line_of(1), 5u);
}

TEST(Csv, ShortRowsArePadded) {
  const auto t = Table::from_string("a,b,c\n1\n", "t.csv");
  EXPECT_EQ(t.rows()[0], (Row{"1", "", ""}));
}

TEST(Csv, MissingColumnNamesFile) {
  const auto t = Table::from_string("a,b\n1,2\n", "where.csv");
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_FALSE(t.column("z"));
  try {
    t.require_column("z");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("where.csv"), std::string::npos);
  }
}

TEST(Csv, FormatRoundTrips) {
  const Row row{"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  const auto back = parse(format_row(row) + "\n");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], row);
}

TEST(Csv, ReadTextMissingFile) {
  EXPECT_THROW(read_text("/nonexistent/nowhere.csv"), DataError);
}

}  // namespace
}  // namespace unifair::csv
