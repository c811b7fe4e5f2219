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
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unifair::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines inside
// quotes, CRLF or LF line endings, optional UTF-8 BOM.
std::vector<Row> parse(std::string_view content);

// Header-addressed view of a parsed file.
class Table {
 public:
  static Table read_file(const std::filesystem::path& path);
  static Table from_string(std::string_view content, std::string source);

  const Row& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::string& source() const { return source_; }

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws DataError naming the file when the column is missing.
  std::size_t require_column(std::string_view name) const;

  // 1-based line number of a data row, counting the header as line 1.
  std::size_t line_of(std::size_t row_index) const { return lines_[row_index]; }

 private:
  std::string source_;
  Row header_;
  std::vector<Row> rows_;
  std::vector<std::size_t> lines_;
};

// Whole file as bytes; throws DataError naming the path.
std::string read_text(const std::filesystem::path& path);

// Opens `path` for binary writing (truncating unless `mode` says append),
// creating missing parent directories. Throws DataError naming the path.
std::ofstream open_output(const std::filesystem::path& path,
                          std::ios::openmode mode = std::ios::trunc);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace unifair::csv
