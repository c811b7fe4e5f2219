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

#include <fstream>
#include <sstream>

#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair::csv {
namespace {

struct ParsedRow {
  Row fields;
  std::size_t line = 0;
};

std::vector<ParsedRow> parse_with_lines(std::string_view content) {
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  std::vector<ParsedRow> rows;
  ParsedRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = 1;

  const auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    // Blank lines carry no data.
    if (!(row.fields.size() == 1 && text::trim(row.fields[0]).empty())) {
      rows.push_back(std::move(row));
    }
    row = ParsedRow{};
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started || text::trim(field).empty()) {
          field.clear();
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (field_started || !field.empty() || !row.fields.empty()) end_row();
  return rows;
}

}  // namespace

std::vector<Row> parse(std::string_view content) {
  std::vector<Row> out;
  for (auto& r : parse_with_lines(content)) out.push_back(std::move(r.fields));
  return out;
}

Table Table::from_string(std::string_view content, std::string source) {
  Table table;
  table.source_ = std::move(source);
  auto parsed = parse_with_lines(content);
  if (parsed.empty()) {
    throw DataError(table.source_ + ": empty file");
  }
  table.header_ = std::move(parsed.front().fields);
  for (auto& h : table.header_) h = std::string(text::trim(h));
  for (std::size_t i = 1; i < parsed.size(); ++i) {
    auto& fields = parsed[i].fields;
    fields.resize(std::max(fields.size(), table.header_.size()));
    table.rows_.push_back(std::move(fields));
    table.lines_.push_back(parsed[i].line);
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::out | mode);
  if (!out) throw DataError("cannot write file: " + path.string());
  return out;
}

Table Table::read_file(const std::filesystem::path& path) {
  return from_string(read_text(path), path.string());
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  throw DataError(source_ + ": missing column '" + std::string(name) + "'");
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(row[i]);
  }
  return out;
}

}  // namespace unifair::csv
