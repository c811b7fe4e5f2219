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

#include "unifair/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "json.hpp"

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

using Slice = std::pair<std::string, PromptVariant>;

template <typename Enum>
std::string enum_name(Enum e) {
  return std::string(to_string(e));
}

// Sort rank plus display value for one record's group; nullopt when the
// record lacks the attribute.
std::optional<std::pair<int, std::string>> group_of(const ProfileAttributes& p,
                                                    Dimension dimension) {
  switch (dimension) {
    case Dimension::kOverall:
      return std::pair(0, std::string("all"));
    case Dimension::kGender:
      if (!p.gender) return std::nullopt;
      return std::pair(static_cast<int>(*p.gender), enum_name(*p.gender));
    case Dimension::kEconomicClass:
      if (!p.economic_class) return std::nullopt;
      return std::pair(static_cast<int>(*p.economic_class), enum_name(*p.economic_class));
    case Dimension::kNationality:
      if (!p.nationality) return std::nullopt;
      return std::pair(0, *p.nationality);
  }
  return std::nullopt;
}

std::string format_real(double v) {
  const auto s = fmt::format("{:.4f}", v);
  return s == "-0.0000" ? "0.0000" : s;
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

Cell opt(const std::optional<double>& v) {
  return v ? Cell(*v) : Cell(std::monostate{});
}

Cell count(std::size_t n) { return Cell(static_cast<std::int64_t>(n)); }

}  // namespace

std::string_view to_string(Dimension dimension) {
  switch (dimension) {
    case Dimension::kOverall: return "overall";
    case Dimension::kGender: return "gender";
    case Dimension::kEconomicClass: return "economic_class";
    case Dimension::kNationality: return "nationality";
  }
  return "overall";
}

std::optional<Dimension> parse_dimension(std::string_view text) {
  for (auto d : {Dimension::kOverall, Dimension::kGender, Dimension::kEconomicClass,
                 Dimension::kNationality}) {
    if (text == to_string(d)) return d;
  }
  if (text == "class") return Dimension::kEconomicClass;
  return std::nullopt;
}

std::vector<GroupAggregate> aggregate_drs(std::span<const ScoredRecord> records,
                                          Dimension dimension) {
  struct Sums {
    std::string value;
    double acc = 0, rep = 0, acad = 0, drs = 0;
    std::size_t n = 0, n_acc = 0, n_acad = 0;
  };
  std::map<std::tuple<std::string, PromptVariant, int, std::string>, Sums> groups;
  for (const auto& s : records) {
    if (is_reduced(s.record.variant)) continue;
    const auto g = group_of(s.profile, dimension);
    if (!g) continue;
    auto& sums = groups[{s.record.model_id, s.record.variant, g->first, g->second}];
    sums.value = g->second;
    ++sums.n;
    sums.rep += s.rep;
    sums.drs += s.drs;
    if (s.acc) {
      sums.acc += *s.acc;
      ++sums.n_acc;
    }
    if (s.acad) {
      sums.acad += *s.acad;
      ++sums.n_acad;
    }
  }
  std::vector<GroupAggregate> out;
  out.reserve(groups.size());
  for (const auto& [key, sums] : groups) {
    GroupAggregate a;
    a.model_id = std::get<0>(key);
    a.variant = std::get<1>(key);
    a.dimension = dimension;
    a.group_value = sums.value;
    const auto n = static_cast<double>(sums.n);
    if (sums.n_acc > 0) a.mean_acc = sums.acc / static_cast<double>(sums.n_acc);
    a.mean_rep = sums.rep / n;
    if (sums.n_acad > 0) a.mean_acad = sums.acad / static_cast<double>(sums.n_acad);
    a.mean_drs = sums.drs / n;
    a.n_records = sums.n;
    a.n_acc = sums.n_acc;
    a.n_acad = sums.n_acad;
    out.push_back(std::move(a));
  }
  return out;
}

std::string_view to_string(GrsScope scope) {
  return scope == GrsScope::kGlobal ? "global" : "nationality";
}

std::optional<GrsScope> parse_scope(std::string_view text) {
  if (text == "global") return GrsScope::kGlobal;
  if (text == "nationality") return GrsScope::kNationality;
  return std::nullopt;
}

namespace {

struct GrsInput {
  const RecommendationRecord* record;
  const std::optional<std::string>* nationality;
};

GrsTable grs_from(const std::vector<GrsInput>& inputs, const Catalog& catalog,
                  const GrsOptions& options) {
  const auto& names = CountryNames::builtin();
  // slice -> country -> university id -> count
  std::map<Slice, std::map<std::string, std::map<std::string, std::size_t>>> counts;
  std::set<Slice> slices;
  for (const auto& in : inputs) {
    const auto& r = *in.record;
    const Slice slice{r.model_id, r.variant};
    slices.insert(slice);
    if (!r.match.matched()) continue;
    if (options.scope == GrsScope::kNationality) {
      if (in.nationality == nullptr || !*in.nationality) continue;
      if (names.canonical(**in.nationality) != r.match.country) continue;
    }
    ++counts[slice][r.match.country][r.match.university_id];
  }

  GrsTable table;
  std::vector<std::string> requested;
  for (const auto& c : options.requested_countries) {
    const auto canonical = names.canonical(c);
    if (catalog.country_count(canonical) == 0) {
      if (std::find(table.no_coverage.begin(), table.no_coverage.end(), canonical) ==
          table.no_coverage.end()) {
        table.no_coverage.push_back(canonical);
      }
    } else {
      requested.push_back(canonical);
    }
  }
  const std::map<std::string, std::size_t> none;
  for (const auto& slice : slices) {
    auto& by_country = counts[slice];
    std::set<std::string> countries(requested.begin(), requested.end());
    for (const auto& [country, _] : by_country) countries.insert(country);
    for (const auto& country : countries) {
      auto it = by_country.find(country);
      table.rows.push_back({slice.first, slice.second,
                            country_grs(country, it == by_country.end() ? none : it->second,
                                        catalog, options.epsilon)});
    }
  }
  return table;
}

}  // namespace

GrsTable grs_by_country(std::span<const RecommendationRecord> records,
                        const Catalog& catalog, const GrsOptions& options,
                        const std::map<std::string, ProfileAttributes>* profiles) {
  if (options.scope == GrsScope::kNationality && profiles == nullptr) {
    throw UsageError("nationality scope needs the profile registry");
  }
  std::vector<GrsInput> inputs;
  inputs.reserve(records.size());
  for (const auto& r : records) {
    const std::optional<std::string>* nationality = nullptr;
    if (profiles != nullptr) {
      auto it = profiles->find(r.profile_id);
      if (it != profiles->end()) nationality = &it->second.nationality;
    }
    inputs.push_back({&r, nationality});
  }
  return grs_from(inputs, catalog, options);
}

GrsTable grs_by_country(std::span<const ScoredRecord> records, const Catalog& catalog,
                        const GrsOptions& options) {
  std::vector<GrsInput> inputs;
  inputs.reserve(records.size());
  for (const auto& s : records) inputs.push_back({&s.record, &s.profile.nationality});
  return grs_from(inputs, catalog, options);
}

std::string delta_label(double base, double other) {
  if (base == 0.0 && other == 0.0) return "0%";
  if (base == 0.0) return "New";
  if (other == 0.0) return "-100%";
  const double pct = (other - base) / base * 100.0;
  auto s = fmt::format("{:+.1f}%", pct);
  if (s == "-0.0%") s = "+0.0%";
  return s;
}

std::vector<VariantDelta> compare_variants(const GrsTable& table, PromptVariant base,
                                           PromptVariant other) {
  // model -> country -> (base, other)
  std::map<std::string, std::map<std::string, std::pair<double, double>>> values;
  std::map<std::string, std::pair<bool, bool>> present;
  for (const auto& row : table.rows) {
    if (row.variant != base && row.variant != other) continue;
    auto& v = values[row.model_id][row.result.country];
    auto& p = present[row.model_id];
    if (row.variant == base) {
      v.first = row.result.grs;
      p.first = true;
    } else {
      v.second = row.result.grs;
      p.second = true;
    }
  }
  std::vector<VariantDelta> out;
  for (const auto& [model, countries] : values) {
    if (!present[model].first || !present[model].second) continue;
    for (const auto& [country, v] : countries) {
      out.push_back({model, country, v.first, v.second, delta_label(v.first, v.second)});
    }
  }
  return out;
}

std::vector<DiversitySummary> diversity_summary(
    std::span<const RecommendationRecord> records,
    std::span<const ResponseSummary> responses) {
  struct Sets {
    std::set<ResponseKey> responses;
    std::size_t recommendations = 0;
    std::set<std::string> universities, unmatched, programs, countries;
  };
  std::map<Slice, Sets> slices;
  for (const auto& r : responses) {
    slices[{r.key.model_id, r.key.variant}].responses.insert(r.key);
  }
  for (const auto& r : records) {
    auto& s = slices[{r.model_id, r.variant}];
    if (responses.empty()) s.responses.insert(r.key());
    ++s.recommendations;
    if (r.match.matched()) {
      s.universities.insert(r.match.canonical_name);
      s.countries.insert(r.match.country);
    } else {
      s.unmatched.insert(std::string(text::trim(r.raw_university)));
    }
    const auto program = text::trim(r.raw_program);
    if (!program.empty()) s.programs.insert(std::string(program));
  }
  std::vector<DiversitySummary> out;
  for (const auto& [slice, s] : slices) {
    out.push_back({slice.first, slice.second, s.responses.size(), s.recommendations,
                   s.universities.size(), s.unmatched.size(), s.programs.size(),
                   s.countries.size()});
  }
  return out;
}

std::string_view to_string(FrequencyKey key) {
  switch (key) {
    case FrequencyKey::kCountry: return "country";
    case FrequencyKey::kUniversity: return "university";
    case FrequencyKey::kProgram: return "program";
  }
  return "country";
}

std::optional<FrequencyKey> parse_frequency_key(std::string_view text) {
  for (auto k : {FrequencyKey::kCountry, FrequencyKey::kUniversity, FrequencyKey::kProgram}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::vector<FrequencyRow> frequency_table(std::span<const ScoredRecord> records,
                                          FrequencyKey key,
                                          std::optional<Dimension> group_by,
                                          std::size_t top_n) {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  using GroupKey = std::tuple<std::string, PromptVariant, int, std::string>;
  std::map<GroupKey, std::map<std::string, std::size_t>> counts;
  for (const auto& s : records) {
    const auto& r = s.record;
    std::string name;
    switch (key) {
      case FrequencyKey::kCountry:
        if (r.match.matched()) name = r.match.country;
        break;
      case FrequencyKey::kUniversity:
        if (r.match.matched()) name = r.match.canonical_name;
        break;
      case FrequencyKey::kProgram:
        name = std::string(text::trim(r.raw_program));
        break;
    }
    if (name.empty()) continue;
    std::pair<int, std::string> group{0, ""};
    if (group_by && *group_by != Dimension::kOverall) {
      auto g = group_of(s.profile, *group_by);
      if (!g) continue;
      group = std::move(*g);
    }
    ++counts[{r.model_id, r.variant, group.first, group.second}][name];
  }
  std::vector<FrequencyRow> out;
  for (const auto& [gk, names] : counts) {
    std::vector<std::pair<std::string, std::size_t>> sorted(names.begin(), names.end());
    std::size_t total = 0;
    for (const auto& [_, n] : sorted) total += n;
    // names arrive alphabetically, so a stable sort keeps ties in name order
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (sorted.size() > top_n) sorted.resize(top_n);
    for (const auto& [name, n] : sorted) {
      out.push_back({std::get<0>(gk), std::get<1>(gk), std::get<3>(gk), name, n,
                     static_cast<double>(n) / static_cast<double>(total)});
    }
  }
  return out;
}

AlignmentMatrix nationality_alignment_matrix(std::span<const ScoredRecord> records) {
  using RowKey = std::tuple<std::string, PromptVariant, std::string>;
  std::map<RowKey, std::map<std::string, std::size_t>> counts;
  AlignmentMatrix m;
  for (const auto& s : records) {
    if (!s.profile.nationality) continue;
    if (!s.record.match.matched()) {
      ++m.excluded_unmatched;
      continue;
    }
    ++counts[{s.record.model_id, s.record.variant, *s.profile.nationality}]
            [s.record.match.country];
  }
  for (const auto& [rk, row] : counts) {
    std::size_t total = 0;
    for (const auto& [_, n] : row) total += n;
    for (const auto& [country, n] : row) {
      m.cells.push_back({std::get<0>(rk), std::get<1>(rk), std::get<2>(rk), country, n,
                         static_cast<double>(n) / static_cast<double>(total)});
    }
  }
  return m;
}

std::map<std::string, std::string> load_development_status(
    const std::filesystem::path& path, const CapitalTable& capitals) {
  const auto table = csv::Table::read_file(path);
  const auto country_col = table.require_column("country");
  const auto status_col = table.require_column("status");
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const auto& row = table.rows()[i];
    const auto country = capitals.at(text::trim(row[country_col])).country;
    const auto status = std::string(text::trim(row[status_col]));
    if (status.empty()) {
      throw DataError(fmt::format("{}:{}: empty status", table.source(), table.line_of(i)));
    }
    out[country] = status;
  }
  return out;
}

std::string_view to_string(ExportFormat format) {
  switch (format) {
    case ExportFormat::kCsv: return "csv";
    case ExportFormat::kJson: return "json";
    case ExportFormat::kMarkdown: return "markdown";
  }
  return "csv";
}

std::optional<ExportFormat> parse_format(std::string_view text) {
  if (text == "csv") return ExportFormat::kCsv;
  if (text == "json") return ExportFormat::kJson;
  if (text == "markdown" || text == "md") return ExportFormat::kMarkdown;
  return std::nullopt;
}

std::string_view file_extension(ExportFormat format) {
  switch (format) {
    case ExportFormat::kCsv: return "csv";
    case ExportFormat::kJson: return "json";
    case ExportFormat::kMarkdown: return "md";
  }
  return "csv";
}

std::string render(const Table& table, ExportFormat format) {
  std::string out;
  switch (format) {
    case ExportFormat::kCsv: {
      out += csv::format_row(table.columns);
      out += '\n';
      for (const auto& row : table.rows) {
        csv::Row fields;
        fields.reserve(row.size());
        for (const auto& c : row) fields.push_back(cell_text(c));
        out += csv::format_row(fields);
        out += '\n';
      }
      break;
    }
    case ExportFormat::kJson: {
      auto array = nlohmann::json::array();
      for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
          const Cell& c = i < row.size() ? row[i] : Cell{};
          std::visit(
              [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                  obj[table.columns[i]] = nullptr;
                } else {
                  obj[table.columns[i]] = v;
                }
              },
              c);
        }
        array.push_back(std::move(obj));
      }
      out = array.dump(2);
      out += '\n';
      break;
    }
    case ExportFormat::kMarkdown: {
      const auto md = [](std::string s) {
        std::string escaped;
        for (char ch : s) {
          if (ch == '|') escaped += '\\';
          escaped += ch == '\n' ? ' ' : ch;
        }
        return escaped;
      };
      out += "|";
      for (const auto& c : table.columns) out += " " + md(c) + " |";
      out += "\n|";
      for (std::size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
      out += '\n';
      for (const auto& row : table.rows) {
        out += "|";
        for (const auto& c : row) out += " " + md(cell_text(c)) + " |";
        out += '\n';
      }
      break;
    }
  }
  return out;
}

std::vector<std::filesystem::path> export_tables(const std::vector<Table>& tables,
                                                 const std::filesystem::path& directory,
                                                 ExportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw DataError("cannot create directory " + directory.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& t : tables) {
    const auto path = directory / (t.name + "." + std::string(file_extension(format)));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << render(t, format);
    if (!out) throw DataError("write failed: " + path.string());
    written.push_back(path);
  }
  return written;
}

Table to_table(const std::vector<GroupAggregate>& rows, std::string name) {
  Table t{std::move(name),
          {"model_id", "variant", "dimension", "group", "mean_acc", "mean_rep",
           "mean_acad", "mean_drs", "n_records", "n_acc", "n_acad"},
          {}};
  for (const auto& a : rows) {
    t.rows.push_back({a.model_id, enum_name(a.variant), enum_name(a.dimension),
                      a.group_value, opt(a.mean_acc), a.mean_rep, opt(a.mean_acad),
                      a.mean_drs, count(a.n_records), count(a.n_acc), count(a.n_acad)});
  }
  return t;
}

Table to_table(const GrsTable& grs, std::string name,
               const std::map<std::string, std::string>* development_status) {
  Table t{std::move(name),
          {"model_id", "variant", "country", "status", "repr", "avail", "scaled_repr",
           "rep_covg", "grs", "recommended_set_size", "recommendation_count"},
          {}};
  for (const auto& row : grs.rows) {
    const auto& r = row.result;
    Cell status;
    if (development_status != nullptr) {
      auto it = development_status->find(r.country);
      if (it != development_status->end()) status = it->second;
    }
    t.rows.push_back({row.model_id, enum_name(row.variant), r.country, status, r.repr,
                      r.avail, r.scaled_repr, r.rep_covg, r.grs,
                      count(r.recommended_set_size), count(r.recommendation_count)});
  }
  return t;
}

Table to_table(const std::vector<VariantDelta>& rows, std::string name) {
  Table t{std::move(name), {"model_id", "country", "base_grs", "other_grs", "delta"}, {}};
  for (const auto& d : rows) {
    t.rows.push_back({d.model_id, d.country, d.base_grs, d.other_grs, d.delta});
  }
  return t;
}

Table to_table(const std::vector<DiversitySummary>& rows, std::string name) {
  Table t{std::move(name),
          {"model_id", "variant", "total_responses", "total_recommendations",
           "unique_universities", "unique_unmatched", "unique_programs",
           "unique_countries"},
          {}};
  for (const auto& d : rows) {
    t.rows.push_back({d.model_id, enum_name(d.variant), count(d.total_responses),
                      count(d.total_recommendations), count(d.unique_universities),
                      count(d.unique_unmatched), count(d.unique_programs),
                      count(d.unique_countries)});
  }
  return t;
}

Table to_table(const std::vector<FrequencyRow>& rows, std::string name) {
  Table t{std::move(name), {"model_id", "variant", "group", "name", "count", "share"}, {}};
  for (const auto& f : rows) {
    t.rows.push_back(
        {f.model_id, enum_name(f.variant), f.group, f.name, count(f.count), f.share});
  }
  return t;
}

Table to_table(const AlignmentMatrix& matrix, std::string name) {
  Table t{std::move(name),
          {"model_id", "variant", "nationality", "country", "count", "proportion"},
          {}};
  for (const auto& c : matrix.cells) {
    t.rows.push_back({c.model_id, enum_name(c.variant), c.nationality, c.country,
                      count(c.count), c.proportion});
  }
  return t;
}

std::vector<Table> build_report(std::span<const ScoredRecord> records,
                                const Catalog& catalog, const ReportOptions& options) {
  std::vector<Table> tables;
  for (auto d : {Dimension::kOverall, Dimension::kGender, Dimension::kEconomicClass,
                 Dimension::kNationality}) {
    tables.push_back(to_table(aggregate_drs(records, d), "drs_" + enum_name(d)));
  }
  const auto grs = grs_by_country(records, catalog, options.grs);
  tables.push_back(
      to_table(grs, "grs_" + enum_name(options.grs.scope), options.development_status));
  tables.push_back(to_table(compare_variants(grs, PromptVariant::kBase,
                                             PromptVariant::kRegional),
                            "grs_delta_regional"));

  std::vector<RecommendationRecord> plain;
  plain.reserve(records.size());
  for (const auto& s : records) plain.push_back(s.record);
  tables.push_back(to_table(diversity_summary(plain, options.responses), "diversity"));

  for (auto key : {FrequencyKey::kCountry, FrequencyKey::kUniversity,
                   FrequencyKey::kProgram}) {
    tables.push_back(to_table(frequency_table(records, key, std::nullopt, options.top_n),
                              "top_" + enum_name(key)));
    for (auto d : {Dimension::kGender, Dimension::kEconomicClass}) {
      tables.push_back(to_table(frequency_table(records, key, d, options.top_n),
                                "top_" + enum_name(key) + "_by_" + enum_name(d)));
    }
  }
  tables.push_back(to_table(nationality_alignment_matrix(records), "nationality_alignment"));
  return tables;
}

}  // namespace unifair
