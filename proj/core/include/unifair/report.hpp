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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unifair/catalog.hpp"
#include "unifair/ingest.hpp"
#include "unifair/metrics.hpp"
#include "unifair/score.hpp"

namespace unifair {

enum class Dimension { kOverall, kGender, kEconomicClass, kNationality };
std::string_view to_string(Dimension dimension);
std::optional<Dimension> parse_dimension(std::string_view text);

struct GroupAggregate {
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  Dimension dimension = Dimension::kOverall;
  std::string group_value;
  std::optional<double> mean_acc;
  double mean_rep = 0.0;
  std::optional<double> mean_acad;
  double mean_drs = 0.0;
  std::size_t n_records = 0;
  std::size_t n_acc = 0;   // records contributing to mean_acc
  std::size_t n_acad = 0;  // records contributing to mean_acad
};

// Record-level means per (model, variant, group). Reduced-context variants
// are skipped, as are records that lack the grouping attribute. Rows are
// ordered by model, variant and group (enum order, nationalities by name).
std::vector<GroupAggregate> aggregate_drs(std::span<const ScoredRecord> records,
                                          Dimension dimension);

enum class GrsScope { kGlobal, kNationality };
std::string_view to_string(GrsScope scope);
std::optional<GrsScope> parse_scope(std::string_view text);

struct GrsOptions {
  GrsScope scope = GrsScope::kGlobal;
  // Countries that get a row even without recommendations.
  std::vector<std::string> requested_countries;
  double epsilon = kStabilityEpsilon;
};

struct GrsRow {
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  CountryGrsResult result;
};

struct GrsTable {
  std::vector<GrsRow> rows;  // by model, variant, country
  std::vector<std::string> no_coverage;  // requested countries absent from the catalog
};

// One row per (model, variant, country) with at least one resolved
// recommendation, plus zero rows for requested countries. Under the
// nationality scope, country c only counts recommendations made to profiles
// of nationality c; that scope needs `profiles` (UsageError otherwise).
GrsTable grs_by_country(std::span<const RecommendationRecord> records,
                        const Catalog& catalog, const GrsOptions& options = {},
                        const std::map<std::string, ProfileAttributes>* profiles = nullptr);
GrsTable grs_by_country(std::span<const ScoredRecord> records, const Catalog& catalog,
                        const GrsOptions& options = {});

// "New" when only the other value is non-zero, "-100%" when only the base is,
// "0%" when both are zero, else a signed percentage with one decimal.
std::string delta_label(double base, double other);

struct VariantDelta {
  std::string model_id;
  std::string country;
  double base_grs = 0.0;
  double other_grs = 0.0;
  std::string delta;
};

// Per-country GRS change from `base` to `other` for every model holding both
// variants. Countries present in only one variant are compared against 0.
std::vector<VariantDelta> compare_variants(const GrsTable& table, PromptVariant base,
                                           PromptVariant other);

struct DiversitySummary {
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  std::size_t total_responses = 0;
  std::size_t total_recommendations = 0;
  std::size_t unique_universities = 0;  // resolved canonical names
  std::size_t unique_unmatched = 0;     // distinct raw names that did not resolve
  std::size_t unique_programs = 0;      // distinct raw program names
  std::size_t unique_countries = 0;
};

// Per (model, variant). `responses` supplies refusals and other empty
// responses; when empty, responses are derived from the records.
std::vector<DiversitySummary> diversity_summary(
    std::span<const RecommendationRecord> records,
    std::span<const ResponseSummary> responses = {});

enum class FrequencyKey { kCountry, kUniversity, kProgram };
std::string_view to_string(FrequencyKey key);
std::optional<FrequencyKey> parse_frequency_key(std::string_view text);

struct FrequencyRow {
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  std::string group;  // empty when ungrouped
  std::string name;
  std::size_t count = 0;
  double share = 0.0;  // of the group's counted recommendations
};

// Counts per (model, variant, group), descending with ties by name, keeping
// the first `top_n` names of each group. Unmatched universities and empty
// programs are not counted. Throws std::invalid_argument when top_n is 0.
std::vector<FrequencyRow> frequency_table(std::span<const ScoredRecord> records,
                                          FrequencyKey key,
                                          std::optional<Dimension> group_by,
                                          std::size_t top_n);

struct AlignmentCell {
  std::string model_id;
  PromptVariant variant = PromptVariant::kBase;
  std::string nationality;
  std::string country;
  std::size_t count = 0;
  double proportion = 0.0;
};

struct AlignmentMatrix {
  std::vector<AlignmentCell> cells;  // long form, zero cells omitted
  std::size_t excluded_unmatched = 0;
};

// Share of each nationality's resolved recommendations going to each country.
AlignmentMatrix nationality_alignment_matrix(std::span<const ScoredRecord> records);

// Country -> development status, from a `country,status` CSV.
std::map<std::string, std::string> load_development_status(
    const std::filesystem::path& path, const CapitalTable& capitals);

// Export tables. Cells are null, text, integers or reals.
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class ExportFormat { kCsv, kJson, kMarkdown };
std::string_view to_string(ExportFormat format);
std::optional<ExportFormat> parse_format(std::string_view text);
std::string_view file_extension(ExportFormat format);

// Reals print with 4 decimals in CSV and Markdown and with full precision in
// JSON. JSON output is an array of objects with sorted keys.
std::string render(const Table& table, ExportFormat format);
// Writes <directory>/<table.name>.<ext> for each table and returns the paths.
std::vector<std::filesystem::path> export_tables(const std::vector<Table>& tables,
                                                 const std::filesystem::path& directory,
                                                 ExportFormat format);

Table to_table(const std::vector<GroupAggregate>& rows, std::string name);
Table to_table(const GrsTable& grs, std::string name,
               const std::map<std::string, std::string>* development_status = nullptr);
Table to_table(const std::vector<VariantDelta>& rows, std::string name);
Table to_table(const std::vector<DiversitySummary>& rows, std::string name);
Table to_table(const std::vector<FrequencyRow>& rows, std::string name);
Table to_table(const AlignmentMatrix& matrix, std::string name);

struct ReportOptions {
  GrsOptions grs;
  std::size_t top_n = 20;
  const std::map<std::string, std::string>* development_status = nullptr;
  std::vector<ResponseSummary> responses;
};

// Every report table for a scored run, in a fixed order.
std::vector<Table> build_report(std::span<const ScoredRecord> records,
                                const Catalog& catalog, const ReportOptions& options);

}  // namespace unifair
