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

#include "unifair/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "unifair/config.hpp"
#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/ingest.hpp"
#include "unifair/llmclient.hpp"
#include "unifair/profiles.hpp"
#include "unifair/report.hpp"
#include "unifair/score.hpp"
#include "unifair/tagger.hpp"
#include "unifair/text.hpp"

namespace unifair::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::string model;
  std::vector<std::string> variants;
  std::string out;
  std::string in;
  std::string scope;
  std::string format = "csv";
  bool quiet = false;

  // subcommand specific
  std::optional<int> repeats;
  std::optional<int> max_parallel;
  std::string tag_with;
  bool strict = false;
  std::vector<std::string> countries;
  std::optional<std::size_t> top_n;
};

class Context {
 public:
  Context(const Options& o, std::ostream& out, std::ostream& err)
      : opts(o), out_(out), err_(err) {
    config = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
    if (!o.scope.empty()) {
      auto s = parse_scope(o.scope);
      if (!s) throw UsageError("--scope must be global or nationality");
      config.scope = *s;
    }
    if (o.top_n) config.top_n = *o.top_n;
  }

  const Options& opts;
  RunConfig config;

  void note(std::string_view msg) const {
    if (!opts.quiet) err_ << msg << '\n';
  }
  void warn(std::string_view kind, const json& detail) const {
    json j = detail;
    j["warning"] = kind;
    err_ << j.dump() << '\n';
  }

  std::vector<PromptVariant> variants(PromptVariant fallback) const {
    std::vector<PromptVariant> out;
    for (const auto& v : opts.variants) {
      auto parsed = parse_variant(v);
      if (!parsed) throw UsageError("unknown variant '" + v + "'");
      out.push_back(*parsed);
    }
    if (out.empty()) out.push_back(fallback);
    return out;
  }

  // Writes lines to --out or standard output.
  template <typename Fn>
  void emit(Fn&& write_lines) const {
    if (opts.out.empty() || opts.out == "-") {
      write_lines(out_);
      return;
    }
    auto f = csv::open_output(opts.out);
    write_lines(f);
    if (!f) throw DataError("write failed: " + opts.out);
  }

  std::ostream& out() const { return out_; }

  std::string require_in(std::string_view what) const {
    if (opts.in.empty()) throw UsageError(fmt::format("--in <{}> is required", what));
    return opts.in;
  }

  // Model id for --model, mapping an endpoint name onto its model id.
  std::optional<std::string> model_filter() const {
    if (opts.model.empty()) return std::nullopt;
    for (const auto& e : config.endpoints) {
      if (e.name == opts.model) return e.model_id;
    }
    return opts.model;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::vector<PromptInstance> build_prompts(const Context& ctx, const TemplateSet& templates) {
  std::vector<PromptInstance> prompts;
  const auto profiles = enumerate_profiles(ctx.config.grid);
  for (auto v : ctx.variants(PromptVariant::kBase)) {
    if (is_reduced(v)) {
      const auto attribute = v == PromptVariant::kReducedGender ? DemographicAttribute::kGender
                             : v == PromptVariant::kReducedClass
                                 ? DemographicAttribute::kEconomicClass
                                 : DemographicAttribute::kNationality;
      auto reduced = reduced_context_profiles(attribute, templates, ctx.config.grid);
      prompts.insert(prompts.end(), reduced.begin(), reduced.end());
    } else {
      for (const auto& p : profiles) {
        prompts.push_back(render_prompt(p, v, templates, ctx.config.grid));
      }
    }
  }
  return prompts;
}

int cmd_profiles(const Context& ctx) {
  const auto profiles = enumerate_profiles(ctx.config.grid);
  ctx.emit([&](std::ostream& os) {
    for (const auto& p : profiles) os << to_json_line(p) << '\n';
  });
  ctx.note(fmt::format("{} profiles", profiles.size()));
  return 0;
}

int cmd_prompts(const Context& ctx) {
  const auto assets = load_assets(ctx.config, false);
  const auto prompts = build_prompts(ctx, assets.templates);
  ctx.emit([&](std::ostream& os) {
    for (const auto& p : prompts) os << to_json_line(p) << '\n';
  });
  ctx.note(fmt::format("{} prompts", prompts.size()));
  return 0;
}

int cmd_query(const Context& ctx) {
  if (ctx.opts.out.empty()) throw UsageError("--out <raw.jsonl> is required");
  auto endpoint = ctx.config.endpoint(ctx.opts.model);
  if (ctx.opts.repeats) endpoint.repeats = *ctx.opts.repeats;
  if (ctx.opts.max_parallel) endpoint.max_parallel = *ctx.opts.max_parallel;
  endpoint.validate();

  std::vector<PromptInstance> prompts;
  if (!ctx.opts.in.empty()) {
    const auto content = csv::read_text(ctx.opts.in);
    std::size_t line_no = 0;
    for (const auto& line : text::split(content, '\n')) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        prompts.push_back(prompt_from_json_line(line));
      } catch (const DataError& e) {
        throw DataError(fmt::format("{}:{}: {}", ctx.opts.in, line_no, e.what()));
      }
    }
  } else {
    const auto assets = load_assets(ctx.config, false);
    prompts = build_prompts(ctx, assets.templates);
  }

  HttpTransport transport(endpoint.base_url, endpoint.timeout);
  ExperimentOptions options;
  options.output = ctx.opts.out;
  options.log = [&](std::string_view msg) { ctx.note(msg); };
  const auto result = run_experiment(prompts, endpoint, transport, options);
  ctx.out() << json{{"planned", result.planned},
                    {"skipped", result.skipped},
                    {"attempted", result.attempted},
                    {"succeeded", result.succeeded},
                    {"failed", result.failures.size()}}
                   .dump()
            << '\n';
  if (!result.failures.empty()) {
    throw EndpointError(fmt::format("{} request(s) failed; unfinished keys in {}",
                                    result.failures.size(), result.failures_path.string()));
  }
  return 0;
}

int cmd_ingest(const Context& ctx) {
  const auto in = ctx.require_in("raw.jsonl");
  if (ctx.opts.out.empty()) throw UsageError("--out <records.jsonl> is required");
  auto assets = load_assets(ctx.config);
  for (const auto& w : assets.warnings) ctx.warn("asset", {{"message", w}});
  const auto& catalog = assets.require_catalog();
  const auto registry = profile_registry(ctx.config.grid);
  IngestContext ic{&registry, &assets.overrides};
  auto log = ingest_run(fs::path(in), catalog, assets.rules, ic);

  if (!ctx.opts.tag_with.empty()) {
    const auto& endpoint = ctx.config.endpoint(ctx.opts.tag_with);
    HttpTransport transport(endpoint.base_url, endpoint.timeout);
    const auto sleep = real_sleeper();
    log.untagged = 0;
    for (auto& r : log.records) {
      if (r.program_tags.empty() && !r.raw_program.empty()) {
        r.program_tags = classify_external(r.raw_program, endpoint, transport, assets.rules,
                                           &assets.overrides, sleep)
                             .tags;
      }
      if (r.program_tags.empty()) ++log.untagged;
    }
    if (ctx.config.paths.overrides) assets.overrides.save(*ctx.config.paths.overrides);
  }

  write_run_log(log, ctx.opts.out);
  for (const auto& e : log.errors) {
    ctx.warn("line_error", {{"file", in}, {"line", e.line}, {"message", e.message}});
  }
  ctx.out() << json{{"responses", log.responses.size()},
                    {"records", log.records.size()},
                    {"unmatched", log.unmatched},
                    {"untagged", log.untagged},
                    {"line_errors", log.errors.size()}}
                   .dump()
            << '\n';
  if (ctx.opts.strict && !log.errors.empty()) {
    throw DataError(fmt::format("{} malformed line(s) in {}", log.errors.size(), in));
  }
  return 0;
}

int cmd_score(const Context& ctx) {
  const auto in = ctx.require_in("records.jsonl");
  const auto assets = load_assets(ctx.config);
  const auto log = read_run_log(in);
  const auto registry = profile_registry(ctx.config.grid);
  ScoringOptions options{ctx.config.lambdas, ctx.config.weights, ctx.config.grid, 0};
  const auto scored =
      score_records(log.records, assets.require_catalog(), assets.capitals, registry, options);
  ctx.emit([&](std::ostream& os) {
    for (const auto& s : scored) os << to_json_line(s) << '\n';
  });
  // Keep the response summaries next to the scored file for `report`.
  const auto manifest = manifest_path_for(in);
  if (!ctx.opts.out.empty() && ctx.opts.out != "-" && fs::exists(manifest)) {
    fs::copy_file(manifest, manifest_path_for(ctx.opts.out),
                  fs::copy_options::overwrite_existing);
  }
  ctx.note(fmt::format("{} records scored", scored.size()));
  return 0;
}

std::vector<ScoredRecord> filtered(const Context& ctx, std::vector<ScoredRecord> records) {
  const auto model = ctx.model_filter();
  std::set<PromptVariant> variants;
  if (!ctx.opts.variants.empty()) {
    for (auto v : ctx.variants(PromptVariant::kBase)) variants.insert(v);
  }
  std::erase_if(records, [&](const ScoredRecord& s) {
    if (model && s.record.model_id != *model) return true;
    return !variants.empty() && !variants.contains(s.record.variant);
  });
  return records;
}

ExportFormat format_of(const Context& ctx) {
  auto f = parse_format(ctx.opts.format);
  if (!f) throw UsageError("--format must be csv, json or markdown");
  return *f;
}

int cmd_grs(const Context& ctx) {
  const auto in = ctx.require_in("scored.jsonl");
  const auto format = format_of(ctx);
  const auto assets = load_assets(ctx.config);
  const auto records = filtered(ctx, read_scored(in));
  GrsOptions options{ctx.config.scope, ctx.opts.countries, ctx.config.epsilon};
  const auto table = grs_by_country(records, assets.require_catalog(), options);
  for (const auto& c : table.no_coverage) ctx.warn("no_coverage", {{"country", c}});
  const auto rendered =
      render(to_table(table, "grs", &assets.development_status), format);
  ctx.emit([&](std::ostream& os) { os << rendered; });
  return 0;
}

int cmd_report(const Context& ctx) {
  const auto in = ctx.require_in("scored.jsonl");
  const auto format = format_of(ctx);
  const auto assets = load_assets(ctx.config);
  const auto records = filtered(ctx, read_scored(in));

  ReportOptions options;
  options.grs = {ctx.config.scope, ctx.opts.countries, ctx.config.epsilon};
  options.top_n = ctx.config.top_n;
  if (!assets.development_status.empty()) options.development_status = &assets.development_status;
  if (fs::exists(manifest_path_for(in))) {
    const auto model = ctx.model_filter();
    std::set<PromptVariant> keep;
    for (const auto& s : records) keep.insert(s.record.variant);
    for (auto& r : read_run_log(in).responses) {
      if (model && r.key.model_id != *model) continue;
      if (!ctx.opts.variants.empty() && !keep.contains(r.key.variant)) continue;
      options.responses.push_back(std::move(r));
    }
  }
  const auto dir = ctx.opts.out.empty() ? ctx.config.paths.output_dir / "report"
                                        : fs::path(ctx.opts.out);
  const auto tables = build_report(records, assets.require_catalog(), options);
  for (const auto& path : export_tables(tables, dir, format)) {
    ctx.out() << path.string() << '\n';
  }
  return 0;
}

int cmd_validate(const Context& ctx) {
  auto problems = ctx.config.problems();
  std::size_t universities = 0;
  std::vector<std::string> warnings;
  if (problems.empty()) {
    try {
      const auto assets = load_assets(ctx.config);
      universities = assets.require_catalog().global_count();
      warnings = assets.warnings;
      for (const auto& n : ctx.config.grid.nationalities) {
        if (assets.require_catalog().country_count(CountryNames::builtin().canonical(n)) == 0) {
          warnings.push_back("no catalog universities in " + n);
        }
      }
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  for (const auto& w : warnings) ctx.warn("asset", {{"message", w}});
  if (!problems.empty()) {
    throw DataError(fmt::format("invalid configuration: {}", [&] {
      std::string joined;
      for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
      return joined;
    }()));
  }
  ctx.out() << json{{"ok", true},
                    {"config", ctx.config.source.string()},
                    {"universities", universities},
                    {"profiles", enumerate_profiles(ctx.config.grid).size()},
                    {"endpoints", ctx.config.endpoints.size()}}
                   .dump()
            << '\n';
  return 0;
}

void error_line(std::ostream& err, std::string_view kind, std::string_view message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fairness audit of LLM university recommendations", "unifair"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress messages");

  const auto add_io = [&](CLI::App* sub, bool in, bool out_opt) {
    if (in) sub->add_option("--in", o.in, "Input file");
    if (out_opt) sub->add_option("--out", o.out, "Output file or directory");
  };
  const auto add_filters = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Endpoint name or model id");
    sub->add_option("--variant", o.variants, "Prompt variant (repeatable)");
  };

  auto* profiles = app.add_subcommand("profiles", "Write the profile grid as JSONL");
  add_io(profiles, false, true);

  auto* prompts = app.add_subcommand("prompts", "Render prompts as JSONL");
  add_io(prompts, false, true);
  prompts->add_option("--variant", o.variants, "Prompt variant (repeatable)");

  auto* query = app.add_subcommand("query", "Query a chat endpoint for raw responses");
  add_io(query, true, true);
  add_filters(query);
  query->add_option("--repeats", o.repeats, "Runs per prompt");
  query->add_option("--max-parallel", o.max_parallel, "Requests in flight");

  auto* ingest = app.add_subcommand("ingest", "Parse, resolve and tag raw responses");
  add_io(ingest, true, true);
  ingest->add_option("--tag-with", o.tag_with, "Endpoint used to tag programs the rules miss");
  ingest->add_flag("--strict", o.strict, "Fail on malformed input lines");

  auto* score = app.add_subcommand("score", "Score parsed records");
  add_io(score, true, true);

  auto* grs = app.add_subcommand("grs", "Country representation table");
  add_io(grs, true, true);
  add_filters(grs);
  grs->add_option("--scope", o.scope, "global or nationality");
  grs->add_option("--format", o.format, "csv, json or markdown");
  grs->add_option("--countries", o.countries, "Countries that always get a row")
      ->delimiter(',');

  auto* report = app.add_subcommand("report", "Write every report table");
  add_io(report, true, true);
  add_filters(report);
  report->add_option("--scope", o.scope, "global or nationality");
  report->add_option("--format", o.format, "csv, json or markdown");
  report->add_option("--countries", o.countries, "Countries that always get a row")
      ->delimiter(',');
  report->add_option("--top-n", o.top_n, "Rows per frequency table");

  auto* validate = app.add_subcommand("validate", "Check configuration and assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what(), 1);
    return 1;
  }

  try {
    Context ctx(o, out, err);
    if (*profiles) return cmd_profiles(ctx);
    if (*prompts) return cmd_prompts(ctx);
    if (*query) return cmd_query(ctx);
    if (*ingest) return cmd_ingest(ctx);
    if (*score) return cmd_score(ctx);
    if (*grs) return cmd_grs(ctx);
    if (*report) return cmd_report(ctx);
    if (*validate) return cmd_validate(ctx);
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::kUsage ? 1 : e.kind() == ErrorKind::kData ? 2 : 3;
    error_line(err, e.kind() == ErrorKind::kUsage  ? "usage"
                    : e.kind() == ErrorKind::kData ? "data"
                                                   : "endpoint",
               e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    error_line(err, "data", e.what(), 2);
    return 2;
  } catch (const std::exception& e) {
    error_line(err, "data", e.what(), 2);
    return 2;
  }
  return 1;
}

}  // namespace unifair::cli
