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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "json.hpp"
#include "unifair/catalog.hpp"
#include "unifair/cli.hpp"
#include "unifair/csv.hpp"
#include "unifair/geodesy.hpp"
#include "unifair/ingest.hpp"
#include "unifair/llmclient.hpp"
#include "unifair/metrics.hpp"
#include "unifair/profiles.hpp"
#include "unifair/report.hpp"
#include "unifair/score.hpp"
#include "../unit/test_support.hpp"

namespace unifair {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol,
           fmt::format("{}: got {:.10f}, want {:.10f} (tol {:g})", what, got, want, tol));
  }
  bool ok() const { return failed_ == 0 && checks_ > 0; }
  std::string summary() const {
    if (ok()) return fmt::format("{} checks", checks_);
    std::string s = fmt::format("{}/{} checks failed", failed_, checks_);
    for (const auto& f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> body;
};

// AC1: reference per-country operands replayed through the GRS formulas.
void grs_replay(Check& c) {
  struct Row {
    const char* country;
    double avail;
    const char* model;
    double repr, covg, grs;
  };
  const Row rows[] = {
      {"Canada", 0.0200, "Gemma", 0.2333, 0.9698, 0.9848},
      {"Canada", 0.0200, "Llama", 0.7000, 0.9347, 0.9668},
      {"Canada", 0.0200, "Mistral", 0.5667, 0.9189, 0.9586},
      {"United Kingdom", 0.0599, "Gemma", 0.2444, 0.9882, 0.9941},
      {"United Kingdom", 0.0599, "Llama", 0.8222, 0.8992, 0.9483},
      {"United Kingdom", 0.0599, "Mistral", 0.5333, 0.8994, 0.9484},
      {"United States", 0.1311, "Gemma", 0.1066, 0.9731, 0.8896},
      {"United States", 0.1311, "Llama", 0.2386, 0.9253, 0.9619},
      {"United States", 0.1311, "Mistral", 0.4315, 0.9123, 0.9552},
      {"South Africa", 0.0073, "Gemma", 0.3636, 0.8413, 0.9172},
      {"South Africa", 0.0073, "Llama", 1.0000, 0.7022, 0.8379},
      {"South Africa", 0.0073, "Mistral", 0.5455, 0.7443, 0.8627},
      {"Nigeria", 0.0013, "Gemma", 0.0000, 0.0000, 0.0000},
      {"Nigeria", 0.0013, "Llama", 1.0000, 0.0829, 0.2880},
      {"Nigeria", 0.0013, "Mistral", 0.0000, 0.0000, 0.0000},
      {"India", 0.0306, "Gemma", 0.0000, 0.0000, 0.0000},
      {"India", 0.0306, "Llama", 0.0217, 0.0000, 0.0000},
      {"India", 0.0306, "Mistral", 0.0000, 0.0000, 0.0000},
  };
  for (const auto& r : rows) {
    const double g = grs(scaled_representation(r.repr, r.avail, kStabilityEpsilon), r.covg);
    c.near(g, r.grs, 5e-4, fmt::format("{}/{}", r.model, r.country));
  }
}

// AC2: DRS renormalization over the components a row reports.
void drs_replay(Check& c) {
  struct Row {
    const char* group;
    double acc, rep, drs;
  };
  const Row rows[] = {
      {"overall", 0.1786, 0.7355, 0.4570},     {"male", 0.1829, 0.7310, 0.4569},
      {"female", 0.1965, 0.7703, 0.4834},      {"transgender", 0.1563, 0.7052, 0.4307},
      {"high", 0.1500, 0.9638, 0.5569},        {"moderate", 0.1897, 0.6701, 0.4299},
      {"low", 0.1960, 0.5726, 0.3843},
  };
  for (const auto& r : rows) {
    c.near(drs({r.acc, r.rep, std::nullopt, {}}), r.drs, 5e-4,
           fmt::format("Mistral/{}", r.group));
  }
}

// AC3: capital pairs against the geographiclib oracle.
void geodesy(Check& c) {
  const auto table = csv::Table::read_file(testing::fixture("geodesic_pairs.csv"));
  c.expect(table.rows().size() >= 10, "at least 10 oracle pairs");
  for (const auto& row : table.rows()) {
    const GeoPoint a(std::stod(row[2]), std::stod(row[3]));
    const GeoPoint b(std::stod(row[4]), std::stod(row[5]));
    const double want = std::stod(row[6]);
    const auto d = vincenty_distance(a, b);
    c.expect(std::abs(d.km - want) <= 1e-3 * want, fmt::format("{}-{} within 0.1%", row[0], row[1]));
    c.expect(vincenty_distance(b, a).km == d.km, "symmetry " + row[0]);
    c.expect(vincenty_distance(a, a).km == 0.0, "zero identity " + row[0]);
    c.expect(country_distance(row[0], row[1], testing::capitals()).km == d.km,
             "capital lookup " + row[0]);
  }
  const auto fallback = vincenty_distance({0.0, 0.0}, {0.5, 179.7});
  c.expect(fallback.approximate, "near-antipodal pair uses the spherical fallback");
  c.expect(fallback.km > 19900.0 && fallback.km < 20100.0, "fallback distance plausible");
}

// AC4: metric properties.
void properties(Check& c) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(0.0, 0.01), dist(0.0, 20037.5), unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double l = lam(rng), d1 = dist(rng), d2 = dist(rng);
    const double a1 = accessibility(l, d1), a2 = accessibility(l, d2);
    c.expect(a1 > 0.0 && a1 <= 1.0, "accessibility in (0, 1]");
    c.expect(d1 <= d2 ? a1 >= a2 : a1 <= a2, "accessibility non-increasing in distance");
  }
  c.expect(accessibility(0.001, 0.0) == 1.0, "accessibility at zero distance");
  for (unsigned a = 0; a < 32; ++a) {
    for (unsigned b = 0; b < 32; ++b) {
      if (a == 0 && b == 0) continue;
      TagSet ta, tb;
      for (auto t : kAllSubjectTags) {
        if (a >> static_cast<unsigned>(t) & 1u) ta.insert(t);
        if (b >> static_cast<unsigned>(t) & 1u) tb.insert(t);
      }
      const double j = academic_alignment(ta, tb);
      c.expect(j >= 0.0 && j <= 1.0, "jaccard bounds");
      c.expect(j == academic_alignment(tb, ta), "jaccard symmetry");
    }
  }
  double prev = 2.0;
  for (int r = 1; r <= 1200; ++r) {
    University u;
    u.qs_rank = r;
    const double rep = reputation(u);
    c.expect(rep < prev && rep >= 0.0, fmt::format("reputation decreasing at {}", r));
    prev = rep;
  }
  University first, unranked, outside;
  first.qs_rank = 1;
  outside.qs_rank = 1201;
  c.expect(reputation(first) == 1.0, "rank 1 scores 1");
  c.expect(reputation(unranked) == 0.0, "unranked scores 0");
  c.expect(reputation(outside) == 0.0, "beyond 1200 scores 0");
  for (int i = 0; i < 1000; ++i) {
    const double s = unit(rng), v = unit(rng);
    c.expect(grs(s, v) <= (s + v) / 2 + 1e-15, "geometric mean <= arithmetic mean");
  }
  c.expect(scaled_representation(0.5, 0.01) == 1.0, "scaled representation clips at 1");
  c.expect(scaled_representation(0.0, 0.01) == 0.0, "scaled representation at 0");
  c.expect(scaled_representation(0.01, 0.01) < 1.0, "epsilon keeps equal ratio below 1");
  c.expect(representation(7, 5) == 1.0, "representation clips at 1");
  c.expect(grs(1.0, 0.0) == 0.0 && grs(1.0, 1.0) == 1.0, "grs boundaries");
}

// AC5: desk-scale fixture against the brute-force oracle.
void desk(Check& c) {
  const auto catalog = testing::desk_catalog();
  const auto log = testing::desk_run_log(catalog);
  c.expect(catalog.global_count() == 10 && catalog.per_country_counts().size() == 3,
           "10 universities over 3 countries");
  c.expect(log.records.size() == 36 && log.errors.empty(), "36 records ingested");
  const auto scored = score_records(log.records, catalog, testing::capitals(),
                                    testing::default_registry());
  std::ifstream in(testing::fixture("desk/expected.json"));
  const auto expected = json::parse(in);
  const auto& records = expected.at("records");
  c.expect(records.size() == scored.size(), "record count");
  const auto opt = [&](const std::optional<double>& got, const json& want,
                       const std::string& what) {
    if (want.is_null()) {
      c.expect(!got, what + " absent");
    } else {
      c.expect(got.has_value(), what + " present");
      if (got) c.near(*got, want.get<double>(), 1e-9, what);
    }
  };
  for (std::size_t i = 0; i < std::min(records.size(), scored.size()); ++i) {
    const auto& e = records[i];
    const auto& s = scored[i];
    const auto tag = fmt::format("record {}", i);
    const auto uid = e.at("university_id").is_null() ? std::string()
                                                     : e.at("university_id").get<std::string>();
    c.expect(s.record.match.university_id == uid, tag + " university");
    opt(s.acc, e.at("acc"), tag + " acc");
    c.near(s.rep, e.at("rep").get<double>(), 1e-9, tag + " rep");
    opt(s.acad, e.at("acad"), tag + " acad");
    c.near(s.drs, e.at("drs").get<double>(), 1e-9, tag + " drs");
  }
  GrsOptions options;
  for (const auto& r : expected.at("requested_countries")) {
    options.requested_countries.push_back(r.get<std::string>());
  }
  for (auto scope : {GrsScope::kGlobal, GrsScope::kNationality}) {
    options.scope = scope;
    const auto table = grs_by_country(std::span<const ScoredRecord>(scored), catalog, options);
    const auto& want = expected.at("grs").at(std::string(to_string(scope)));
    c.expect(table.rows.size() == want.size(), "grs row count");
    c.expect(table.no_coverage ==
                 expected.at("no_coverage").get<std::vector<std::string>>(),
             "no-coverage countries");
    for (const auto& w : want) {
      const auto variant = parse_variant(w.at("variant").get<std::string>());
      const auto country = w.at("country").get<std::string>();
      const auto it = std::find_if(table.rows.begin(), table.rows.end(), [&](const GrsRow& r) {
        return r.variant == variant && r.result.country == country;
      });
      const auto tag = fmt::format("{} {} {}", to_string(scope), to_string(*variant), country);
      c.expect(it != table.rows.end(), tag + " present");
      if (it == table.rows.end()) continue;
      const auto& g = it->result;
      c.near(g.repr, w.at("repr").get<double>(), 1e-9, tag + " repr");
      c.near(g.avail, w.at("avail").get<double>(), 1e-9, tag + " avail");
      c.near(g.scaled_repr, w.at("scaled_repr").get<double>(), 1e-9, tag + " scaled");
      c.near(g.rep_covg, w.at("rep_covg").get<double>(), 1e-9, tag + " covg");
      c.near(g.grs, w.at("grs").get<double>(), 1e-9, tag + " grs");
      c.expect(g.recommended_set_size == w.at("recommended_set_size").get<std::size_t>(),
               tag + " set size");
      c.expect(g.recommendation_count == w.at("recommendation_count").get<std::size_t>(),
               tag + " count");
    }
  }
}

// Answers every request with a fixed three-line list.
class MockEndpoint : public ChatTransport {
 public:
  HttpReply post_json(const std::string&, const std::string&,
                      const std::map<std::string, std::string>&) override {
    ++calls;
    static const std::string body =
        json{{"choices",
              {{{"message",
                 {{"role", "assistant"},
                  {"content",
                   "1. University of Oxford - History\n2. Stanford University - Physics\n"
                   "3. University of Lagos - Law"}}}}}}}
            .dump();
    return {200, body, ""};
  }
  std::atomic<std::size_t> calls{0};
};

// AC6: grid shape and a resumable mock run.
void grid(Check& c) {
  const auto profiles = enumerate_profiles({});
  c.expect(profiles.size() == 360, fmt::format("{} profiles", profiles.size()));
  const auto& t = TemplateSet::builtin();
  c.expect(reduced_context_profiles(DemographicAttribute::kGender, t).size() == 3, "3 gender");
  c.expect(reduced_context_profiles(DemographicAttribute::kEconomicClass, t).size() == 3,
           "3 class");
  c.expect(reduced_context_profiles(DemographicAttribute::kNationality, t).size() == 40,
           "40 nationality");

  std::vector<PromptInstance> prompts;
  for (const auto& p : profiles) prompts.push_back(render_prompt(p, PromptVariant::kBase, t));

  testing::TempDir dir;
  ModelEndpointConfig cfg;
  cfg.name = "mock";
  cfg.base_url = "http://mock.invalid/v1";
  cfg.model_id = "mock-model";
  cfg.repeats = 10;
  cfg.max_parallel = 8;
  ExperimentOptions options;
  options.output = dir / "raw.jsonl";
  options.sleep = [](std::chrono::milliseconds) {};
  options.now = [] { return std::string("2026-01-01T00:00:00Z"); };

  // First pass covers a third of the grid, as if the run had been interrupted.
  MockEndpoint first;
  const std::vector<PromptInstance> part(prompts.begin(), prompts.begin() + 120);
  const auto r1 = run_experiment(part, cfg, first, options);
  c.expect(r1.attempted == 1200 && r1.succeeded == 1200, "first pass 1200");
  // Simulate a crash mid-write.
  { std::ofstream(options.output, std::ios::app) << "{\"profile_id\":\"fem"; }

  MockEndpoint second;
  const auto r2 = run_experiment(prompts, cfg, second, options);
  c.expect(r2.planned == 3600, fmt::format("planned {}", r2.planned));
  c.expect(r2.skipped == 1200, fmt::format("skipped {}", r2.skipped));
  c.expect(r2.attempted == 2400 && second.calls == 2400, "resume attempts the rest");
  c.expect(first.calls + second.calls == 3600, "3600 records attempted in total");
  c.expect(r2.failures.empty(), "no failures");

  const auto keys = existing_keys(options.output);
  c.expect(keys.size() == 3600, fmt::format("{} lines on disk", keys.size()));
  c.expect(std::set<ResponseKey>(keys.begin(), keys.end()).size() == 3600, "no duplicates");

  MockEndpoint third;
  const auto r3 = run_experiment(prompts, cfg, third, options);
  c.expect(r3.attempted == 0 && third.calls == 0, "completed run is a no-op");
}

// AC7: parser corpus.
void parser(Check& c) {
  std::ifstream in(testing::fixture("parser/corpus.json"));
  const auto cases = json::parse(in);
  c.expect(cases.size() >= 20, "at least 20 fixtures");
  std::size_t well_formed = 0, extracted = 0;
  for (const auto& k : cases) {
    const auto name = k.at("name").get<std::string>();
    ParsedResponse parsed;
    try {
      parsed = parse_response(k.at("response").get<std::string>());
    } catch (const std::exception& e) {
      c.expect(false, name + " crashed: " + e.what());
      continue;
    }
    if (!k.at("pairs").is_null()) {
      std::vector<std::pair<std::string, std::string>> got, want;
      for (const auto& p : parsed.pairs) got.emplace_back(p.university, p.program);
      for (const auto& p : k.at("pairs")) want.emplace_back(p[0], p[1]);
      c.expect(got == want, name + " pairs");
      if (k.at("well_formed").get<bool>()) {
        ++well_formed;
        if (got == want) ++extracted;
      }
    }
    if (!k.at("flags").is_null()) {
      const auto want = ParseFlags::from_names(k.at("flags").get<std::vector<std::string>>());
      c.expect(parsed.flags == want, name + " flags");
    }
  }
  c.expect(well_formed > 0 && extracted == well_formed,
           fmt::format("{}/{} well-formed fixtures fully extracted", extracted, well_formed));
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "unifair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = csv::read_text(e.path());
  }
  return files;
}

// AC8: score and report twice give identical bytes.
void determinism(Check& c) {
  testing::TempDir dir;
  const auto config = dir / "run.ini";
  std::ofstream(config) << "[paths]\ncatalog = " << testing::fixture("desk/catalog.csv").string()
                        << "\n";
  const auto records = (dir / "records.jsonl").string();
  c.expect(run_cli({"-q", "--config", config.string(), "ingest", "--in",
                    testing::fixture("desk/raw.jsonl").string(), "--out", records}) == 0,
           "ingest");
  for (const char* run : {"a", "b"}) {
    const auto out = dir / run;
    fs::create_directories(out);
    const auto scored = (out / "scored.jsonl").string();
    c.expect(run_cli({"-q", "--config", config.string(), "score", "--in", records, "--out",
                      scored}) == 0,
             "score");
    for (const char* format : {"csv", "json", "markdown"}) {
      c.expect(run_cli({"-q", "--config", config.string(), "report", "--in", scored,
                        "--countries", "Nigeria,India", "--format", format, "--out",
                        (out / "report" / format).string()}) == 0,
               "report");
    }
  }
  const auto a = snapshot(dir / "a"), b = snapshot(dir / "b");
  c.expect(a.size() > 10, fmt::format("{} files exported", a.size()));
  c.expect(a == b, "byte-identical exports");
}

}  // namespace
}  // namespace unifair

int main() {
  using namespace unifair;
  const std::vector<Criterion> criteria = {
      {"AC1", "GRS replay of reference operands", 1.0, grs_replay},
      {"AC2", "DRS renormalization replay", 1.0, drs_replay},
      {"AC3", "geodesy oracle", 1.0, geodesy},
      {"AC4", "metric property suite", 5.0, properties},
      {"AC5", "desk-scale end-to-end oracle", 1.0, desk},
      {"AC6", "grid shape and resumable mock run", 30.0, grid},
      {"AC7", "parser corpus", 1.0, parser},
      {"AC8", "deterministic exports", 30.0, determinism},
  };
  int failed = 0;
  for (const auto& k : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      k.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(seconds < k.budget_s,
                 fmt::format("runtime {:.3f}s over budget {:.0f}s", seconds, k.budget_s));
    const bool ok = check.ok();
    if (!ok) ++failed;
    std::cout << fmt::format("{} {} {} ({:.3f}s): {}\n", ok ? "PASS" : "FAIL", k.id, k.title,
                             seconds, check.summary());
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed,
                           criteria.size());
  return failed == 0 ? 0 : 1;
}
