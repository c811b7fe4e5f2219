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

#include "unifair/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "unifair/assets.hpp"
#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

namespace pt = boost::property_tree;

// Strips inline "; ..." or " # ..." comments and wrapping quotes.
std::string clean_value(std::string_view raw) {
  std::string_view v = raw;
  for (std::string_view marker : {" ;", " #", "\t;", "\t#"}) {
    const auto pos = v.find(marker);
    if (pos != std::string_view::npos) v = v.substr(0, pos);
  }
  v = text::trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return std::string(v);
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree, std::string source)
      : name_(std::move(name)), source_(std::move(source)) {
    for (const auto& [key, child] : tree) values_[key] = clean_value(child.data());
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    auto v = std::move(it->second);
    values_.erase(it);
    return v;
  }

  std::optional<double> number(const std::string& key) {
    auto v = take(key);
    if (!v || v->empty()) return std::nullopt;
    // "a/b" fractions are allowed so weights can be written as 1/3.
    const auto slash = v->find('/');
    if (slash != std::string::npos) {
      return parse_double(key, v->substr(0, slash)) / parse_double(key, v->substr(slash + 1));
    }
    return parse_double(key, *v);
  }

  std::optional<long> integer(const std::string& key) {
    auto v = take(key);
    if (!v || v->empty()) return std::nullopt;
    long out = 0;
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc() || ptr != end) bad(key, *v, "an integer");
    return out;
  }

  std::vector<std::string> list(const std::string& key) {
    std::vector<std::string> out;
    if (auto v = take(key)) {
      for (const auto& part : text::split(*v, ',')) {
        const auto t = text::trim(part);
        if (!t.empty()) out.emplace_back(t);
      }
    }
    return out;
  }

  // Every key must have been consumed.
  void finish() const {
    if (values_.empty()) return;
    std::vector<std::string> keys;
    for (const auto& [k, _] : values_) keys.push_back(k);
    throw UsageError(fmt::format("{}: unknown key(s) in [{}]: {}", source_, name_,
                                 text::join(keys, ", ")));
  }

  [[noreturn]] void bad(const std::string& key, const std::string& value,
                        std::string_view expected) const {
    throw UsageError(fmt::format("{}: [{}] {} = '{}' is not {}", source_, name_, key, value,
                                 expected));
  }

 private:
  double parse_double(const std::string& key, const std::string& text_value) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(text_value, &used);
      if (used != text_value.size()) bad(key, text_value, "a number");
      return d;
    } catch (const std::logic_error&) {
      bad(key, text_value, "a number");
    }
  }

  std::string name_;
  std::string source_;
  std::map<std::string, std::string> values_;
};

std::optional<std::filesystem::path> path_value(Section& s, const std::string& key,
                                                const std::filesystem::path& base) {
  auto v = s.take(key);
  if (!v || v->empty()) return std::nullopt;
  std::filesystem::path p(*v);
  return p.is_absolute() ? p : base / p;
}

void read_endpoint(Section& s, ModelEndpointConfig& e) {
  if (auto v = s.take("base_url")) e.base_url = *v;
  if (auto v = s.take("model_id")) e.model_id = *v;
  if (auto v = s.take("api_key_env")) e.api_key_env = *v;
  if (auto v = s.number("temperature")) e.decode.temperature = *v;
  if (auto v = s.number("top_p")) e.decode.top_p = *v;
  if (auto v = s.integer("max_new_tokens")) e.decode.max_new_tokens = static_cast<int>(*v);
  if (auto v = s.integer("repeats")) e.repeats = static_cast<int>(*v);
  if (auto v = s.integer("max_parallel")) e.max_parallel = static_cast<int>(*v);
  if (auto v = s.integer("max_attempts")) e.retry.max_attempts = static_cast<int>(*v);
  if (auto v = s.integer("initial_backoff_ms")) {
    e.retry.initial_backoff = std::chrono::milliseconds(*v);
  }
  if (auto v = s.number("backoff_multiplier")) e.retry.multiplier = *v;
  if (auto v = s.integer("max_backoff_ms")) e.retry.max_backoff = std::chrono::milliseconds(*v);
  if (auto v = s.integer("timeout_s")) e.timeout = std::chrono::seconds(*v);
  if (auto v = s.take("api_key")) {
    throw UsageError("[endpoint." + e.name +
                     "] api keys belong in the environment; set api_key_env instead");
  }
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::string content;
  try {
    content = csv::read_text(path);
  } catch (const DataError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return parse(content, path.parent_path(), path.string());
}

RunConfig RunConfig::parse(std::string_view content, const std::filesystem::path& base_dir,
                           const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(content)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(fmt::format("{}:{}: {}", source, e.line(), e.message()));
  }
  RunConfig cfg;
  cfg.source = source;
  const auto base = base_dir.empty() ? std::filesystem::path(".") : base_dir;
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw UsageError(source + ": key '" + name + "' outside any section");
    }
    Section s(name, child, source);
    if (name == "paths") {
      auto& p = cfg.paths;
      p.catalog = path_value(s, "catalog", base);
      p.aliases = path_value(s, "aliases", base);
      p.capitals = path_value(s, "capitals", base);
      p.rules = path_value(s, "rules", base);
      p.overrides = path_value(s, "overrides", base);
      p.templates = path_value(s, "templates", base);
      p.development_status = path_value(s, "development_status", base);
      if (auto out = path_value(s, "output_dir", base)) p.output_dir = *out;
    } else if (name == "metrics") {
      if (auto v = s.number("lambda_high")) cfg.lambdas.high = *v;
      if (auto v = s.number("lambda_moderate")) cfg.lambdas.moderate = *v;
      if (auto v = s.number("lambda_low")) cfg.lambdas.low = *v;
      if (auto v = s.number("w_acc")) cfg.weights.acc = *v;
      if (auto v = s.number("w_rep")) cfg.weights.rep = *v;
      if (auto v = s.number("w_acad")) cfg.weights.acad = *v;
      if (auto v = s.number("fuzzy_threshold")) cfg.fuzzy_threshold = *v;
      if (auto v = s.number("epsilon")) cfg.epsilon = *v;
      if (auto v = s.take("grs_scope")) {
        auto scope = parse_scope(*v);
        if (!scope) s.bad("grs_scope", *v, "global or nationality");
        cfg.scope = *scope;
      }
      if (auto v = s.integer("top_n")) {
        if (*v < 1) s.bad("top_n", std::to_string(*v), "a positive integer");
        cfg.top_n = static_cast<std::size_t>(*v);
      }
    } else if (name == "profiles") {
      if (auto genders = s.list("genders"); !genders.empty()) {
        cfg.grid.genders.clear();
        for (const auto& g : genders) {
          auto parsed = parse_gender(g);
          if (!parsed) s.bad("genders", g, "a gender");
          cfg.grid.genders.push_back(*parsed);
        }
      }
      if (auto classes = s.list("economic_classes"); !classes.empty()) {
        cfg.grid.economic_classes.clear();
        for (const auto& c : classes) {
          auto parsed = parse_economic_class(c);
          if (!parsed) s.bad("economic_classes", c, "an economic class");
          cfg.grid.economic_classes.push_back(*parsed);
        }
      }
      if (auto nats = s.list("nationalities"); !nats.empty()) cfg.grid.nationalities = nats;
      if (auto interests = s.take("background_interests")) {
        try {
          cfg.grid.background_interests = TagSet::parse(
              [&] {
                auto v = *interests;
                std::replace(v.begin(), v.end(), ',', '|');
                return v;
              }());
        } catch (const DataError&) {
          s.bad("background_interests", *interests, "a list of subject tags");
        }
      }
    } else if (name.rfind("endpoint.", 0) == 0) {
      ModelEndpointConfig e;
      e.name = name.substr(9);
      if (e.name.empty()) throw UsageError(source + ": endpoint section needs a name");
      read_endpoint(s, e);
      cfg.endpoints.push_back(std::move(e));
    } else {
      throw UsageError(source + ": unknown section [" + name + "]");
    }
    s.finish();
  }
  return cfg;
}

const ModelEndpointConfig& RunConfig::endpoint(std::string_view name) const {
  for (const auto& e : endpoints) {
    if (e.name == name) return e;
  }
  for (const auto& e : endpoints) {
    if (e.model_id == name) return e;
  }
  if (name.empty() && endpoints.size() == 1) return endpoints.front();
  std::vector<std::string> names;
  for (const auto& e : endpoints) names.push_back(e.name);
  throw UsageError(fmt::format("no endpoint named '{}' (configured: {})", name,
                               names.empty() ? "none" : text::join(names, ", ")));
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> out;
  const auto need_file = [&](const char* key, const std::optional<std::filesystem::path>& p) {
    if (p && !std::filesystem::is_regular_file(*p)) {
      out.push_back(fmt::format("paths.{}: file not found: {}", key, p->string()));
    }
  };
  need_file("catalog", paths.catalog);
  need_file("aliases", paths.aliases);
  need_file("capitals", paths.capitals);
  need_file("rules", paths.rules);
  need_file("development_status", paths.development_status);
  if (paths.templates && !std::filesystem::is_directory(*paths.templates)) {
    out.push_back("paths.templates: directory not found: " + paths.templates->string());
  }
  if (!paths.catalog) out.push_back("paths.catalog: not set");
  for (double l : {lambdas.high, lambdas.moderate, lambdas.low}) {
    if (!(l >= 0.0)) {
      out.push_back(fmt::format("metrics: decay rate {} is negative", l));
      break;
    }
  }
  try {
    weights.validate();
  } catch (const UsageError& e) {
    out.push_back(std::string("metrics: ") + e.what());
  }
  if (!(fuzzy_threshold > 0.0 && fuzzy_threshold <= 1.0)) {
    out.push_back(fmt::format("metrics.fuzzy_threshold {} outside (0, 1]", fuzzy_threshold));
  }
  if (!(epsilon > 0.0 && epsilon < 1e-2)) {
    out.push_back(fmt::format("metrics.epsilon {} outside (0, 0.01)", epsilon));
  }
  for (const auto& e : endpoints) {
    try {
      e.validate();
    } catch (const UsageError& err) {
      out.push_back(err.what());
    }
  }
  return out;
}

const Catalog& Assets::require_catalog() const {
  if (!catalog) throw UsageError("no catalog configured (set paths.catalog)");
  return *catalog;
}

Assets load_assets(const RunConfig& config, bool with_catalog) {
  Assets a;
  const auto& p = config.paths;
  a.capitals = p.capitals ? CapitalTable::load(*p.capitals)
                          : CapitalTable::parse(assets::capitals_csv(), "<built-in capitals>");
  a.capitals.require_all(config.grid.nationalities);
  a.rules = p.rules ? RuleSet::load(*p.rules) : RuleSet::builtin();
  if (p.overrides && std::filesystem::exists(*p.overrides)) {
    a.overrides = OverrideTable::load(*p.overrides, &a.warnings);
  }
  if (p.templates) a.templates = TemplateSet::load(*p.templates);
  if (p.development_status) {
    a.development_status = load_development_status(*p.development_status, a.capitals);
  }
  if (with_catalog && p.catalog) {
    a.catalog.emplace(Catalog::load(*p.catalog, a.capitals, {config.fuzzy_threshold}));
    if (p.aliases) a.catalog->add_aliases_from_file(*p.aliases);
    const auto& w = a.catalog->warnings();
    a.warnings.insert(a.warnings.end(), w.begin(), w.end());
  }
  return a;
}

}  // namespace unifair
