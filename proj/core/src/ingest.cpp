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

#include "unifair/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "json.hpp"

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {
namespace {

using nlohmann::json;

enum class Marker { kNone, kNumbered, kBullet };

struct Line {
  std::size_t indent = 0;
  Marker marker = Marker::kNone;
  bool decorated = false;  // heading hashes or emphasis around the marker
  std::string content;     // marker stripped, trimmed
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

Line classify(std::string_view raw_line) {
  Line line;
  while (line.indent < raw_line.size() &&
         (raw_line[line.indent] == ' ' || raw_line[line.indent] == '\t')) {
    ++line.indent;
  }
  std::string_view t = text::trim(raw_line);
  // Markdown headings such as "### 1. University of Oxford".
  if (!t.empty() && t.front() == '#') {
    line.decorated = true;
    while (!t.empty() && t.front() == '#') t.remove_prefix(1);
    t = text::trim(t);
  }
  // "1." "1)" "**1.**"
  std::string_view probe = t;
  if (starts_with(probe, "**")) {
    probe.remove_prefix(2);
    line.decorated = true;
  }
  std::size_t digits = 0;
  while (digits < probe.size() && digits < 3 &&
         std::isdigit(static_cast<unsigned char>(probe[digits]))) {
    ++digits;
  }
  if (digits > 0 && digits < probe.size() &&
      (probe[digits] == '.' || probe[digits] == ')')) {
    std::string_view rest = probe.substr(digits + 1);
    if (starts_with(rest, "**") && starts_with(t, "**")) rest.remove_prefix(2);
    if (rest.empty() || rest.front() == ' ' || rest.front() == '\t' ||
        starts_with(rest, "**")) {
      line.marker = Marker::kNumbered;
      line.content = std::string(text::trim(rest));
      return line;
    }
  }
  for (std::string_view bullet : {"- ", "* ", "+ ", "\xE2\x80\xA2 ", "\xE2\x80\xA2"}) {
    if (starts_with(t, bullet)) {
      line.marker = Marker::kBullet;
      line.content = std::string(text::trim(t.substr(bullet.size())));
      return line;
    }
  }
  line.content = std::string(t);
  return line;
}

std::string strip_markdown(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '`') continue;
    if ((s[i] == '*' || s[i] == '_') && i + 1 < s.size() && s[i + 1] == s[i]) {
      ++i;
      continue;
    }
    out.push_back(s[i]);
  }
  std::string_view v = text::trim(out);
  // Single-character emphasis wrapping the whole field.
  while (v.size() >= 2 && (v.front() == '*' || v.front() == '_') &&
         v.back() == v.front()) {
    v = text::trim(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::string_view strip_wrapping(std::string_view s) {
  s = text::trim(s);
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    for (std::string_view q : {"\"", "'", "\xE2\x80\x9C", "\xE2\x80\x9D"}) {
      if (starts_with(s, q)) {
        s.remove_prefix(q.size());
        changed = true;
      }
      if (s.size() >= q.size() && s.substr(s.size() - q.size()) == q) {
        s.remove_suffix(q.size());
        changed = true;
      }
    }
    while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' ||
                          s.back() == '*' || s.back() == '_')) {
      s.remove_suffix(1);
      changed = true;
    }
    while (!s.empty() && (s.front() == '*' || s.front() == '_')) {
      s.remove_prefix(1);
      changed = true;
    }
    s = text::trim(s);
  }
  return s;
}

struct Split {
  std::string left;
  std::string right;
  std::string_view separator;
};

constexpr std::array<std::string_view, 5> kDashSeparators = {
    " - ", " \xE2\x80\x93 ", " \xE2\x80\x94 ", "\xE2\x80\x94", " -- "};

std::optional<Split> split_pair(std::string_view content, bool allow_colon) {
  std::size_t best = std::string_view::npos;
  std::string_view best_sep;
  for (auto sep : kDashSeparators) {
    const auto pos = content.find(sep);
    if (pos != std::string_view::npos && pos < best) {
      best = pos;
      best_sep = sep;
    }
  }
  if (allow_colon) {
    const auto pos = content.find(':');
    if (pos != std::string_view::npos && pos < best) {
      best = pos;
      best_sep = ":";
    }
  }
  if (best == std::string_view::npos) return std::nullopt;
  return Split{std::string(content.substr(0, best)),
               std::string(content.substr(best + best_sep.size())), best_sep};
}

bool has_label(std::string_view s, std::string_view& value) {
  static constexpr std::string_view kLabels[] = {
      "program", "programme", "programs", "course", "degree", "master's program",
      "masters program", "recommended program", "suggested program", "major"};
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return false;
  const auto label = text::join(text::words(strip_markdown(s.substr(0, colon))), " ");
  for (auto l : kLabels) {
    if (label == text::join(text::words(l), " ")) {
      value = s.substr(colon + 1);
      return true;
    }
  }
  return false;
}

std::string clean_university(std::string_view s) {
  std::string out(strip_wrapping(strip_markdown(s)));
  // Trailing location hints such as "(Canada)".
  while (!out.empty() && out.back() == ')') {
    const auto open = out.rfind('(');
    if (open == std::string::npos || open == 0) break;
    out = std::string(strip_wrapping(out.substr(0, open)));
  }
  std::string_view labelled;
  if (has_label(out, labelled)) out = std::string(strip_wrapping(labelled));
  return out;
}

std::string clean_program(std::string_view s) {
  std::string cleaned = strip_markdown(s);
  std::string_view v = text::trim(cleaned);
  std::string_view labelled;
  if (has_label(v, labelled)) v = text::trim(labelled);
  // Drop trailing commentary.
  std::size_t cut = v.size();
  for (auto sep : kDashSeparators) cut = std::min(cut, v.find(sep));
  cut = std::min(cut, v.find(": "));
  cut = std::min(cut, v.find(". "));
  return std::string(strip_wrapping(v.substr(0, cut)));
}

bool institution_word(std::string_view s) {
  static constexpr std::string_view kWords[] = {
      "university", "college", "institute", "school", "polytechnic",
      "academy", "universite", "universidad", "universitat", "universita",
      "universidade", "universiteit", "institut", "eth", "epfl"};
  for (const auto& w : text::words(s)) {
    for (auto k : kWords) {
      if (w == k) return true;
    }
  }
  return false;
}

ParsedPair make_pair(const Line& line, bool numbered, bool allow_colon,
                     std::string_view following_program) {
  ParsedPair pair;
  const auto clean = strip_markdown(line.content);
  if (auto split = split_pair(clean, allow_colon)) {
    pair.university = clean_university(split->left);
    pair.program = clean_program(split->right);
    // Canonical means "N. X - Y" with nothing for the cleaners to remove.
    pair.reformatted = !numbered || line.decorated || split->separator != " - " ||
                       clean != line.content ||
                       pair.university != text::trim(split->left) ||
                       pair.program != text::trim(split->right);
  } else if (!following_program.empty()) {
    pair.university = clean_university(clean);
    pair.program = clean_program(following_program);
    pair.reformatted = true;
  } else {
    pair.university = clean_university(clean);
    pair.reformatted = true;
  }
  return pair;
}

}  // namespace

std::vector<std::string> ParseFlags::names() const {
  std::vector<std::string> out;
  if (reformatted) out.emplace_back("reformatted");
  if (truncated) out.emplace_back("truncated");
  if (extra_items) out.emplace_back("extra_items");
  return out;
}

ParseFlags ParseFlags::from_names(const std::vector<std::string>& names) {
  ParseFlags f;
  for (const auto& n : names) {
    if (n == "reformatted") {
      f.reformatted = true;
    } else if (n == "truncated") {
      f.truncated = true;
    } else if (n == "extra_items") {
      f.extra_items = true;
    } else {
      throw DataError("unknown parse flag '" + n + "'");
    }
  }
  return f;
}

ParseFlags& ParseFlags::operator|=(const ParseFlags& other) {
  reformatted = reformatted || other.reformatted;
  truncated = truncated || other.truncated;
  extra_items = extra_items || other.extra_items;
  return *this;
}

ParsedResponse parse_response(std::string_view raw) {
  std::vector<Line> lines;
  for (const auto& l : text::split(raw, '\n')) {
    auto line = classify(l);
    if (!line.content.empty()) lines.push_back(std::move(line));
  }

  const auto top_indent = [&](Marker m) {
    std::size_t indent = std::string::npos;
    for (const auto& l : lines) {
      if (l.marker == m) indent = std::min(indent, l.indent);
    }
    return indent;
  };

  Marker mode = Marker::kNone;
  if (top_indent(Marker::kNumbered) != std::string::npos) {
    mode = Marker::kNumbered;
  } else if (top_indent(Marker::kBullet) != std::string::npos) {
    mode = Marker::kBullet;
  }

  std::vector<ParsedPair> found;
  if (mode == Marker::kNone) {
    for (const auto& l : lines) {
      const auto clean = strip_markdown(l.content);
      // Colons only count when the left side looks like an institution, so
      // prose such as "Note: ..." is not taken for a pair.
      bool colon = false;
      auto split = split_pair(clean, /*allow_colon=*/false);
      if (!split) {
        split = split_pair(clean, true);
        colon = split && institution_word(split->left);
        if (!colon) split.reset();
      }
      if (!split) continue;
      if (text::trim(split->left).empty() || text::trim(split->right).empty()) continue;
      auto pair = make_pair(l, false, colon, {});
      if (!pair.university.empty()) found.push_back(std::move(pair));
    }
  } else {
    const auto indent = top_indent(mode);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& l = lines[i];
      if (l.marker != mode || l.indent != indent) continue;
      // Program given on a labelled sub-line ("- Program: ...").
      std::string_view following;
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        if (lines[j].marker == mode && lines[j].indent == indent) break;
        std::string_view value;
        if (has_label(lines[j].content, value)) {
          following = value;
          break;
        }
      }
      auto pair = make_pair(l, mode == Marker::kNumbered, true, following);
      if (!pair.university.empty()) found.push_back(std::move(pair));
    }
  }

  ParsedResponse out;
  if (found.size() > kMaxPairs) {
    out.flags.extra_items = true;
    found.resize(kMaxPairs);
  }
  out.flags.truncated = found.size() < kMaxPairs;
  for (const auto& p : found) out.flags.reformatted = out.flags.reformatted || p.reformatted;
  out.pairs = std::move(found);
  return out;
}

std::string ResponseKey::to_string() const {
  return fmt::format("{}/{}/{}/{}", profile_id, model_id, unifair::to_string(variant),
                     run_index);
}

namespace {

json decode_to_json(const DecodeParams& d) {
  return json{{"temperature", d.temperature},
              {"top_p", d.top_p},
              {"max_new_tokens", d.max_new_tokens}};
}

DecodeParams decode_from_json(const json& j) {
  DecodeParams d;
  d.temperature = j.at("temperature").get<double>();
  d.top_p = j.at("top_p").get<double>();
  d.max_new_tokens = j.at("max_new_tokens").get<int>();
  return d;
}

PromptVariant variant_from_json(const json& j) {
  const auto v = parse_variant(j.get<std::string>());
  if (!v) throw DataError("unknown variant '" + j.get<std::string>() + "'");
  return *v;
}

json flags_to_json(const ParseFlags& f) { return f.names(); }

}  // namespace

std::string to_json_line(const RawResponse& r) {
  json j;
  j["profile_id"] = r.profile_id;
  j["model_id"] = r.model_id;
  j["variant"] = to_string(r.variant);
  j["run_index"] = r.run_index;
  j["prompt_text"] = r.prompt_text;
  j["response_text"] = r.response_text;
  j["decode_params"] = decode_to_json(r.decode);
  j["timestamp"] = r.timestamp;
  if (r.attempts > 0) j["attempts"] = r.attempts;
  if (!r.usage.empty()) {
    auto usage = json::parse(r.usage, nullptr, false);
    j["usage"] = usage.is_discarded() ? json(r.usage) : usage;
  }
  return j.dump();
}

RawResponse raw_response_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  try {
    RawResponse r;
    r.profile_id = j.at("profile_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.variant = variant_from_json(j.at("variant"));
    r.run_index = j.at("run_index").get<int>();
    if (r.run_index < 1) throw DataError("run_index must be >= 1");
    r.prompt_text = j.value("prompt_text", std::string());
    if (!j.contains("response_text") || !j.at("response_text").is_string()) {
      throw DataError("missing response_text");
    }
    r.response_text = j.at("response_text").get<std::string>();
    if (j.contains("decode_params")) r.decode = decode_from_json(j.at("decode_params"));
    r.timestamp = j.value("timestamp", std::string());
    r.attempts = j.value("attempts", 0);
    if (j.contains("usage") && !j.at("usage").is_null()) r.usage = j.at("usage").dump();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("schema violation: ") + e.what());
  }
}

std::string to_json_line(const RecommendationRecord& r) {
  json j;
  j["profile_id"] = r.profile_id;
  j["model_id"] = r.model_id;
  j["variant"] = to_string(r.variant);
  j["run_index"] = r.run_index;
  j["position"] = r.position;
  j["raw_university"] = r.raw_university;
  j["raw_program"] = r.raw_program;
  json m;
  m["status"] = to_string(r.match.status);
  m["similarity"] = r.match.similarity;
  if (r.match.matched()) {
    m["university_id"] = r.match.university_id;
    m["canonical_name"] = r.match.canonical_name;
    m["country"] = r.match.country;
  } else {
    m["university_id"] = nullptr;
    m["canonical_name"] = nullptr;
    m["country"] = nullptr;
  }
  j["match"] = m;
  json tags = json::array();
  for (auto t : r.program_tags.tags()) tags.push_back(tag_id(t));
  j["program_tags"] = tags;
  j["parse_flags"] = flags_to_json(r.parse_flags);
  return j.dump();
}

RecommendationRecord record_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    RecommendationRecord r;
    r.profile_id = j.at("profile_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.variant = variant_from_json(j.at("variant"));
    r.run_index = j.at("run_index").get<int>();
    r.position = j.at("position").get<int>();
    r.raw_university = j.at("raw_university").get<std::string>();
    r.raw_program = j.at("raw_program").get<std::string>();
    const auto& m = j.at("match");
    const auto status = parse_match_status(m.at("status").get<std::string>());
    if (!status) throw DataError("unknown match status");
    r.match.status = *status;
    r.match.similarity = m.value("similarity", 0.0);
    if (r.match.matched()) {
      r.match.university_id = m.at("university_id").get<std::string>();
      r.match.canonical_name = m.at("canonical_name").get<std::string>();
      r.match.country = m.at("country").get<std::string>();
    }
    for (const auto& t : j.at("program_tags")) {
      const auto tag = parse_tag(t.get<std::string>());
      if (!tag) throw DataError("unknown tag " + t.get<std::string>());
      r.program_tags.insert(*tag);
    }
    r.parse_flags = ParseFlags::from_names(j.at("parse_flags").get<std::vector<std::string>>());
    if (r.position < 1 || r.position > static_cast<int>(kMaxPairs) || r.run_index < 1) {
      throw DataError("position or run_index out of range");
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed record line: ") + e.what());
  }
}

RunLog ingest_run(std::istream& in, const Catalog& catalog, const RuleSet& rules,
                  const IngestContext& context, const std::string& source) {
  RunLog log;
  log.manifest.source = source;
  std::unordered_map<std::string, MatchResult> resolved;
  std::set<ResponseKey> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    RawResponse raw;
    try {
      raw = raw_response_from_json_line(line);
      if (context.profiles != nullptr && !context.profiles->contains(raw.profile_id)) {
        throw DataError("unknown profile_id '" + raw.profile_id + "'");
      }
    } catch (const DataError& e) {
      log.errors.push_back({line_no, e.what()});
      continue;
    }
    ResponseKey key{raw.profile_id, raw.model_id, raw.variant, raw.run_index};
    if (!seen.insert(key).second) {
      log.errors.push_back({line_no, "duplicate response " + key.to_string()});
      continue;
    }

    auto& manifest = log.manifest;
    manifest.models.insert(raw.model_id);
    manifest.variants.insert(std::string(to_string(raw.variant)));
    if (std::find(manifest.decode_params.begin(), manifest.decode_params.end(),
                  raw.decode) == manifest.decode_params.end()) {
      manifest.decode_params.push_back(raw.decode);
    }
    if (!raw.timestamp.empty()) {
      if (manifest.first_timestamp.empty() || raw.timestamp < manifest.first_timestamp) {
        manifest.first_timestamp = raw.timestamp;
      }
      if (raw.timestamp > manifest.last_timestamp) manifest.last_timestamp = raw.timestamp;
    }

    const auto parsed = parse_response(raw.response_text);
    log.responses.push_back(
        {key, parsed.pairs.size(), parsed.flags, raw.decode, raw.timestamp});
    int position = 0;
    for (const auto& pair : parsed.pairs) {
      RecommendationRecord record;
      record.profile_id = raw.profile_id;
      record.model_id = raw.model_id;
      record.variant = raw.variant;
      record.run_index = raw.run_index;
      record.position = ++position;
      record.raw_university = pair.university;
      record.raw_program = pair.program;
      auto it = resolved.find(pair.university);
      if (it == resolved.end()) {
        it = resolved.emplace(pair.university, catalog.resolve(pair.university)).first;
      }
      record.match = it->second;
      if (!text::trim(pair.program).empty()) {
        record.program_tags = tag_program(pair.program, rules, context.overrides);
      }
      record.parse_flags = parsed.flags;
      record.parse_flags.reformatted = pair.reformatted;
      if (!record.match.matched()) ++log.unmatched;
      if (record.program_tags.empty()) ++log.untagged;
      log.records.push_back(std::move(record));
    }
  }
  return log;
}

RunLog ingest_run(const std::filesystem::path& path, const Catalog& catalog,
                  const RuleSet& rules, const IngestContext& context) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return ingest_run(in, catalog, rules, context, path.string());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& records_path) {
  auto p = records_path;
  p += ".manifest.json";
  return p;
}

void write_run_log(const RunLog& log, const std::filesystem::path& path) {
  {
    auto out = csv::open_output(path);
    for (const auto& r : log.records) out << to_json_line(r) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
  }
  json m;
  m["source"] = log.manifest.source;
  m["models"] = log.manifest.models;
  m["variants"] = log.manifest.variants;
  json decode = json::array();
  for (const auto& d : log.manifest.decode_params) decode.push_back(decode_to_json(d));
  m["decode_params"] = decode;
  m["first_timestamp"] = log.manifest.first_timestamp;
  m["last_timestamp"] = log.manifest.last_timestamp;
  m["record_count"] = log.records.size();
  m["unmatched"] = log.unmatched;
  m["untagged"] = log.untagged;
  json responses = json::array();
  for (const auto& r : log.responses) {
    responses.push_back(json{{"profile_id", r.key.profile_id},
                             {"model_id", r.key.model_id},
                             {"variant", to_string(r.key.variant)},
                             {"run_index", r.key.run_index},
                             {"pair_count", r.pair_count},
                             {"parse_flags", flags_to_json(r.flags)},
                             {"decode_params", decode_to_json(r.decode)},
                             {"timestamp", r.timestamp}});
  }
  m["responses"] = responses;
  json errors = json::array();
  for (const auto& e : log.errors) errors.push_back(json{{"line", e.line}, {"message", e.message}});
  m["errors"] = errors;

  const auto manifest_path = manifest_path_for(path);
  auto out = csv::open_output(manifest_path);
  out << m.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + manifest_path.string());
}

RunLog read_run_log(const std::filesystem::path& path) {
  RunLog log;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      log.records.push_back(record_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
    const auto& r = log.records.back();
    if (!r.match.matched()) ++log.unmatched;
    if (r.program_tags.empty()) ++log.untagged;
  }

  const auto manifest_path = manifest_path_for(path);
  if (std::filesystem::exists(manifest_path)) {
    try {
      const auto m = json::parse(csv::read_text(manifest_path));
      log.manifest.source = m.value("source", std::string());
      log.manifest.models = m.at("models").get<std::set<std::string>>();
      log.manifest.variants = m.at("variants").get<std::set<std::string>>();
      for (const auto& d : m.at("decode_params")) {
        log.manifest.decode_params.push_back(decode_from_json(d));
      }
      log.manifest.first_timestamp = m.value("first_timestamp", std::string());
      log.manifest.last_timestamp = m.value("last_timestamp", std::string());
      for (const auto& r : m.at("responses")) {
        ResponseSummary s;
        s.key = {r.at("profile_id").get<std::string>(), r.at("model_id").get<std::string>(),
                 variant_from_json(r.at("variant")), r.at("run_index").get<int>()};
        s.pair_count = r.at("pair_count").get<std::size_t>();
        s.flags = ParseFlags::from_names(r.at("parse_flags").get<std::vector<std::string>>());
        s.decode = decode_from_json(r.at("decode_params"));
        s.timestamp = r.value("timestamp", std::string());
        log.responses.push_back(std::move(s));
      }
    } catch (const json::exception& e) {
      throw DataError(manifest_path.string() + ": " + e.what());
    }
  } else {
    // Without a manifest, responses are reconstructed from the records.
    std::map<ResponseKey, std::size_t> counts;
    for (const auto& r : log.records) {
      ++counts[r.key()];
      log.manifest.models.insert(r.model_id);
      log.manifest.variants.insert(std::string(to_string(r.variant)));
    }
    for (const auto& [key, count] : counts) {
      ResponseSummary s;
      s.key = key;
      s.pair_count = count;
      log.responses.push_back(std::move(s));
    }
  }
  return log;
}

}  // namespace unifair
