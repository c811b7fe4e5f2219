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

#include "unifair/llmclient.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "httplib.h"
#include "json.hpp"

#include "unifair/csv.hpp"
#include "unifair/errors.hpp"
#include "unifair/text.hpp"

namespace unifair {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::delay(int attempt) const {
  const double factor = std::pow(multiplier, std::max(0, attempt - 1));
  const double ms = static_cast<double>(initial_backoff.count()) * factor;
  return std::chrono::milliseconds(static_cast<std::int64_t>(
      std::min(ms, static_cast<double>(max_backoff.count()))));
}

void ModelEndpointConfig::validate() const {
  const auto label = name.empty() ? model_id : name;
  if (base_url.empty()) throw UsageError("endpoint " + label + ": base_url is empty");
  if (model_id.empty()) throw UsageError("endpoint " + label + ": model_id is empty");
  if (!(decode.temperature >= 0.0)) throw UsageError("endpoint " + label + ": temperature < 0");
  if (!(decode.top_p > 0.0 && decode.top_p <= 1.0)) {
    throw UsageError("endpoint " + label + ": top_p must be in (0, 1]");
  }
  if (decode.max_new_tokens < 1) throw UsageError("endpoint " + label + ": max_new_tokens < 1");
  if (repeats < 1) throw UsageError("endpoint " + label + ": repeats must be >= 1");
  if (max_parallel < 1) throw UsageError("endpoint " + label + ": max_parallel must be >= 1");
  if (retry.max_attempts < 1) throw UsageError("endpoint " + label + ": max_attempts < 1");
  if (retry.multiplier < 1.0) throw UsageError("endpoint " + label + ": backoff multiplier < 1");
}

std::string ModelEndpointConfig::api_key() const {
  if (api_key_env.empty()) return {};
  const char* value = std::getenv(api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw EndpointError("environment variable " + api_key_env + " is not set");
  }
  return value;
}

HttpTransport::HttpTransport(std::string base_url, std::chrono::seconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("base_url needs a scheme: " + base_url);
  }
  const auto scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UsageError("unsupported scheme in base_url: " + base_url);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw EndpointError("this build has no TLS support; use an http:// endpoint");
  }
#endif
  const auto path_start = base_url.find('/', scheme_end + 3);
  origin_ = base_url.substr(0, path_start);
  if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpReply HttpTransport::post_json(const std::string& path, const std::string& body,
                                   const std::map<std::string, std::string>& headers) {
  // A client per call keeps concurrent use safe.
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers h(headers.begin(), headers.end());
  auto res = client.Post(prefix_ + path, h, body, "application/json");
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string chat_request_body(std::string_view prompt_text, const ModelEndpointConfig& cfg) {
  json body;
  body["model"] = cfg.model_id;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt_text}}});
  body["temperature"] = cfg.decode.temperature;
  body["top_p"] = cfg.decode.top_p;
  body["max_tokens"] = cfg.decode.max_new_tokens;
  body["n"] = 1;
  return body.dump();
}

Completion parse_chat_reply(std::string_view body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw EndpointError("endpoint returned invalid JSON");
  try {
    Completion c;
    const auto& message = j.at("choices").at(0).at("message");
    const auto& content = message.at("content");
    c.text = content.is_null() ? std::string() : content.get<std::string>();
    if (j.contains("usage") && !j.at("usage").is_null()) c.usage = j.at("usage").dump();
    return c;
  } catch (const json::exception& e) {
    throw EndpointError(std::string("unexpected reply shape: ") + e.what());
  }
}

Completion complete(std::string_view prompt_text, const ModelEndpointConfig& cfg,
                    ChatTransport& transport, const std::string& api_key,
                    const Sleeper& sleep) {
  std::map<std::string, std::string> headers;
  if (!api_key.empty()) headers["Authorization"] = "Bearer " + api_key;
  const auto body = chat_request_body(prompt_text, cfg);
  std::string last_error;
  for (int attempt = 1; attempt <= cfg.retry.max_attempts; ++attempt) {
    if (attempt > 1 && sleep) sleep(cfg.retry.delay(attempt - 1));
    const auto reply = transport.post_json("/chat/completions", body, headers);
    if (reply.status == 200) {
      auto c = parse_chat_reply(reply.body);
      c.attempts = attempt;
      return c;
    }
    last_error = reply.status == 0 ? "transport error: " + reply.error
                                   : fmt::format("HTTP {}", reply.status);
    const bool retryable = reply.status == 0 || reply.status == 429 || reply.status >= 500;
    if (!retryable) {
      throw EndpointError(fmt::format("{} after {} attempt(s)", last_error, attempt));
    }
  }
  throw EndpointError(
      fmt::format("{} after {} attempt(s)", last_error, cfg.retry.max_attempts));
}

std::string utc_timestamp() {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", now);
}

std::filesystem::path failures_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".failures.json";
  return p;
}

std::vector<ResponseKey> existing_keys(const std::filesystem::path& output) {
  std::vector<ResponseKey> keys;
  if (!std::filesystem::exists(output)) return keys;
  auto content = csv::read_text(output);
  const auto last_newline = content.rfind('\n');
  const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (complete < content.size()) {
    std::filesystem::resize_file(output, complete);
    content.resize(complete);
  }
  std::size_t line_no = 0;
  for (const auto& line : text::split(content, '\n')) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto r = raw_response_from_json_line(line);
      keys.push_back({r.profile_id, r.model_id, r.variant, r.run_index});
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", output.string(), line_no, e.what()));
    }
  }
  return keys;
}

ExperimentResult run_experiment(const std::vector<PromptInstance>& prompts,
                                const ModelEndpointConfig& cfg, ChatTransport& transport,
                                const ExperimentOptions& options) {
  if (prompts.empty()) throw UsageError("no prompts to run");
  cfg.validate();
  const auto api_key = cfg.api_key();
  const Sleeper sleep = options.sleep ? options.sleep : real_sleeper();
  const auto now = options.now ? options.now : std::function<std::string()>(utc_timestamp);
  const auto log = [&](std::string_view msg) {
    if (options.log) options.log(msg);
  };

  ExperimentResult result;
  result.failures_path = failures_path_for(options.output);
  const auto done = existing_keys(options.output);
  std::set<ResponseKey> seen(done.begin(), done.end());

  struct Task {
    const PromptInstance* prompt;
    ResponseKey key;
  };
  std::vector<Task> tasks;
  for (const auto& p : prompts) {
    for (int run = 1; run <= cfg.repeats; ++run) {
      ++result.planned;
      ResponseKey key{p.profile_id, cfg.model_id, p.variant, run};
      if (!seen.insert(key).second) {
        ++result.skipped;
        continue;
      }
      tasks.push_back({&p, std::move(key)});
    }
  }
  log(fmt::format("{} planned, {} already done, {} to run", result.planned, result.skipped,
                  tasks.size()));

  auto out = csv::open_output(options.output, std::ios::app);

  struct Outcome {
    std::optional<RawResponse> response;
    FailedRequest failure;
  };
  std::vector<std::optional<Outcome>> slots(tasks.size());
  std::mutex mu;
  std::size_t write_pos = 0;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> peak{0};
  std::atomic<std::size_t> issued{0};
  std::string write_error;

  const auto worker = [&] {
    while (true) {
      if (options.cancel != nullptr && options.cancel->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& task = tasks[i];
      const auto current = in_flight.fetch_add(1) + 1;
      auto prev = peak.load();
      while (prev < current && !peak.compare_exchange_weak(prev, current)) {
      }
      ++issued;
      Outcome outcome;
      try {
        auto c = complete(task.prompt->text, cfg, transport, api_key, sleep);
        RawResponse r;
        r.profile_id = task.key.profile_id;
        r.model_id = task.key.model_id;
        r.variant = task.key.variant;
        r.run_index = task.key.run_index;
        r.prompt_text = task.prompt->text;
        r.response_text = std::move(c.text);
        r.decode = cfg.decode;
        r.timestamp = now();
        r.attempts = c.attempts;
        r.usage = std::move(c.usage);
        outcome.response = std::move(r);
      } catch (const Error& e) {
        outcome.failure = {task.key, cfg.retry.max_attempts, e.what()};
      }
      in_flight.fetch_sub(1);

      std::lock_guard lock(mu);
      slots[i] = std::move(outcome);
      // Flush the contiguous finished prefix so output order is fixed.
      while (write_pos < slots.size() && slots[write_pos]) {
        auto& o = *slots[write_pos];
        if (o.response) {
          out << to_json_line(*o.response) << '\n';
          out.flush();
          if (!out && write_error.empty()) write_error = options.output.string();
          if (o.response->attempts > 1) {
            log(fmt::format("{} succeeded after {} attempts",
                            tasks[write_pos].key.to_string(), o.response->attempts));
          }
          ++result.succeeded;
          o.response.reset();
        } else {
          log(fmt::format("{} failed: {}", o.failure.key.to_string(), o.failure.error));
          result.failures.push_back(std::move(o.failure));
        }
        ++write_pos;
      }
    }
  };

  {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(cfg.max_parallel),
                                         tasks.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (!write_error.empty()) throw DataError("write failed: " + write_error);

  // Tasks never started because of cancellation.
  for (std::size_t i = write_pos; i < tasks.size(); ++i) {
    result.failures.push_back({tasks[i].key, 0, "cancelled"});
  }
  result.attempted = issued.load();
  result.peak_in_flight = peak.load();

  if (result.failures.empty()) {
    std::error_code ec;
    std::filesystem::remove(result.failures_path, ec);
  } else {
    json list = json::array();
    for (const auto& f : result.failures) {
      list.push_back(json{{"profile_id", f.key.profile_id},
                          {"model_id", f.key.model_id},
                          {"variant", to_string(f.key.variant)},
                          {"run_index", f.key.run_index},
                          {"attempts", f.attempts},
                          {"error", f.error}});
    }
    auto fout = csv::open_output(result.failures_path);
    fout << list.dump(2) << '\n';
  }
  return result;
}

}  // namespace unifair
