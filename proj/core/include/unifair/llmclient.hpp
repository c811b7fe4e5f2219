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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unifair/ingest.hpp"
#include "unifair/profiles.hpp"

namespace unifair {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  // Delay before retry number `attempt` (1 = first retry).
  std::chrono::milliseconds delay(int attempt) const;
};

struct ModelEndpointConfig {
  std::string name;      // config section label
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string model_id;
  std::string api_key_env;  // name of the environment variable holding the key
  DecodeParams decode;
  int repeats = 10;
  int max_parallel = 4;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};

  // Throws UsageError on out-of-range values.
  void validate() const;
  // Reads the key from the environment. Empty when api_key_env is empty;
  // throws EndpointError when the variable is named but unset.
  std::string api_key() const;
};

struct HttpReply {
  int status = 0;  // 0 = transport failure
  std::string body;
  std::string error;
};

// One POST of a JSON body. Implementations must allow concurrent calls.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpReply post_json(const std::string& path, const std::string& body,
                              const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib client for http:// (and https:// when built with OpenSSL).
class HttpTransport : public ChatTransport {
 public:
  HttpTransport(std::string base_url, std::chrono::seconds timeout);
  HttpReply post_json(const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override;

  // Path prefix of the base URL, e.g. "/v1".
  const std::string& path_prefix() const { return prefix_; }

 private:
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;
  std::chrono::seconds timeout_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

struct Completion {
  std::string text;
  std::string usage;  // JSON text, empty when absent
  int attempts = 0;
};

// Chat-completions request body for one user message.
std::string chat_request_body(std::string_view prompt_text, const ModelEndpointConfig& cfg);
// Message content of a chat-completions reply. Throws EndpointError.
Completion parse_chat_reply(std::string_view body);

// One completion with retries on 429, 5xx and transport failures. Throws
// EndpointError once attempts are exhausted or on any other status.
Completion complete(std::string_view prompt_text, const ModelEndpointConfig& cfg,
                    ChatTransport& transport, const std::string& api_key,
                    const Sleeper& sleep);

struct FailedRequest {
  ResponseKey key;
  int attempts = 0;
  std::string error;
};

struct ExperimentOptions {
  std::filesystem::path output;  // raw-response JSONL, appended
  Sleeper sleep;                 // defaults to real sleeping
  std::function<std::string()> now;             // UTC timestamp source
  std::function<void(std::string_view)> log;    // progress messages
  const std::atomic<bool>* cancel = nullptr;    // stop scheduling when set
};

struct ExperimentResult {
  std::size_t planned = 0;    // prompts x repeats
  std::size_t skipped = 0;    // already present in the output
  std::size_t attempted = 0;  // requests issued this run
  std::size_t succeeded = 0;
  std::vector<FailedRequest> failures;
  std::size_t peak_in_flight = 0;
  std::filesystem::path failures_path;
};

// Runs every prompt `cfg.repeats` times with at most `cfg.max_parallel`
// requests in flight. Results are appended in (prompt, run) order by a single
// writer; keys already in the output are skipped. Unfinished keys are listed
// in <output>.failures.json. Throws UsageError when `prompts` is empty.
ExperimentResult run_experiment(const std::vector<PromptInstance>& prompts,
                                const ModelEndpointConfig& cfg, ChatTransport& transport,
                                const ExperimentOptions& options);

std::filesystem::path failures_path_for(const std::filesystem::path& output);

// Keys already present in a raw-response file. A trailing partial line left by
// an interrupted run is cut off so appends start on a clean line.
std::vector<ResponseKey> existing_keys(const std::filesystem::path& output);

std::string utc_timestamp();

}  // namespace unifair
