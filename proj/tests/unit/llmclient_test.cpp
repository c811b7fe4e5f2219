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

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include "json.hpp"

#include "unifair/errors.hpp"
#include "unifair/tagger.hpp"
#include "test_support.hpp"

namespace unifair {
namespace {

using nlohmann::json;
using namespace std::chrono_literals;

std::string reply_body(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}},
              {"usage", {{"total_tokens", 7}}}}
      .dump();
}

// Replies from a script, then a fixed canned answer. Thread safe.
class FakeTransport : public ChatTransport {
 public:
  explicit FakeTransport(std::vector<int> script = {}) : script_(std::move(script)) {}

  HttpReply post_json(const std::string& path, const std::string& body,
                      const std::map<std::string, std::string>& headers) override {
    const auto current = ++in_flight_;
    {
      std::lock_guard lock(mu_);
      peak_ = std::max(peak_, current);
      paths_.push_back(path);
      bodies_.push_back(body);
      last_headers_ = headers;
    }
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    --in_flight_;
    std::lock_guard lock(mu_);
    int status = 200;
    if (next_ < script_.size()) status = script_[next_++];
    if (status != 200) return {status, "{}", status == 0 ? "refused" : ""};
    return {200, reply_body("1. University of Oxford - History"), ""};
  }

  std::size_t calls() {
    std::lock_guard lock(mu_);
    return bodies_.size();
  }

  std::vector<int> script_;
  std::size_t next_ = 0;
  std::chrono::milliseconds delay_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::size_t peak_ = 0;
  std::vector<std::string> paths_, bodies_;
  std::map<std::string, std::string> last_headers_;
  std::mutex mu_;
};

ModelEndpointConfig test_config() {
  ModelEndpointConfig cfg;
  cfg.name = "test";
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.model_id = "fake-model";
  cfg.repeats = 2;
  cfg.max_parallel = 3;
  cfg.retry.max_attempts = 3;
  return cfg;
}

std::vector<PromptInstance> prompts(std::size_t n) {
  std::vector<PromptInstance> out;
  const auto profiles = enumerate_profiles({});
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(render_prompt(profiles[i], PromptVariant::kBase, TemplateSet::builtin()));
  }
  return out;
}


Sleeper recording_sleeper(std::vector<std::chrono::milliseconds>& into) {
  return [&into](std::chrono::milliseconds d) { into.push_back(d); };
}

TEST(Retry, BackoffDelays) {
  RetryPolicy p;
  EXPECT_EQ(p.delay(1), 500ms);
  EXPECT_EQ(p.delay(2), 1000ms);
  EXPECT_EQ(p.delay(3), 2000ms);
  EXPECT_EQ(p.delay(20), 30000ms);
}

TEST(EndpointConfig, Validation) {
  auto cfg = test_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.decode.top_p = 0.0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = test_config();
  cfg.max_parallel = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = test_config();
  cfg.base_url.clear();
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(EndpointConfig, ApiKeyFromEnvironment) {
  auto cfg = test_config();
  EXPECT_EQ(cfg.api_key(), "");
  cfg.api_key_env = "UNIFAIR_TEST_KEY_THAT_IS_NOT_SET";
  EXPECT_THROW(cfg.api_key(), EndpointError);
  ::setenv("UNIFAIR_TEST_KEY_SET", "sekret", 1);
  cfg.api_key_env = "UNIFAIR_TEST_KEY_SET";
  EXPECT_EQ(cfg.api_key(), "sekret");
}

TEST(Chat, RequestBody) {
  const auto cfg = test_config();
  const auto body = json::parse(chat_request_body("hello", cfg));
  EXPECT_EQ(body.at("model"), "fake-model");
  EXPECT_EQ(body.at("messages").size(), 1u);
  EXPECT_EQ(body.at("messages")[0].at("role"), "user");
  EXPECT_EQ(body.at("messages")[0].at("content"), "hello");
  EXPECT_EQ(body.at("temperature"), 0.75);
  EXPECT_EQ(body.at("top_p"), 0.95);
  EXPECT_EQ(body.at("max_tokens"), 300);
}

TEST(Chat, ParseReply) {
  const auto c = parse_chat_reply(reply_body("hi"));
  EXPECT_EQ(c.text, "hi");
  EXPECT_EQ(json::parse(c.usage).at("total_tokens"), 7);
  EXPECT_THROW(parse_chat_reply("{}"), EndpointError);
  EXPECT_THROW(parse_chat_reply("<html>"), EndpointError);
}

TEST(Chat, RetriesTransientFailures) {
  FakeTransport t({429, 503, 200});
  std::vector<std::chrono::milliseconds> sleeps;
  const auto c = complete("p", test_config(), t, "k", recording_sleeper(sleeps));
  EXPECT_EQ(c.attempts, 3);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{500ms, 1000ms}));
  EXPECT_EQ(t.paths_.front(), "/chat/completions");
  EXPECT_EQ(t.last_headers_.at("Authorization"), "Bearer k");
}

TEST(Chat, GivesUpAfterMaxAttempts) {
  FakeTransport t({0, 500, 502, 200});
  std::vector<std::chrono::milliseconds> sleeps;
  EXPECT_THROW(complete("p", test_config(), t, "", recording_sleeper(sleeps)), EndpointError);
  EXPECT_EQ(t.calls(), 3u);
  EXPECT_TRUE(t.last_headers_.empty());
}

TEST(Chat, ClientErrorsAreNotRetried) {
  FakeTransport t({401});
  std::vector<std::chrono::milliseconds> sleeps;
  EXPECT_THROW(complete("p", test_config(), t, "", recording_sleeper(sleeps)), EndpointError);
  EXPECT_EQ(t.calls(), 1u);
}

class Experiment : public ::testing::Test {
 protected:
  ExperimentOptions options() {
    ExperimentOptions o;
    o.output = dir / "raw.jsonl";
    o.sleep = [](std::chrono::milliseconds) {};
    o.now = [] { return std::string("2026-01-01T00:00:00Z"); };
    return o;
  }
  testing::TempDir dir;
};

TEST_F(Experiment, RunsEveryPromptRepeatAndBoundsConcurrency) {
  FakeTransport t;
  t.delay_ = 5ms;
  const auto ps = prompts(6);
  const auto r = run_experiment(ps, test_config(), t, options());
  EXPECT_EQ(r.planned, 12u);
  EXPECT_EQ(r.attempted, 12u);
  EXPECT_EQ(r.succeeded, 12u);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_LE(r.peak_in_flight, 3u);
  EXPECT_LE(t.peak_, 3u);
  EXPECT_FALSE(std::filesystem::exists(r.failures_path));

  // Output is in task order regardless of completion order.
  const auto keys = existing_keys(dir / "raw.jsonl");
  ASSERT_EQ(keys.size(), 12u);
  EXPECT_EQ(keys[0].profile_id, ps[0].profile_id);
  EXPECT_EQ(keys[0].run_index, 1);
  EXPECT_EQ(keys[1].run_index, 2);
  EXPECT_EQ(keys[11].profile_id, ps[5].profile_id);
}

TEST_F(Experiment, ResumesWithoutDuplicates) {
  const auto ps = prompts(4);
  {
    FakeTransport t;
    run_experiment(std::vector<PromptInstance>(ps.begin(), ps.begin() + 2), test_config(), t,
                   options());
  }
  // A torn final line from an interrupted run is dropped.
  { std::ofstream(dir / "raw.jsonl", std::ios::app) << "{\"profile_id\":\"ma"; }
  FakeTransport t;
  const auto r = run_experiment(ps, test_config(), t, options());
  EXPECT_EQ(r.skipped, 4u);
  EXPECT_EQ(r.attempted, 4u);
  EXPECT_EQ(t.calls(), 4u);
  const auto keys = existing_keys(dir / "raw.jsonl");
  EXPECT_EQ(keys.size(), 8u);
  EXPECT_EQ(std::set<ResponseKey>(keys.begin(), keys.end()).size(), 8u);

  FakeTransport idle;
  const auto again = run_experiment(ps, test_config(), idle, options());
  EXPECT_EQ(again.attempted, 0u);
  EXPECT_EQ(idle.calls(), 0u);
}

TEST_F(Experiment, FailuresAreRecorded) {
  auto cfg = test_config();
  cfg.max_parallel = 1;
  cfg.repeats = 1;
  FakeTransport t({400});
  const auto r = run_experiment(prompts(2), cfg, t, options());
  EXPECT_EQ(r.succeeded, 1u);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_NE(r.failures[0].error.find("HTTP 400"), std::string::npos);
  std::ifstream in(r.failures_path);
  const auto j = json::parse(in);
  ASSERT_EQ(j.size(), 1u);

  // The failed key is retried on the next run and the sidecar goes away.
  FakeTransport ok;
  const auto retry = run_experiment(prompts(2), cfg, ok, options());
  EXPECT_EQ(retry.attempted, 1u);
  EXPECT_FALSE(std::filesystem::exists(r.failures_path));
}

TEST_F(Experiment, CancellationStopsScheduling) {
  std::atomic<bool> cancel{true};
  auto o = options();
  o.cancel = &cancel;
  FakeTransport t;
  const auto r = run_experiment(prompts(3), test_config(), t, o);
  EXPECT_EQ(r.attempted, 0u);
  EXPECT_EQ(r.failures.size(), 6u);
  EXPECT_EQ(r.failures[0].error, "cancelled");
}

TEST(HttpTransport, TalksToLocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("{}", "application/json");
      return;
    }
    const auto body = json::parse(req.body);
    res.set_content(reply_body("echo " + body.at("model").get<std::string>()),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto cfg = test_config();
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.timeout = 5s;
  HttpTransport transport(cfg.base_url, cfg.timeout);
  EXPECT_EQ(transport.path_prefix(), "/v1");
  std::vector<std::chrono::milliseconds> sleeps;
  const auto c = complete("x", cfg, transport, "abc", recording_sleeper(sleeps));
  server.stop();
  th.join();
  EXPECT_EQ(c.text, "echo fake-model");
  EXPECT_EQ(c.attempts, 3);
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(seen_auth, "Bearer abc");
}

TEST(HttpTransport, ConnectionRefusedIsStatusZero) {
  HttpTransport transport("http://127.0.0.1:1", 1s);
  const auto reply = transport.post_json("/x", "{}", {});
  EXPECT_EQ(reply.status, 0);
  EXPECT_FALSE(reply.error.empty());
}

TEST(Tagger, ParseReply) {
  EXPECT_EQ(parse_tag_reply("Tags: NaturalSciences | EngineeringTechnology"),
            (TagSet{SubjectTag::kNaturalSciences, SubjectTag::kEngineeringTechnology}));
  EXPECT_EQ(parse_tag_reply("\n  Arts & Humanities\nextra"),
            TagSet{SubjectTag::kArtsHumanities});
  EXPECT_FALSE(parse_tag_reply("Cooking"));
  EXPECT_FALSE(parse_tag_reply(""));
}

class ScriptedTagger : public ChatTransport {
 public:
  explicit ScriptedTagger(std::string content) : content_(std::move(content)) {}
  HttpReply post_json(const std::string&, const std::string&,
                      const std::map<std::string, std::string>&) override {
    ++calls;
    return {200, reply_body(content_), ""};
  }
  int calls = 0;

 private:
  std::string content_;
};

TEST(Tagger, ExternalClassifierWithFallbackAndCache) {
  auto cfg = test_config();
  OverrideTable overrides;
  const auto noop = [](std::chrono::milliseconds) {};

  ScriptedTagger good("LifeSciencesMedicine");
  const auto a = classify_external("Wine Studies", cfg, good, RuleSet::builtin(), &overrides, noop);
  EXPECT_TRUE(a.from_model);
  EXPECT_EQ(a.tags, TagSet{SubjectTag::kLifeSciencesMedicine});
  const auto cached = classify_external("wine studies", cfg, good, RuleSet::builtin(),
                                        &overrides, noop);
  EXPECT_EQ(good.calls, 1);
  EXPECT_EQ(cached.tags, a.tags);

  ScriptedTagger bad("Underwater Basket Weaving");
  const auto b = classify_external("Physics", cfg, bad, RuleSet::builtin(), &overrides, noop);
  EXPECT_FALSE(b.from_model);
  EXPECT_EQ(b.tags, TagSet{SubjectTag::kNaturalSciences});

  FakeTransport down({0, 0, 0});
  const auto c = classify_external("History", cfg, down, RuleSet::builtin(), nullptr, noop);
  EXPECT_FALSE(c.from_model);
  EXPECT_EQ(c.tags, TagSet{SubjectTag::kArtsHumanities});
}

}  // namespace
}  // namespace unifair
