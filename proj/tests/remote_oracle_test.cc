/* Copyright 2026 The geosearch Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "geosearch/remote_oracle.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include "geosearch/error.h"
#include "support/test_support.h"

namespace geosearch {
namespace {

// Canned-reply HTTP server on a free local port.
class MockModel {
 public:
  struct Reply {
    int status = 200;
    std::string body;
  };

  MockModel() {
    server_.Post("/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      requests_.push_back(req);
      Reply r = replies_.empty() ? Reply{500, "no reply queued"} : replies_.front();
      if (!replies_.empty()) replies_.pop_front();
      res.status = r.status;
      res.set_content(r.body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockModel() {
    server_.stop();
    thread_.join();
  }

  void queue(int status, std::string body) {
    std::lock_guard lock(mu_);
    replies_.push_back({status, std::move(body)});
  }
  void queue_content(const std::string& text) {
    queue(200, nlohmann::json{{"choices", {{{"message", {{"content", text}}}}}}}.dump());
  }
  std::vector<httplib::Request> requests() {
    std::lock_guard lock(mu_);
    return requests_;
  }
  RemoteOracleConfig config() const {
    RemoteOracleConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat";
    c.model = "mock-vlm";
    c.timeout_seconds = 5.0;
    c.max_retries = 0;
    c.token_env = "GEOSEARCH_TEST_TOKEN";
    return c;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::deque<Reply> replies_;
  std::vector<httplib::Request> requests_;
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(RemoteOracleTest, RequestShapeAndBearerToken) {
  MockModel model;
  ::setenv("GEOSEARCH_TEST_TOKEN", "sekrit", 1);
  model.queue(200, R"({"content": "{\"object\": \"ship\", \"position\": null, \"relations\": [\"near the pier\"]}"})");
  RemoteOracle oracle(model.config());
  const GeoContext ctx = oracle.parse(RawQuery("ship near the pier"));
  ::unsetenv("GEOSEARCH_TEST_TOKEN");
  EXPECT_EQ(ctx.object, "ship");
  EXPECT_EQ(ctx.relations, std::vector<std::string>{"near the pier"});

  const auto reqs = model.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].get_header_value("Authorization"), "Bearer sekrit");
  const auto body = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(body.at("model"), "mock-vlm");
  EXPECT_EQ(body.at("messages").at(0).at("role"), "user");
  EXPECT_NE(body.at("messages").at(0).at("content").get<std::string>().find("ship near the pier"),
            std::string::npos);
  EXPECT_TRUE(body.at("images").is_array());
}

TEST(RemoteOracleTest, NoTokenNoHeader) {
  MockModel model;
  ::unsetenv("GEOSEARCH_TEST_TOKEN");
  model.queue_content(R"({"cell": 4})");
  RemoteOracle oracle(model.config());
  const Raster img = testing::blank_raster({90, 90}, "r");
  EXPECT_EQ(oracle.choose_cell({img, {0, 0, 90, 90}}, {"ship", std::nullopt, {}}).index(), 4);
  EXPECT_FALSE(model.requests()[0].has_header("Authorization"));
  const auto body = nlohmann::json::parse(model.requests()[0].body);
  ASSERT_EQ(body.at("images").size(), 1u);
  EXPECT_EQ(body["images"][0].at("media_type"), "image/png");
}

TEST(RemoteOracleTest, ReformatRetryThenSuccess) {
  MockModel model;
  model.queue_content("Sure! The cell is five.");
  model.queue_content("```json\n{\"cell\": 5}\n```");
  RemoteOracle oracle(model.config());
  const Raster img = testing::blank_raster({90, 90}, "r");
  EXPECT_EQ(oracle.choose_cell({img, {0, 0, 90, 90}}, {"ship", std::nullopt, {}}).index(), 5);
  const auto reqs = model.requests();
  ASSERT_EQ(reqs.size(), 2u);
  const auto second = nlohmann::json::parse(reqs[1].body).at("messages");
  ASSERT_EQ(second.size(), 3u);
  EXPECT_EQ(second[1].at("role"), "assistant");
  EXPECT_EQ(second[1].at("content"), "Sure! The cell is five.");
}

TEST(RemoteOracleTest, MalformedAfterOneRetry) {
  MockModel model;
  model.queue_content("no idea");
  model.queue_content(R"({"cell": 12})");
  RemoteOracle oracle(model.config());
  const Raster img = testing::blank_raster({90, 90}, "r");
  EXPECT_EQ(kind_of([&] { oracle.choose_cell({img, {0, 0, 90, 90}}, {"ship", std::nullopt, {}}); }),
            ErrorKind::kMalformedResponse);
  EXPECT_EQ(model.requests().size(), 2u);
}

TEST(RemoteOracleTest, VerdictShapeChecked) {
  MockModel model;
  model.queue_content(R"({"object_present": true, "position_match": null, "relation_match": []})");
  model.queue_content(R"({"object_present": true, "position_match": null, "relation_match": [false]})");
  RemoteOracle oracle(model.config());
  const Raster img = testing::blank_raster({90, 90}, "r");
  const QAVerdict v =
      oracle.qa_verify({img, {0, 0, 45, 45}}, {"ship", std::nullopt, {"near the pier"}});
  EXPECT_EQ(v.relation_match, std::vector<bool>{false});
}

TEST(RemoteOracleTest, ServerErrorsRetried) {
  MockModel model;
  model.queue(503, "busy");
  model.queue_content(R"({"cell": 2})");
  RemoteOracleConfig cfg = model.config();
  cfg.max_retries = 1;
  RemoteOracle oracle(cfg);
  const Raster img = testing::blank_raster({90, 90}, "r");
  EXPECT_EQ(oracle.choose_cell({img, {0, 0, 90, 90}}, {"ship", std::nullopt, {}}).index(), 2);
}

TEST(RemoteOracleTest, UnavailableEndpoint) {
  RemoteOracleConfig cfg;
  {
    MockModel model;
    cfg = model.config();
  }  // server gone, port closed
  cfg.timeout_seconds = 1.0;
  cfg.max_retries = 1;
  RemoteOracle oracle(cfg);
  EXPECT_EQ(kind_of([&] { oracle.parse(RawQuery("ship")); }), ErrorKind::kOracleUnavailable);
}

TEST(RemoteOracleTest, BadEndpointIsConfigError) {
  RemoteOracleConfig cfg;
  cfg.endpoint = "localhost:8080";
  EXPECT_EQ(kind_of([&] { RemoteOracle o(cfg); }), ErrorKind::kConfig);
}

TEST(RemoteOracleTest, BoxesMapBackFromResizedSpace) {
  MockModel model;
  model.queue_content(R"({"box": [100, 50, 200, 150]})");
  model.queue_content(R"({"box": [10, 20, 30, 40]})");
  RemoteOracleConfig cfg = model.config();
  cfg.max_side = 512;
  RemoteOracle oracle(cfg);
  const Raster img = testing::blank_raster({1024, 1024}, "big");

  const PixelRect g = oracle.conditional_ground({img, {0, 0, 1024, 1024}}, RawQuery("the ship"));
  EXPECT_EQ(g, (PixelRect{200, 100, 400, 300}));
  const auto body = nlohmann::json::parse(model.requests()[0].body);
  EXPECT_EQ(body.at("images").size(), 2u);

  // Region crop 1024x1024 also downscaled by 2; box is region-local.
  const auto local = oracle.predict_box({img, {0, 0, 1024, 1024}}, "ship");
  EXPECT_EQ(local, (PixelRect{20, 40, 60, 80}));
}

TEST(RemoteOracleTest, NullBoxIsAbsence) {
  MockModel model;
  model.queue(200, R"({"message": {"content": "{\"box\": null}"}})");
  RemoteOracle oracle(model.config());
  const Raster img = testing::blank_raster({90, 90}, "r");
  EXPECT_EQ(oracle.predict_box({img, {0, 0, 90, 90}}, "ship"), std::nullopt);
}

}  // namespace
}  // namespace geosearch
