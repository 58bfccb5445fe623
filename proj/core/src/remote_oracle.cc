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

#include <httplib.h>

#include <cstdlib>

#include "geosearch/digest.h"
#include "geosearch/error.h"
#include "geosearch/prompts.h"

namespace geosearch {

namespace {

RemoteOracle::Attachment attach(const Raster& img) {
  return {"image/png", base64_encode(encode_png(img))};
}

std::string box_text(const PixelRect& r) {
  return std::to_string(r.x1) + ", " + std::to_string(r.y1) + ", " +
         std::to_string(r.x2) + ", " + std::to_string(r.y2);
}

std::string relations_text(const GeoContext& ctx) {
  return nlohmann::json(ctx.relations).dump();
}

// Model text -> JSON object. Tolerates surrounding whitespace and a code
// fence, nothing else.
std::optional<nlohmann::json> parse_object(std::string text) {
  auto strip = [](std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  strip(text);
  if (text.rfind("```", 0) == 0) {
    const auto nl = text.find('\n');
    const auto close = text.rfind("```");
    if (nl != std::string::npos && close != std::string::npos && close > nl) {
      text = text.substr(nl + 1, close - nl - 1);
      strip(text);
    }
  }
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

// Pulls the assistant text out of the HTTP body.
std::string reply_text(const std::string& body) {
  const nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return body;
  if (j.contains("content") && j["content"].is_string()) {
    return j["content"].get<std::string>();
  }
  if (j.contains("message") && j["message"].is_object() &&
      j["message"].contains("content") && j["message"]["content"].is_string()) {
    return j["message"]["content"].get<std::string>();
  }
  if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const auto& c = j["choices"][0];
    if (c.contains("message") && c["message"].contains("content") &&
        c["message"]["content"].is_string()) {
      return c["message"]["content"].get<std::string>();
    }
  }
  return body;
}

PixelRect checked_box(const PixelRect& box, const ImageExtent& bounds) {
  const PixelRect c = intersect(box, bounds.rect());
  if (!box.valid() || !c.valid()) {
    throw Error(ErrorKind::kMalformedResponse,
                "box " + to_string(box) + " is empty or outside the image");
  }
  return c;
}

}  // namespace

void to_json(nlohmann::json& j, const RemoteOracleConfig& c) {
  j = nlohmann::json{{"endpoint", c.endpoint},
                     {"model", c.model},
                     {"timeout_seconds", c.timeout_seconds},
                     {"max_retries", c.max_retries},
                     {"max_side", c.max_side},
                     {"token_env", c.token_env}};
}

void from_json(const nlohmann::json& j, RemoteOracleConfig& c) {
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.max_side = j.value("max_side", c.max_side);
  c.token_env = j.value("token_env", c.token_env);
}

RemoteOracle::RemoteOracle(RemoteOracleConfig config) : config_(std::move(config)) {
  const auto scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorKind::kConfig,
                "remote endpoint must be an http(s) URL: '" + config_.endpoint + "'");
  }
  const auto slash = config_.endpoint.find('/', scheme + 3);
  base_url_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
  if (config_.max_retries < 0 || config_.timeout_seconds <= 0.0) {
    throw Error(ErrorKind::kConfig, "remote retries/timeout out of range");
  }
}

std::string RemoteOracle::post(const nlohmann::json& body) {
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str());
      token != nullptr && *token != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const std::string payload = body.dump();
  const auto timeout_us =
      static_cast<std::int64_t>(config_.timeout_seconds * 1e6);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(std::chrono::microseconds(timeout_us));
    cli.set_read_timeout(std::chrono::microseconds(timeout_us));
    cli.set_write_timeout(std::chrono::microseconds(timeout_us));
    auto res = cli.Post(path_, headers, payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) return res->body;
    last_error = res ? "HTTP " + std::to_string(res->status)
                     : httplib::to_string(res.error());
  }
  throw Error(ErrorKind::kOracleUnavailable,
              config_.endpoint + " after " + std::to_string(config_.max_retries + 1) +
                  " attempts: " + last_error);
}

template <typename T>
T RemoteOracle::ask(const std::string& prompt, const std::vector<Attachment>& images,
                    const std::function<T(const nlohmann::json&)>& decode) {
  nlohmann::json image_list = nlohmann::json::array();
  for (const auto& img : images) {
    image_list.push_back({{"media_type", img.media_type}, {"data", img.data}});
  }
  nlohmann::json messages = nlohmann::json::array();
  messages.push_back({{"role", "user"}, {"content", prompt}});

  std::string failure;
  for (int round = 0; round < 2; ++round) {
    const nlohmann::json body{
        {"model", config_.model}, {"messages", messages}, {"images", image_list}};
    const std::string text = reply_text(post(body));
    if (auto obj = parse_object(text)) {
      try {
        return decode(*obj);
      } catch (const Error& e) {
        failure = e.what();
      } catch (const nlohmann::json::exception& e) {
        failure = e.what();
      }
    } else {
      failure = "reply is not a JSON object: " + text.substr(0, 200);
    }
    messages.push_back({{"role", "assistant"}, {"content", text}});
    messages.push_back({{"role", "user"}, {"content", std::string(prompts::get("reformat"))}});
  }
  throw Error(ErrorKind::kMalformedResponse, failure);
}

GeoContext RemoteOracle::parse(const RawQuery& query) {
  const std::string prompt = prompts::render("parse", {{"query", query.text()}});
  return ask<GeoContext>(prompt, {}, [](const nlohmann::json& j) {
    GeoContext ctx = j.get<GeoContext>();
    ctx.validate();
    return ctx;
  });
}

QAVerdict RemoteOracle::qa_verify(const RegionView& view, const GeoContext& ctx) {
  const OracleImage global = resize_for_oracle(view.image, config_.max_side);
  const OracleImage region = resize_for_oracle(crop(view.image, view.region), config_.max_side);
  const std::string prompt = prompts::render(
      "qa_verify", {{"global_width", std::to_string(global.image.width())},
                    {"global_height", std::to_string(global.image.height())},
                    {"region", box_text(global.to_oracle(view.region))},
                    {"object", ctx.object},
                    {"position", ctx.position.value_or("null")},
                    {"relations", relations_text(ctx)}});
  return ask<QAVerdict>(prompt, {attach(global.image), attach(region.image)},
                        [&ctx](const nlohmann::json& j) {
                          QAVerdict v = j.get<QAVerdict>();
                          check_verdict_shape(v, ctx);
                          return v;
                        });
}

std::optional<PixelRect> RemoteOracle::predict_box(const RegionView& view,
                                                   const std::string& object) {
  const OracleImage region = resize_for_oracle(crop(view.image, view.region), config_.max_side);
  const std::string prompt = prompts::render(
      "predict_box", {{"width", std::to_string(region.image.width())},
                      {"height", std::to_string(region.image.height())},
                      {"object", object}});
  const ImageExtent local{view.region.width(), view.region.height()};
  return ask<std::optional<PixelRect>>(
      prompt, {attach(region.image)},
      [&](const nlohmann::json& j) -> std::optional<PixelRect> {
        auto box = ResponseCodec<std::optional<PixelRect>>::decode(j);
        if (!box) return std::nullopt;
        return checked_box(region.to_source(*box), local);
      });
}

GridCell RemoteOracle::choose_cell(const RegionView& view, const GeoContext& ctx) {
  const OracleImage region = resize_for_oracle(crop(view.image, view.region), config_.max_side);
  const std::string prompt = prompts::render(
      "choose_cell", {{"width", std::to_string(region.image.width())},
                      {"height", std::to_string(region.image.height())},
                      {"object", ctx.object},
                      {"position", ctx.position.value_or("none")},
                      {"relations", relations_text(ctx)}});
  return ask<GridCell>(prompt, {attach(region.image)}, [](const nlohmann::json& j) {
    return ResponseCodec<GridCell>::decode(j);
  });
}

PixelRect RemoteOracle::conditional_ground(const RegionView& cue, const RawQuery& query) {
  const OracleImage global = resize_for_oracle(cue.image, config_.max_side);
  const OracleImage local = resize_for_oracle(crop(cue.image, cue.region), config_.max_side);
  const std::string prompt = prompts::render(
      "conditional_ground", {{"width", std::to_string(global.image.width())},
                             {"height", std::to_string(global.image.height())},
                             {"cue", box_text(global.to_oracle(cue.region))},
                             {"query", query.text()}});
  const ImageExtent extent = cue.image.extent();
  return ask<PixelRect>(prompt, {attach(global.image), attach(local.image)},
                        [&](const nlohmann::json& j) {
                          const PixelRect box = ResponseCodec<PixelRect>::decode(j);
                          return checked_box(global.to_source(box), extent);
                        });
}

}  // namespace geosearch
