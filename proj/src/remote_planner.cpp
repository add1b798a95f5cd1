#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "homeplan/planner.hpp"

namespace homeplan {

using nlohmann::json;

RemoteConfig RemoteConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlannerError(PlannerError::Kind::BackendUnavailable, "cannot open remote config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": malformed JSON: " + e.what());
  }
  RemoteConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "endpoint") cfg.endpoint = value.get<std::string>();
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "temperature") cfg.temperature = value.get<double>();
      else if (key == "max_tokens") cfg.max_tokens = value.get<std::size_t>();
      else if (key == "timeout_ms") cfg.timeout = std::chrono::milliseconds(value.get<long>());
      else if (key == "api_key_env") cfg.api_key_env = value.get<std::string>();
      else throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": unknown key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": " + e.what());
  }
  return cfg;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, "endpoint '" + url + "' has no scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemotePlanner::RemotePlanner(RemoteConfig config) : config_(std::move(config)) { split_endpoint(config_.endpoint); }

PlannerResponse RemotePlanner::generate(const PlannerRequest& request) const {
  const Endpoint ep = split_endpoint(config_.endpoint);

  json body = {
      {"model", config_.model},
      {"messages",
       json::array({{{"role", "system"}, {"content", request.system_prompt}},
                    {{"role", "user"}, {"content", request.instruction}}})},
      {"temperature", request.decode.temperature},
      {"max_tokens", request.decode.max_tokens},
  };
  if (request.decode.seed) body["seed"] = *request.decode.seed;

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::unique_ptr<httplib::Client> client;
  try {
    client = std::make_unique<httplib::Client>(ep.origin);
  } catch (const std::exception& e) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, "bad endpoint '" + config_.endpoint + "': " + e.what());
  }
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client->set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
  client->set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
  client->set_write_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));

  const auto start = std::chrono::steady_clock::now();
  auto res = client->Post(ep.path, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && std::chrono::steady_clock::now() - start >= config_.timeout);
    throw PlannerError(timed_out ? PlannerError::Kind::Timeout : PlannerError::Kind::BackendUnavailable,
                       config_.endpoint + ": " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable,
                       config_.endpoint + ": HTTP " + std::to_string(res->status));
  }

  PlannerResponse out;
  try {
    json doc = json::parse(res->body);
    out.plan_text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage") && doc["usage"].contains("completion_tokens")) {
      out.token_estimate = doc["usage"]["completion_tokens"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable,
                       config_.endpoint + ": malformed chat-completions response: " + e.what());
  }
  return out;
}

}  // namespace homeplan
