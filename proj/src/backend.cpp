#include "statusarena/backend.hpp"

#include <array>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

constexpr std::array<std::string_view, 3> kSignalNames{"StatusSignal", "Neutral", "NoAction"};
constexpr std::array<std::string_view, 12> kPurposeNames{
    "situation", "identity",  "action",              "choice",       "market",           "utterance",
    "reflection", "daily_life", "scenario_generation", "topic_rating", "topic_clustering", "persona_generation"};

}  // namespace

std::string_view to_string(SignalClass c) { return kSignalNames[static_cast<int>(c)]; }

SignalClass parse_signal_class(std::string_view s) {
  for (std::size_t i = 0; i < kSignalNames.size(); ++i) {
    if (kSignalNames[i] == s) return static_cast<SignalClass>(i);
  }
  throw ConfigError("unknown signal class '" + std::string(s) + "'");
}

std::string_view to_string(RequestPurpose p) { return kPurposeNames[static_cast<int>(p)]; }

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend url needs a scheme: " + options_.url);
  const auto path_start = options_.url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
  if (options_.retries < 0) throw ConfigError("backend retries must be >= 0");
}

HttpBackendOptions HttpBackend::options_from_environment() {
  HttpBackendOptions o;
  const char* url = std::getenv("STATUSARENA_BACKEND_URL");
  if (!url || !*url) throw ConfigError("live backend needs STATUSARENA_BACKEND_URL");
  o.url = url;
  if (const char* key = std::getenv("STATUSARENA_BACKEND_KEY")) o.api_key = key;
  return o;
}

BackendResponse HttpBackend::complete(const BackendRequest& request) {
  nlohmann::json body{{"prompt", request.prompt},
                      {"max_length", request.max_length},
                      {"seed", request.seed},
                      {"purpose", std::string(to_string(request.purpose))}};
  if (request.choice_set) body["choice_set"] = *request.choice_set;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout).count();
    client.set_connection_timeout(static_cast<time_t>(std::max<long long>(1, secs)));
    client.set_read_timeout(static_cast<time_t>(std::max<long long>(1, secs)));
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return BackendResponse{j.at("text").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
    }
  }
  throw BackendError("backend " + options_.url + " failed after " + std::to_string(options_.retries + 1) +
                     " attempts: " + last_error);
}

}  // namespace statusarena
