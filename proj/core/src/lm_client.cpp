#include "parley/lm_client.hpp"

#include <httplib.h>
#include <yaml-cpp/yaml.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "parley/error.hpp"

namespace parley {

using nlohmann::json;

std::string to_string(RoleScheme scheme) {
  return scheme == RoleScheme::kTwoRoleTranscript ? "transcript" : "dialogue";
}

RoleScheme role_scheme_from_string(const std::string& text) {
  if (text == "transcript" || text == "two_role_transcript") {
    return RoleScheme::kTwoRoleTranscript;
  }
  if (text == "dialogue" || text == "three_role_dialogue") {
    return RoleScheme::kThreeRoleDialogue;
  }
  throw ConfigError("unknown role scheme: '" + text + "'");
}

void LmBackendConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("lm backend: endpoint required");
  if (endpoint.find("://") == std::string::npos) {
    throw ConfigError("lm backend: endpoint must be a full URL");
  }
  if (model_id.empty()) throw ConfigError("lm backend: model_id required");
  if (temperature < 0.0) throw ConfigError("lm backend: temperature must be >= 0");
  if (max_tokens < 1) throw ConfigError("lm backend: max_tokens must be positive");
  if (retry.attempts < 1) throw ConfigError("lm backend: retry attempts must be >= 1");
  if (max_in_flight < 1) throw ConfigError("lm backend: max_in_flight must be >= 1");
  if (role_scheme == RoleScheme::kThreeRoleDialogue && !provider_has_system_role) {
    throw ConfigError(
        "lm backend: the dialogue scheme needs a provider with a system-style "
        "third role");
  }
}

LmBackendConfig lm_config_from_file(const std::filesystem::path& path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("lm config '" + path.string() + "': " + e.what());
  }
  LmBackendConfig config;
  try {
    config.endpoint = node["endpoint"].as<std::string>("");
    config.model_id = node["model_id"].as<std::string>("");
    config.temperature = node["temperature"].as<double>(config.temperature);
    config.max_tokens = node["max_tokens"].as<int>(config.max_tokens);
    if (node["role_scheme"]) {
      config.role_scheme = role_scheme_from_string(node["role_scheme"].as<std::string>());
    }
    config.provider_has_system_role =
        node["provider_has_system_role"].as<bool>(config.provider_has_system_role);
    config.api_key_env = node["api_key_env"].as<std::string>(config.api_key_env);
    config.retry.attempts = node["attempts"].as<int>(config.retry.attempts);
    config.retry.initial_backoff_ms =
        node["initial_backoff_ms"].as<int>(config.retry.initial_backoff_ms);
    config.retry.backoff_multiplier =
        node["backoff_multiplier"].as<double>(config.retry.backoff_multiplier);
    config.max_in_flight = node["max_in_flight"].as<int>(config.max_in_flight);
    config.log_file = node["log_file"].as<std::string>(config.log_file);
  } catch (const YAML::Exception& e) {
    throw ConfigError("lm config '" + path.string() + "': " + e.what());
  }
  config.validate();
  return config;
}

namespace {

// Runtime-bounded counting semaphore (std::counting_semaphore fixes the bound
// at compile time).
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit) : available_(limit) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedEndpoint split_endpoint(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  const std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

struct LmClient::Impl {
  explicit Impl(const LmBackendConfig& config)
      : endpoint(split_endpoint(config.endpoint)),
        client(endpoint.base),
        limiter(config.max_in_flight) {
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    if (const char* key = std::getenv(config.api_key_env.c_str());
        key != nullptr && *key != '\0') {
      client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
    }
  }

  ParsedEndpoint endpoint;
  httplib::Client client;
  InFlightLimiter limiter;
  std::function<void(const std::string&)> logger;
  std::mutex logger_mutex;

  void log(const std::string& line) {
    std::lock_guard lock(logger_mutex);
    if (logger) logger(line);
  }
};

LmClient::LmClient(LmBackendConfig config) : config_(std::move(config)) {
  config_.validate();
  impl_ = std::make_unique<Impl>(config_);
  if (!config_.log_file.empty()) {
    auto sink = std::make_shared<std::ofstream>(config_.log_file, std::ios::app);
    if (!*sink) throw ConfigError("cannot open lm log file '" + config_.log_file + "'");
    impl_->logger = [sink](const std::string& line) { *sink << line << '\n'; };
  }
}

LmClient::~LmClient() = default;

void LmClient::set_logger(std::function<void(const std::string&)> logger) {
  std::lock_guard lock(impl_->logger_mutex);
  impl_->logger = std::move(logger);
}

std::string LmClient::complete(const std::vector<ChatMessage>& messages) {
  json body;
  body["model"] = config_.model_id;
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_tokens;
  body["messages"] = json::array();
  for (const ChatMessage& message : messages) {
    body["messages"].push_back({{"role", message.role}, {"content", message.content}});
  }
  const std::string payload = body.dump();

  impl_->limiter.acquire();
  struct Release {
    InFlightLimiter& limiter;
    ~Release() { limiter.release(); }
  } release{impl_->limiter};

  std::string last_error;
  int backoff_ms = config_.retry.initial_backoff_ms;
  for (int attempt = 1; attempt <= config_.retry.attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = static_cast<int>(backoff_ms * config_.retry.backoff_multiplier);
    }
    impl_->log("request " + impl_->endpoint.path + " " + payload);
    httplib::Result result =
        impl_->client.Post(impl_->endpoint.path, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      impl_->log(last_error);
      continue;
    }
    impl_->log("response " + std::to_string(result->status) + " " + result->body);
    if (result->status == 200) {
      json parsed = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_discarded() || !parsed.contains("choices") ||
          !parsed["choices"].is_array() || parsed["choices"].empty()) {
        throw BackendError("malformed completion response");
      }
      const json& choice = parsed["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        return choice["message"]["content"].get<std::string>();
      }
      if (choice.contains("text") && choice["text"].is_string()) {
        return choice["text"].get<std::string>();
      }
      throw BackendError("completion response carries no content");
    }
    last_error = "http status " + std::to_string(result->status);
    if (!retryable(result->status)) {
      throw BackendError(last_error + ": " + result->body);
    }
  }
  throw BackendError("request failed after " + std::to_string(config_.retry.attempts) +
                     " attempts; last error: " + last_error);
}

}  // namespace parley
