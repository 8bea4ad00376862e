#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace parley {

struct ChatMessage {
  std::string role;
  std::string content;
};

// How negotiation context maps onto provider roles. The transcript scheme
// needs only an orchestration role plus the completion role; the dialogue
// scheme additionally needs a system-style role for instructions.
enum class RoleScheme { kTwoRoleTranscript, kThreeRoleDialogue };

std::string to_string(RoleScheme scheme);
RoleScheme role_scheme_from_string(const std::string& text);

struct RetryPolicy {
  int attempts = 3;
  int initial_backoff_ms = 250;
  double backoff_multiplier = 2.0;
};

struct LmBackendConfig {
  std::string endpoint;  // e.g. https://host/v1/chat/completions
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 256;
  RoleScheme role_scheme = RoleScheme::kTwoRoleTranscript;
  bool provider_has_system_role = true;
  RetryPolicy retry;
  std::string api_key_env = "PARLEY_API_KEY";  // credential comes from the environment
  int max_in_flight = 4;
  std::string log_file;  // request/response bodies appended here when set

  void validate() const;  // throws ConfigError
};

LmBackendConfig lm_config_from_file(const std::filesystem::path& path);

// Chat-completion HTTP client: ordered {role, content} messages in, completion
// text out. Transport errors, 429s, and 5xx responses are retried with
// exponential backoff; other failures surface as BackendError. Safe for
// concurrent use; in-flight requests are capped at max_in_flight.
class LmClient {
 public:
  explicit LmClient(LmBackendConfig config);
  ~LmClient();

  LmClient(const LmClient&) = delete;
  LmClient& operator=(const LmClient&) = delete;

  std::string complete(const std::vector<ChatMessage>& messages);
  const LmBackendConfig& config() const { return config_; }

  // Receives request/response bodies (credentials are never part of them).
  void set_logger(std::function<void(const std::string&)> logger);

 private:
  struct Impl;
  LmBackendConfig config_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace parley
