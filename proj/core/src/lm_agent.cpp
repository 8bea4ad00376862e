#include "parley/lm_agent.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "parley/error.hpp"

namespace parley {

using nlohmann::json;

std::vector<ChatMessage> pack_messages(RoleScheme scheme, const PromptContext& context) {
  if (scheme == RoleScheme::kTwoRoleTranscript) {
    return {{"user", context.to_text()}};
  }

  std::vector<ChatMessage> messages;
  messages.push_back({"system", context.initialization});
  std::ostringstream closing;
  for (const PromptContext::HistoryItem& item : context.history) {
    if (item.kind == EventKind::kMessage) {
      messages.push_back(
          {item.agent == context.agent ? "assistant" : "user", item.text});
    } else if (item.agent == context.agent) {
      closing << "Your private note (round " << item.round << "):\n" << item.text
              << "\n\n";
    }
  }
  if (!context.round_banner.empty()) closing << context.round_banner << "\n\n";
  closing << context.task_prompt;
  messages.push_back({"user", closing.str()});
  return messages;
}

LmAgent::LmAgent(std::shared_ptr<LmClient> client, std::string id)
    : client_(std::move(client)), id_(std::move(id)) {
  if (client_ == nullptr) throw ConfigError("LmAgent needs a client");
  if (id_.empty()) id_ = client_->config().model_id;
}

// The protocol's dialogue format forces the three-role scheme; it needs a
// provider with a system-style role.
RoleScheme LmAgent::effective_scheme(const PromptContext& context) const {
  if (context.format == MemoryConfig::Format::kDialogue) {
    if (!client_->config().provider_has_system_role) {
      throw ConfigError("dialogue format needs a provider with a system-style role");
    }
    return RoleScheme::kThreeRoleDialogue;
  }
  return client_->config().role_scheme;
}

std::string LmAgent::generate_note(const PromptContext& context, const AgentView&) {
  return client_->complete(pack_messages(effective_scheme(context), context));
}

std::string LmAgent::generate_message(const PromptContext& context, const AgentView&) {
  return client_->complete(pack_messages(effective_scheme(context), context));
}

std::string LmAgent::generate_tom_estimate(const PromptContext& context,
                                           const AgentView&) {
  return client_->complete(pack_messages(effective_scheme(context), context));
}

std::map<std::string, std::string> LmFallbackExtractor::extract(
    const std::string& text, const Game& game, int side,
    std::span<const std::string> unresolved_issues) {
  std::ostringstream prompt;
  prompt << "Extract the offer stated for each issue from the text below.\n"
         << "Respond with only a JSON object mapping every issue name to one of "
            "its listed values, or null when the text states no offer for it.\n\n"
         << "Issues:\n";
  for (const std::string& issue_name : unresolved_issues) {
    auto idx = game.issue_index(issue_name);
    if (!idx) continue;
    prompt << "- " << issue_name << ":";
    for (const std::string& label : game.issue(*idx).labels(side)) {
      prompt << " \"" << label << "\"";
    }
    prompt << "\n";
  }
  prompt << "\nText:\n" << text << "\n";

  const std::string reply = client_->complete({{"user", prompt.str()}});
  const std::size_t start = reply.find('{');
  std::map<std::string, std::string> out;
  if (start == std::string::npos) return out;
  const std::size_t end = reply.rfind('}');
  if (end == std::string::npos || end < start) return out;
  json parsed =
      json::parse(reply.substr(start, end - start + 1), nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_object()) return out;
  for (const auto& [key, value] : parsed.items()) {
    if (value.is_string()) out[key] = value.get<std::string>();
  }
  return out;
}

}  // namespace parley
