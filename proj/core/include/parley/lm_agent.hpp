#pragma once

#include <map>
#include <memory>

#include "parley/extraction.hpp"
#include "parley/lm_client.hpp"
#include "parley/protocol.hpp"

namespace parley {

// Maps a prompt context onto provider roles.
//   transcript: the whole context rides in one orchestration message; the
//   reply role makes two roles in total.
//   dialogue: instructions in the system role, opponent messages as user
//   turns, own messages as assistant turns, the task prompt as the final
//   user turn.
std::vector<ChatMessage> pack_messages(RoleScheme scheme, const PromptContext& context);

class LmAgent final : public AgentBackend {
 public:
  explicit LmAgent(std::shared_ptr<LmClient> client, std::string id = "");

  std::string generate_note(const PromptContext& context, const AgentView& view) override;
  std::string generate_message(const PromptContext& context,
                               const AgentView& view) override;
  std::string generate_tom_estimate(const PromptContext& context,
                                    const AgentView& view) override;
  std::string id() const override { return id_; }

 private:
  RoleScheme effective_scheme(const PromptContext& context) const;

  std::shared_ptr<LmClient> client_;
  std::string id_;
};

// Second-stage offer extractor backed by an LM: issue names and label
// vocabulary in, a JSON issue->label-or-null map out.
class LmFallbackExtractor final : public FallbackExtractor {
 public:
  explicit LmFallbackExtractor(std::shared_ptr<LmClient> client)
      : client_(std::move(client)) {}

  std::map<std::string, std::string> extract(
      const std::string& text, const Game& game, int side,
      std::span<const std::string> unresolved_issues) override;
  std::string name() const override { return "lm-fallback"; }

 private:
  std::shared_ptr<LmClient> client_;
};

}  // namespace parley
