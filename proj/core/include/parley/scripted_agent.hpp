#pragma once

#include <string>

#include "parley/protocol.hpp"

namespace parley {

enum class StrategyFamily { kTimeConceder, kNeverConcede, kGreedyCompatibleMix };

std::string to_string(StrategyFamily family);
StrategyFamily strategy_family_from_string(const std::string& text);

// Deterministic negotiation policy with a computable ground truth, used to
// verify the protocol, extraction, and metrics without any LM.
struct ScriptedStrategy {
  StrategyFamily family = StrategyFamily::kTimeConceder;
  double u_min = 0.5;         // utility conceded to by the final round
  double exponent = 1.0;      // concession curve shape (1 = linear)
  double accept_margin = 0.0;

  void validate() const;  // throws ConfigError
};

// Time-based concession target: u(t) = 1 - (1 - u_min) * ((t-1)/(T-1))^(1/e).
// never_concede holds at 1. Throws ConfigError when max_rounds < 2.
double scripted_target_utility(const ScriptedStrategy& strategy, int round,
                               int max_rounds);

class ScriptedAgent final : public AgentBackend {
 public:
  explicit ScriptedAgent(ScriptedStrategy strategy, std::string id = "scripted");

  std::string generate_note(const PromptContext& context, const AgentView& view) override;
  std::string generate_message(const PromptContext& context,
                               const AgentView& view) override;
  std::string generate_tom_estimate(const PromptContext& context,
                                    const AgentView& view) override;
  std::string id() const override { return id_; }

  const ScriptedStrategy& strategy() const { return strategy_; }

  // The stated-acceptable allocation for this turn: the allocation whose own
  // utility sits on the richest achievable level at or below the concession
  // target, preferring (estimated) opponent-friendly choices within it.
  Allocation stance(const AgentView& view) const;

  struct Decision {
    Allocation offer;
    bool accept = false;  // adopted the opponent's last offer
  };
  // Accepts the opponent's last complete offer when it is worth at least the
  // stance utility minus accept_margin; otherwise restates the stance.
  Decision decide(const AgentView& view) const;

 private:
  ScriptedStrategy strategy_;
  std::string id_;
};

}  // namespace parley
