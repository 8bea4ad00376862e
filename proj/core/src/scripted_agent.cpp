#include "parley/scripted_agent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parley/error.hpp"
#include "parley/scoring.hpp"

namespace parley {

std::string to_string(StrategyFamily family) {
  switch (family) {
    case StrategyFamily::kTimeConceder: return "time_conceder";
    case StrategyFamily::kNeverConcede: return "never_concede";
    case StrategyFamily::kGreedyCompatibleMix: return "greedy_compatible_mix";
  }
  return "time_conceder";
}

StrategyFamily strategy_family_from_string(const std::string& text) {
  if (text == "time_conceder" || text == "conceder") return StrategyFamily::kTimeConceder;
  if (text == "never_concede" || text == "never") return StrategyFamily::kNeverConcede;
  if (text == "greedy_compatible_mix" || text == "greedy") {
    return StrategyFamily::kGreedyCompatibleMix;
  }
  throw ConfigError("unknown scripted strategy family: '" + text + "'");
}

void ScriptedStrategy::validate() const {
  if (!(u_min >= 0.0 && u_min <= 1.0)) throw ConfigError("u_min must be in [0, 1]");
  if (!(exponent > 0.0)) throw ConfigError("exponent must be positive");
  if (!(accept_margin >= 0.0)) throw ConfigError("accept_margin must be non-negative");
}

double scripted_target_utility(const ScriptedStrategy& strategy, int round,
                               int max_rounds) {
  strategy.validate();
  if (max_rounds < 2) throw ConfigError("time-based concession needs max_rounds >= 2");
  if (round < 1 || round > max_rounds) throw Error("round out of range");
  if (strategy.family == StrategyFamily::kNeverConcede) return 1.0;
  const double progress = static_cast<double>(round - 1) / (max_rounds - 1);
  return 1.0 - (1.0 - strategy.u_min) * std::pow(progress, 1.0 / strategy.exponent);
}

ScriptedAgent::ScriptedAgent(ScriptedStrategy strategy, std::string id)
    : strategy_(strategy), id_(std::move(id)) {
  strategy_.validate();
}

namespace {

// All complete allocations (label indices per issue), with some issues pinned.
std::vector<std::vector<int>> enumerate_allocations(
    const Game& game, const std::vector<std::optional<int>>& pinned) {
  std::size_t total = 1;
  for (int i = 0; i < game.issue_count(); ++i) {
    const std::size_t k = pinned[i] ? 1 : static_cast<std::size_t>(game.issue(i).size());
    if (total > kDefaultAllocationCap / k) {
      throw CapExceededError("scripted stance search exceeds allocation cap");
    }
    total *= k;
  }
  std::vector<std::vector<int>> out;
  out.reserve(total);
  std::vector<int> indices(game.issue_count());
  for (int i = 0; i < game.issue_count(); ++i) indices[i] = pinned[i].value_or(0);
  for (std::size_t count = 0; count < total; ++count) {
    out.push_back(indices);
    for (int i = game.issue_count() - 1; i >= 0; --i) {
      if (pinned[i]) continue;
      if (++indices[i] < game.issue(i).size()) break;
      indices[i] = 0;
    }
  }
  return out;
}

// The opponent's table is hidden; assume per-issue mirrored payoffs under
// uniform issue weights.
double estimated_opponent_utility(const Game& game, int side,
                                  std::span<const int> indices) {
  double estimate = 0.0;
  for (int i = 0; i < game.issue_count(); ++i) {
    const Issue& issue = game.issue(i);
    const double max = issue.max_payoff(side);
    estimate += (max - issue.payoff_at(side, indices[i])) / max;
  }
  return estimate / game.issue_count();
}

Allocation to_allocation(const Game& game, int side, std::span<const int> indices) {
  Allocation alloc;
  for (int i = 0; i < game.issue_count(); ++i) {
    alloc.choices[game.issue(i).name()] =
        game.issue(i).labels(side)[static_cast<std::size_t>(indices[i])];
  }
  return alloc;
}

std::string offers_json_block(const Allocation& alloc) {
  nlohmann::json block = nlohmann::json::object();
  for (const auto& [issue, label] : alloc.choices) block[issue] = label;
  return "```json" + block.dump(4) + "```";
}

std::string offers_inline(const Allocation& alloc) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [issue, label] : alloc.choices) {
    if (!first) out << " ";
    out << issue << ": " << label << ".";
    first = false;
  }
  return out.str();
}

}  // namespace

Allocation ScriptedAgent::stance(const AgentView& view) const {
  const Game& game = *view.game;
  const int side = view.side;

  std::vector<std::optional<int>> pinned(game.issue_count());
  if (strategy_.family == StrategyFamily::kGreedyCompatibleMix) {
    for (int i = 0; i < game.issue_count(); ++i) {
      if (game.issue(i).type() == IssueType::kCompatible) {
        pinned[i] = game.issue(i).argmax_index(side);
      }
    }
  }

  const double target = scripted_target_utility(strategy_, view.round, view.max_rounds);
  const auto candidates = enumerate_allocations(game, pinned);

  std::vector<double> utilities(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    utilities[i] = game.utility_at(side, candidates[i]);
  }

  // Richest achievable utility level not above the target; everything at or
  // above that level stays eligible.
  double floor_level = -1.0;
  for (double u : utilities) {
    if (u <= target + 1e-12 && u > floor_level) floor_level = u;
  }
  if (floor_level < 0.0) {
    floor_level = *std::min_element(utilities.begin(), utilities.end());
  }

  std::size_t best = candidates.size();
  double best_estimate = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (utilities[i] < floor_level - 1e-12) continue;
    const double estimate = estimated_opponent_utility(game, side, candidates[i]);
    if (best == candidates.size() || estimate > best_estimate + 1e-12) {
      best = i;
      best_estimate = estimate;
    }
  }
  return to_allocation(game, side, candidates[best]);
}

ScriptedAgent::Decision ScriptedAgent::decide(const AgentView& view) const {
  Allocation own = stance(view);
  const double own_utility = view.game->normalized_utility(view.side, own).value;
  if (view.opponent_last_offer != nullptr &&
      view.game->covers_all_issues(*view.opponent_last_offer)) {
    const double offered =
        view.game->normalized_utility(view.side, *view.opponent_last_offer).value;
    if (offered >= own_utility - strategy_.accept_margin - 1e-12) {
      return {*view.opponent_last_offer, true};
    }
  }
  return {std::move(own), false};
}

std::string ScriptedAgent::generate_note(const PromptContext& /*context*/,
                                         const AgentView& view) {
  const Decision decision = decide(view);
  std::ostringstream out;
  out << "Round " << view.round << " of " << view.max_rounds
      << ": hold total payoff at or above the concession target.\n";
  if (decision.accept) {
    out << "The offer on the table meets the target; take it.\n";
  }
  out << "Acceptable offers:\n" << offers_json_block(decision.offer);
  return out.str();
}

std::string ScriptedAgent::generate_message(const PromptContext& /*context*/,
                                            const AgentView& view) {
  const Decision decision = decide(view);
  std::ostringstream out;
  if (decision.accept) {
    out << "I accept your proposal. " << offers_inline(decision.offer) << " "
        << kAgreementPhrase;
  } else {
    out << "Here is my offer. " << offers_inline(decision.offer)
        << " I believe this is a fair split given my constraints.";
  }
  return out.str();
}

std::string ScriptedAgent::generate_tom_estimate(const PromptContext& /*context*/,
                                                 const AgentView& view) {
  const Decision decision = decide(view);
  return "My partner should be willing to settle for:\n" +
         offers_json_block(decision.offer);
}

}  // namespace parley
