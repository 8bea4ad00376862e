#include "parley/metrics.hpp"

#include <map>
#include <sstream>

namespace parley {
namespace {

// Latest extracted allocation per round for one agent and event kind.
std::map<int, const Allocation*> per_round(const NegotiationState& state, int agent,
                                           EventKind kind) {
  std::map<int, const Allocation*> out;
  for (const TurnEvent& event : state.events()) {
    if (event.agent == agent && event.kind == kind && event.extracted_offers) {
      out[event.round] = &*event.extracted_offers;
    }
  }
  return out;
}

struct ViolationCount {
  int opportunities = 0;
  int violations = 0;
};

template <typename Violates>
ViolationCount count_violations(const NegotiationState& state,
                                const std::map<int, const Allocation*>& stated,
                                const std::map<int, const Allocation*>& offered,
                                Violates violates) {
  ViolationCount count;
  for (const auto& [round, stated_alloc] : stated) {
    auto it = offered.find(round);
    if (it == offered.end()) continue;
    for (const Issue& issue : state.game().issues()) {
      const std::string* stated_label = stated_alloc->find(issue.name());
      const std::string* offered_label = it->second->find(issue.name());
      if (stated_label == nullptr || offered_label == nullptr) continue;
      ++count.opportunities;
      if (violates(issue, *stated_label, *offered_label)) ++count.violations;
    }
  }
  return count;
}

}  // namespace

int count_words(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  int count = 0;
  while (in >> token) ++count;
  return count;
}

std::optional<Allocation> detect_soft_agreement(const NegotiationState& state) {
  return state.aligned_acceptable_offers();
}

std::pair<std::array<double, 2>, std::optional<std::array<double, 2>>> payoffs(
    const NegotiationState& state, const std::optional<Allocation>& agreed) {
  const bool terminal_agreement =
      agreed && (state.status() == RunStatus::kHardAgreement ||
                 state.status() == RunStatus::kNoAgreement);
  if (!terminal_agreement) return {{0.0, 0.0}, std::nullopt};
  std::array<double, 2> u{state.game().normalized_utility(0, *agreed).value,
                          state.game().normalized_utility(1, *agreed).value};
  return {u, u};
}

double internal_faithfulness(const NegotiationState& state, int agent) {
  const auto stated = per_round(state, agent, EventKind::kNote);
  const auto offered = per_round(state, agent, EventKind::kMessage);
  const ViolationCount count = count_violations(
      state, stated, offered,
      [&](const Issue& issue, const std::string& acceptable, const std::string& offer) {
        return issue.payoff_for(agent, offer) < issue.payoff_for(agent, acceptable);
      });
  if (count.opportunities == 0) return 1.0;
  return 1.0 - static_cast<double>(count.violations) / count.opportunities;
}

std::optional<double> external_faithfulness(const NegotiationState& state, int agent) {
  const auto estimates = per_round(state, agent, EventKind::kTomProbe);
  bool any_probe = false;
  for (const TurnEvent& event : state.events()) {
    if (event.agent == agent && event.kind == EventKind::kTomProbe) any_probe = true;
  }
  if (!any_probe) return std::nullopt;

  const auto offered = per_round(state, agent, EventKind::kMessage);
  const int opponent = 1 - agent;
  const ViolationCount count = count_violations(
      state, estimates, offered,
      [&](const Issue& issue, const std::string& estimate, const std::string& offer) {
        return issue.payoff_for(opponent, offer) > issue.payoff_for(opponent, estimate);
      });
  if (count.opportunities == 0) return 1.0;
  return 1.0 - static_cast<double>(count.violations) / count.opportunities;
}

InstructionMetrics instruction_metrics(const NegotiationState& state, int agent,
                                       const MemoryConfig& mem) {
  int notes = 0;
  int notes_within = 0;
  int notes_regex = 0;
  int messages = 0;
  int messages_within = 0;
  for (const TurnEvent& event : state.events()) {
    if (event.agent != agent) continue;
    if (event.kind == EventKind::kNote) {
      ++notes;
      if (count_words(event.text) <= mem.max_note_words) ++notes_within;
      if (event.extraction_method == ExtractionMethod::kRegex) ++notes_regex;
    } else if (event.kind == EventKind::kMessage) {
      ++messages;
      if (count_words(event.text) <= mem.max_message_words) ++messages_within;
    }
  }
  InstructionMetrics metrics;
  if (notes > 0) {
    metrics.note_instruct = static_cast<double>(notes_within) / notes;
    metrics.format_instruct = static_cast<double>(notes_regex) / notes;
  }
  if (messages > 0) {
    metrics.message_instruct = static_cast<double>(messages_within) / messages;
  }
  return metrics;
}

RunMetrics compute_run_metrics(const NegotiationState& state, const MemoryConfig& mem) {
  RunMetrics metrics;
  metrics.status = state.status();
  metrics.agreed_allocation = detect_soft_agreement(state);
  metrics.soft_agreement = metrics.agreed_allocation.has_value();
  metrics.hard_agreement = state.status() == RunStatus::kHardAgreement;
  auto [u, u_hat] = payoffs(state, metrics.agreed_allocation);
  metrics.utility = u;
  metrics.utility_on_agreement = u_hat;
  metrics.rounds_used = state.rounds_used();
  for (int agent = 0; agent < 2; ++agent) {
    metrics.internal_faithfulness[agent] = internal_faithfulness(state, agent);
    metrics.external_faithfulness[agent] = external_faithfulness(state, agent);
    metrics.instruction[agent] = instruction_metrics(state, agent, mem);
  }
  return metrics;
}

}  // namespace parley
