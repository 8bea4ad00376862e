#pragma once

#include <array>
#include <optional>
#include <utility>

#include "parley/protocol.hpp"

namespace parley {

struct InstructionMetrics {
  double note_instruct = 1.0;     // notes within the word limit
  double message_instruct = 1.0;  // messages within the word limit
  double format_instruct = 1.0;   // notes whose offers parsed without fallback
};

// Everything reported for one finished (or aborted) negotiation. Per-agent
// arrays are indexed by agent id (== side).
struct RunMetrics {
  RunStatus status = RunStatus::kInProgress;
  bool soft_agreement = false;
  bool hard_agreement = false;
  std::optional<Allocation> agreed_allocation;
  std::array<double, 2> utility{0.0, 0.0};  // U; zero without agreement
  std::optional<std::array<double, 2>> utility_on_agreement;  // U_hat
  int rounds_used = 0;
  std::array<double, 2> internal_faithfulness{1.0, 1.0};
  // Absent when ToM probing was off for the run.
  std::array<std::optional<double>, 2> external_faithfulness{};
  std::array<InstructionMetrics, 2> instruction{};
};

// Whitespace-delimited token count; fences and JSON blocks count.
int count_words(const std::string& text);

// Both agents' latest note-stated acceptable offers assign the same value to
// every issue.
std::optional<Allocation> detect_soft_agreement(const NegotiationState& state);

// (U, U_hat). Paid at the agreed allocation when the run terminated holding
// an agreement; otherwise U = (0, 0) and U_hat is absent.
std::pair<std::array<double, 2>, std::optional<std::array<double, 2>>> payoffs(
    const NegotiationState& state, const std::optional<Allocation>& agreed);

// 1 - violations/opportunities over (turn, issue) pairs where both a stated
// acceptable label and a same-turn message offer were extracted. A violation
// is an offer strictly below the agent's own stated acceptable payoff.
double internal_faithfulness(const NegotiationState& state, int agent);

// Same shape over (ToM estimate, same-turn offer) pairs; a violation grants
// the opponent strictly more than the agent's estimate of their settle point.
// Absent when the agent produced no ToM probes.
std::optional<double> external_faithfulness(const NegotiationState& state, int agent);

InstructionMetrics instruction_metrics(const NegotiationState& state, int agent,
                                       const MemoryConfig& mem);

RunMetrics compute_run_metrics(const NegotiationState& state, const MemoryConfig& mem);

}  // namespace parley
