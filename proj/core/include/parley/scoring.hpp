#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parley/game.hpp"

namespace parley {

enum class ScoreMethod { kClosedFormDistributive, kBruteForce };

struct OptimalScore {
  double per_side_optimum = 0.0;  // in [0.5, 1]
  double combined_max = 0.0;
  ScoreMethod method = ScoreMethod::kClosedFormDistributive;
};

// Best equal-split value for a distributive-only game with unit-sum issue
// weights a (side 0) and b (side 1): combined_max = sum_i max(a_i, b_i),
// per_side_optimum = combined_max / 2.
OptimalScore optimal_distributive_score(std::span<const double> weights_a,
                                        std::span<const double> weights_b);

// One complete allocation with both sides' normalized utilities. `pareto` is
// true when no other allocation weakly improves both utilities (with one
// strict improvement).
struct FrontierPoint {
  std::vector<int> label_indices;  // one per issue, in game issue order
  double utility0 = 0.0;
  double utility1 = 0.0;
  bool pareto = false;
};

inline constexpr std::size_t kDefaultAllocationCap = 1'000'000;

// Enumerates every complete label allocation. Throws CapExceededError when
// the allocation count would exceed `cap`.
std::vector<FrontierPoint> brute_force_frontier(const Game& game,
                                                std::size_t cap = kDefaultAllocationCap);

enum class GameClass { kCooperative, kCompetitive };

std::string to_string(GameClass cls);

// Competitive: pure conflict — every issue distributive and both sides weight
// issues identically. Anything else offers room for cooperation.
GameClass classify_game(const Game& game);

}  // namespace parley
