#include "parley/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "parley/error.hpp"

namespace parley {
namespace {

constexpr double kUnitSumTolerance = 1e-9;

void check_unit_sum(std::span<const double> weights, const char* which) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw ConfigError(std::string(which) + " weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kUnitSumTolerance) {
    throw ConfigError(std::string(which) + " weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

}  // namespace

OptimalScore optimal_distributive_score(std::span<const double> weights_a,
                                        std::span<const double> weights_b) {
  if (weights_a.size() != weights_b.size()) {
    throw ConfigError("weight vectors differ in length");
  }
  if (weights_a.empty()) throw ConfigError("weight vectors must not be empty");
  check_unit_sum(weights_a, "side 0");
  check_unit_sum(weights_b, "side 1");

  double combined = 0.0;
  for (std::size_t i = 0; i < weights_a.size(); ++i) {
    combined += std::max(weights_a[i], weights_b[i]);
  }
  return {combined / 2.0, combined, ScoreMethod::kClosedFormDistributive};
}

std::vector<FrontierPoint> brute_force_frontier(const Game& game, std::size_t cap) {
  std::size_t total = 1;
  for (const Issue& issue : game.issues()) {
    const std::size_t k = static_cast<std::size_t>(issue.size());
    if (total > cap / k) {
      throw CapExceededError("allocation count exceeds cap of " + std::to_string(cap));
    }
    total *= k;
  }

  const int n = game.issue_count();
  std::vector<FrontierPoint> points;
  points.reserve(total);
  std::vector<int> indices(n, 0);
  for (std::size_t count = 0; count < total; ++count) {
    FrontierPoint point;
    point.label_indices = indices;
    point.utility0 = game.utility_at(0, indices);
    point.utility1 = game.utility_at(1, indices);
    points.push_back(std::move(point));
    for (int i = n - 1; i >= 0; --i) {
      if (++indices[i] < game.issue(i).size()) break;
      indices[i] = 0;
    }
  }

  // O(n^2) domination check; fine for the caps this is used with.
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      if (i == j) continue;
      dominated = points[j].utility0 >= points[i].utility0 &&
                  points[j].utility1 >= points[i].utility1 &&
                  (points[j].utility0 > points[i].utility0 ||
                   points[j].utility1 > points[i].utility1);
    }
    points[i].pareto = !dominated;
  }
  return points;
}

std::string to_string(GameClass cls) {
  return cls == GameClass::kCompetitive ? "competitive" : "cooperative";
}

GameClass classify_game(const Game& game) {
  for (const Issue& issue : game.issues()) {
    if (issue.type() != IssueType::kDistributive) return GameClass::kCooperative;
  }
  for (int i = 0; i < game.issue_count(); ++i) {
    if (std::abs(game.weight(0, i) - game.weight(1, i)) > kUnitSumTolerance) {
      return GameClass::kCooperative;
    }
  }
  return GameClass::kCompetitive;
}

}  // namespace parley
