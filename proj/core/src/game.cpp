#include "parley/game.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "parley/error.hpp"

namespace parley {

namespace {
constexpr double kWeightSumTolerance = 1e-9;
}

Game::Game(std::string name, std::string description,
           std::array<std::string, 2> sides, std::array<std::string, 2> parties,
           std::vector<Issue> issues,
           std::optional<std::array<std::vector<double>, 2>> weights)
    : name_(std::move(name)),
      description_(std::move(description)),
      sides_(std::move(sides)),
      parties_(std::move(parties)),
      issues_(std::move(issues)) {
  if (issues_.empty()) throw ConfigError("game '" + name_ + "': needs at least one issue");

  std::set<std::string> seen;
  for (const Issue& issue : issues_) {
    if (!seen.insert(issue.name()).second) {
      throw ConfigError("game '" + name_ + "': duplicate issue name '" + issue.name() + "'");
    }
  }

  if (weights) {
    weights_ = std::move(*weights);
  } else {
    const double uniform = 1.0 / static_cast<double>(issues_.size());
    weights_[0].assign(issues_.size(), uniform);
    weights_[1].assign(issues_.size(), uniform);
  }
  for (int side = 0; side < 2; ++side) {
    if (weights_[side].size() != issues_.size()) {
      throw ConfigError("game '" + name_ + "': side " + std::to_string(side) +
                        " has " + std::to_string(weights_[side].size()) +
                        " weights for " + std::to_string(issues_.size()) + " issues");
    }
    double sum = 0.0;
    for (double w : weights_[side]) {
      if (!(w >= 0.0)) {
        throw ConfigError("game '" + name_ + "': weights must be non-negative");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
      throw ConfigError("game '" + name_ + "': side " + std::to_string(side) +
                        " weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }
}

std::optional<int> Game::issue_index(const std::string& issue_name) const {
  for (std::size_t i = 0; i < issues_.size(); ++i) {
    if (issues_[i].name() == issue_name) return static_cast<int>(i);
  }
  return std::nullopt;
}

double Game::payoff(int issue, int side, const std::string& label) const {
  return issues_.at(issue).payoff_for(side, label);
}

UtilityResult Game::normalized_utility(int side, const Allocation& alloc) const {
  std::vector<int> indices(issues_.size(), -1);
  bool partial = false;
  for (std::size_t i = 0; i < issues_.size(); ++i) {
    const std::string* label = alloc.find(issues_[i].name());
    if (label == nullptr) {
      partial = true;
      continue;
    }
    auto idx = issues_[i].resolve_label(side, *label);
    if (!idx) {
      throw UnknownLabelError("issue '" + issues_[i].name() + "': unknown label '" +
                              *label + "'");
    }
    indices[i] = *idx;
  }
  if (partial) return {0.0, true};
  return {utility_at(side, indices), false};
}

double Game::utility_at(int side, std::span<const int> label_indices) const {
  double total = 0.0;
  for (std::size_t i = 0; i < issues_.size(); ++i) {
    const Issue& issue = issues_[i];
    total += weights_.at(side)[i] * issue.payoff_at(side, label_indices[i]) /
             issue.max_payoff(side);
  }
  return total;
}

bool Game::covers_all_issues(const Allocation& alloc) const {
  for (const Issue& issue : issues_) {
    const std::string* label = alloc.find(issue.name());
    if (label == nullptr || !issue.resolve_label(0, *label)) return false;
  }
  return true;
}

}  // namespace parley
