#include "parley/issue.hpp"

#include <algorithm>
#include <cmath>

#include "parley/error.hpp"

namespace parley {
namespace {

enum class Direction { kIncreasing, kDecreasing, kNeither };

Direction strict_direction(std::span<const double> values) {
  bool increasing = true;
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) increasing = false;
    if (values[i] >= values[i - 1]) decreasing = false;
  }
  if (increasing) return Direction::kIncreasing;
  if (decreasing) return Direction::kDecreasing;
  return Direction::kNeither;
}

bool monotone_non_decreasing(std::span<const double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) return false;
  }
  return true;
}

bool monotone_non_increasing(std::span<const double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) return false;
  }
  return true;
}

}  // namespace

std::string to_string(IssueType type) {
  return type == IssueType::kDistributive ? "distributive" : "compatible";
}

IssueType issue_type_from_string(const std::string& text) {
  if (text == "distributive") return IssueType::kDistributive;
  if (text == "compatible") return IssueType::kCompatible;
  throw ConfigError("unknown issue_type: '" + text + "'");
}

Issue::Issue(std::string name, IssueType type,
             std::array<std::string, 2> descriptions,
             std::array<std::vector<double>, 2> payoffs,
             std::array<std::vector<std::string>, 2> payoff_labels)
    : name_(std::move(name)),
      type_(type),
      descriptions_(std::move(descriptions)),
      payoffs_(std::move(payoffs)),
      labels_(std::move(payoff_labels)) {
  if (name_.empty()) throw ConfigError("issue name must not be empty");
  const std::size_t k = payoffs_[0].size();
  if (k < 2) throw ConfigError("issue '" + name_ + "': needs at least 2 values");
  if (payoffs_[1].size() != k || labels_[0].size() != k || labels_[1].size() != k) {
    throw ConfigError("issue '" + name_ +
                      "': payoffs and payoff_labels must all have equal length");
  }
  for (int side = 0; side < 2; ++side) {
    double max = 0.0;
    for (double v : payoffs_[side]) {
      if (!std::isfinite(v)) {
        throw ConfigError("issue '" + name_ + "': payoffs must be finite");
      }
      if (v < 0.0) {
        throw ConfigError("issue '" + name_ + "': payoffs must be non-negative");
      }
      max = std::max(max, v);
    }
    if (max <= 0.0) {
      throw ConfigError("issue '" + name_ + "': side " + std::to_string(side) +
                        " has no positive payoff");
    }
  }
  const Direction d0 = strict_direction(payoffs_[0]);
  const Direction d1 = strict_direction(payoffs_[1]);
  if (type_ == IssueType::kDistributive) {
    const bool opposing =
        (d0 == Direction::kIncreasing && d1 == Direction::kDecreasing) ||
        (d0 == Direction::kDecreasing && d1 == Direction::kIncreasing);
    if (!opposing) {
      throw ConfigError("issue '" + name_ +
                        "': distributive payoffs must be strictly monotone in "
                        "opposite directions");
    }
  } else {
    const bool aligned =
        (monotone_non_decreasing(payoffs_[0]) && monotone_non_decreasing(payoffs_[1])) ||
        (monotone_non_increasing(payoffs_[0]) && monotone_non_increasing(payoffs_[1]));
    if (!aligned) {
      throw ConfigError("issue '" + name_ +
                        "': compatible payoffs must share a monotone direction");
    }
  }
}

std::optional<int> Issue::label_index(int side, const std::string& label) const {
  const auto& labels = labels_.at(side);
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<int>(it - labels.begin());
}

std::optional<int> Issue::resolve_label(int preferred_side, const std::string& label) const {
  if (auto idx = label_index(preferred_side, label)) return idx;
  return label_index(1 - preferred_side, label);
}

double Issue::payoff_for(int side, const std::string& label) const {
  auto idx = resolve_label(side, label);
  if (!idx) {
    throw UnknownLabelError("issue '" + name_ + "': unknown label '" + label + "'");
  }
  return payoffs_.at(side)[*idx];
}

double Issue::max_payoff(int side) const {
  return *std::max_element(payoffs_.at(side).begin(), payoffs_.at(side).end());
}

int Issue::argmax_index(int side) const {
  const auto& p = payoffs_.at(side);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace parley
