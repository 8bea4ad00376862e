#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parley {

// Distributive: opposing payoff monotonicity, one side's gain is the other's
// loss. Compatible: both sides prefer the same direction.
enum class IssueType { kDistributive, kCompatible };

std::string to_string(IssueType type);
IssueType issue_type_from_string(const std::string& text);

// One negotiable dimension: k discrete value labels with per-side payoffs.
// Immutable after construction; safe to share across threads.
class Issue {
 public:
  Issue(std::string name, IssueType type,
        std::array<std::string, 2> descriptions,
        std::array<std::vector<double>, 2> payoffs,
        std::array<std::vector<std::string>, 2> payoff_labels);

  const std::string& name() const { return name_; }
  IssueType type() const { return type_; }
  const std::string& description(int side) const { return descriptions_.at(side); }
  std::span<const double> payoffs(int side) const { return payoffs_.at(side); }
  std::span<const std::string> labels(int side) const { return labels_.at(side); }
  int size() const { return static_cast<int>(labels_[0].size()); }

  // Index of `label` within side's label array, if present (exact match).
  std::optional<int> label_index(int side, const std::string& label) const;
  // Index resolved against `preferred_side`'s labels first, then the other
  // side's. Sides usually share label text, but nothing requires it.
  std::optional<int> resolve_label(int preferred_side, const std::string& label) const;

  double payoff_at(int side, int index) const { return payoffs_.at(side).at(index); }
  double payoff_for(int side, const std::string& label) const;
  double max_payoff(int side) const;
  // Label index with the highest payoff for `side` (lowest index on ties).
  int argmax_index(int side) const;

  bool operator==(const Issue&) const = default;

 private:
  std::string name_;
  IssueType type_;
  std::array<std::string, 2> descriptions_;
  std::array<std::vector<double>, 2> payoffs_;
  std::array<std::vector<std::string>, 2> labels_;
};

}  // namespace parley
