#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parley/issue.hpp"

namespace parley {

// Chosen value label per issue. May cover only a subset of a game's issues
// (a partial allocation).
struct Allocation {
  std::map<std::string, std::string> choices;  // issue name -> label

  bool empty() const { return choices.empty(); }
  const std::string* find(const std::string& issue_name) const {
    auto it = choices.find(issue_name);
    return it == choices.end() ? nullptr : &it->second;
  }

  bool operator==(const Allocation&) const = default;
};

struct UtilityResult {
  double value = 0.0;
  bool partial = false;
};

// A two-party negotiation setting: role descriptions, issues, and per-side
// issue importance weights. Immutable after construction.
class Game {
 public:
  Game(std::string name, std::string description,
       std::array<std::string, 2> sides, std::array<std::string, 2> parties,
       std::vector<Issue> issues,
       std::optional<std::array<std::vector<double>, 2>> weights = std::nullopt);

  const std::string& name() const { return name_; }
  const std::string& description() const { return description_; }
  const std::string& side(int s) const { return sides_.at(s); }
  const std::string& party(int s) const { return parties_.at(s); }
  const std::vector<Issue>& issues() const { return issues_; }
  const Issue& issue(int i) const { return issues_.at(i); }
  int issue_count() const { return static_cast<int>(issues_.size()); }
  std::span<const double> weights(int side) const { return weights_.at(side); }
  double weight(int side, int issue) const { return weights_.at(side).at(issue); }

  std::optional<int> issue_index(const std::string& issue_name) const;

  // Payoff of `label` on issue `i` for `side`; the label is resolved against
  // `side`'s label text first, then the other side's.
  double payoff(int issue, int side, const std::string& label) const;

  // Weighted per-issue max-normalized utility in [0, 1]. Allocations that do
  // not cover every issue yield value 0 with partial=true. Unknown labels
  // throw UnknownLabelError.
  UtilityResult normalized_utility(int side, const Allocation& alloc) const;
  // Same, for a complete allocation given as label indices per issue.
  double utility_at(int side, std::span<const int> label_indices) const;

  // True when every issue has a choice and each label resolves.
  bool covers_all_issues(const Allocation& alloc) const;

  bool operator==(const Game&) const = default;

 private:
  std::string name_;
  std::string description_;
  std::array<std::string, 2> sides_;
  std::array<std::string, 2> parties_;
  std::vector<Issue> issues_;
  std::array<std::vector<double>, 2> weights_;
};

}  // namespace parley
