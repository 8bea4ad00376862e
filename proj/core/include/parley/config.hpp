#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "parley/game.hpp"

namespace parley {

// Issue document keys: name, issue_type, descriptions, payoffs, payoff_labels.
// Single-entry descriptions/payoffs/payoff_labels lists broadcast to both
// sides. Throws ConfigError on missing keys, length mismatches, unknown
// issue_type, or monotonicity violations.
Issue parse_issue_config(const std::string& text);

// Game document keys: name, description, sides, parties, plus optional
// `issues` and `weights` extensions. The `issues` key may hold issue names
// (resolved against `issues` argument) or inline issue documents; when the
// key is absent, all supplied issues are used in order. `weights` (argument
// or document key; argument wins) defaults to uniform 1/n per side.
Game parse_game_config(const std::string& text, std::vector<Issue> issues,
                       std::optional<std::array<std::vector<double>, 2>> weights =
                           std::nullopt);

std::string serialize_issue(const Issue& issue);
// Self-contained document: game keys plus inline issues and weights.
// parse_game_config(serialize_game(g), {}) reconstructs an identical Game.
std::string serialize_game(const Game& game);

Issue load_issue_file(const std::filesystem::path& path);
// Loads a game document; issues named by its `issues` key are read from
// `issue_dir` as <name>.yaml. `issue_files` are loaded in addition and used
// when the document carries no `issues` key.
Game load_game_file(const std::filesystem::path& game_path,
                    const std::vector<std::filesystem::path>& issue_files = {},
                    const std::optional<std::filesystem::path>& issue_dir = std::nullopt,
                    std::optional<std::array<std::vector<double>, 2>> weights =
                        std::nullopt);

namespace builtin {

// The stock rental-agreement setting and its four issues, as shipped under
// configs/.
const std::string& rental_game_text();
const std::string& rent_issue_text();
const std::string& duration_issue_text();
const std::string& deposit_issue_text();
const std::string& subletting_issue_text();

Issue rent_issue();
Issue duration_issue();
Issue deposit_issue();
Issue subletting_issue();

// Rental game over the named built-in issues (default: rent only).
Game rental_game(const std::vector<std::string>& issue_names = {"rent"},
                 std::optional<std::array<std::vector<double>, 2>> weights =
                     std::nullopt);

}  // namespace builtin

}  // namespace parley
