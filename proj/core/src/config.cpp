#include "parley/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "parley/error.hpp"

namespace parley {
namespace {

YAML::Node require_key(const YAML::Node& node, const std::string& key,
                       const std::string& what) {
  YAML::Node value = node[key];
  if (!value) throw ConfigError(what + ": missing key '" + key + "'");
  return value;
}

// Lists of per-side values: one entry broadcasts to both sides.
template <typename T>
std::array<T, 2> per_side(const YAML::Node& node, const std::string& key,
                          const std::string& what) {
  YAML::Node value = require_key(node, key, what);
  if (!value.IsSequence() || value.size() < 1 || value.size() > 2) {
    throw ConfigError(what + ": '" + key + "' must list one or two entries");
  }
  T first = value[0].as<T>();
  T second = value.size() == 2 ? value[1].as<T>() : first;
  return {std::move(first), std::move(second)};
}

Issue issue_from_node(const YAML::Node& node) {
  if (!node.IsMap()) throw ConfigError("issue document must be a mapping");
  const std::string name = require_key(node, "name", "issue").as<std::string>();
  const std::string what = "issue '" + name + "'";
  const IssueType type =
      issue_type_from_string(require_key(node, "issue_type", what).as<std::string>());
  auto descriptions = per_side<std::string>(node, "descriptions", what);
  auto payoffs = per_side<std::vector<double>>(node, "payoffs", what);
  auto labels = per_side<std::vector<std::string>>(node, "payoff_labels", what);
  try {
    return Issue(name, type, std::move(descriptions), std::move(payoffs),
                 std::move(labels));
  } catch (const YAML::Exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::array<std::vector<double>, 2> weights_from_node(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 2) {
    throw ConfigError("game: 'weights' must list one entry per side");
  }
  return {node[0].as<std::vector<double>>(), node[1].as<std::vector<double>>()};
}

YAML::Emitter& emit_issue(YAML::Emitter& out, const Issue& issue) {
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << issue.name();
  out << YAML::Key << "issue_type" << YAML::Value << to_string(issue.type());
  out << YAML::Key << "descriptions" << YAML::Value << YAML::BeginSeq;
  for (int side = 0; side < 2; ++side) out << issue.description(side);
  out << YAML::EndSeq;
  out << YAML::Key << "payoffs" << YAML::Value << YAML::BeginSeq;
  for (int side = 0; side < 2; ++side) {
    out << YAML::Flow << std::vector<double>(issue.payoffs(side).begin(),
                                             issue.payoffs(side).end());
  }
  out << YAML::EndSeq;
  out << YAML::Key << "payoff_labels" << YAML::Value << YAML::BeginSeq;
  for (int side = 0; side < 2; ++side) {
    out << YAML::Flow << std::vector<std::string>(issue.labels(side).begin(),
                                                  issue.labels(side).end());
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return out;
}

}  // namespace

Issue parse_issue_config(const std::string& text) {
  try {
    return issue_from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("issue document: ") + e.what());
  }
}

Game parse_game_config(const std::string& text, std::vector<Issue> issues,
                       std::optional<std::array<std::vector<double>, 2>> weights) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("game document: ") + e.what());
  }
  if (!node.IsMap()) throw ConfigError("game document must be a mapping");

  std::string name;
  std::string description;
  std::array<std::string, 2> sides;
  std::array<std::string, 2> parties;
  std::vector<Issue> resolved;
  try {
    name = require_key(node, "name", "game").as<std::string>();
    description = require_key(node, "description", "game").as<std::string>();
    YAML::Node sides_node = require_key(node, "sides", "game");
    YAML::Node parties_node = require_key(node, "parties", "game");
    if (!sides_node.IsSequence() || sides_node.size() != 2) {
      throw ConfigError("game '" + name + "': 'sides' must list exactly two entries");
    }
    if (!parties_node.IsSequence() || parties_node.size() != 2) {
      throw ConfigError("game '" + name + "': 'parties' must list exactly two entries");
    }
    sides = {sides_node[0].as<std::string>(), sides_node[1].as<std::string>()};
    parties = {parties_node[0].as<std::string>(), parties_node[1].as<std::string>()};

    if (YAML::Node issues_node = node["issues"]) {
      if (!issues_node.IsSequence()) {
        throw ConfigError("game '" + name + "': 'issues' must be a list");
      }
      for (const YAML::Node& entry : issues_node) {
        if (entry.IsMap()) {
          resolved.push_back(issue_from_node(entry));
          continue;
        }
        const std::string issue_name = entry.as<std::string>();
        auto it = std::find_if(issues.begin(), issues.end(), [&](const Issue& issue) {
          return issue.name() == issue_name;
        });
        if (it == issues.end()) {
          throw ConfigError("game '" + name + "': unknown issue '" + issue_name + "'");
        }
        resolved.push_back(*it);
      }
    } else {
      resolved = std::move(issues);
    }

    if (!weights) {
      if (YAML::Node weights_node = node["weights"]) {
        weights = weights_from_node(weights_node);
      }
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("game document: " + std::string(e.what()));
  }

  return Game(std::move(name), std::move(description), std::move(sides),
              std::move(parties), std::move(resolved), std::move(weights));
}

std::string serialize_issue(const Issue& issue) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  emit_issue(out, issue);
  std::string text = out.c_str();
  text.push_back('\n');
  return text;
}

std::string serialize_game(const Game& game) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << game.name();
  out << YAML::Key << "description" << YAML::Value << game.description();
  out << YAML::Key << "sides" << YAML::Value << YAML::BeginSeq << game.side(0)
      << game.side(1) << YAML::EndSeq;
  out << YAML::Key << "parties" << YAML::Value << YAML::BeginSeq << game.party(0)
      << game.party(1) << YAML::EndSeq;
  out << YAML::Key << "issues" << YAML::Value << YAML::BeginSeq;
  for (const Issue& issue : game.issues()) emit_issue(out, issue);
  out << YAML::EndSeq;
  out << YAML::Key << "weights" << YAML::Value << YAML::BeginSeq;
  for (int side = 0; side < 2; ++side) {
    out << YAML::Flow << std::vector<double>(game.weights(side).begin(),
                                             game.weights(side).end());
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  std::string text = out.c_str();
  text.push_back('\n');
  return text;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Issue load_issue_file(const std::filesystem::path& path) {
  return parse_issue_config(read_file(path));
}

Game load_game_file(const std::filesystem::path& game_path,
                    const std::vector<std::filesystem::path>& issue_files,
                    const std::optional<std::filesystem::path>& issue_dir,
                    std::optional<std::array<std::vector<double>, 2>> weights) {
  const std::string text = read_file(game_path);
  std::vector<Issue> issues;
  for (const auto& file : issue_files) issues.push_back(load_issue_file(file));

  // Resolve named issues from the issue directory so parse_game_config can
  // find them; inline issue maps need no lookup.
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("game document: ") + e.what());
  }
  if (YAML::Node issues_node = node["issues"]; issues_node && issue_dir) {
    for (const YAML::Node& entry : issues_node) {
      if (!entry.IsMap()) {
        const std::string issue_name = entry.as<std::string>();
        bool known = std::any_of(issues.begin(), issues.end(), [&](const Issue& issue) {
          return issue.name() == issue_name;
        });
        if (!known) {
          issues.push_back(load_issue_file(*issue_dir / (issue_name + ".yaml")));
        }
      }
    }
  }
  return parse_game_config(text, std::move(issues), std::move(weights));
}

}  // namespace parley
