// negotiate: run single negotiations, qualifiers, and debiased tournaments
// over structured negotiation games, score games, and summarize results.

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "parley/config.hpp"
#include "parley/error.hpp"
#include "parley/harness.hpp"
#include "parley/lm_agent.hpp"
#include "parley/metrics.hpp"
#include "parley/scoring.hpp"
#include "parley/transcript.hpp"

namespace fs = std::filesystem;
using namespace parley;

namespace {

struct GameArgs {
  std::string game;  // path or builtin:rental[:issue,issue,...]
  std::vector<std::string> issue_files;
  std::string issues_dir;
  std::string weights;  // "0.25,0.75;0.75,0.25"
};

void add_game_options(CLI::App* cmd, GameArgs& args) {
  cmd->add_option("--game", args.game,
                  "Game document path, or builtin:rental[:rent,duration,...]")
      ->required();
  cmd->add_option("--issue", args.issue_files, "Issue document path (repeatable)");
  cmd->add_option("--issues-dir", args.issues_dir,
                  "Directory with <issue>.yaml files for names listed in the game");
  cmd->add_option("--weights", args.weights,
                  "Per-side issue weights, e.g. \"0.25,0.75;0.75,0.25\"");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) values.push_back(std::stod(token));
  }
  return values;
}

std::optional<std::array<std::vector<double>, 2>> parse_weights(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const std::size_t split = text.find(';');
  if (split == std::string::npos) {
    throw ConfigError("--weights needs two ';'-separated lists");
  }
  return std::array<std::vector<double>, 2>{parse_number_list(text.substr(0, split)),
                                            parse_number_list(text.substr(split + 1))};
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

Game load_game(const GameArgs& args) {
  const auto weights = parse_weights(args.weights);
  if (args.game.rfind("builtin:rental", 0) == 0) {
    std::vector<std::string> issues{"rent"};
    const std::size_t second_colon = args.game.find(':', std::string("builtin").size() + 1);
    if (second_colon != std::string::npos) {
      issues = split_csv(args.game.substr(second_colon + 1));
    }
    return builtin::rental_game(issues, weights);
  }
  std::vector<fs::path> issue_files(args.issue_files.begin(), args.issue_files.end());
  std::optional<fs::path> issue_dir;
  if (!args.issues_dir.empty()) {
    issue_dir = fs::path(args.issues_dir);
  } else if (issue_files.empty()) {
    issue_dir = fs::path(args.game).parent_path();
  }
  return load_game_file(args.game, issue_files, issue_dir, weights);
}

struct MemoryArgs {
  MemoryConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-note-words", config.max_note_words, "Note word limit");
    cmd->add_option("--max-msg-words", config.max_message_words, "Message word limit");
    cmd->add_option("--notes-for-notes", config.own_notes_for_notes,
                    "Own-note window when writing notes (0, 1, -1)");
    cmd->add_option("--msgs-for-notes", config.own_messages_for_notes,
                    "Own-message window when writing notes (0, 1, -1)");
    cmd->add_option("--notes-for-msgs", config.own_notes_for_messages,
                    "Own-note window when writing messages (0, 1, -1)");
    cmd->add_option("--msgs-for-msgs", config.own_messages_for_messages,
                    "Own-message window when writing messages (0, 1, -1)");
    cmd->add_flag_callback(
        "--hide-round-numbers",
        [this] { config.show_round_numbers = false; },
        "Do not show the negotiation-round banner");
  }
};

// "lm:<config.yaml>" or "synonyms:<rules.yaml>" (a list of {phrase, issue,
// label} entries).
std::unique_ptr<FallbackExtractor> make_fallback(const std::string& spec) {
  if (spec.empty()) return nullptr;
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("fallback spec must be lm:<file> or synonyms:<file>");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string file = spec.substr(colon + 1);
  if (kind == "lm") {
    return std::make_unique<LmFallbackExtractor>(
        std::make_shared<LmClient>(lm_config_from_file(file)));
  }
  if (kind == "synonyms") {
    YAML::Node node;
    try {
      node = YAML::LoadFile(file);
    } catch (const YAML::Exception& e) {
      throw ConfigError("synonym rules '" + file + "': " + e.what());
    }
    std::vector<SynonymFallback::Rule> rules;
    for (const YAML::Node& entry : node) {
      rules.push_back({entry["phrase"].as<std::string>(),
                       entry["issue"].as<std::string>(),
                       entry["label"].as<std::string>()});
    }
    return std::make_unique<SynonymFallback>(std::move(rules));
  }
  throw ConfigError("unknown fallback kind: '" + kind + "'");
}

void print_metrics(const RunOutcome& outcome) {
  const RunMetrics& metrics = outcome.metrics;
  std::cout << "status: " << to_string(metrics.status) << "\n";
  std::cout << "rounds_used: " << metrics.rounds_used << "\n";
  std::cout << "soft_agreement: " << (metrics.soft_agreement ? "yes" : "no")
            << "  hard_agreement: " << (metrics.hard_agreement ? "yes" : "no") << "\n";
  if (metrics.agreed_allocation) {
    std::cout << "agreed:";
    for (const auto& [issue, label] : metrics.agreed_allocation->choices) {
      std::cout << " " << issue << "=" << label;
    }
    std::cout << "\n";
  }
  for (int side = 0; side < 2; ++side) {
    std::cout << "side " << side << " (" << outcome.model_by_side[side] << ")"
              << ": U=" << metrics.utility[side];
    if (metrics.utility_on_agreement) {
      std::cout << " U_hat=" << (*metrics.utility_on_agreement)[side];
    }
    std::cout << " internal=" << metrics.internal_faithfulness[side];
    if (metrics.external_faithfulness[side]) {
      std::cout << " external=" << *metrics.external_faithfulness[side];
    }
    std::cout << " note_instr=" << metrics.instruction[side].note_instruct
              << " msg_instr=" << metrics.instruction[side].message_instruct
              << " format_instr=" << metrics.instruction[side].format_instruct << "\n";
  }
}

void append_outcome(const std::optional<std::string>& results_path,
                    const RunOutcome& outcome) {
  if (!results_path) return;
  std::ofstream out(*results_path, std::ios::app);
  if (!out) throw Error("cannot open results file '" + *results_path + "'");
  out << outcome_to_json_line(outcome) << '\n';
}

struct PersonaArgs {
  std::string a_internal;
  std::string a_external;
  std::string b_internal;
  std::string b_external;
};

int cmd_run(const GameArgs& game_args, const MemoryArgs& memory, std::string agent_a,
            std::string agent_b, int max_rounds, std::uint64_t seed, int a_side,
            int starter_model, bool no_probe, const PersonaArgs& personas,
            const std::string& fallback_spec,
            const std::optional<std::string>& transcript_dir,
            const std::optional<std::string>& results_path) {
  const Game game = load_game(game_args);
  const std::unique_ptr<FallbackExtractor> fallback = make_fallback(fallback_spec);
  HarnessOptions options;
  options.memory = memory.config;
  options.max_rounds = max_rounds;
  options.tom_probing = !no_probe;
  options.base_seed = seed;
  options.fallback = fallback.get();
  if (transcript_dir) options.transcript_dir = fs::path(*transcript_dir);

  AgentDescriptor a = parse_agent_spec(agent_a);
  AgentDescriptor b = parse_agent_spec(agent_b);
  a.persona = {personas.a_internal, personas.a_external};
  b.persona = {personas.b_internal, personas.b_external};
  Permutation permutation{a_side, starter_model};
  std::ostringstream run_id;
  run_id << a.id << "__vs__" << b.id << "__" << game.name() << "__s" << seed << "__"
         << permutation.label();
  const RunOutcome outcome =
      execute_run(game, a, b, permutation, seed, options, run_id.str());
  print_metrics(outcome);
  append_outcome(results_path, outcome);
  return outcome.metrics.status == RunStatus::kAborted ? 2 : 0;
}

int cmd_qualify(const std::optional<GameArgs>& game_args, const std::string& model_spec,
                int runs, std::uint64_t seed) {
  const Game game = game_args ? load_game(*game_args) : builtin::rental_game();
  HarnessOptions options;
  options.base_seed = seed;
  const QualifierReport report = run_qualifier(parse_agent_spec(model_spec), game, runs,
                                               options);
  std::cout << (report.passed ? "PASS" : "FAIL") << ": " << report.hard_agreements << "/"
            << report.runs << " hard agreements";
  if (report.aborted > 0) std::cout << " (" << report.aborted << " aborted)";
  std::cout << "\n";
  return report.passed ? 0 : 1;
}

int cmd_tournament(const std::string& config_path) {
  YAML::Node node;
  try {
    node = YAML::LoadFile(config_path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("tournament config '" + config_path + "': " + e.what());
  }

  TournamentConfig config;
  if (!node["models"] || !node["models"].IsSequence()) {
    throw ConfigError("tournament config needs a 'models' list");
  }
  for (const YAML::Node& model : node["models"]) {
    std::string spec;
    std::string id;
    if (model.IsMap()) {
      spec = model["spec"].as<std::string>("");
      id = model["id"].as<std::string>("");
    } else {
      spec = model.as<std::string>();
    }
    AgentDescriptor descriptor = parse_agent_spec(spec);
    if (!id.empty()) descriptor.id = id;
    config.models.push_back(std::move(descriptor));
  }
  if (!node["games"] || !node["games"].IsSequence()) {
    throw ConfigError("tournament config needs a 'games' list");
  }
  for (const YAML::Node& entry : node["games"]) {
    GameArgs args;
    if (entry.IsMap()) {
      args.game = entry["game"].as<std::string>();
      args.issues_dir = entry["issues_dir"].as<std::string>("");
      if (entry["issues"]) {
        for (const YAML::Node& issue : entry["issues"]) {
          args.issue_files.push_back(issue.as<std::string>());
        }
      }
      args.weights = entry["weights"].as<std::string>("");
    } else {
      args.game = entry.as<std::string>();
    }
    Game game = load_game(args);
    std::string name = game.name();
    if (entry.IsMap() && entry["name"]) name = entry["name"].as<std::string>();
    config.games.push_back({std::move(name), std::move(game)});
  }

  config.runs_per_cell = node["runs_per_cell"].as<int>(config.runs_per_cell);
  config.require_qualifier = node["require_qualifier"].as<bool>(config.require_qualifier);
  config.qualifier_runs = node["qualifier_runs"].as<int>(config.qualifier_runs);
  config.options.base_seed = node["base_seed"].as<std::uint64_t>(0);
  config.options.max_rounds = node["max_rounds"].as<int>(config.options.max_rounds);
  config.options.tom_probing = node["tom_probing"].as<bool>(config.options.tom_probing);
  config.options.workers = node["workers"].as<int>(config.options.workers);
  const std::unique_ptr<FallbackExtractor> fallback =
      make_fallback(node["fallback"].as<std::string>(""));
  config.options.fallback = fallback.get();
  if (node["results"]) config.results_path = fs::path(node["results"].as<std::string>());
  if (node["transcripts"]) {
    config.options.transcript_dir = fs::path(node["transcripts"].as<std::string>());
  }
  if (node["memory"]) {
    const YAML::Node mem = node["memory"];
    MemoryConfig& memory = config.options.memory;
    memory.max_note_words = mem["max_note_words"].as<int>(memory.max_note_words);
    memory.max_message_words = mem["max_message_words"].as<int>(memory.max_message_words);
    memory.own_notes_for_notes =
        mem["own_notes_for_notes"].as<int>(memory.own_notes_for_notes);
    memory.own_messages_for_notes =
        mem["own_messages_for_notes"].as<int>(memory.own_messages_for_notes);
    memory.own_notes_for_messages =
        mem["own_notes_for_messages"].as<int>(memory.own_notes_for_messages);
    memory.own_messages_for_messages =
        mem["own_messages_for_messages"].as<int>(memory.own_messages_for_messages);
    memory.show_round_numbers =
        mem["show_round_numbers"].as<bool>(memory.show_round_numbers);
  }

  const ResultsSet results = run_tournament(config);
  int agreed = 0;
  int aborted = 0;
  for (const RunOutcome& outcome : results.outcomes) {
    if (outcome.metrics.hard_agreement) ++agreed;
    if (outcome.metrics.status == RunStatus::kAborted) ++aborted;
  }
  std::cout << results.outcomes.size() << " runs, " << agreed << " hard agreements, "
            << aborted << " aborted";
  if (config.results_path) std::cout << " -> " << config.results_path->string();
  std::cout << "\n";
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& group_by,
               const std::optional<std::string>& csv_path,
               const std::optional<std::string>& runs_csv_path, bool count_aborted) {
  const std::vector<RunOutcome> outcomes = load_results_file(results_path);
  const std::vector<std::string> keys = split_csv(group_by);
  const auto summaries = aggregate(outcomes, keys, count_aborted);

  for (const BatchSummary& summary : summaries) {
    std::cout << "--";
    for (const auto& [key, value] : summary.group) {
      std::cout << " " << key << "=" << value;
    }
    if (summary.group.empty()) std::cout << " all";
    std::cout << "\n";
    std::cout << "  runs=" << summary.runs << " aborted=" << summary.aborted
              << " soft=" << summary.soft_rate << " hard=" << summary.hard_rate << "\n";
    std::cout << "  U=" << summary.utility.mean << "+/-" << summary.utility.std_error
              << " U_hat=" << summary.utility_on_agreement.mean << "+/-"
              << summary.utility_on_agreement.std_error
              << " (n=" << summary.utility_on_agreement.n << ")\n";
    std::cout << "  internal=" << summary.internal_faithfulness.mean
              << " external=" << summary.external_faithfulness.mean
              << " note_instr=" << summary.note_instruct.mean
              << " msg_instr=" << summary.message_instruct.mean
              << " format_instr=" << summary.format_instruct.mean
              << " rounds=" << summary.rounds.mean << "\n";
  }
  if (csv_path) {
    std::ofstream out(*csv_path);
    if (!out) throw Error("cannot open '" + *csv_path + "'");
    out << summaries_to_csv(summaries);
    std::cout << "summary csv -> " << *csv_path << "\n";
  }
  if (runs_csv_path) {
    std::ofstream out(*runs_csv_path);
    if (!out) throw Error("cannot open '" + *runs_csv_path + "'");
    out << outcomes_to_csv(outcomes);
    std::cout << "per-run csv -> " << *runs_csv_path << "\n";
  }
  return 0;
}

int cmd_score(const GameArgs& game_args, const std::optional<std::string>& frontier_path) {
  const Game game = load_game(game_args);
  const GameClass cls = classify_game(game);
  std::cout << "game: " << game.name() << "\n";
  std::cout << "classification: " << to_string(cls) << "\n";

  bool all_distributive = true;
  for (const Issue& issue : game.issues()) {
    if (issue.type() != IssueType::kDistributive) all_distributive = false;
  }
  if (all_distributive) {
    const OptimalScore score =
        optimal_distributive_score(game.weights(0), game.weights(1));
    std::cout << "per_side_optimum: " << score.per_side_optimum << "\n";
    std::cout << "combined_max: " << score.combined_max << "\n";
  } else {
    std::cout << "per_side_optimum: undefined for games with compatible issues; "
                 "see the frontier\n";
  }

  if (frontier_path) {
    const auto points = brute_force_frontier(game);
    std::ofstream out(*frontier_path);
    if (!out) throw Error("cannot open '" + *frontier_path + "'");
    for (const Issue& issue : game.issues()) out << issue.name() << ",";
    out << "u0,u1,pareto\n";
    for (const FrontierPoint& point : points) {
      for (int i = 0; i < game.issue_count(); ++i) {
        out << game.issue(i).labels(0)[point.label_indices[i]] << ",";
      }
      out << point.utility0 << "," << point.utility1 << ","
          << (point.pareto ? 1 : 0) << "\n";
    }
    std::cout << points.size() << " allocations -> " << *frontier_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured negotiation games: runs, tournaments, and scoring"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Play one negotiation between two agents");
  GameArgs run_game;
  MemoryArgs run_memory;
  add_game_options(run, run_game);
  run_memory.attach(run);
  std::string agent_a;
  std::string agent_b;
  int max_rounds = 10;
  std::uint64_t seed = 0;
  int a_side = 0;
  int starter_model = 0;
  bool no_probe = false;
  std::optional<std::string> transcript_dir;
  std::optional<std::string> run_results;
  run->add_option("--agent-a", agent_a, "Agent spec for model A")->required();
  run->add_option("--agent-b", agent_b, "Agent spec for model B")->required();
  run->add_option("--max-rounds", max_rounds, "Round limit (default 10)");
  run->add_option("--seed", seed, "Run seed");
  run->add_option("--a-side", a_side, "Side played by model A (0 or 1)");
  run->add_option("--starter", starter_model, "Which model opens (0 = A, 1 = B)");
  run->add_flag("--no-probe", no_probe, "Disable theory-of-mind probing");
  PersonaArgs personas;
  run->add_option("--persona-a-internal", personas.a_internal,
                  "Ability text shown to model A about itself");
  run->add_option("--persona-a-external", personas.a_external,
                  "Ability text about model A shown to its opponent at visibility 3");
  run->add_option("--persona-b-internal", personas.b_internal,
                  "Ability text shown to model B about itself");
  run->add_option("--persona-b-external", personas.b_external,
                  "Ability text about model B shown to its opponent at visibility 3");
  std::string fallback_spec;
  run->add_option("--fallback", fallback_spec,
                  "Second-stage extractor: lm:<config.yaml> or synonyms:<rules.yaml>");
  run->add_option("--transcript-dir", transcript_dir, "Directory for the run transcript");
  run->add_option("--results", run_results, "Append the run record to this JSONL file");

  // qualify
  auto* qualify = app.add_subcommand("qualify", "Self-play qualifier for one model");
  std::string qualify_model;
  int qualify_runs = 10;
  std::uint64_t qualify_seed = 0;
  GameArgs qualify_game;
  qualify->add_option("--model", qualify_model, "Agent spec to qualify")->required();
  qualify->add_option("--game", qualify_game.game,
                      "Qualifier game (default builtin:rental:rent)");
  qualify->add_option("--issue", qualify_game.issue_files, "Issue document path");
  qualify->add_option("--issues-dir", qualify_game.issues_dir, "Issue directory");
  qualify->add_option("-n,--runs", qualify_runs, "Number of self-play runs (default 10)");
  qualify->add_option("--seed", qualify_seed, "Base seed");

  // tournament
  auto* tournament = app.add_subcommand("tournament", "Self-play and cross-play batch");
  std::string tournament_config;
  tournament->add_option("--config", tournament_config, "Tournament YAML config")
      ->required();

  // report
  auto* report = app.add_subcommand("report", "Aggregate a results file");
  std::string report_results;
  std::string group_by = "model";
  std::optional<std::string> csv_path;
  std::optional<std::string> runs_csv_path;
  bool count_aborted = false;
  report->add_option("--results", report_results, "Results JSONL file")->required();
  report->add_option("--group-by", group_by,
                     "Comma-separated keys: model,game,game_class,pair,permutation,side");
  report->add_option("--csv", csv_path, "Write the summary table as CSV");
  report->add_option("--runs-csv", runs_csv_path, "Write per-run rows as CSV");
  report->add_flag("--count-aborted", count_aborted,
                   "Count aborted runs as non-agreements instead of dropping them");

  // score
  auto* score = app.add_subcommand("score", "Optimal score and classification");
  GameArgs score_game;
  std::optional<std::string> frontier_path;
  add_game_options(score, score_game);
  score->add_option("--frontier", frontier_path, "Dump the full frontier as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_game, run_memory, agent_a, agent_b, max_rounds, seed, a_side,
                     starter_model, no_probe, personas, fallback_spec, transcript_dir,
                     run_results);
    }
    if (qualify->parsed()) {
      std::optional<GameArgs> game_args;
      if (!qualify_game.game.empty()) game_args = qualify_game;
      return cmd_qualify(game_args, qualify_model, qualify_runs, qualify_seed);
    }
    if (tournament->parsed()) return cmd_tournament(tournament_config);
    if (report->parsed()) {
      return cmd_report(report_results, group_by, csv_path, runs_csv_path, count_aborted);
    }
    if (score->parsed()) return cmd_score(score_game, frontier_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
