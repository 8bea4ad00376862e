#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "parley/metrics.hpp"
#include "parley/scoring.hpp"
#include "parley/scripted_agent.hpp"
#include "parley/transcript.hpp"

namespace parley {

// One of the four side-assignment x starting-position arrangements averaged
// to cancel role and anchoring bias.
struct Permutation {
  int model_a_side = 0;   // side played by model A
  int starter_model = 0;  // 0 = model A opens, 1 = model B

  int starter_side() const {
    return starter_model == 0 ? model_a_side : 1 - model_a_side;
  }
  std::string label() const;
  bool operator==(const Permutation&) const = default;
};

std::array<Permutation, 4> debias_permutations();

// How to construct one participant. `make_backend` is called once per run so
// self-play pits independent instances against each other.
struct AgentDescriptor {
  std::string id;
  std::function<std::shared_ptr<AgentBackend>()> make_backend;
  PersonaOptions persona{};
  Visibility visibility = Visibility::kTitleOnly;
};

AgentDescriptor scripted_descriptor(const ScriptedStrategy& strategy, std::string id);
// Compact specs: "scripted:time_conceder,u_min=0.5,e=1,margin=0[,id=...]",
// "scripted:never_concede", "scripted:greedy", or "lm:<config.yaml>[,id=...]".
AgentDescriptor parse_agent_spec(const std::string& spec);

struct HarnessOptions {
  MemoryConfig memory{};
  int max_rounds = 10;
  bool tom_probing = true;
  int backend_attempts = 3;
  FallbackExtractor* fallback = nullptr;  // borrowed
  std::uint64_t base_seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> transcript_dir;
};

struct RunOutcome {
  std::string run_id;
  std::string game_name;
  GameClass game_class = GameClass::kCompetitive;
  std::string model_a;
  std::string model_b;
  Permutation permutation{};
  std::uint64_t seed = 0;
  std::array<std::string, 2> model_by_side{};
  RunMetrics metrics{};
};

std::string outcome_to_json_line(const RunOutcome& outcome);
RunOutcome outcome_from_json_line(const std::string& line);
std::vector<RunOutcome> load_results_file(const std::filesystem::path& path);

RunOutcome execute_run(const Game& game, const AgentDescriptor& model_a,
                       const AgentDescriptor& model_b, const Permutation& permutation,
                       std::uint64_t seed, const HarnessOptions& options,
                       std::string run_id);

struct QualifierReport {
  bool passed = false;
  int runs = 0;
  int hard_agreements = 0;
  int aborted = 0;
  std::vector<RunOutcome> outcomes;
};

// Debias-scheduled self-play on a single distributive game; at least one hard
// agreement is required to pass.
QualifierReport run_qualifier(const AgentDescriptor& model, const Game& qualifier_game,
                              int runs = 10, const HarnessOptions& options = {});

struct TournamentGame {
  std::string name;
  Game game;
};

struct TournamentConfig {
  std::vector<AgentDescriptor> models;
  std::vector<TournamentGame> games;
  int runs_per_cell = 1;  // seeds per cell; each seed covers 4 permutations
  HarnessOptions options{};
  bool require_qualifier = true;
  std::optional<Game> qualifier_game;  // default: built-in rent-only rental game
  int qualifier_runs = 10;
  // Append-only results file; reruns skip run_ids already present.
  std::optional<std::filesystem::path> results_path;
};

struct ResultsSet {
  std::vector<RunOutcome> outcomes;  // deterministic schedule order
};

// Self-play and cross-play over every model pair and game. Runs execute in a
// worker pool; results are flushed in schedule order.
ResultsSet run_tournament(const TournamentConfig& config);

struct MetricStats {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

struct BatchSummary {
  std::map<std::string, std::string> group;
  int runs = 0;     // distinct negotiations in the group
  int samples = 0;  // participant samples (2 per self-contained run)
  int aborted = 0;
  double soft_rate = 0.0;
  double hard_rate = 0.0;
  MetricStats utility;
  MetricStats utility_on_agreement;
  MetricStats internal_faithfulness;
  MetricStats external_faithfulness;
  MetricStats note_instruct;
  MetricStats message_instruct;
  MetricStats format_instruct;
  MetricStats rounds;
  std::map<std::string, MetricStats> utility_by_permutation;
};

// Mean and standard error per metric per group. Group keys: model, game,
// game_class, pair, permutation, side. Aborted runs are excluded unless
// `count_aborted_as_failure`, which scores them as non-agreements.
std::vector<BatchSummary> aggregate(std::span<const RunOutcome> outcomes,
                                    const std::vector<std::string>& group_by,
                                    bool count_aborted_as_failure = false);

std::string summaries_to_csv(std::span<const BatchSummary> summaries);
// Per-run export mirroring the summary table columns.
std::string outcomes_to_csv(std::span<const RunOutcome> outcomes);

}  // namespace parley
