// Acceptance suite: one spec-level check per criterion, one line of output
// each. Runs entirely offline with scripted agents.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "parley/config.hpp"
#include "parley/error.hpp"
#include "parley/extraction.hpp"
#include "parley/harness.hpp"
#include "parley/metrics.hpp"
#include "parley/scoring.hpp"
#include "parley/scripted_agent.hpp"
#include "test_support.hpp"

using namespace parley;
using parley::testing::add_turn;
using parley::testing::alloc;
using parley::testing::make_state;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw Failure(message);
}

void require_near(double actual, double expected, double tolerance,
                  const std::string& what) {
  if (std::abs(actual - expected) > tolerance) {
    std::ostringstream out;
    out << what << ": got " << actual << ", expected " << expected << " +/- " << tolerance;
    throw Failure(out.str());
  }
}

AgentDescriptor conceder_model(const std::string& id) {
  return scripted_descriptor({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0}, id);
}

AgentDescriptor stubborn_model(const std::string& id) {
  return scripted_descriptor({StrategyFamily::kNeverConcede, 1.0, 1.0, 0.0}, id);
}

double frontier_best_sum(const Game& game) {
  double best = 0.0;
  for (const FrontierPoint& point : brute_force_frontier(game)) {
    best = std::max(best, point.utility0 + point.utility1);
  }
  return best;
}

// --- criteria -------------------------------------------------------------

void criterion_1_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    const auto a = parley::testing::random_weights(rng, k);
    const auto b = parley::testing::random_weights(rng, k);
    const OptimalScore closed = optimal_distributive_score(a, b);
    const Game game = parley::testing::mirrored_game(
        k, 11, std::array<std::vector<double>, 2>{a, b});
    const double frontier = frontier_best_sum(game) / 2.0;
    require_near(closed.per_side_optimum, frontier, 1e-9, "closed form vs frontier");
    require(closed.per_side_optimum >= 0.5 - 1e-12, "lower bound");
    require(closed.per_side_optimum <= 1.0 + 1e-12, "upper bound");
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  require(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 5,
          "200 oracle comparisons must finish within 5 seconds");
}

void criterion_2_paper_bounds() {
  const OptimalScore top = optimal_distributive_score(std::vector<double>{0.0, 1.0},
                                                      std::vector<double>{1.0, 0.0});
  require(top.per_side_optimum == 1.0, "exact misalignment must reach 1.0");
  for (const auto& weights :
       {std::vector<double>{1.0}, std::vector<double>{0.5, 0.5},
        std::vector<double>{0.2, 0.3, 0.5}}) {
    const OptimalScore tie = optimal_distributive_score(weights, weights);
    require(tie.per_side_optimum == 0.5, "identical preferences must sit at exactly 0.5");
  }
}

void criterion_3_zero_sum() {
  const Game rental = parley::testing::rent_only_game();
  const Issue& rent = rental.issue(0);
  for (const std::string& label : rent.labels(0)) {
    Allocation choice;
    choice.choices["rent"] = label;
    const double total = rental.normalized_utility(0, choice).value +
                         rental.normalized_utility(1, choice).value;
    require_near(total, 1.0, 1e-9, "U0+U1 at " + label);
  }

  // Debiased scripted self-play batch: every agreed run splits the pie, so
  // the mean U_hat is exactly one half.
  TournamentConfig config;
  config.models = {conceder_model("alpha")};
  config.games = {{"rental", rental}};
  config.runs_per_cell = 2;
  config.require_qualifier = false;
  const ResultsSet results = run_tournament(config);
  const auto summaries = aggregate(results.outcomes, {"model"});
  require(summaries.size() == 1, "one self-play group");
  require(summaries.front().utility_on_agreement.n > 0, "agreed runs present");
  require(summaries.front().utility_on_agreement.mean == 0.5,
          "mean U_hat must equal 0.5 exactly");
}

void criterion_4_scripted_convergence() {
  const Game rental = parley::testing::rent_only_game();
  const AgentDescriptor conceder = conceder_model("conceder");
  int agreements = 0;
  for (const Permutation& permutation : debias_permutations()) {
    const RunOutcome outcome = execute_run(rental, conceder, conceder, permutation, 0, {},
                                           "c4-" + permutation.label());
    require(outcome.metrics.hard_agreement, "permutation must end in hard agreement");
    require(outcome.metrics.agreed_allocation.has_value(), "agreed allocation recorded");
    require(outcome.metrics.agreed_allocation->choices.at("rent") == "$1000",
            "agreement must land on $1000");
    ++agreements;
  }
  require(agreements == 4, "all four debias permutations agree");

  const AgentDescriptor wall = stubborn_model("wall");
  const RunOutcome outcome =
      execute_run(rental, wall, wall, Permutation{0, 0}, 0, {}, "c4-wall");
  require(outcome.metrics.status == RunStatus::kNoAgreement, "stonewall times out");
  require(outcome.metrics.rounds_used == 10, "timeout at round 10");
  require(outcome.metrics.utility[0] == 0.0 && outcome.metrics.utility[1] == 0.0,
          "no agreement pays zero");
}

void criterion_5_compatible_discovery() {
  const Game game = parley::testing::duration_only_game();
  const AgentDescriptor greedy =
      scripted_descriptor({StrategyFamily::kGreedyCompatibleMix, 0.5, 1.0, 0.0}, "greedy");
  const RunOutcome outcome =
      execute_run(game, greedy, greedy, Permutation{0, 0}, 0, {}, "c5-greedy");
  require(outcome.metrics.hard_agreement, "greedy agents must agree");
  require(outcome.metrics.agreed_allocation->choices.at("duration") == "36 months",
          "agreement at the shared maximum");
  require(outcome.metrics.utility_on_agreement.has_value(), "U_hat present");
  require_near((*outcome.metrics.utility_on_agreement)[0], 1.0, 1e-12, "U_hat side 0");
  require_near((*outcome.metrics.utility_on_agreement)[1], 1.0, 1e-12, "U_hat side 1");
}

void criterion_6_completion_matrix() {
  const Game game = parley::testing::rent_only_game();
  const std::string agree = std::string("done. ") + kAgreementPhrase;

  {
    NegotiationState state = make_state(game);
    add_turn(state, {.note_offers = alloc({{"rent", "$1000"}}),
                     .message_offers = alloc({{"rent", "$1000"}}),
                     .message_text = agree});
    add_turn(state, {.note_offers = alloc({{"rent", "$1000"}}),
                     .message_offers = alloc({{"rent", "$1000"}}),
                     .message_text = agree});
    require(check_completion(state, 10) == RunStatus::kHardAgreement,
            "phrase + aligned notes => hard agreement");
  }
  {
    NegotiationState state = make_state(game);
    add_turn(state, {.note_offers = alloc({{"rent", "$1100"}}), .message_text = agree});
    add_turn(state, {.note_offers = alloc({{"rent", "$1000"}}), .message_text = agree});
    require(check_completion(state, 10) == RunStatus::kInProgress,
            "phrase without alignment stays in progress");
  }
  {
    NegotiationState state = make_state(game);
    add_turn(state, {.note_offers = alloc({{"rent", "$1000"}})});
    add_turn(state, {.note_offers = alloc({{"rent", "$1000"}})});
    require(detect_soft_agreement(state).has_value(), "aligned notes are soft");
    require(check_completion(state, 10) == RunStatus::kInProgress,
            "soft without the phrase is not hard");
  }
  {
    NegotiationState state = make_state(game, 0, 10);
    for (int round = 0; round < 10; ++round) {
      add_turn(state, {.note_offers = alloc({{"rent", "$1500"}})});
      add_turn(state, {.note_offers = alloc({{"rent", "$500"}})});
    }
    require(state.current_round() == 11, "cursor after the last round");
    require(check_completion(state, 10) == RunStatus::kNoAgreement,
            "round 11 => no agreement");
  }
}

void criterion_7_faithfulness_sensitivity() {
  const Game game = parley::testing::rent_only_game();
  {
    // Golden transcript: four clean landlord opportunities, one injected
    // violation in round 3.
    NegotiationState state = make_state(game);
    const char* stated[] = {"$1300", "$1200", "$1100", "$1000"};
    const char* offered[] = {"$1300", "$1200", "$1000", "$1000"};
    for (int round = 0; round < 4; ++round) {
      add_turn(state, {.note_offers = alloc({{"rent", stated[round]}}),
                       .message_offers = alloc({{"rent", offered[round]}})});
      add_turn(state, {.note_offers = alloc({{"rent", "$500"}}),
                       .message_offers = alloc({{"rent", "$500"}})});
    }
    require_near(internal_faithfulness(state, 0), 0.75, 1e-12,
                 "1 violation / 4 opportunities");
  }
  {
    NegotiationState state = make_state(game);
    for (const char* label : {"$1300", "$1200", "$1100", "$1000"}) {
      add_turn(state, {.note_offers = alloc({{"rent", label}}),
                       .message_offers = alloc({{"rent", label}})});
      add_turn(state, {.note_offers = alloc({{"rent", "$500"}}),
                       .message_offers = alloc({{"rent", "$500"}})});
    }
    require_near(internal_faithfulness(state, 0), 1.0, 1e-12, "clean transcript");
  }
  {
    // External: boundary equality is faithful; paying beyond the estimate is
    // not.
    NegotiationState boundary = make_state(game);
    add_turn(boundary, {.note_offers = alloc({{"rent", "$1100"}}),
                        .tom_offers = alloc({{"rent", "$1100"}}),
                        .message_offers = alloc({{"rent", "$1100"}})});
    auto score = external_faithfulness(boundary, 0);
    require(score.has_value() && *score == 1.0, "boundary equality is faithful");

    NegotiationState overpay = make_state(game);
    add_turn(overpay, {.note_offers = alloc({{"rent", "$1100"}}),
                       .tom_offers = alloc({{"rent", "$1100"}}),
                       .message_offers = alloc({{"rent", "$900"}})});
    score = external_faithfulness(overpay, 0);
    require(score.has_value() && *score == 0.0, "overshooting the estimate violates");
  }
}

void criterion_8_extraction() {
  const Game rental = parley::testing::rent_only_game();
  {
    const ExtractionResult result = extract_note_offers(
        "Notes.\n```json{\n    \"rent\": \"$1200\"\n}```", rental, 0);
    require(result.method == ExtractionMethod::kRegex, "fenced JSON parses via regex");
    require(result.offers.find("rent") != nullptr &&
                *result.offers.find("rent") == "$1200",
            "fenced JSON resolves the label");
  }
  {
    // A full scripted run keeps format instruct at 1.0 on both sides.
    const RunOutcome outcome = execute_run(rental, conceder_model("a"),
                                           conceder_model("b"), Permutation{0, 0}, 0, {},
                                           "c8-clean");
    require(outcome.metrics.instruction[0].format_instruct == 1.0 &&
                outcome.metrics.instruction[1].format_instruct == 1.0,
            "well-formed notes keep format instruct at 1.0");
  }
  {
    const Game pair = builtin::rental_game({"rent", "duration"});
    // The malformed note shape seen in degraded transcripts.
    const std::string note =
        "Acceptable offer:\n\n{\n\"rent\": $1,425,\n\"duration\": 32 months\n}";
    const ExtractionResult result = extract_note_offers(note, pair, 0);
    require(result.method == ExtractionMethod::kFallback, "malformed note needs fallback");

    NegotiationState state = make_state(pair);
    add_turn(state, {.note_offers = result.offers, .note_method = result.method});
    const InstructionMetrics metrics = instruction_metrics(state, 0, MemoryConfig{});
    require(metrics.format_instruct == 0.0, "fallback notes decrement format instruct");
  }
  {
    const Game fuzz_game =
        builtin::rental_game({"rent", "duration", "deposit", "subletting"});
    std::mt19937 rng(31);
    const std::vector<std::string> fragments{
        "rent",  "$1100", "$1,425", "32 months", "36 months", "no",    "subletting",
        "deposit", "$2500", "$0",   "```json{",  "}```",      "10",    "1500",
        "\"rent\":", ":",  "offer", "we agree",  "9 days",    "$750"};
    for (int trial = 0; trial < 150; ++trial) {
      std::string text;
      for (int i = 0; i < 1 + static_cast<int>(rng() % 10); ++i) {
        text += fragments[rng() % fragments.size()];
        text += (rng() % 4 == 0) ? "\n" : " ";
      }
      for (const ExtractionResult& result :
           {extract_note_offers(text, fuzz_game, 0),
            extract_message_offers(text, fuzz_game, 1)}) {
        for (const auto& [issue_name, label] : result.offers.choices) {
          auto idx = fuzz_game.issue_index(issue_name);
          require(idx.has_value(), "extracted issue exists");
          const auto labels = fuzz_game.issue(*idx).labels(0);
          require(std::find(labels.begin(), labels.end(), label) != labels.end(),
                  "extracted label '" + label + "' must be a table value");
        }
      }
    }
  }
}

void criterion_9_instruction_metrics() {
  const Game game = parley::testing::rent_only_game();
  NegotiationState state = make_state(game);
  std::ostringstream seventy;
  for (int i = 0; i < 70; ++i) seventy << "word" << i << " ";
  add_turn(state, {.note_offers = alloc({{"rent", "$1000"}}),
                   .message_text = seventy.str()});
  add_turn(state, {.note_offers = alloc({{"rent", "$900"}}),
                   .message_text = "short and sweet"});
  const InstructionMetrics side0 = instruction_metrics(state, 0, MemoryConfig{});
  require(side0.message_instruct == 0.0, "70 words over a 64-word limit violates");
  require(side0.note_instruct == 1.0, "short notes pass");
  const InstructionMetrics side1 = instruction_metrics(state, 1, MemoryConfig{});
  require(side1.message_instruct == 1.0, "15-word message passes");
}

void criterion_10_debias_and_tournament_arithmetic() {
  const auto permutations = debias_permutations();
  std::set<std::pair<int, int>> seen;
  for (const Permutation& permutation : permutations) {
    seen.insert({permutation.model_a_side, permutation.starter_model});
  }
  require(seen.size() == 4, "exactly 4 distinct permutations");

  TournamentConfig config;
  config.models = {conceder_model("alpha"), conceder_model("beta")};
  config.games = {{"rental", parley::testing::rent_only_game()}};
  config.runs_per_cell = 1;
  config.require_qualifier = false;
  const ResultsSet results = run_tournament(config);
  require(results.outcomes.size() == 12, "2 models x 1 game x 1 seed => 12 runs");
  std::set<std::pair<std::string, std::string>> cells;
  for (const RunOutcome& outcome : results.outcomes) {
    cells.insert({outcome.model_a, outcome.model_b});
  }
  require(cells.size() == 3, "2 self-play cells + 1 cross-play cell");

  auto shuffled = results.outcomes;
  std::mt19937 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto original = aggregate(results.outcomes, {"model"});
  const auto reordered = aggregate(shuffled, {"model"});
  require(original.size() == reordered.size(), "same group count after shuffling");
  for (std::size_t i = 0; i < original.size(); ++i) {
    require(original[i].group == reordered[i].group, "group keys stable");
    require(original[i].utility.mean == reordered[i].utility.mean,
            "means identical after shuffling");
  }
}

void criterion_11_qualifier_gate() {
  const Game rental = parley::testing::rent_only_game();
  const QualifierReport pass = run_qualifier(conceder_model("alpha"), rental, 10);
  require(pass.passed, "conceder qualifies");
  require(pass.hard_agreements == 10, "conceder agrees 10/10");
  const QualifierReport fail = run_qualifier(stubborn_model("wall"), rental, 10);
  require(!fail.passed, "never_concede is rejected");
  require(fail.hard_agreements == 0, "never_concede agrees 0/10");
}

void criterion_12_config_round_trip() {
  const std::string* documents[] = {
      &builtin::rent_issue_text(), &builtin::duration_issue_text(),
      &builtin::deposit_issue_text(), &builtin::subletting_issue_text()};
  for (const std::string* text : documents) {
    const Issue issue = parse_issue_config(*text);
    const Issue reparsed = parse_issue_config(serialize_issue(issue));
    require(issue == reparsed, "issue '" + issue.name() + "' round-trips");
  }
  const Game game = builtin::rental_game({"rent", "duration", "deposit", "subletting"});
  const Game reparsed = parse_game_config(serialize_game(game), {});
  require(game == reparsed, "game document round-trips");
  require(game.issue_count() == 4, "all four issues attach to the rental game");
}

void criterion_13_determinism() {
  namespace fs = std::filesystem;
  const fs::path first = fs::temp_directory_path() / "parley_acc_results_a.jsonl";
  const fs::path second = fs::temp_directory_path() / "parley_acc_results_b.jsonl";
  fs::remove(first);
  fs::remove(second);

  auto config_for = [&](const fs::path& path) {
    TournamentConfig config;
    config.models = {conceder_model("alpha"), conceder_model("beta")};
    config.games = {{"rental", parley::testing::rent_only_game()},
                    {"lease", parley::testing::duration_only_game()}};
    config.runs_per_cell = 2;
    config.require_qualifier = false;
    config.results_path = path;
    config.options.workers = 4;
    return config;
  };
  run_tournament(config_for(first));
  run_tournament(config_for(second));

  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const std::string bytes_a = slurp(first);
  require(!bytes_a.empty(), "results file written");
  require(bytes_a == slurp(second), "byte-identical results across executions");
  fs::remove(first);
  fs::remove(second);
}

}  // namespace

int main() {
  const auto suite_start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"1 optimal-score oracle equivalence", criterion_1_oracle_equivalence},
      {"2 closed-form bound cases", criterion_2_paper_bounds},
      {"3 zero-sum invariant and half-split self-play", criterion_3_zero_sum},
      {"4 scripted convergence and stonewall timeout", criterion_4_scripted_convergence},
      {"5 compatible-issue discovery", criterion_5_compatible_discovery},
      {"6 completion-criteria matrix", criterion_6_completion_matrix},
      {"7 faithfulness sensitivity", criterion_7_faithfulness_sensitivity},
      {"8 two-stage extraction and label soundness", criterion_8_extraction},
      {"9 instruction metrics", criterion_9_instruction_metrics},
      {"10 debias and tournament arithmetic", criterion_10_debias_and_tournament_arithmetic},
      {"11 qualifier gate", criterion_11_qualifier_gate},
      {"12 config round-trip", criterion_12_config_round_trip},
      {"13 tournament determinism", criterion_13_determinism},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    try {
      run();
      std::printf("[PASS] criterion %s\n", name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] criterion %s: %s\n", name.c_str(), e.what());
    }
  }

  const auto elapsed = std::chrono::steady_clock::now() - suite_start;
  const double seconds =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() / 1000.0;
  if (seconds >= 60.0) {
    ++failures;
    std::printf("[FAIL] suite runtime %.1fs exceeds the 60s budget\n", seconds);
  } else {
    std::printf("[PASS] suite runtime %.1fs within the 60s budget\n", seconds);
  }
  return failures;
}
