#include <doctest.h>

#include <cmath>
#include <random>

#include "parley/error.hpp"
#include "parley/extraction.hpp"
#include "parley/metrics.hpp"
#include "parley/scripted_agent.hpp"
#include "test_support.hpp"

using namespace parley;

namespace {

AgentView view_for(const Game& game, int side, int round, int max_rounds,
                   const Allocation* opponent_offer = nullptr) {
  AgentView view;
  view.game = &game;
  view.side = side;
  view.round = round;
  view.max_rounds = max_rounds;
  view.opponent_last_offer = opponent_offer;
  return view;
}

std::array<AgentSpec, 2> plain_specs() {
  return {AgentSpec{"a", 0, {}, Visibility::kTitleOnly},
          AgentSpec{"b", 1, {}, Visibility::kTitleOnly}};
}

}  // namespace

TEST_CASE("concession target endpoints and midpoint") {
  ScriptedStrategy linear{StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0};
  CHECK(scripted_target_utility(linear, 1, 10) == doctest::Approx(1.0));
  CHECK(scripted_target_utility(linear, 10, 10) == doctest::Approx(0.5));
  CHECK(scripted_target_utility(linear, 6, 11) == doctest::Approx(0.75));
}

TEST_CASE("concession target rejects degenerate horizons") {
  ScriptedStrategy linear{StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0};
  CHECK_THROWS_AS(scripted_target_utility(linear, 1, 1), ConfigError);
}

TEST_CASE("never_concede holds the ceiling") {
  ScriptedStrategy stubborn{StrategyFamily::kNeverConcede, 0.0, 1.0, 0.0};
  for (int t = 1; t <= 10; ++t) {
    CHECK(scripted_target_utility(stubborn, t, 10) == 1.0);
  }
}

TEST_CASE("concession target is non-increasing for any exponent") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u_min_dist(0.0, 1.0);
  std::uniform_real_distribution<double> e_dist(0.1, 4.0);
  for (int trial = 0; trial < 25; ++trial) {
    ScriptedStrategy strategy{StrategyFamily::kTimeConceder, u_min_dist(rng), e_dist(rng),
                              0.0};
    const int horizon = 2 + static_cast<int>(rng() % 14);
    double previous = 2.0;
    for (int t = 1; t <= horizon; ++t) {
      const double target = scripted_target_utility(strategy, t, horizon);
      CHECK(target <= previous + 1e-12);
      CHECK(target >= strategy.u_min - 1e-12);
      previous = target;
    }
  }
}

TEST_CASE("strategy validation") {
  ScriptedStrategy bad{StrategyFamily::kTimeConceder, 1.5, 1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {StrategyFamily::kTimeConceder, 0.5, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {StrategyFamily::kTimeConceder, 0.5, 1.0, -0.1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("stance picks the least label meeting an on-grid target") {
  // Linear with u_min=0.5 over 6 rounds puts the round-3 target exactly at
  // 0.8, which the rent grid realizes as $1300 (payoff 8).
  const Game game = parley::testing::rent_only_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  const Allocation stance = agent.stance(view_for(game, 0, 3, 6));
  CHECK(stance.choices.at("rent") == "$1300");
}

TEST_CASE("stance quantizes an off-grid target down to the next level") {
  // Round 9 of 10 targets 0.5555..., between the 0.5 and 0.6 utility levels;
  // the stance settles on $1000 so symmetric conceders can actually cross
  // inside the round limit.
  const Game game = parley::testing::rent_only_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  CHECK(agent.stance(view_for(game, 0, 9, 10)).choices.at("rent") == "$1000");
  CHECK(agent.stance(view_for(game, 1, 9, 10)).choices.at("rent") == "$1000");
}

TEST_CASE("opening stance demands the maximum") {
  const Game game = parley::testing::rent_only_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  CHECK(agent.stance(view_for(game, 0, 1, 10)).choices.at("rent") == "$1500");
  CHECK(agent.stance(view_for(game, 1, 1, 10)).choices.at("rent") == "$500");
}

TEST_CASE("an offer matching the target is accepted with the phrase") {
  const Game game = parley::testing::rent_only_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  const Allocation offer = parley::testing::alloc({{"rent", "$1000"}});
  const AgentView view = view_for(game, 0, 10, 10, &offer);
  const ScriptedAgent::Decision decision = agent.decide(view);
  CHECK(decision.accept);
  const std::string message = agent.generate_message({}, view);
  CHECK(message.find("$1000") != std::string::npos);
  CHECK(message.find(kAgreementPhrase) != std::string::npos);
}

TEST_CASE("an offer below the floor is declined") {
  const Game game = parley::testing::rent_only_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  const Allocation offer = parley::testing::alloc({{"rent", "$900"}});
  const AgentView view = view_for(game, 0, 10, 10, &offer);
  CHECK_FALSE(agent.decide(view).accept);
  CHECK(agent.generate_message({}, view).find(kAgreementPhrase) == std::string::npos);
}

TEST_CASE("greedy family pins compatible issues at the shared maximum") {
  const Game game = parley::testing::duration_only_game();
  ScriptedAgent agent({StrategyFamily::kGreedyCompatibleMix, 0.5, 1.0, 0.0});
  CHECK(agent.stance(view_for(game, 0, 1, 10)).choices.at("duration") == "36 months");
  CHECK(agent.stance(view_for(game, 1, 5, 10)).choices.at("duration") == "36 months");
}

TEST_CASE("integrative stances give away the issue the opponent values more") {
  // With weights 0.25/0.75 for self and the mirror estimate for the opponent,
  // meeting the target by conceding the low-weight issue first maximizes the
  // estimated opponent payoff.
  const Game game = parley::testing::integrative_game();
  ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.5, 1.0, 0.0});
  const Allocation stance = agent.stance(view_for(game, 0, 5, 10));
  const double own = game.normalized_utility(0, stance).value;
  const double target = scripted_target_utility(agent.strategy(), 5, 10);
  CHECK(own <= target + 1e-9);
  // Side 0 weights rent at 0.25: rent should be conceded further than deposit.
  const Issue& rent = *game.issues().begin();
  const double rent_share =
      rent.payoff_for(0, stance.choices.at("rent")) / rent.max_payoff(0);
  const Issue& deposit = game.issues()[1];
  const double deposit_share =
      deposit.payoff_for(0, stance.choices.at("deposit")) / deposit.max_payoff(0);
  CHECK(rent_share <= deposit_share);
}

TEST_CASE("scripted notes always parse through the deterministic stage") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const int issues = 1 + static_cast<int>(rng() % 3);
    const int k = 3 + static_cast<int>(rng() % 8);
    const Game game = parley::testing::mirrored_game(issues, k);
    ScriptedAgent agent({StrategyFamily::kTimeConceder, 0.3, 1.0, 0.0});
    const int round = 1 + static_cast<int>(rng() % 10);
    const std::string note = agent.generate_note({}, view_for(game, 0, round, 10));
    const ExtractionResult result = extract_note_offers(note, game, 0);
    CHECK(result.method == ExtractionMethod::kRegex);
    CHECK(result.unresolved.empty());
  }
}

TEST_CASE("symmetric conceders always align, and close when the schedule allows") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u_min_dist(0.0, 0.5);
  std::uniform_real_distribution<double> e_dist(0.5, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int k = 3 + static_cast<int>(rng() % 10);
    const int horizon = 3 + static_cast<int>(rng() % 10);
    ScriptedStrategy strategy{StrategyFamily::kTimeConceder, u_min_dist(rng), e_dist(rng),
                              0.0};
    const Game game = parley::testing::mirrored_game(1, k);

    ProtocolOptions options;
    options.max_rounds = horizon;
    NegotiationState state = run_negotiation(
        std::make_shared<const Game>(game), plain_specs(),
        {std::make_shared<ScriptedAgent>(strategy), std::make_shared<ScriptedAgent>(strategy)},
        MemoryConfig{}, options);

    // The second mover adopts by the final round at the latest, so the
    // stated offers always align.
    CHECK(state.aligned_acceptable_offers().has_value());

    // Hard agreement needs the first mover to see a qualifying offer before
    // the horizon: the penultimate stance level must already sit at or below
    // one half.
    const double grid = k - 1;
    const double penultimate = scripted_target_utility(strategy, horizon - 1, horizon);
    const double stance_level = std::floor(penultimate * grid + 1e-9) / grid;
    if (stance_level <= 0.5 + 1e-12) {
      CHECK(state.status() == RunStatus::kHardAgreement);
    }
  }
}

TEST_CASE("scripted agents are internally and externally clean") {
  const Game game = parley::testing::two_issue_game();
  ScriptedStrategy strategy{StrategyFamily::kTimeConceder, 0.4, 1.2, 0.0};
  NegotiationState state = run_negotiation(
      std::make_shared<const Game>(game), plain_specs(),
      {std::make_shared<ScriptedAgent>(strategy), std::make_shared<ScriptedAgent>(strategy)});
  const RunMetrics metrics = compute_run_metrics(state, MemoryConfig{});
  for (int agent = 0; agent < 2; ++agent) {
    CHECK(metrics.internal_faithfulness[agent] == doctest::Approx(1.0));
    REQUIRE(metrics.external_faithfulness[agent].has_value());
    CHECK(*metrics.external_faithfulness[agent] == doctest::Approx(1.0));
    CHECK(metrics.instruction[agent].format_instruct == doctest::Approx(1.0));
    CHECK(metrics.instruction[agent].note_instruct == doctest::Approx(1.0));
    CHECK(metrics.instruction[agent].message_instruct == doctest::Approx(1.0));
  }
}

TEST_CASE("strategy family names round-trip") {
  for (StrategyFamily family :
       {StrategyFamily::kTimeConceder, StrategyFamily::kNeverConcede,
        StrategyFamily::kGreedyCompatibleMix}) {
    CHECK(strategy_family_from_string(to_string(family)) == family);
  }
  CHECK_THROWS_AS(strategy_family_from_string("bold"), ConfigError);
}
