#include <doctest.h>

#include <random>

#include "parley/extraction.hpp"
#include "test_support.hpp"

using namespace parley;

namespace {

// Counts invocations so tests can assert the fallback fired exactly once.
class CountingFallback : public FallbackExtractor {
 public:
  std::map<std::string, std::string> extract(
      const std::string&, const Game&, int,
      std::span<const std::string> unresolved) override {
    ++calls;
    last_unresolved.assign(unresolved.begin(), unresolved.end());
    return replies;
  }
  std::string name() const override { return "counting"; }

  int calls = 0;
  std::vector<std::string> last_unresolved;
  std::map<std::string, std::string> replies;
};

}  // namespace

TEST_CASE("fenced JSON notes resolve through the deterministic stage") {
  const Game game = parley::testing::rent_only_game();
  const std::string note =
      "Aim high this round.\nAcceptable offers:\n```json{\n    \"rent\": \"$1200\"\n}```";
  const ExtractionResult result = extract_note_offers(note, game, 0);
  CHECK(result.method == ExtractionMethod::kRegex);
  CHECK(result.unresolved.empty());
  REQUIRE(result.offers.find("rent") != nullptr);
  CHECK(*result.offers.find("rent") == "$1200");
}

TEST_CASE("unquoted JSON values rout to the fallback stage") {
  const Game game = builtin::rental_game({"rent", "duration"});
  // The shape that shows up in degenerate model notes: bare $ values.
  const std::string note =
      "Mental note:\nAcceptable offer:\n\n{\n\"rent\": $1,425,\n\"duration\": 32 months\n}";
  CountingFallback fallback;
  const ExtractionResult result = extract_note_offers(note, game, 0, &fallback);
  CHECK(result.method == ExtractionMethod::kFallback);
  CHECK(fallback.calls == 1);
  CHECK(result.offers.empty());
  CHECK(result.unresolved.size() == 2);
}

TEST_CASE("empty notes leave every issue unresolved") {
  const Game game = parley::testing::rent_only_game();
  const ExtractionResult result = extract_note_offers("", game, 0);
  CHECK(result.offers.empty());
  CHECK(result.method == ExtractionMethod::kFallback);
  REQUIRE(result.unresolved.size() == 1);
  CHECK(result.unresolved[0] == "rent");
}

TEST_CASE("a partial JSON block still invokes the fallback for the rest") {
  const Game game = builtin::rental_game({"rent", "duration"});
  const std::string note = "```json{\"rent\": \"$1100\"}```";
  CountingFallback fallback;
  fallback.replies = {{"duration", "36 months"}};
  const ExtractionResult result = extract_note_offers(note, game, 0, &fallback);
  CHECK(result.method == ExtractionMethod::kFallback);
  CHECK(fallback.calls == 1);
  CHECK(fallback.last_unresolved == std::vector<std::string>{"duration"});
  CHECK(*result.offers.find("rent") == "$1100");
  CHECK(*result.offers.find("duration") == "36 months");
  CHECK(result.unresolved.empty());
}

TEST_CASE("fallback guesses outside the table are dropped") {
  const Game game = parley::testing::rent_only_game();
  CountingFallback fallback;
  fallback.replies = {{"rent", "$1337"}};
  const ExtractionResult result = extract_note_offers("no block here", game, 0, &fallback);
  CHECK(result.offers.empty());
  CHECK(result.unresolved == std::vector<std::string>{"rent"});
}

TEST_CASE("label canonicalization") {
  const Issue rent = builtin::rent_issue();
  const Issue duration = builtin::duration_issue();
  SUBCASE("exact match") {
    CHECK(canonicalize_label("$1200", rent, 0) == "$1200");
    CHECK(canonicalize_label("  $1200  ", rent, 0) == "$1200");
  }
  SUBCASE("numeric normalization strips currency and separators") {
    CHECK(canonicalize_label("$1,000", rent, 0) == "$1000");
    CHECK(canonicalize_label("1300 dollars", rent, 0) == "$1300");
    CHECK(canonicalize_label("36 Months", duration, 1) == "36 months");
  }
  SUBCASE("off-table numbers never round to the grid") {
    CHECK_FALSE(canonicalize_label("1,425 dollars", rent, 0).has_value());
    CHECK_FALSE(canonicalize_label("32 months", duration, 0).has_value());
    CHECK_FALSE(canonicalize_label("no subletting", duration, 0).has_value());
  }
}

TEST_CASE("message offers bind values to the issue named nearby") {
  const Game game = parley::testing::two_issue_game();
  const ExtractionResult result = extract_message_offers(
      "I propose rent of $1100 with a $500 deposit", game, 0);
  REQUIRE(result.offers.find("rent") != nullptr);
  REQUIRE(result.offers.find("deposit") != nullptr);
  CHECK(*result.offers.find("rent") == "$1100");
  CHECK(*result.offers.find("deposit") == "$500");
}

TEST_CASE("the most recent mention of an issue wins") {
  const Game game = parley::testing::rent_only_game();
  const ExtractionResult result = extract_message_offers(
      "I could do $1300 ... on reflection, fine, $1200", game, 0);
  REQUIRE(result.offers.find("rent") != nullptr);
  CHECK(*result.offers.find("rent") == "$1200");
}

TEST_CASE("free-form phrasing falls through to the synonym fallback") {
  const Game game = builtin::rental_game({"subletting"});
  SynonymFallback fallback({{"no subletting", "subletting", "0 days"}});
  const ExtractionResult result =
      extract_message_offers("There will be no subletting at all.", game, 0, &fallback);
  CHECK(result.method == ExtractionMethod::kFallback);
  REQUIRE(result.offers.find("subletting") != nullptr);
  CHECK(*result.offers.find("subletting") == "0 days");
}

TEST_CASE("verbatim label text binds without the issue name") {
  const Game game = builtin::rental_game({"rent", "duration"});
  const ExtractionResult result =
      extract_message_offers("Let us settle on 36 months.", game, 0);
  REQUIRE(result.offers.find("duration") != nullptr);
  CHECK(*result.offers.find("duration") == "36 months");
  CHECK(result.offers.find("rent") == nullptr);
}

TEST_CASE("issue names embedded in words do not bind mentions") {
  const Game game = parley::testing::two_issue_game();
  // "different" contains "rent"; the $500 must not bind to rent through it.
  const ExtractionResult result =
      extract_message_offers("A different deposit: $500.", game, 0);
  CHECK(result.offers.find("rent") == nullptr);
  REQUIRE(result.offers.find("deposit") != nullptr);
}

TEST_CASE("extracted labels always come from the payoff tables") {
  const Game game = builtin::rental_game({"rent", "duration", "deposit", "subletting"});
  std::mt19937 rng(99);
  const std::vector<std::string> fragments{
      "rent",        "$1100",    "$1,425",  "32 months", "36 months", "no",
      "subletting",  "deposit",  "$2500",   "$0",        "maybe",     "```json{",
      "}```",        "\"rent\":", "duration", "9 days",   "7 days",    ":",
      "$750",        "offer",    "we",      "agree",     "10",        "1500",
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int pieces = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < pieces; ++i) {
      text += fragments[rng() % fragments.size()];
      text += (rng() % 4 == 0) ? "\n" : " ";
    }
    for (const ExtractionResult& result :
         {extract_note_offers(text, game, 0), extract_message_offers(text, game, 1)}) {
      for (const auto& [issue_name, label] : result.offers.choices) {
        auto idx = game.issue_index(issue_name);
        REQUIRE(idx.has_value());
        const auto labels = game.issue(*idx).labels(0);
        CHECK(std::find(labels.begin(), labels.end(), label) != labels.end());
      }
    }
  }
}

TEST_CASE("stage one is a pure function of text and game") {
  const Game game = parley::testing::two_issue_game();
  const std::string text = "rent $1100, deposit $750, then rent $1200";
  const ExtractionResult first = extract_message_offers(text, game, 0);
  const ExtractionResult second = extract_message_offers(text, game, 0);
  CHECK(first.offers == second.offers);
  CHECK(first.unresolved == second.unresolved);
}
