#pragma once

#include <string>

#include "parley/game.hpp"

namespace parley {

// Public message text both parties must utter to end a negotiation early.
inline constexpr const char* kAgreementPhrase = "We agree on all issues.";

// True when `message` contains the agreement phrase, case-insensitively and
// ignoring trailing punctuation.
bool contains_agreement_phrase(const std::string& message);

// Who can see what. Level 1: the opponent's title only. Level 2: adds the
// opponent's payoff table. Level 3: adds the opponent's stated ability.
enum class Visibility { kTitleOnly = 1, kTitleAndPayoffs = 2, kTitleAndAbility = 3 };

struct PersonaOptions {
  std::string internal_description;  // prepended to the agent's own role text
  std::string external_description;  // shown to the opponent at visibility 3
};

namespace prompts {

const std::string& rules_block();
std::string note_prompt(int max_note_words);
std::string message_prompt(int max_message_words);
// "Finally, for each of the issues write ..." plus the fenced JSON template.
const std::string& acceptable_offer_format();
// Default theory-of-mind probe; overridable via ProtocolOptions.
const std::string& tom_probe_prompt();

std::string round_banner(int round, int max_rounds);
// Markdown-style table of `side`'s own payoffs for one issue, including its
// importance weight.
std::string payoff_table(const Game& game, int issue_index, int side);
// Game description, role text, rules, own payoff tables, and opponent info
// per the visibility level.
std::string initialization_block(const Game& game, int side, Visibility visibility,
                                 const PersonaOptions& own_persona,
                                 const PersonaOptions& opponent_persona);

}  // namespace prompts

}  // namespace parley
