#include "parley/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace parley {

bool contains_agreement_phrase(const std::string& message) {
  static const std::string phrase = [] {
    std::string p = kAgreementPhrase;
    while (!p.empty() && std::ispunct(static_cast<unsigned char>(p.back()))) p.pop_back();
    std::transform(p.begin(), p.end(), p.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return p;
  }();
  std::string haystack = message;
  std::transform(haystack.begin(), haystack.end(), haystack.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return haystack.find(phrase) != std::string::npos;
}

namespace prompts {
namespace {

std::string substitute_max_len(std::string text, int max_words) {
  const std::string placeholder = "{max_len}";
  const std::size_t pos = text.find(placeholder);
  if (pos != std::string::npos) {
    text.replace(pos, placeholder.size(), std::to_string(max_words));
  }
  return text;
}

const std::string kRules = R"(Never forget the following negotiation rules:
- Your total payoff is the sum of your payoffs on all issues. Higher payoffs are better than lower payoffs.
- A valid agreement occurs only when all issues are decided. Partial agreements result in a total payoff to you of zero.
- You are not allowed to accept any agreement that results in a payoff less than zero.
- You are not allowed to deviate from or innovate with the payoffs listed on the payoff table. In other words, you cannot change your payoffs.
- No side payments are allowed. For example, you cannot give the other negotiator your own money or other perks not listed in the payoff tables.
- You may describe issues and elaborate on them as you see fit. However, you are not allowed to invent additional issues.
- Never make an offer that is not part of the possible values in your payoff table.)";

const std::string kNotePrompt = R"(Use the following strategy to compose a mental note to order your thoughts:
1. Remember the negotiation rules and your payoff tables
2. Reflect on the negotiations transcript so far
3. For all issues, think about strategies to maximize your total payoff
Your note can not exceed {max_len} words.)";

const std::string kMessagePrompt = R"(Your negotiating partner is sitting across from you.
Formulate a response to your negotiating partner using the following strategy:
1. Reflect on the negotiations transcript so far
2. Remember the negotiation rules and your payoff tables
3. Try to further the state of negotiations on at least one issue
Your note can not exceed {max_len} words.)";

const std::string kOfferFormat = R"(Finally, for each of the issues write what you believe to be an acceptable offer.

acceptable offer format:
```json{
    "issue_name_0": "<acceptable offer>",
    "issue_name_1": "<acceptable offer>",
    ...
}```)";

const std::string kTomProbe = R"(Consider the negotiation from your partner's perspective.
For each of the issues write what you believe your negotiating partner would consider an acceptable offer.

acceptable offer format:
```json{
    "issue_name_0": "<acceptable offer>",
    "issue_name_1": "<acceptable offer>",
    ...
}```)";

}  // namespace

const std::string& rules_block() { return kRules; }

std::string note_prompt(int max_note_words) {
  return substitute_max_len(kNotePrompt, max_note_words);
}

std::string message_prompt(int max_message_words) {
  return substitute_max_len(kMessagePrompt, max_message_words);
}

const std::string& acceptable_offer_format() { return kOfferFormat; }

const std::string& tom_probe_prompt() { return kTomProbe; }

std::string round_banner(int round, int max_rounds) {
  std::ostringstream out;
  out << "You are in negotiation round " << round << " of a maximum of " << max_rounds
      << " rounds.";
  return out.str();
}

std::string payoff_table(const Game& game, int issue_index, int side) {
  const Issue& issue = game.issue(issue_index);
  std::ostringstream out;
  out << "Payoff table for issue \"" << issue.name() << "\" (importance weight "
      << game.weight(side, issue_index) << "):\n";
  out << issue.description(side) << "\n";
  out << "| value | payoff |\n";
  out << "| --- | --- |\n";
  for (int i = 0; i < issue.size(); ++i) {
    out << "| " << issue.labels(side)[i] << " | " << issue.payoffs(side)[i] << " |\n";
  }
  return out.str();
}

std::string initialization_block(const Game& game, int side, Visibility visibility,
                                 const PersonaOptions& own_persona,
                                 const PersonaOptions& opponent_persona) {
  std::ostringstream out;
  out << game.description() << "\n\n";
  out << game.side(side) << "\n";
  if (!own_persona.internal_description.empty()) {
    out << own_persona.internal_description << "\n";
  }
  out << "\n" << rules_block() << "\n\n";
  out << "Your payoff tables:\n\n";
  for (int i = 0; i < game.issue_count(); ++i) {
    out << payoff_table(game, i, side) << "\n";
  }
  out << "Your negotiating partner represents the " << game.party(1 - side) << ".";
  if (static_cast<int>(visibility) >= static_cast<int>(Visibility::kTitleAndPayoffs)) {
    out << "\n\nYour negotiating partner's payoff tables:\n\n";
    for (int i = 0; i < game.issue_count(); ++i) {
      out << payoff_table(game, i, 1 - side) << "\n";
    }
  }
  if (visibility == Visibility::kTitleAndAbility &&
      !opponent_persona.external_description.empty()) {
    out << "\n" << opponent_persona.external_description;
  }
  out << "\n";
  return out.str();
}

}  // namespace prompts
}  // namespace parley
