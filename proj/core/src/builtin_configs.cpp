#include "parley/config.hpp"
#include "parley/error.hpp"

namespace parley::builtin {
namespace {

// Stock documents, identical to the files shipped under configs/.

const std::string kRentalGame = R"yaml(name: generic-rental-agreement
description: A landlord and a prospective tenant are negotiating a rental agreement.
sides:
  - You are an advisor representing the best interests of the landlord. Your main goal is to negotiate the best possible agreement for the landlord based on the information in the payoff tables. The numbers in the payoff tables show how valuable each outcome is to you. You can trust that the payoffs assigned to the different options in your table are accurate.
  - You are an advisor representing the best interests of the tenant. Your main goal is to negotiate the best possible agreement for the tenant based on the information in the payoff tables. The numbers in the payoff tables show how valuable each outcome is to you. You can trust that the payoffs assigned to the different options in your table are accurate.
parties:
  - Landlord
  - Tenant
)yaml";

const std::string kRentIssue = R"yaml(name: rent
issue_type: distributive
descriptions:
  - You have to negotiate the monthly rent amount.
  - You have to negotiate the monthly rent amount.
payoffs:
  - [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
  - [10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0]
payoff_labels:
  - ["$500", "$600", "$700", "$800","$900", "$1000", "$1100", "$1200", "$1300", "$1400", "$1500"]
  - ["$500", "$600", "$700", "$800","$900", "$1000", "$1100", "$1200", "$1300", "$1400", "$1500"]
)yaml";

const std::string kDurationIssue = R"yaml(name: duration
issue_type: compatible
descriptions:
  - You have to negotiation the duration of the rental agreement.
  - You have to negotiation the duration of the rental agreement.
payoffs:
  - [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
  - [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
payoff_labels:
  - ["6 months", "9 months", "12 months", "15 months", "18 months", "21 months", "24 months", "27 months", "30 months", "33 months", "36 months"]
  - ["6 months", "9 months", "12 months", "15 months", "18 months", "21 months", "24 months", "27 months", "30 months", "33 months", "36 months"]
)yaml";

const std::string kDepositIssue = R"yaml(name: deposit
issue_type: distributive
descriptions:
  - You have to negotiate the security deposit amount
  - You have to negotiate the security deposit amount
payoffs:
  - [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
  - [10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0]
payoff_labels:
  - ["$0", "$250", "$500", "$750","$1000", "$1250", "$1500", "$1750", "$2000", "$2250", "$2500"]
  - ["$0", "$250", "$500", "$750","$1000", "$1250", "$1500", "$1750", "$2000", "$2250", "$2500"]
)yaml";

const std::string kSublettingIssue = R"yaml(name: subletting
issue_type: distributive
descriptions:
  - You have to negotiate how many days a year the apartment may be sublet each year.
  - You have to negotiate how many days a year the apartment may be sublet each year.
payoffs:
  - [10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0]
  - [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
payoff_labels:
  - ["0 days", "1 day", "2 days", "3 days", "4 days", "5 days", "6 days", "7 days", "8 days", "9 days", "10 days"]
  - ["0 days", "1 day", "2 days", "3 days", "4 days", "5 days", "6 days", "7 days", "8 days", "9 days", "10 days"]
)yaml";

}  // namespace

const std::string& rental_game_text() { return kRentalGame; }
const std::string& rent_issue_text() { return kRentIssue; }
const std::string& duration_issue_text() { return kDurationIssue; }
const std::string& deposit_issue_text() { return kDepositIssue; }
const std::string& subletting_issue_text() { return kSublettingIssue; }

Issue rent_issue() { return parse_issue_config(kRentIssue); }
Issue duration_issue() { return parse_issue_config(kDurationIssue); }
Issue deposit_issue() { return parse_issue_config(kDepositIssue); }
Issue subletting_issue() { return parse_issue_config(kSublettingIssue); }

Game rental_game(const std::vector<std::string>& issue_names,
                 std::optional<std::array<std::vector<double>, 2>> weights) {
  std::vector<Issue> issues;
  for (const std::string& name : issue_names) {
    if (name == "rent") {
      issues.push_back(rent_issue());
    } else if (name == "duration") {
      issues.push_back(duration_issue());
    } else if (name == "deposit") {
      issues.push_back(deposit_issue());
    } else if (name == "subletting") {
      issues.push_back(subletting_issue());
    } else {
      throw ConfigError("no built-in issue named '" + name + "'");
    }
  }
  std::vector<Issue> all = std::move(issues);
  std::string text = kRentalGame;
  Game game = parse_game_config(text, std::move(all), std::move(weights));
  return game;
}

}  // namespace parley::builtin
