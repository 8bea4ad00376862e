#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parley/game.hpp"

namespace parley {

enum class ExtractionMethod { kRegex, kFallback, kNone };

std::string to_string(ExtractionMethod method);

// Offers recovered from one piece of text. `method` is kRegex when the
// deterministic first stage resolved every issue on its own and kFallback
// whenever the fallback stage was required (whether or not one was installed
// or succeeded) — that is the quantity format-instruct counts.
struct ExtractionResult {
  Allocation offers;
  ExtractionMethod method = ExtractionMethod::kNone;
  std::vector<std::string> unresolved;  // issue names without a resolved label
};

// Second-stage extractor invoked when the deterministic stage cannot resolve
// every issue. Implementations must be safe to call from multiple threads.
class FallbackExtractor {
 public:
  virtual ~FallbackExtractor() = default;
  // Maps issue name -> raw label guess for (a subset of) `unresolved_issues`.
  // Guesses are canonicalized by the caller; non-table values are dropped.
  virtual std::map<std::string, std::string> extract(
      const std::string& text, const Game& game, int side,
      std::span<const std::string> unresolved_issues) = 0;
  virtual std::string name() const = 0;
};

// Table-driven fallback: case-insensitive phrase -> (issue, label). Ships for
// tests and offline runs; production runs plug in an LM-backed extractor.
class SynonymFallback : public FallbackExtractor {
 public:
  struct Rule {
    std::string phrase;
    std::string issue;
    std::string label;
  };

  explicit SynonymFallback(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  std::map<std::string, std::string> extract(
      const std::string& text, const Game& game, int side,
      std::span<const std::string> unresolved_issues) override;
  std::string name() const override { return "synonym-table"; }

 private:
  std::vector<Rule> rules_;
};

// Exact label match, else numeric normalization (currency symbols, thousands
// separators, and unit words stripped; parsed numbers compared against the
// numbers in the side's labels). Never rounds to a nearby table value.
std::optional<std::string> canonicalize_label(const std::string& raw,
                                              const Issue& issue, int side);

// Acceptable offers from a note: fenced JSON block first, fallback for
// residual issues.
ExtractionResult extract_note_offers(const std::string& note_text, const Game& game,
                                     int side, FallbackExtractor* fallback = nullptr);

// Free-form offers from a public message: exact label mentions and numeric
// mentions scanned per issue, most recent mention winning.
ExtractionResult extract_message_offers(const std::string& message_text,
                                        const Game& game, int side,
                                        FallbackExtractor* fallback = nullptr);

}  // namespace parley
