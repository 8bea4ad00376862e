#include "parley/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

#include <nlohmann/json.hpp>

namespace parley {
namespace {

using nlohmann::json;

std::string lowercase(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// First number in `raw` after dropping currency symbols and thousands
// separators; unit words around the number are ignored.
std::optional<double> parse_number(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (char c : raw) {
    if (c != '$' && c != ',') cleaned.push_back(c);
  }
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(cleaned[i]))) {
      std::size_t end = i;
      while (end < cleaned.size() &&
             (std::isdigit(static_cast<unsigned char>(cleaned[end])) || cleaned[end] == '.')) {
        ++end;
      }
      return std::strtod(cleaned.substr(i, end - i).c_str(), nullptr);
    }
  }
  return std::nullopt;
}

// Balanced {...} block starting at or after `from`, respecting JSON strings.
std::optional<std::string> balanced_brace_block(const std::string& text, std::size_t from) {
  std::size_t start = text.find('{', from);
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

std::optional<int> match_issue_key(const Game& game, const std::string& key) {
  const std::string wanted = lowercase(trim(key));
  for (int i = 0; i < game.issue_count(); ++i) {
    if (lowercase(game.issue(i).name()) == wanted) return i;
  }
  return std::nullopt;
}

// Every start position of `needle` in `haystack` (case-insensitive) with
// non-word characters on both flanks.
std::vector<std::size_t> bounded_occurrences(const std::string& haystack_lower,
                                             const std::string& needle_lower) {
  std::vector<std::size_t> positions;
  if (needle_lower.empty()) return positions;
  std::size_t pos = 0;
  while ((pos = haystack_lower.find(needle_lower, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !word_char(haystack_lower[pos - 1]);
    const std::size_t end = pos + needle_lower.size();
    const bool right_ok = end >= haystack_lower.size() || !word_char(haystack_lower[end]);
    if (left_ok && right_ok) positions.push_back(pos);
    pos += 1;
  }
  return positions;
}

struct Mention {
  std::size_t pos = 0;
  std::string label;
  bool exact = false;  // verbatim label text, not just a matching number
};

// Mentions of issue `i`'s labels in `text`: verbatim label occurrences plus
// free numeric tokens whose value matches a label's number.
std::vector<Mention> label_mentions(const std::string& text, const std::string& text_lower,
                                    const Issue& issue, int side) {
  std::vector<Mention> mentions;
  for (const std::string& label : issue.labels(side)) {
    for (std::size_t pos : bounded_occurrences(text_lower, lowercase(label))) {
      mentions.push_back({pos, label, true});
    }
  }

  std::vector<std::optional<double>> label_numbers;
  for (const std::string& label : issue.labels(side)) {
    label_numbers.push_back(parse_number(label));
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool starts_token =
        (std::isdigit(static_cast<unsigned char>(c)) || c == '$') &&
        (i == 0 || (!word_char(text[i - 1]) && text[i - 1] != '$' && text[i - 1] != '.'));
    if (!starts_token) continue;
    std::size_t end = i;
    if (text[end] == '$') ++end;
    if (end >= text.size() || !std::isdigit(static_cast<unsigned char>(text[end]))) continue;
    while (end < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == ',' ||
            text[end] == '.')) {
      ++end;
    }
    if (end < text.size() && word_char(text[end])) continue;  // e.g. "36months"
    const std::string token = text.substr(i, end - i);
    auto value = parse_number(token);
    if (!value) continue;
    for (std::size_t j = 0; j < label_numbers.size(); ++j) {
      if (label_numbers[j] && std::abs(*label_numbers[j] - *value) < 1e-9) {
        mentions.push_back({i, issue.labels(side)[j], false});
        break;
      }
    }
    i = end - 1;
  }
  return mentions;
}

std::size_t distance_to_nearest(std::span<const std::size_t> positions, std::size_t pos) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t p : positions) {
    const std::size_t d = p > pos ? p - pos : pos - p;
    best = std::min(best, d);
  }
  return best;
}

// Canonicalizes fallback guesses and merges them into `result`.
void apply_fallback(FallbackExtractor& fallback, const std::string& text, const Game& game,
                    int side, ExtractionResult& result) {
  const std::vector<std::string> unresolved = result.unresolved;
  auto guesses = fallback.extract(text, game, side, unresolved);
  for (const auto& [issue_name, raw] : guesses) {
    auto idx = game.issue_index(issue_name);
    if (!idx) continue;
    if (result.offers.find(issue_name) != nullptr) continue;
    if (auto label = canonicalize_label(raw, game.issue(*idx), side)) {
      result.offers.choices[issue_name] = *label;
    }
  }
  std::erase_if(result.unresolved, [&](const std::string& name) {
    return result.offers.find(name) != nullptr;
  });
}

void finish_unresolved(const Game& game, ExtractionResult& result) {
  result.unresolved.clear();
  for (const Issue& issue : game.issues()) {
    if (result.offers.find(issue.name()) == nullptr) {
      result.unresolved.push_back(issue.name());
    }
  }
}

}  // namespace

std::string to_string(ExtractionMethod method) {
  switch (method) {
    case ExtractionMethod::kRegex: return "regex";
    case ExtractionMethod::kFallback: return "fallback";
    case ExtractionMethod::kNone: return "none";
  }
  return "none";
}

std::optional<std::string> canonicalize_label(const std::string& raw, const Issue& issue,
                                              int side) {
  const std::string cleaned = trim(raw);
  if (cleaned.empty()) return std::nullopt;

  auto labels = issue.labels(side);
  for (const std::string& label : labels) {
    if (label == cleaned) return label;
  }
  const std::string cleaned_lower = lowercase(cleaned);
  for (const std::string& label : labels) {
    if (lowercase(label) == cleaned_lower) return label;
  }

  auto value = parse_number(cleaned);
  if (!value) return std::nullopt;
  for (const std::string& label : labels) {
    auto label_value = parse_number(label);
    if (label_value && std::abs(*label_value - *value) < 1e-9) return label;
  }
  return std::nullopt;
}

ExtractionResult extract_note_offers(const std::string& note_text, const Game& game,
                                     int side, FallbackExtractor* fallback) {
  ExtractionResult result;

  // Stage 1: fenced JSON block (last parseable fence wins), else the first
  // bare balanced {...} region.
  json parsed = json::value_t::discarded;
  std::size_t fence = note_text.find("```json");
  if (fence == std::string::npos) {
    if (auto block = balanced_brace_block(note_text, 0)) {
      parsed = json::parse(*block, nullptr, /*allow_exceptions=*/false);
    }
  } else {
    while (fence != std::string::npos) {
      if (auto block = balanced_brace_block(note_text, fence)) {
        json candidate = json::parse(*block, nullptr, /*allow_exceptions=*/false);
        if (!candidate.is_discarded()) parsed = std::move(candidate);
      }
      fence = note_text.find("```json", fence + 1);
    }
  }

  if (parsed.is_object()) {
    for (const auto& [key, value] : parsed.items()) {
      auto idx = match_issue_key(game, key);
      if (!idx) continue;
      const std::string raw = value.is_string() ? value.get<std::string>() : value.dump();
      if (auto label = canonicalize_label(raw, game.issue(*idx), side)) {
        result.offers.choices[game.issue(*idx).name()] = *label;
      }
    }
  }
  finish_unresolved(game, result);

  if (result.unresolved.empty()) {
    result.method = ExtractionMethod::kRegex;
    return result;
  }
  result.method = ExtractionMethod::kFallback;
  if (fallback != nullptr) {
    apply_fallback(*fallback, note_text, game, side, result);
  }
  return result;
}

ExtractionResult extract_message_offers(const std::string& message_text, const Game& game,
                                        int side, FallbackExtractor* fallback) {
  ExtractionResult result;
  const std::string text_lower = lowercase(message_text);

  std::vector<std::vector<Mention>> mentions_by_issue(game.issue_count());
  for (int i = 0; i < game.issue_count(); ++i) {
    mentions_by_issue[i] = label_mentions(message_text, text_lower, game.issue(i), side);
  }
  std::vector<std::vector<std::size_t>> name_positions(game.issue_count());
  for (int i = 0; i < game.issue_count(); ++i) {
    name_positions[i] = bounded_occurrences(text_lower, lowercase(game.issue(i).name()));
  }

  // A mention position may satisfy several issues (e.g. "$500" is both a rent
  // and a deposit value); it binds to the issue whose name sits closest.
  for (int i = 0; i < game.issue_count(); ++i) {
    const Mention* latest = nullptr;
    for (const Mention& mention : mentions_by_issue[i]) {
      bool ambiguous = false;
      for (int j = 0; j < game.issue_count(); ++j) {
        if (j == i) continue;
        for (const Mention& other : mentions_by_issue[j]) {
          if (other.pos == mention.pos) {
            ambiguous = true;
            break;
          }
        }
        if (ambiguous) break;
      }
      bool bound = false;
      if (!ambiguous) {
        // Verbatim label text is distinctive on its own; a bare number only
        // binds when the issue is named somewhere (or there is one issue).
        bound = mention.exact || game.issue_count() == 1 || !name_positions[i].empty();
      } else {
        const std::size_t own = distance_to_nearest(name_positions[i], mention.pos);
        bool nearest = own != std::numeric_limits<std::size_t>::max();
        for (int j = 0; j < game.issue_count() && nearest; ++j) {
          if (j == i) continue;
          bool other_has = false;
          for (const Mention& other : mentions_by_issue[j]) {
            if (other.pos == mention.pos) other_has = true;
          }
          if (other_has && distance_to_nearest(name_positions[j], mention.pos) <= own) {
            nearest = false;
          }
        }
        bound = nearest;
      }
      if (bound && (latest == nullptr || mention.pos >= latest->pos)) {
        latest = &mention;
      }
    }
    if (latest != nullptr) {
      result.offers.choices[game.issue(i).name()] = latest->label;
    }
  }
  finish_unresolved(game, result);

  if (result.unresolved.empty()) {
    result.method = ExtractionMethod::kRegex;
    return result;
  }
  result.method = ExtractionMethod::kFallback;
  if (fallback != nullptr) {
    apply_fallback(*fallback, message_text, game, side, result);
  }
  return result;
}

std::map<std::string, std::string> SynonymFallback::extract(
    const std::string& text, const Game& game, int /*side*/,
    std::span<const std::string> unresolved_issues) {
  std::map<std::string, std::string> out;
  const std::string text_lower = lowercase(text);
  for (const Rule& rule : rules_) {
    if (out.contains(rule.issue)) continue;
    if (std::find(unresolved_issues.begin(), unresolved_issues.end(), rule.issue) ==
        unresolved_issues.end()) {
      continue;
    }
    if (!game.issue_index(rule.issue)) continue;
    if (text_lower.find(lowercase(rule.phrase)) != std::string::npos) {
      out[rule.issue] = rule.label;
    }
  }
  return out;
}

}  // namespace parley
