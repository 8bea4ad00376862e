#include "parley/protocol.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "parley/error.hpp"

namespace parley {

namespace {
constexpr const char* kSeparator =
    "======================================================================";

bool valid_window(int value) { return value == 0 || value == 1 || value == -1; }

// Applies a {0, 1, -1} window to an index list.
std::vector<std::size_t> windowed(const std::vector<std::size_t>& indices, int window) {
  if (window == -1) return indices;
  if (window == 0 || indices.empty()) return {};
  return {indices.back()};
}
}  // namespace

void MemoryConfig::validate() const {
  for (int value : {own_notes_for_notes, own_messages_for_notes, own_notes_for_messages,
                    own_messages_for_messages}) {
    if (!valid_window(value)) {
      throw ConfigError("memory window values must be 0, 1, or -1");
    }
  }
  if (max_note_words < 1 || max_message_words < 1) {
    throw ConfigError("word limits must be at least 1");
  }
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kNote: return "note";
    case EventKind::kMessage: return "msg";
    case EventKind::kTomProbe: return "tom";
  }
  return "note";
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kInProgress: return "in_progress";
    case RunStatus::kHardAgreement: return "hard_agreement";
    case RunStatus::kNoAgreement: return "no_agreement";
    case RunStatus::kAborted: return "aborted";
  }
  return "in_progress";
}

NegotiationState::NegotiationState(std::shared_ptr<const Game> game,
                                   std::array<AgentSpec, 2> specs, int starter,
                                   int max_rounds)
    : game_(std::move(game)), starter_(starter), max_rounds_(max_rounds) {
  if (game_ == nullptr) throw ConfigError("negotiation needs a game");
  if (starter_ != 0 && starter_ != 1) throw ConfigError("starter must be 0 or 1");
  if (max_rounds_ < 1) throw ConfigError("max_rounds must be at least 1");
  if (specs[0].side == specs[1].side) {
    throw ConfigError("agents must be bound to distinct sides");
  }
  for (AgentSpec& spec : specs) {
    if (spec.side != 0 && spec.side != 1) throw ConfigError("side must be 0 or 1");
    specs_[spec.side] = std::move(spec);
  }
  agent_ = starter_;
}

int NegotiationState::rounds_used() const {
  if (events_.empty()) return 0;
  return std::min(events_.back().round, max_rounds_);
}

const std::optional<Allocation>& NegotiationState::latest_acceptable(int agent) const {
  return latest_acceptable_.at(agent);
}
const std::optional<Allocation>& NegotiationState::latest_tom(int agent) const {
  return latest_tom_.at(agent);
}
const std::optional<Allocation>& NegotiationState::latest_message_offer(int agent) const {
  return latest_message_offer_.at(agent);
}
const std::optional<std::string>& NegotiationState::latest_message_text(int agent) const {
  return latest_message_text_.at(agent);
}

std::optional<Allocation> NegotiationState::aligned_acceptable_offers() const {
  const auto& a = latest_acceptable_[0];
  const auto& b = latest_acceptable_[1];
  if (!a || !b) return std::nullopt;
  Allocation agreed;
  for (const Issue& issue : game_->issues()) {
    const std::string* label0 = a->find(issue.name());
    const std::string* label1 = b->find(issue.name());
    if (label0 == nullptr || label1 == nullptr) return std::nullopt;
    auto idx0 = issue.resolve_label(0, *label0);
    auto idx1 = issue.resolve_label(1, *label1);
    if (!idx0 || !idx1 || *idx0 != *idx1) return std::nullopt;
    agreed.choices[issue.name()] = *label0;
  }
  return agreed;
}

void NegotiationState::append_event(TurnEvent event) {
  if (status_ != RunStatus::kInProgress) {
    throw Error("cannot append events to a terminal negotiation");
  }
  if (event.round != round_ || event.agent != agent_) {
    throw Error("event out of turn order");
  }
  if (event.round > max_rounds_) throw Error("event beyond max_rounds");
  const bool have_note =
      std::any_of(events_.begin(), events_.end(), [&](const TurnEvent& e) {
        return e.round == event.round && e.agent == event.agent &&
               e.kind == EventKind::kNote;
      });
  if (event.kind == EventKind::kNote) {
    if (have_note) throw Error("duplicate note within a turn");
  } else if (!have_note) {
    throw Error("note must precede " + to_string(event.kind) + " within a turn");
  }

  if (event.extracted_offers) {
    switch (event.kind) {
      case EventKind::kNote:
        latest_acceptable_[event.agent] = *event.extracted_offers;
        break;
      case EventKind::kTomProbe:
        latest_tom_[event.agent] = *event.extracted_offers;
        break;
      case EventKind::kMessage:
        latest_message_offer_[event.agent] = *event.extracted_offers;
        break;
    }
  }
  if (event.kind == EventKind::kMessage) {
    latest_message_text_[event.agent] = event.text;
  }
  events_.push_back(std::move(event));
}

void NegotiationState::advance_cursor() {
  if (agent_ == starter_) {
    agent_ = 1 - agent_;
  } else {
    agent_ = starter_;
    ++round_;
  }
}

void NegotiationState::set_status(RunStatus status) {
  if (status_ != RunStatus::kInProgress && status != status_) {
    throw Error("status transitions only move forward");
  }
  status_ = status;
}

void NegotiationState::record_phrase_without_alignment(int round) {
  phrase_rounds_.push_back(round);
}

void NegotiationState::record_abort(std::string reason) {
  abort_reason_ = std::move(reason);
}

std::string PromptContext::to_text() const {
  std::ostringstream out;
  out << initialization << "\n";
  out << "Negotiation transcript so far:\n\n";
  if (history.empty()) {
    out << "(the negotiation has not started yet)\n\n";
  }
  for (const HistoryItem& item : history) {
    out << "<round: " << item.round << ", agent: " << item.agent << ">\n"
        << "    [" << to_string(item.kind) << "]\n"
        << item.text << "\n\n"
        << kSeparator << "\n\n";
  }
  if (!round_banner.empty()) out << round_banner << "\n\n";
  out << task_prompt << "\n";
  return out.str();
}

namespace {

// Chronological event indices for the assembled context: all opponent
// messages, own messages under `message_window`, own notes under
// `note_window` (`include_current_note` keeps the note of the turn being
// played, for message contexts).
std::vector<PromptContext::HistoryItem> windowed_history(const NegotiationState& state,
                                                         int agent, int note_window,
                                                         int message_window) {
  const auto& events = state.events();
  std::vector<std::size_t> own_notes;
  std::vector<std::size_t> own_messages;
  std::vector<std::size_t> opponent_messages;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const TurnEvent& event = events[i];
    if (event.kind == EventKind::kTomProbe) continue;  // logged, never re-fed
    if (event.agent == agent && event.kind == EventKind::kNote) own_notes.push_back(i);
    if (event.kind == EventKind::kMessage) {
      (event.agent == agent ? own_messages : opponent_messages).push_back(i);
    }
  }
  std::vector<std::size_t> selected = windowed(own_notes, note_window);
  for (std::size_t i : windowed(own_messages, message_window)) selected.push_back(i);
  for (std::size_t i : opponent_messages) selected.push_back(i);
  std::sort(selected.begin(), selected.end());

  std::vector<PromptContext::HistoryItem> items;
  items.reserve(selected.size());
  for (std::size_t i : selected) {
    const TurnEvent& event = events[i];
    items.push_back({event.round, event.agent, event.kind, event.text});
  }
  return items;
}

PromptContext base_context(const NegotiationState& state, int agent,
                           const MemoryConfig& mem, int note_window,
                           int message_window) {
  mem.validate();
  PromptContext context;
  context.agent = agent;
  context.format = mem.format;
  context.initialization = prompts::initialization_block(
      state.game(), agent, state.spec(agent).visibility, state.spec(agent).persona,
      state.spec(1 - agent).persona);
  context.history = windowed_history(state, agent, note_window, message_window);
  if (mem.show_round_numbers) {
    context.round_banner =
        prompts::round_banner(state.current_round(), state.max_rounds());
  }
  return context;
}

bool note_written_this_turn(const NegotiationState& state, int agent) {
  for (const TurnEvent& event : state.events()) {
    if (event.round == state.current_round() && event.agent == agent &&
        event.kind == EventKind::kNote) {
      return true;
    }
  }
  return false;
}

}  // namespace

PromptContext assemble_note_context(const NegotiationState& state, int agent,
                                    const MemoryConfig& mem) {
  PromptContext context = base_context(state, agent, mem, mem.own_notes_for_notes,
                                       mem.own_messages_for_notes);
  context.task_prompt = prompts::note_prompt(mem.max_note_words) + "\n\n" +
                        prompts::acceptable_offer_format();
  return context;
}

PromptContext assemble_message_context(const NegotiationState& state, int agent,
                                       const MemoryConfig& mem) {
  if (!note_written_this_turn(state, agent)) {
    throw Error("message context requires this turn's note to exist");
  }
  PromptContext context = base_context(state, agent, mem, mem.own_notes_for_messages,
                                       mem.own_messages_for_messages);
  context.task_prompt = prompts::message_prompt(mem.max_message_words);
  return context;
}

PromptContext assemble_tom_context(const NegotiationState& state, int agent,
                                   const MemoryConfig& mem,
                                   const std::string& probe_prompt) {
  PromptContext context = base_context(state, agent, mem, mem.own_notes_for_messages,
                                       mem.own_messages_for_messages);
  context.task_prompt = probe_prompt;
  return context;
}

RunStatus check_completion(const NegotiationState& state, int max_rounds) {
  const auto& text0 = state.latest_message_text(0);
  const auto& text1 = state.latest_message_text(1);
  if (text0 && text1 && contains_agreement_phrase(*text0) &&
      contains_agreement_phrase(*text1) && state.aligned_acceptable_offers()) {
    return RunStatus::kHardAgreement;
  }
  if (state.current_round() > max_rounds) return RunStatus::kNoAgreement;
  return RunStatus::kInProgress;
}

NegotiationEngine::NegotiationEngine(std::shared_ptr<const Game> game,
                                     std::array<AgentSpec, 2> specs,
                                     std::array<std::shared_ptr<AgentBackend>, 2> backends,
                                     MemoryConfig memory, ProtocolOptions options)
    : state_(std::move(game), std::move(specs), options.starter, options.max_rounds),
      backends_(std::move(backends)),
      memory_(memory),
      options_(std::move(options)) {
  memory_.validate();
  if (backends_[0] == nullptr || backends_[1] == nullptr) {
    throw ConfigError("both agents need a backend");
  }
}

std::string NegotiationEngine::invoke_with_retries(
    const std::function<std::string()>& call, const char* what) {
  std::string last_error;
  for (int attempt = 0; attempt < options_.backend_attempts; ++attempt) {
    try {
      return call();
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw BackendError(std::string(what) + " failed after " +
                     std::to_string(options_.backend_attempts) +
                     " attempts: " + last_error);
}

RunStatus NegotiationEngine::advance_turn() {
  if (state_.status() != RunStatus::kInProgress) {
    throw Error("advance_turn on a terminal negotiation");
  }
  const int agent = state_.current_agent();
  const int round = state_.current_round();
  const Game& game = state_.game();

  const auto& opponent_offer = state_.latest_message_offer(1 - agent);
  AgentView view;
  view.game = &game;
  view.side = agent;
  view.round = round;
  view.max_rounds = state_.max_rounds();
  view.opponent_last_offer = opponent_offer ? &*opponent_offer : nullptr;
  view.seed = options_.seed;

  AgentBackend& backend = *backends_[agent];
  try {
    const PromptContext note_context = assemble_note_context(state_, agent, memory_);
    const std::string note_text = invoke_with_retries(
        [&] { return backend.generate_note(note_context, view); }, "note generation");
    ExtractionResult note_result =
        extract_note_offers(note_text, game, agent, options_.fallback);
    state_.append_event({round, agent, EventKind::kNote, note_text,
                         std::move(note_result.offers), note_result.method});

    if (options_.tom_probing) {
      const PromptContext tom_context =
          assemble_tom_context(state_, agent, memory_, options_.tom_probe_prompt);
      const std::string tom_text = invoke_with_retries(
          [&] { return backend.generate_tom_estimate(tom_context, view); }, "ToM probe");
      ExtractionResult tom_result =
          extract_note_offers(tom_text, game, 1 - agent, options_.fallback);
      state_.append_event({round, agent, EventKind::kTomProbe, tom_text,
                           std::move(tom_result.offers), tom_result.method});
    }

    const PromptContext message_context = assemble_message_context(state_, agent, memory_);
    const std::string message_text = invoke_with_retries(
        [&] { return backend.generate_message(message_context, view); },
        "message generation");
    ExtractionResult message_result =
        extract_message_offers(message_text, game, agent, options_.fallback);
    state_.append_event({round, agent, EventKind::kMessage, message_text,
                         std::move(message_result.offers), message_result.method});
  } catch (const BackendError& e) {
    state_.record_abort(e.what());
    state_.set_status(RunStatus::kAborted);
    return state_.status();
  }

  RunStatus status = check_completion(state_, options_.max_rounds);
  if (status == RunStatus::kHardAgreement) {
    state_.set_status(status);
    return status;
  }
  const auto& text0 = state_.latest_message_text(0);
  const auto& text1 = state_.latest_message_text(1);
  if (text0 && text1 && contains_agreement_phrase(*text0) &&
      contains_agreement_phrase(*text1)) {
    state_.record_phrase_without_alignment(round);
  }

  state_.advance_cursor();
  status = check_completion(state_, options_.max_rounds);
  if (status != RunStatus::kInProgress) state_.set_status(status);
  return state_.status();
}

RunStatus NegotiationEngine::run() {
  while (state_.status() == RunStatus::kInProgress) advance_turn();
  return state_.status();
}

NegotiationState run_negotiation(std::shared_ptr<const Game> game,
                                 std::array<AgentSpec, 2> specs,
                                 std::array<std::shared_ptr<AgentBackend>, 2> backends,
                                 const MemoryConfig& memory,
                                 const ProtocolOptions& options) {
  NegotiationEngine engine(std::move(game), std::move(specs), std::move(backends), memory,
                           options);
  engine.run();
  return std::move(engine.state());
}

}  // namespace parley
