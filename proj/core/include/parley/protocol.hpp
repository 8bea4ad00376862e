#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parley/extraction.hpp"
#include "parley/game.hpp"
#include "parley/prompts.hpp"

namespace parley {

// Context windows over an agent's own history when assembling prompts.
// Window values: 0 = none, 1 = the most recent entry, -1 = entire history.
// The opponent's public messages are always fully visible.
struct MemoryConfig {
  int own_notes_for_notes = 0;         // past notes seen while writing a note
  int own_messages_for_notes = -1;     // own messages seen while writing a note
  int own_notes_for_messages = 1;      // notes seen while writing a message (incl. current)
  int own_messages_for_messages = -1;  // own messages seen while writing a message
  int max_note_words = 64;
  int max_message_words = 64;
  bool show_round_numbers = true;
  enum class Format { kTranscript, kDialogue };
  Format format = Format::kTranscript;

  void validate() const;  // throws ConfigError
};

enum class EventKind { kNote, kMessage, kTomProbe };
std::string to_string(EventKind kind);

struct TurnEvent {
  int round = 1;
  int agent = 0;  // agent index == side index
  EventKind kind = EventKind::kNote;
  std::string text;
  std::optional<Allocation> extracted_offers;
  ExtractionMethod extraction_method = ExtractionMethod::kNone;
};

enum class RunStatus { kInProgress, kHardAgreement, kNoAgreement, kAborted };
std::string to_string(RunStatus status);

// Binding of one participant to a side of the game.
struct AgentSpec {
  std::string agent_id;
  int side = 0;
  PersonaOptions persona;
  Visibility visibility = Visibility::kTitleOnly;
};

// Full record of one negotiation. Events only accumulate while in progress;
// the status moves forward only, and a terminal state is immutable.
class NegotiationState {
 public:
  NegotiationState(std::shared_ptr<const Game> game, std::array<AgentSpec, 2> specs,
                   int starter = 0, int max_rounds = 10);

  const Game& game() const { return *game_; }
  std::shared_ptr<const Game> game_ptr() const { return game_; }
  const AgentSpec& spec(int agent) const { return specs_.at(agent); }
  int starter() const { return starter_; }
  int max_rounds() const { return max_rounds_; }

  RunStatus status() const { return status_; }
  int current_round() const { return round_; }
  int current_agent() const { return agent_; }
  const std::vector<TurnEvent>& events() const { return events_; }
  // Rounds actually played (capped at max_rounds).
  int rounds_used() const;

  const std::optional<Allocation>& latest_acceptable(int agent) const;
  const std::optional<Allocation>& latest_tom(int agent) const;
  const std::optional<Allocation>& latest_message_offer(int agent) const;
  const std::optional<std::string>& latest_message_text(int agent) const;

  // Rounds where both parties uttered the phrase but their notes disagreed.
  const std::vector<int>& phrase_without_alignment_rounds() const {
    return phrase_rounds_;
  }
  const std::optional<std::string>& abort_reason() const { return abort_reason_; }

  // The allocation both agents' latest note-stated offers agree on, if their
  // stated offers cover every issue with the same value.
  std::optional<Allocation> aligned_acceptable_offers() const;

  // Appends an event, updating the latest-offer trackers. Throws Error when
  // the state is terminal or the event is out of turn order.
  void append_event(TurnEvent event);
  // Moves the cursor to the other agent, bumping the round after the second
  // mover.
  void advance_cursor();
  // Forward-only; throws Error on a backward transition.
  void set_status(RunStatus status);
  void record_phrase_without_alignment(int round);
  void record_abort(std::string reason);

 private:
  std::shared_ptr<const Game> game_;
  std::array<AgentSpec, 2> specs_;
  int starter_ = 0;
  int max_rounds_ = 10;

  RunStatus status_ = RunStatus::kInProgress;
  int round_ = 1;
  int agent_ = 0;
  std::vector<TurnEvent> events_;
  std::array<std::optional<Allocation>, 2> latest_acceptable_;
  std::array<std::optional<Allocation>, 2> latest_tom_;
  std::array<std::optional<Allocation>, 2> latest_message_offer_;
  std::array<std::optional<std::string>, 2> latest_message_text_;
  std::vector<int> phrase_rounds_;
  std::optional<std::string> abort_reason_;
};

// Prompt pieces for one generation call, kept structured so LM backends can
// pack them per their role scheme. to_text() is the canonical transcript
// rendering used by the two-role scheme (and by tests).
struct PromptContext {
  std::string initialization;
  struct HistoryItem {
    int round = 1;
    int agent = 0;
    EventKind kind = EventKind::kNote;
    std::string text;
  };
  std::vector<HistoryItem> history;  // chronological
  std::string round_banner;          // empty when round numbers are hidden
  std::string task_prompt;
  int agent = 0;
  // Conversation format requested by the protocol config; LM backends pick
  // their role packing from it.
  MemoryConfig::Format format = MemoryConfig::Format::kTranscript;

  std::string to_text() const;
};

PromptContext assemble_note_context(const NegotiationState& state, int agent,
                                    const MemoryConfig& mem);
PromptContext assemble_message_context(const NegotiationState& state, int agent,
                                       const MemoryConfig& mem);
PromptContext assemble_tom_context(const NegotiationState& state, int agent,
                                   const MemoryConfig& mem,
                                   const std::string& probe_prompt);

// Completion rule: hard agreement as soon as both agents' most recent
// messages carry the agreement phrase and their stated offers align;
// no agreement once the cursor passes max_rounds; in progress otherwise.
RunStatus check_completion(const NegotiationState& state, int max_rounds = 10);

// Read-only view handed to backends: own side plus the public record.
struct AgentView {
  const Game* game = nullptr;
  int side = 0;
  int round = 1;
  int max_rounds = 10;
  const Allocation* opponent_last_offer = nullptr;  // from opponent messages
  std::uint64_t seed = 0;
};

class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual std::string generate_note(const PromptContext& context, const AgentView& view) = 0;
  virtual std::string generate_message(const PromptContext& context,
                                       const AgentView& view) = 0;
  virtual std::string generate_tom_estimate(const PromptContext& context,
                                            const AgentView& view) = 0;
  virtual std::string id() const = 0;
};

struct ProtocolOptions {
  int max_rounds = 10;
  int starter = 0;          // side that moves first
  bool tom_probing = true;  // probe before each message; logged, never re-fed
  std::string tom_probe_prompt = prompts::tom_probe_prompt();
  int backend_attempts = 3;  // generate attempts before aborting the run
  FallbackExtractor* fallback = nullptr;  // borrowed; may be null
  std::uint64_t seed = 0;
};

// Drives one negotiation: note (+ optional ToM probe) + message per turn,
// completion check after every message.
class NegotiationEngine {
 public:
  NegotiationEngine(std::shared_ptr<const Game> game, std::array<AgentSpec, 2> specs,
                    std::array<std::shared_ptr<AgentBackend>, 2> backends,
                    MemoryConfig memory, ProtocolOptions options);

  NegotiationState& state() { return state_; }
  const NegotiationState& state() const { return state_; }

  RunStatus advance_turn();
  RunStatus run();

 private:
  std::string invoke_with_retries(const std::function<std::string()>& call,
                                  const char* what);

  NegotiationState state_;
  std::array<std::shared_ptr<AgentBackend>, 2> backends_;
  MemoryConfig memory_;
  ProtocolOptions options_;
};

// Convenience wrapper: builds the engine and runs to a terminal state.
NegotiationState run_negotiation(std::shared_ptr<const Game> game,
                                 std::array<AgentSpec, 2> specs,
                                 std::array<std::shared_ptr<AgentBackend>, 2> backends,
                                 const MemoryConfig& memory = {},
                                 const ProtocolOptions& options = {});

}  // namespace parley
