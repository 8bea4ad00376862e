#include "parley/transcript.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parley/error.hpp"

namespace parley {

using nlohmann::json;

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json allocation_to_json(const Allocation& alloc) {
  json out = json::object();
  for (const auto& [issue, label] : alloc.choices) out[issue] = label;
  return out;
}

Allocation allocation_from_json(const json& node) {
  Allocation alloc;
  for (const auto& [issue, label] : node.items()) {
    alloc.choices[issue] = label.get<std::string>();
  }
  return alloc;
}

json memory_to_json(const MemoryConfig& mem) {
  return json{{"own_notes_for_notes", mem.own_notes_for_notes},
              {"own_messages_for_notes", mem.own_messages_for_notes},
              {"own_notes_for_messages", mem.own_notes_for_messages},
              {"own_messages_for_messages", mem.own_messages_for_messages},
              {"max_note_words", mem.max_note_words},
              {"max_message_words", mem.max_message_words},
              {"show_round_numbers", mem.show_round_numbers},
              {"format", mem.format == MemoryConfig::Format::kTranscript
                             ? "transcript"
                             : "dialogue"}};
}

MemoryConfig memory_from_json(const json& node) {
  MemoryConfig mem;
  mem.own_notes_for_notes = node.value("own_notes_for_notes", mem.own_notes_for_notes);
  mem.own_messages_for_notes =
      node.value("own_messages_for_notes", mem.own_messages_for_notes);
  mem.own_notes_for_messages =
      node.value("own_notes_for_messages", mem.own_notes_for_messages);
  mem.own_messages_for_messages =
      node.value("own_messages_for_messages", mem.own_messages_for_messages);
  mem.max_note_words = node.value("max_note_words", mem.max_note_words);
  mem.max_message_words = node.value("max_message_words", mem.max_message_words);
  mem.show_round_numbers = node.value("show_round_numbers", mem.show_round_numbers);
  mem.format = node.value("format", std::string("transcript")) == "dialogue"
                   ? MemoryConfig::Format::kDialogue
                   : MemoryConfig::Format::kTranscript;
  return mem;
}

EventKind event_kind_from_string(const std::string& text) {
  if (text == "note") return EventKind::kNote;
  if (text == "msg") return EventKind::kMessage;
  if (text == "tom") return EventKind::kTomProbe;
  throw ConfigError("unknown event kind: '" + text + "'");
}

ExtractionMethod extraction_method_from_string(const std::string& text) {
  if (text == "regex") return ExtractionMethod::kRegex;
  if (text == "fallback") return ExtractionMethod::kFallback;
  return ExtractionMethod::kNone;
}

RunStatus run_status_from_string(const std::string& text) {
  if (text == "hard_agreement") return RunStatus::kHardAgreement;
  if (text == "no_agreement") return RunStatus::kNoAgreement;
  if (text == "aborted") return RunStatus::kAborted;
  return RunStatus::kInProgress;
}

}  // namespace

void write_transcript(std::ostream& out, const RunHeader& header,
                      const NegotiationState& state, const RunMetrics& metrics,
                      std::optional<std::int64_t> fixed_timestamp_ms) {
  const auto stamp = [&] { return fixed_timestamp_ms ? *fixed_timestamp_ms : now_ms(); };

  json head{{"type", "header"},
            {"schema_version", kTranscriptSchemaVersion},
            {"run_id", header.run_id},
            {"game", header.game_name},
            {"agents", {header.agent_ids[0], header.agent_ids[1]}},
            {"starter", header.starter},
            {"max_rounds", header.max_rounds},
            {"tom_probing", header.tom_probing},
            {"seed", header.seed},
            {"memory", memory_to_json(header.memory)},
            {"ts", stamp()}};
  out << head.dump() << '\n';

  for (const TurnEvent& event : state.events()) {
    json record{{"type", "event"},
                {"run_id", header.run_id},
                {"round", event.round},
                {"agent", event.agent},
                {"kind", to_string(event.kind)},
                {"text", event.text},
                {"extraction_method", to_string(event.extraction_method)},
                {"ts", stamp()}};
    record["extracted_offers"] =
        event.extracted_offers ? allocation_to_json(*event.extracted_offers)
                               : json(nullptr);
    out << record.dump() << '\n';
  }

  json result{{"type", "result"},
              {"run_id", header.run_id},
              {"status", to_string(metrics.status)},
              {"soft_agreement", metrics.soft_agreement},
              {"hard_agreement", metrics.hard_agreement},
              {"rounds_used", metrics.rounds_used},
              {"utility", {metrics.utility[0], metrics.utility[1]}},
              {"internal_faithfulness",
               {metrics.internal_faithfulness[0], metrics.internal_faithfulness[1]}},
              {"ts", stamp()}};
  result["utility_on_agreement"] =
      metrics.utility_on_agreement
          ? json{(*metrics.utility_on_agreement)[0], (*metrics.utility_on_agreement)[1]}
          : json(nullptr);
  json external = json::array();
  json instruct = json::array();
  for (int agent = 0; agent < 2; ++agent) {
    external.push_back(metrics.external_faithfulness[agent]
                           ? json(*metrics.external_faithfulness[agent])
                           : json(nullptr));
    instruct.push_back({{"note_instruct", metrics.instruction[agent].note_instruct},
                        {"msg_instruct", metrics.instruction[agent].message_instruct},
                        {"format_instruct", metrics.instruction[agent].format_instruct}});
  }
  result["external_faithfulness"] = external;
  result["instruction"] = instruct;
  result["agreed_allocation"] = metrics.agreed_allocation
                                    ? allocation_to_json(*metrics.agreed_allocation)
                                    : json(nullptr);
  if (state.abort_reason()) result["abort_reason"] = *state.abort_reason();
  out << result.dump() << '\n';
}

void write_transcript_file(const std::filesystem::path& path, const RunHeader& header,
                           const NegotiationState& state, const RunMetrics& metrics,
                           std::optional<std::int64_t> fixed_timestamp_ms) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open transcript file '" + path.string() + "'");
  write_transcript(out, header, state, metrics, fixed_timestamp_ms);
}

TranscriptRecord read_transcript(std::istream& in) {
  TranscriptRecord record;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json node = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (node.is_discarded() || !node.is_object()) {
      throw ConfigError("malformed transcript line: " + line);
    }
    const std::string type = node.value("type", "");
    if (type == "header") {
      record.header.run_id = node.value("run_id", "");
      record.header.game_name = node.value("game", "");
      if (node.contains("agents") && node["agents"].is_array() &&
          node["agents"].size() == 2) {
        record.header.agent_ids = {node["agents"][0].get<std::string>(),
                                   node["agents"][1].get<std::string>()};
      }
      record.header.starter = node.value("starter", 0);
      record.header.max_rounds = node.value("max_rounds", 10);
      record.header.tom_probing = node.value("tom_probing", true);
      record.header.seed = node.value("seed", std::uint64_t{0});
      if (node.contains("memory")) record.header.memory = memory_from_json(node["memory"]);
      have_header = true;
    } else if (type == "event") {
      TurnEvent event;
      event.round = node.value("round", 1);
      event.agent = node.value("agent", 0);
      event.kind = event_kind_from_string(node.value("kind", "note"));
      event.text = node.value("text", "");
      event.extraction_method =
          extraction_method_from_string(node.value("extraction_method", "none"));
      if (node.contains("extracted_offers") && node["extracted_offers"].is_object()) {
        event.extracted_offers = allocation_from_json(node["extracted_offers"]);
      }
      record.events.push_back(std::move(event));
    } else if (type == "result") {
      record.status = run_status_from_string(node.value("status", "in_progress"));
      if (node.contains("abort_reason") && node["abort_reason"].is_string()) {
        record.abort_reason = node["abort_reason"].get<std::string>();
      }
    }
  }
  if (!have_header) throw ConfigError("transcript carries no header record");
  return record;
}

TranscriptRecord read_transcript_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript file '" + path.string() + "'");
  return read_transcript(in);
}

NegotiationState replay_state(std::shared_ptr<const Game> game,
                              const TranscriptRecord& record) {
  std::array<AgentSpec, 2> specs;
  for (int side = 0; side < 2; ++side) {
    specs[side].agent_id = record.header.agent_ids[side];
    specs[side].side = side;
  }
  NegotiationState state(std::move(game), std::move(specs), record.header.starter,
                         record.header.max_rounds);
  for (const TurnEvent& event : record.events) {
    int guard = 0;
    while (state.current_round() != event.round || state.current_agent() != event.agent) {
      state.advance_cursor();
      if (++guard > 2 * record.header.max_rounds + 2) {
        throw ConfigError("transcript events out of order");
      }
    }
    state.append_event(event);
  }
  if (record.abort_reason) state.record_abort(*record.abort_reason);
  if (record.status != RunStatus::kInProgress) {
    // The cursor must pass max_rounds for a replayed timeout, matching the
    // live engine's terminal position.
    if (record.status == RunStatus::kNoAgreement) {
      int guard = 0;
      while (state.current_round() <= record.header.max_rounds &&
             guard++ <= 2 * record.header.max_rounds + 2) {
        state.advance_cursor();
      }
    }
    state.set_status(record.status);
  }
  return state;
}

}  // namespace parley
