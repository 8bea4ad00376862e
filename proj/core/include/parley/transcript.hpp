#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "parley/metrics.hpp"

namespace parley {

inline constexpr int kTranscriptSchemaVersion = 1;

// Full run configuration, persisted with every transcript so a run can be
// reproduced and re-scored.
struct RunHeader {
  std::string run_id;
  std::string game_name;
  std::array<std::string, 2> agent_ids{};  // by side
  int starter = 0;
  int max_rounds = 10;
  bool tom_probing = true;
  std::uint64_t seed = 0;
  MemoryConfig memory{};
};

// Line-delimited records: one header, one per event, one result. Event
// records carry wall-clock timestamps unless `fixed_timestamp_ms` pins them
// (for byte-reproducible output).
void write_transcript(std::ostream& out, const RunHeader& header,
                      const NegotiationState& state, const RunMetrics& metrics,
                      std::optional<std::int64_t> fixed_timestamp_ms = std::nullopt);
void write_transcript_file(const std::filesystem::path& path, const RunHeader& header,
                           const NegotiationState& state, const RunMetrics& metrics,
                           std::optional<std::int64_t> fixed_timestamp_ms = std::nullopt);

struct TranscriptRecord {
  RunHeader header;
  std::vector<TurnEvent> events;
  RunStatus status = RunStatus::kInProgress;
  std::optional<std::string> abort_reason;
};

TranscriptRecord read_transcript(std::istream& in);
TranscriptRecord read_transcript_file(const std::filesystem::path& path);

// Rebuilds the negotiation state from a persisted record (e.g. to recompute
// metrics). `game` must match the recorded game.
NegotiationState replay_state(std::shared_ptr<const Game> game,
                              const TranscriptRecord& record);

}  // namespace parley
