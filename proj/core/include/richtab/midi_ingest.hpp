#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace richtab {

using Tick = std::int64_t;

/// One note of a monophonic melody.
struct NoteEvent {
  std::size_t index = 0;
  int pitch = 0;  // MIDI note number
  Tick onset_ticks = 0;
  Tick duration_ticks = 0;
  double onset_s = 0.0;
  double duration_s = 0.0;
  /// Time to the next onset. The final note carries +inf so its outgoing
  /// transition never prunes.
  double ioi_s = std::numeric_limits<double>::infinity();
};

struct TempoChange {
  Tick tick = 0;
  std::uint32_t usec_per_quarter = 500000;
};

struct MeterChange {
  Tick tick = 0;
  int beats = 4;
  int beat_type = 4;
};

struct Melody {
  int ppq = 480;
  int format = 0;
  std::size_t track = 0;
  std::vector<NoteEvent> notes;
  std::vector<TempoChange> tempo;  // sorted, first entry at tick 0
  std::vector<MeterChange> meter;  // sorted, first entry at tick 0
};

enum class OverlapPolicy { Error, Clip };

struct ParseOptions {
  /// MTrk chunk index (0-based). Unset selects the first track that has notes.
  std::optional<std::size_t> track;
  OverlapPolicy overlap = OverlapPolicy::Error;
};

/// Parses a format 0 or 1 Standard MIDI File into a validated melody.
/// Throws ParseError (with byte offset), EmptyMelodyError or MonophonyError.
Melody parse_midi(std::span<const std::uint8_t> bytes, const ParseOptions& options = {});

Melody read_midi_file(const std::filesystem::path& path, const ParseOptions& options = {});

struct MonophonyReport {
  std::vector<std::pair<std::size_t, std::size_t>> violations;
  bool ok() const { return violations.empty(); }
};

/// Reports every pair (i, j), i < j, where note j starts inside [onset_i, onset_i + duration_i)
/// or both start together. `events` must be sorted by onset.
MonophonyReport check_monophony(std::span<const NoteEvent> events);

/// Enforces monophony in place. Under OverlapPolicy::Clip an earlier note is truncated to
/// the next onset; simultaneous onsets cannot be clipped and still fail.
/// Throws MonophonyError listing every offending pair.
void validate_monophony(std::vector<NoteEvent>& events, OverlapPolicy policy);

/// Seconds elapsed at `tick` under the tempo map.
double tick_to_seconds(Tick tick, int ppq, std::span<const TempoChange> tempo);

/// Recomputes index, onset_s, duration_s and ioi_s from tick fields.
void assign_timing(std::vector<NoteEvent>& events, int ppq, std::span<const TempoChange> tempo);

/// Builds a melody from (pitch, onset, duration) tick triples at a constant tempo and 4/4.
Melody make_melody(const std::vector<std::tuple<int, Tick, Tick>>& notes, int ppq = 480,
                   double bpm = 120.0);

}  // namespace richtab
