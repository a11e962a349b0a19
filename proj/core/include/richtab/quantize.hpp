#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "richtab/midi_ingest.hpp"

namespace richtab {

inline constexpr std::array<int, 8> kAllowedGrids{1, 2, 4, 8, 12, 16, 24, 48};
inline constexpr int kDefaultGrid = 4;

bool is_allowed_grid(int grid);

/// Reduced non-negative fraction.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct TupletRatio {
  int actual = 3;
  int normal = 2;
  friend bool operator==(const TupletRatio&, const TupletRatio&) = default;
};

/// Notation-time view of one note.
struct QuantizedRhythm {
  int grid = kDefaultGrid;          // subdivisions per quarter
  std::int64_t onset_units = 0;     // grid units from the start
  std::int64_t duration_units = 1;  // grid units, >= 1
  /// Note value as a fraction of a whole note. When the duration is a single
  /// (possibly dotted or tuplet) glyph this is the undotted base value, e.g. 1/8;
  /// otherwise it is the raw duration and the note is tied in notation.
  Fraction value{1, 4};
  int dots = 0;
  std::optional<TupletRatio> tuplet;
  std::size_t measure = 0;
  Fraction beat_offset{0, 1};  // quarters from the start of the measure
};

/// One bar of the meter layout, positions in quarter notes.
struct MeasureSpan {
  Fraction start;
  Fraction length;
  int beats = 4;
  int beat_type = 4;
};

/// Lays out bars from the meter map until `end_quarters` is covered (at least one bar).
/// A meter change takes effect at the first bar line at or after its tick.
std::vector<MeasureSpan> layout_measures(std::span<const MeterChange> meter, int ppq,
                                         Fraction end_quarters);

/// Snaps onsets and durations to the grid. Ties between two grid points snap
/// downward; durations are at least one unit and never reach past the next onset;
/// onsets that collide after snapping are pushed forward one unit so order is kept.
std::vector<QuantizedRhythm> quantize(std::span<const NoteEvent> events, int ppq, int grid,
                                      std::span<const MeterChange> meter);

std::vector<QuantizedRhythm> quantize(const Melody& melody, int grid);

/// Nearest grid index for `ticks`, ties downward.
std::int64_t snap_to_grid(Tick ticks, int ppq, int grid);

/// Re-expands quantized values to tick-domain events (requires ppq divisible by grid).
std::vector<NoteEvent> expand(std::span<const QuantizedRhythm> rhythm,
                              std::span<const NoteEvent> events, int ppq);

}  // namespace richtab
