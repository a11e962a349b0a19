#pragma once

#include <compare>
#include <vector>

namespace richtab {

/// Strings are numbered 1 (highest-pitched) to string_count (lowest).
struct Placement {
  int string = 1;
  int fret = 0;  // 0 = open string
  friend auto operator<=>(const Placement&, const Placement&) = default;
};

class InstrumentSpec {
 public:
  /// Six-string standard tuning, 22 frets.
  InstrumentSpec();
  /// `open_pitches[0]` is string 1. Throws std::invalid_argument on empty tuning,
  /// non-positive fret count, or pitches outside 0..127.
  InstrumentSpec(std::vector<int> open_pitches, int fret_count);

  int string_count() const { return static_cast<int>(open_pitches_.size()); }
  int fret_count() const { return fret_count_; }
  const std::vector<int>& open_pitches() const { return open_pitches_; }
  int open_pitch(int string) const;

  /// Throws std::out_of_range for a string or fret outside the instrument.
  int pitch_at(int string, int fret) const;
  int pitch_at(const Placement& p) const { return pitch_at(p.string, p.fret); }

  /// Every placement sounding `pitch`, ordered by string. Empty when unplayable.
  std::vector<Placement> candidates_for_pitch(int pitch) const;

  friend bool operator==(const InstrumentSpec&, const InstrumentSpec&) = default;

 private:
  std::vector<int> open_pitches_;
  int fret_count_;
};

}  // namespace richtab
