#include "richtab/fretboard.hpp"

#include <stdexcept>
#include <string>

namespace richtab {

InstrumentSpec::InstrumentSpec() : InstrumentSpec({64, 59, 55, 50, 45, 40}, 22) {}

InstrumentSpec::InstrumentSpec(std::vector<int> open_pitches, int fret_count)
    : open_pitches_(std::move(open_pitches)), fret_count_(fret_count) {
  if (open_pitches_.empty()) throw std::invalid_argument("instrument needs at least one string");
  if (fret_count_ <= 0) throw std::invalid_argument("fret count must be positive");
  for (int p : open_pitches_) {
    if (p < 0 || p > 127) throw std::invalid_argument("open string pitch outside 0..127");
  }
}

int InstrumentSpec::open_pitch(int string) const {
  if (string < 1 || string > string_count()) {
    throw std::out_of_range("string " + std::to_string(string) + " outside 1.." +
                            std::to_string(string_count()));
  }
  return open_pitches_[static_cast<std::size_t>(string - 1)];
}

int InstrumentSpec::pitch_at(int string, int fret) const {
  if (fret < 0 || fret > fret_count_) {
    throw std::out_of_range("fret " + std::to_string(fret) + " outside 0.." +
                            std::to_string(fret_count_));
  }
  return open_pitch(string) + fret;
}

std::vector<Placement> InstrumentSpec::candidates_for_pitch(int pitch) const {
  std::vector<Placement> out;
  for (int s = 1; s <= string_count(); ++s) {
    const int fret = pitch - open_pitches_[static_cast<std::size_t>(s - 1)];
    if (fret >= 0 && fret <= fret_count_) out.push_back({s, fret});
  }
  return out;
}

}  // namespace richtab
