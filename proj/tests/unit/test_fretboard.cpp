#include <gtest/gtest.h>

#include "richtab/fretboard.hpp"

using namespace richtab;

TEST(Fretboard, Defaults) {
  InstrumentSpec spec;
  EXPECT_EQ(spec.string_count(), 6);
  EXPECT_EQ(spec.fret_count(), 22);
  EXPECT_EQ(spec.open_pitches(), (std::vector<int>{64, 59, 55, 50, 45, 40}));
}

TEST(Fretboard, PitchAt) {
  InstrumentSpec spec;
  EXPECT_EQ(spec.pitch_at({6, 0}), 40);
  EXPECT_EQ(spec.pitch_at({2, 5}), 64);
  EXPECT_EQ(spec.pitch_at({1, 22}), 86);
  EXPECT_THROW(spec.pitch_at({0, 1}), std::out_of_range);
  EXPECT_THROW(spec.pitch_at({7, 1}), std::out_of_range);
  EXPECT_THROW(spec.pitch_at({1, 23}), std::out_of_range);
  EXPECT_THROW(spec.pitch_at({1, -1}), std::out_of_range);
}

TEST(Fretboard, CandidateExamples) {
  InstrumentSpec spec;
  EXPECT_EQ(spec.candidates_for_pitch(64),
            (std::vector<Placement>{{1, 0}, {2, 5}, {3, 9}, {4, 14}, {5, 19}}));
  EXPECT_TRUE(spec.candidates_for_pitch(39).empty());
  EXPECT_EQ(spec.candidates_for_pitch(40), (std::vector<Placement>{{6, 0}}));
}

TEST(Fretboard, InvalidSpec) {
  EXPECT_THROW(InstrumentSpec({}, 12), std::invalid_argument);
  EXPECT_THROW(InstrumentSpec({40}, 0), std::invalid_argument);
  EXPECT_THROW(InstrumentSpec({200}, 12), std::invalid_argument);
}

// Exhaustive over all MIDI pitches: the candidate set is exactly the placements
// whose pitch matches, found here by scanning every string and fret.
TEST(Fretboard, CandidatesExhaustive) {
  for (const auto& spec : {InstrumentSpec(), InstrumentSpec({62, 57, 53, 48, 43, 38, 33}, 24),
                           InstrumentSpec({43, 38, 33, 28}, 20)}) {
    for (int pitch = 0; pitch <= 127; ++pitch) {
      std::vector<Placement> expected;
      for (int s = 1; s <= spec.string_count(); ++s) {
        for (int f = 0; f <= spec.fret_count(); ++f) {
          if (spec.open_pitches()[static_cast<std::size_t>(s - 1)] + f == pitch) expected.push_back({s, f});
        }
      }
      const auto got = spec.candidates_for_pitch(pitch);
      EXPECT_EQ(got, expected) << "pitch " << pitch;
      EXPECT_LE(got.size(), static_cast<std::size_t>(spec.string_count()));
      for (const auto& p : got) EXPECT_EQ(spec.pitch_at(p), pitch);
    }
  }
}

TEST(Fretboard, AdjacentSemitonesShiftByOneFret) {
  InstrumentSpec spec;
  for (int pitch = 0; pitch < 127; ++pitch) {
    const auto lo = spec.candidates_for_pitch(pitch);
    const auto hi = spec.candidates_for_pitch(pitch + 1);
    for (const auto& p : lo) {
      const bool shifted = std::find(hi.begin(), hi.end(), Placement{p.string, p.fret + 1}) != hi.end();
      EXPECT_TRUE(shifted || p.fret == spec.fret_count()) << pitch;
    }
    for (const auto& p : hi) {
      const bool shifted = std::find(lo.begin(), lo.end(), Placement{p.string, p.fret - 1}) != lo.end();
      EXPECT_TRUE(shifted || p.fret == 0) << pitch;
    }
  }
}
