#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "richtab/fretboard.hpp"
#include "richtab/midi_ingest.hpp"
#include "richtab/quantize.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

/// Technique markers carried by one printed note segment.
struct SegmentMarks {
  bool hammer_start = false;
  bool hammer_stop = false;
  bool pull_start = false;
  bool pull_stop = false;
  bool slide_start = false;
  bool slide_stop = false;
  bool wavy_start = false;
  bool wavy_stop = false;
  std::optional<int> bend_alter;  // negative together with `release`
  bool release = false;
};

/// One <note> element: a rest or a (possibly tied) segment of a melody note.
struct ScoreNote {
  bool rest = false;
  bool measure_rest = false;
  int pitch = 0;     // sounding MIDI pitch
  int duration = 0;  // divisions
  std::string type;  // "quarter", "eighth", ...; empty for a whole-measure rest
  int dots = 0;
  bool triplet = false;
  bool tie_start = false;
  bool tie_stop = false;
  int string = 0;
  int fret = 0;
  int finger = 0;  // 0 = open, no fingering element
  SegmentMarks marks;
};

struct ScoreMeasure {
  int number = 1;
  int capacity = 0;  // divisions
  bool show_time = false;
  int beats = 4;
  int beat_type = 4;
  std::vector<ScoreNote> notes;
};

struct ScoreDocument {
  std::string title;
  std::string part_name = "Guitar";
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<int> open_pitches;  // string 1 first
  int divisions = 1;
  std::vector<ScoreMeasure> measures;
};

struct ScoreOptions {
  int ppq = 480;
  int grid = kDefaultGrid;
  std::vector<MeterChange> meter{MeterChange{}};
  std::string title;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Divisions per quarter able to express the grid, triplets of it, and every bar length.
int score_divisions(int grid, std::span<const MeterChange> meter);

/// Places the notes in bars per the quantized rhythm, splitting them into tied
/// segments at bar lines and filling gaps with rests.
/// Throws std::logic_error when the sequences are not aligned.
ScoreDocument build_score(std::span<const RichNote> notes, std::span<const QuantizedRhythm> rhythm,
                          const InstrumentSpec& spec, const ScoreOptions& options);

/// MusicXML 3.1 partwise, UTF-8. Staff 1 is standard notation (treble clef an octave
/// down, sounding pitch), staff 2 is TAB; both carry string and fret.
std::string serialize(const ScoreDocument& doc);

struct ReparsedNote {
  int pitch = 0;
  int string = 0;
  int fret = 0;
  int finger = 0;
  bool has_fingering = false;
  std::vector<Technique> techniques;  // sorted by kind
};

struct ReparseResult {
  std::vector<ReparsedNote> notes;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> metadata;
};

/// Reads back string, fret, fingering and techniques from the staff that carries the
/// most tablature notes. Tied continuations merge into their note; notes without
/// string/fret are skipped with a warning. Throws XmlError on malformed XML.
ReparseResult reparse(std::string_view xml);

}  // namespace richtab
