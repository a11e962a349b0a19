#include "richtab/errors.hpp"

#include <sstream>

namespace richtab {

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::Config: return "config";
    case Stage::Ingest: return "ingest";
    case Stage::Fingering: return "fingering";
    case Stage::Annotation: return "annotation";
    case Stage::Export: return "export";
    case Stage::Stats: return "stats";
  }
  return "unknown";
}

namespace {

std::string describe_pairs(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::ostringstream os;
  os << "monophony violation: overlapping notes";
  for (const auto& [a, b] : pairs) {
    os << " (" << a << "," << b << ")";
  }
  return os.str();
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& what)
    : Error(Stage::Ingest, "malformed MIDI at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

MonophonyError::MonophonyError(std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : Error(Stage::Ingest, describe_pairs(pairs)), pairs_(std::move(pairs)) {}

UnplayableNoteError::UnplayableNoteError(std::size_t note_index, int pitch)
    : Error(Stage::Fingering, "note " + std::to_string(note_index) + " unplayable (pitch " +
                                  std::to_string(pitch) + " has no string/fret realization)"),
      note_index_(note_index),
      pitch_(pitch) {}

NoFeasiblePathError::NoFeasiblePathError(std::size_t layer)
    : Error(Stage::Fingering,
            "no feasible fingering: frontier empty at note " + std::to_string(layer) +
                " (IOI too short for the configured movement times, or span/finger policy too "
                "tight)"),
      layer_(layer) {}

}  // namespace richtab
