#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "richtab/fingering.hpp"
#include "richtab/musicxml.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

/// Provenance block written into every output.
struct RunMetadata {
  std::string version;
  std::uint64_t seed = 1;
  std::string input;        // file name of the source melody
  std::string config_json;  // effective configuration, compact JSON
};

inline constexpr std::string_view kSolutionFormat = "richtab-solution/1";
inline constexpr std::string_view kAnnotationsFormat = "richtab-annotations/1";
inline constexpr std::string_view kStatsFormat = "richtab-stats/1";

/// Per note: index, pitch, string, fret, finger, hand position and cost breakdown.
std::string dump_solution(std::span<const NoteEvent> events, const FingeringSolution& solution,
                          const RunMetadata& meta);

/// Per note: fingering fields and techniques, plus the per-pass counts.
std::string dump_annotations(std::span<const RichNote> notes, const AnnotationReport& report,
                             const RunMetadata& meta);

/// Reads the notes of an annotation dump. Throws Error on a malformed document.
std::vector<ReparsedNote> parse_annotation_dump(std::string_view text);

}  // namespace richtab
