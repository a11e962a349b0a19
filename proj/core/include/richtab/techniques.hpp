#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "richtab/fingering.hpp"
#include "richtab/fretboard.hpp"
#include "richtab/midi_ingest.hpp"

namespace richtab {

enum class TechniqueKind { HammerOn, PullOff, Vibrato, SlideStart, SlideStop, Bend, BendRelease };

struct Technique {
  TechniqueKind kind = TechniqueKind::Vibrato;
  int bend_semitones = 0;  // Bend / BendRelease only
  friend bool operator==(const Technique&, const Technique&) = default;
};

/// Snake-case key used in JSON files ("hammer_on", "bend_release", ...).
std::string_view technique_key(TechniqueKind kind);
std::optional<TechniqueKind> technique_from_key(std::string_view key);

/// Kinds that carry per-string target ratios. A slide is counted on its start note
/// and a bend/release pair on the bend note.
inline constexpr std::array<TechniqueKind, 5> kRatedKinds{
    TechniqueKind::HammerOn, TechniqueKind::PullOff, TechniqueKind::Vibrato,
    TechniqueKind::SlideStart, TechniqueKind::Bend};

/// Key under which a rated kind appears in ratio tables ("slide" for SlideStart).
std::string_view rated_key(TechniqueKind kind);
std::optional<TechniqueKind> rated_from_key(std::string_view key);

/// string -> kind -> fraction of that string's notes carrying the technique.
using RatioTable = std::map<int, std::map<TechniqueKind, double>>;

struct TechniqueTargets {
  RatioTable ratios;
  std::array<int, 4> max_bend_semitones{2, 2, 2, 0};  // per finger 1..4
  double vibrato_possible_s = 0.5;
  double vibrato_likely_s = 1.0;
  double min_bend_duration_s = 0.4;
  bool slides = false;
  std::set<TechniqueKind> insert_everywhere;
  std::uint64_t seed = 1;

  double ratio(int string, TechniqueKind kind) const;
  int max_bend(int finger) const;
  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  /// Placeholder per-string ratios shaped like typical lead-guitar usage (bends
  /// concentrated on the high strings, vibrato spread wider). Meant to be replaced
  /// by corpus statistics or user taste.
  static RatioTable default_ratios(int string_count);
  static TechniqueTargets defaults(int string_count = 6);
};

struct RichNote {
  NoteEvent event;
  FingeringState state;
  std::vector<Technique> techniques;

  bool has(TechniqueKind kind) const;
  const Technique* find(TechniqueKind kind) const;
  bool is_open() const { return state.finger == 0; }
  int string() const { return state.placement.string; }
  int fret() const { return state.placement.fret; }
  /// Semitones added by a bend on this note (0 when not bent).
  int bend() const;
};

std::vector<RichNote> make_rich_notes(std::span<const NoteEvent> events,
                                      std::span<const FingeringState> states);

bool can_hammer_on(const RichNote& prev, const RichNote& cur);
bool can_pull_off(const RichNote& prev, const RichNote& cur);
bool can_slide(const RichNote& cur, const RichNote& next);

enum class VibratoLevel { None, Possible, Likely };
VibratoLevel vibrato_level(const RichNote& note, const TechniqueTargets& targets);

enum class BendPattern { Return, UnisonRun, AscendingPair };

/// A candidate bend: state rewrites plus the techniques they enable.
struct BendProposal {
  BendPattern pattern = BendPattern::AscendingPair;
  std::size_t bend_index = 0;
  int string = 1;  // string of the bent note after rewriting
  int semitones = 0;
  std::vector<std::pair<std::size_t, FingeringState>> rewrites;
  std::vector<std::pair<std::size_t, Technique>> annotations;
  /// Unchanged neighbours the proposal was derived from; it is stale once they move.
  std::vector<std::pair<std::size_t, FingeringState>> anchors;
};

/// Detects the three bend cliches (X-Y-X return, unison run, ascending pair on one
/// string) and proposes rewrites that keep the sounded pitch and every adjacent
/// transition feasible. X-Y-X with Y below X would need a pre-bend; it is reported
/// through `diagnostics` and not proposed.
std::vector<BendProposal> find_bend_opportunities(std::span<const RichNote> notes,
                                                  const InstrumentSpec& spec,
                                                  const FingeringConfig& fingering,
                                                  const TechniqueTargets& targets,
                                                  std::vector<std::string>* diagnostics = nullptr);

struct PassCounts {
  int notes_on_string = 0;
  int target = 0;
  int candidates = 0;
  int inserted = 0;
};

struct AnnotationReport {
  std::map<std::pair<int, TechniqueKind>, PassCounts> counts;
  std::vector<std::string> diagnostics;
};

struct AnnotationResult {
  std::vector<RichNote> notes;
  AnnotationReport report;
};

/// Inserts techniques toward the per-string targets. Passes run slides, bends,
/// hammer-on/pull-off, then vibrato; each later pass sees earlier annotations.
/// Sampling is seeded from `targets.seed`.
AnnotationResult annotate(std::vector<RichNote> notes, const InstrumentSpec& spec,
                          const FingeringConfig& fingering, const TechniqueTargets& targets);

/// Re-checks every technique precondition, the conflict rules, pitch preservation,
/// span windows and transition feasibility. Returns one message per violation.
std::vector<std::string> validate_annotations(std::span<const RichNote> notes,
                                              const InstrumentSpec& spec,
                                              const FingeringConfig& fingering,
                                              const TechniqueTargets& targets);

}  // namespace richtab
