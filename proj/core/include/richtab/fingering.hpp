#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "richtab/fretboard.hpp"
#include "richtab/midi_ingest.hpp"

namespace richtab {

/// One node of the layered fingering graph.
struct FingeringState {
  Placement placement;
  int finger = 0;         // 0 = open string, 1 index, 2 middle, 3 ring, 4 little
  int hand_position = 1;  // fret under the index finger

  /// Lexicographic (string, fret, finger, hand position): the solver's tie-break order.
  friend auto operator<=>(const FingeringState&, const FingeringState&) = default;
};

enum class SameFingerPolicy { Forbid, AllowSameFretOrSameString, AllowAll };

struct SpanWindow {
  int min = 0;
  int max = 0;
  friend bool operator==(const SpanWindow&, const SpanWindow&) = default;
};

struct FingeringConfig {
  double w_pc = 4.0;    // per fret of hand movement
  double w_sc = 1.0;    // per string crossed
  double w_hs = 2.0;    // per fret of stretch away from one-finger-per-fret
  double w_open = 1.0;  // per open-string note
  double w_zone = 1.0;  // per fret of hand position outside the comfort zone
  int comfort_lo = 5;
  int comfort_hi = 12;
  /// Allowed fret offset from the index finger, fingers 1..4.
  std::array<SpanWindow, 4> spans{{{0, 0}, {1, 2}, {2, 4}, {3, 5}}};
  double t_long = 0.03;  // seconds per fret of hand movement
  double t_vert = 0.02;  // seconds per string crossed
  SameFingerPolicy same_finger = SameFingerPolicy::AllowSameFretOrSameString;
  /// Valid index-finger frets; 0 in hand_hi means "up to the instrument's fret count".
  int hand_lo = 1;
  int hand_hi = 0;

  const SpanWindow& span(int finger) const { return spans[static_cast<std::size_t>(finger - 1)]; }
  int hand_max(const InstrumentSpec& spec) const { return hand_hi > 0 ? hand_hi : spec.fret_count(); }

  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  friend bool operator==(const FingeringConfig&, const FingeringConfig&) = default;
};

/// Weighted cost parts; `total()` is their sum.
struct CostBreakdown {
  double pc = 0.0;
  double sc = 0.0;
  double hs = 0.0;
  double open = 0.0;
  double zone = 0.0;

  double total() const { return pc + sc + hs + open + zone; }
  CostBreakdown& operator+=(const CostBreakdown& o);
};

struct FingeringSolution {
  std::vector<FingeringState> states;
  double objective = 0.0;
  /// Entry i is note i's node cost plus the cost of the arc into it.
  std::vector<CostBreakdown> per_transition;
};

struct Feasibility {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// True when the state respects its finger's span window and the hand range.
bool satisfies_span(const FingeringState& state, const FingeringConfig& config,
                    const InstrumentSpec& spec);

/// All admissible states for the note, sorted in tie-break order.
/// Throws UnplayableNoteError when the pitch has no placement.
std::vector<FingeringState> enumerate_states(const NoteEvent& note, const InstrumentSpec& spec,
                                             const FingeringConfig& config);

CostBreakdown node_cost(const FingeringState& state, const FingeringConfig& config);

CostBreakdown transition_cost(const FingeringState& prev, const FingeringState& next,
                              const FingeringConfig& config);

/// Movement time t_long * |dpos| + t_vert * |dstring| must fit in the IOI, and the
/// same-finger policy must hold.
Feasibility feasible(const FingeringState& prev, const FingeringState& next, double ioi_s,
                     const FingeringConfig& config);

/// Same decision as feasible() without building a reason string.
bool transition_allowed(const FingeringState& prev, const FingeringState& next, double ioi_s,
                        const FingeringConfig& config) noexcept;

/// Exact minimum-cost fingering by dynamic programming over the layered state graph.
/// Ties resolve to the lowest state in (string, fret, finger, hand position) order when
/// choosing the final state and each predecessor.
/// Throws UnplayableNoteError or NoFeasiblePathError.
FingeringSolution solve(std::span<const NoteEvent> events, const InstrumentSpec& spec,
                        const FingeringConfig& config);

struct BruteForceOptions {
  /// Upper bound on enumerated partial sequences before InstanceTooLargeError.
  std::size_t max_visits = 10'000'000;
  /// Skip branches whose partial cost already exceeds the incumbent. Costs are
  /// non-negative, so no optimal or tied sequence is lost.
  bool prune = true;
};

/// Exhaustive search over all feasible state sequences, same objective and tie-break
/// as solve(). Intended as a test oracle.
FingeringSolution brute_force_solve(std::span<const NoteEvent> events, const InstrumentSpec& spec,
                                    const FingeringConfig& config,
                                    const BruteForceOptions& options = {});

/// Sum of |delta hand position| over consecutive states.
int total_position_change(std::span<const FingeringState> states);
/// Sum of |delta string| over consecutive states.
int total_string_change(std::span<const FingeringState> states);
int open_string_count(std::span<const FingeringState> states);

/// Fills per_transition and returns the objective of a given state sequence,
/// accumulated in the same order the solver uses.
double evaluate_path(std::span<const FingeringState> states, const FingeringConfig& config,
                     std::vector<CostBreakdown>* breakdown = nullptr);

}  // namespace richtab
