#include "richtab/fingering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "richtab/errors.hpp"

namespace richtab {

namespace {

// Slack for comparing movement time against the IOI; IOIs come from tempo arithmetic.
constexpr double kTimeEpsilon = 1e-9;

bool feasible_impl(const FingeringState& prev, const FingeringState& next, double ioi_s,
                   const FingeringConfig& config, std::string* reason) {
  const int dpos = std::abs(next.hand_position - prev.hand_position);
  const int dstr = std::abs(next.placement.string - prev.placement.string);
  const double needed = config.t_long * dpos + config.t_vert * dstr;
  if (needed > ioi_s + kTimeEpsilon) {
    if (reason) {
      *reason = "movement needs " + std::to_string(needed) + " s but IOI is " +
                std::to_string(ioi_s) + " s";
    }
    return false;
  }
  if (prev.finger >= 1 && prev.finger == next.finger) {
    const bool same_fret = prev.placement.fret == next.placement.fret;
    const bool same_string = prev.placement.string == next.placement.string;
    bool ok = true;
    switch (config.same_finger) {
      case SameFingerPolicy::Forbid: ok = same_fret && same_string; break;
      case SameFingerPolicy::AllowSameFretOrSameString: ok = same_fret || same_string; break;
      case SameFingerPolicy::AllowAll: break;
    }
    if (!ok) {
      if (reason) *reason = "finger " + std::to_string(prev.finger) + " reused across notes";
      return false;
    }
  }
  return true;
}

}  // namespace

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  pc += o.pc;
  sc += o.sc;
  hs += o.hs;
  open += o.open;
  zone += o.zone;
  return *this;
}

void FingeringConfig::validate() const {
  for (double w : {w_pc, w_sc, w_hs, w_open, w_zone}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("cost weights must be finite and >= 0");
  }
  if (!(t_long >= 0.0) || !(t_vert >= 0.0)) throw ConfigError("movement times must be >= 0");
  if (comfort_lo > comfort_hi) throw ConfigError("comfort zone lower bound exceeds upper bound");
  for (int k = 1; k <= 4; ++k) {
    if (span(k).min > span(k).max) {
      throw ConfigError("span window for finger " + std::to_string(k) + " has min > max");
    }
  }
  if (hand_lo < 1) throw ConfigError("hand position range must start at fret 1 or above");
  if (hand_hi != 0 && hand_hi < hand_lo) throw ConfigError("empty hand position range");
}

bool satisfies_span(const FingeringState& state, const FingeringConfig& config,
                    const InstrumentSpec& spec) {
  if (state.hand_position < config.hand_lo || state.hand_position > config.hand_max(spec)) {
    return false;
  }
  if (state.finger == 0) return state.placement.fret == 0;
  if (state.finger < 1 || state.finger > 4 || state.placement.fret == 0) return false;
  const int offset = state.placement.fret - state.hand_position;
  const auto& w = config.span(state.finger);
  return offset >= w.min && offset <= w.max;
}

std::vector<FingeringState> enumerate_states(const NoteEvent& note, const InstrumentSpec& spec,
                                             const FingeringConfig& config) {
  std::vector<FingeringState> states;
  const int lo = config.hand_lo;
  const int hi = config.hand_max(spec);
  for (const auto& p : spec.candidates_for_pitch(note.pitch)) {
    if (p.fret == 0) {
      for (int h = lo; h <= hi; ++h) states.push_back({p, 0, h});
      continue;
    }
    for (int k = 1; k <= 4; ++k) {
      const auto& w = config.span(k);
      for (int h = std::max(lo, p.fret - w.max); h <= std::min(hi, p.fret - w.min); ++h) {
        states.push_back({p, k, h});
      }
    }
  }
  if (states.empty()) throw UnplayableNoteError(note.index, note.pitch);
  std::sort(states.begin(), states.end());
  return states;
}

CostBreakdown node_cost(const FingeringState& state, const FingeringConfig& config) {
  CostBreakdown c;
  if (state.finger == 0) {
    c.open = config.w_open;
  } else {
    const int stretch = (state.placement.fret - state.hand_position) - (state.finger - 1);
    c.hs = config.w_hs * std::abs(stretch);
  }
  int outside = 0;
  if (state.hand_position < config.comfort_lo) outside = config.comfort_lo - state.hand_position;
  if (state.hand_position > config.comfort_hi) outside = state.hand_position - config.comfort_hi;
  c.zone = config.w_zone * outside;
  return c;
}

CostBreakdown transition_cost(const FingeringState& prev, const FingeringState& next,
                              const FingeringConfig& config) {
  CostBreakdown c;
  c.pc = config.w_pc * std::abs(next.hand_position - prev.hand_position);
  c.sc = config.w_sc * std::abs(next.placement.string - prev.placement.string);
  return c;
}

bool transition_allowed(const FingeringState& prev, const FingeringState& next, double ioi_s,
                        const FingeringConfig& config) noexcept {
  return feasible_impl(prev, next, ioi_s, config, nullptr);
}

Feasibility feasible(const FingeringState& prev, const FingeringState& next, double ioi_s,
                     const FingeringConfig& config) {
  Feasibility f;
  f.ok = feasible_impl(prev, next, ioi_s, config, &f.reason);
  return f;
}

FingeringSolution solve(std::span<const NoteEvent> events, const InstrumentSpec& spec,
                        const FingeringConfig& config) {
  FingeringSolution solution;
  if (events.empty()) return solution;

  std::vector<std::vector<FingeringState>> layers;
  layers.reserve(events.size());
  for (const auto& ev : events) layers.push_back(enumerate_states(ev, spec, config));

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(events.size());
  std::vector<std::vector<int>> back(events.size());

  best[0].resize(layers[0].size());
  back[0].assign(layers[0].size(), -1);
  for (std::size_t s = 0; s < layers[0].size(); ++s) best[0][s] = node_cost(layers[0][s], config).total();

  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& prev_layer = layers[i - 1];
    const auto& layer = layers[i];
    const double ioi = events[i - 1].ioi_s;
    best[i].assign(layer.size(), kInf);
    back[i].assign(layer.size(), -1);
    bool any = false;
    for (std::size_t s = 0; s < layer.size(); ++s) {
      const double node = node_cost(layer[s], config).total();
      // Predecessors are scanned in tie-break order, so strict < keeps the lowest on ties.
      for (std::size_t p = 0; p < prev_layer.size(); ++p) {
        if (best[i - 1][p] == kInf) continue;
        if (!transition_allowed(prev_layer[p], layer[s], ioi, config)) continue;
        const double cand = best[i - 1][p] + transition_cost(prev_layer[p], layer[s], config).total() + node;
        if (cand < best[i][s]) {
          best[i][s] = cand;
          back[i][s] = static_cast<int>(p);
        }
      }
      any = any || best[i][s] < kInf;
    }
    if (!any) throw NoFeasiblePathError(i);
  }

  const auto& last = best.back();
  std::size_t end = 0;
  for (std::size_t s = 1; s < last.size(); ++s) {
    if (last[s] < last[end]) end = s;
  }

  solution.states.resize(events.size());
  int cursor = static_cast<int>(end);
  for (std::size_t i = events.size(); i-- > 0;) {
    solution.states[i] = layers[i][static_cast<std::size_t>(cursor)];
    cursor = back[i][static_cast<std::size_t>(cursor)];
  }
  solution.objective = last[end];
  evaluate_path(solution.states, config, &solution.per_transition);
  return solution;
}

double evaluate_path(std::span<const FingeringState> states, const FingeringConfig& config,
                     std::vector<CostBreakdown>* breakdown) {
  if (breakdown) breakdown->clear();
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CostBreakdown node = node_cost(states[i], config);
    CostBreakdown part = node;
    if (i == 0) {
      total = node.total();
    } else {
      const CostBreakdown arc = transition_cost(states[i - 1], states[i], config);
      part += arc;
      total = total + arc.total() + node.total();
    }
    if (breakdown) breakdown->push_back(part);
  }
  return total;
}

int total_position_change(std::span<const FingeringState> states) {
  int sum = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    sum += std::abs(states[i].hand_position - states[i - 1].hand_position);
  }
  return sum;
}

int total_string_change(std::span<const FingeringState> states) {
  int sum = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    sum += std::abs(states[i].placement.string - states[i - 1].placement.string);
  }
  return sum;
}

int open_string_count(std::span<const FingeringState> states) {
  return static_cast<int>(
      std::count_if(states.begin(), states.end(), [](const auto& s) { return s.finger == 0; }));
}

}  // namespace richtab
