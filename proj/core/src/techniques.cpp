#include "richtab/techniques.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace richtab {

namespace {

constexpr double kDurationEpsilon = 1e-9;

// Portable seeded sampling: std::shuffle and the std distributions are not
// specified bit-for-bit across standard libraries, so draws are done by hand.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

int target_count(double ratio, int notes_on_string) {
  return static_cast<int>(std::lround(ratio * notes_on_string));
}

int count_on_string(std::span<const RichNote> notes, int string) {
  return static_cast<int>(std::count_if(notes.begin(), notes.end(),
                                        [&](const RichNote& n) { return n.string() == string; }));
}

std::string note_label(std::size_t i) { return "note " + std::to_string(i) + ": "; }

void check_note(std::span<const RichNote> notes, std::size_t i, const InstrumentSpec& spec,
                const FingeringConfig& fingering, const TechniqueTargets& targets,
                std::vector<std::string>& out) {
  const RichNote& n = notes[i];
  auto fail = [&](const std::string& msg) { out.push_back(note_label(i) + msg); };
  const RichNote* prev = i > 0 ? &notes[i - 1] : nullptr;
  const RichNote* next = i + 1 < notes.size() ? &notes[i + 1] : nullptr;

  int fret_pitch = 0;
  try {
    fret_pitch = spec.pitch_at(n.state.placement);
  } catch (const std::out_of_range&) {
    fail("placement outside the instrument");
    return;
  }
  if (fret_pitch + n.bend() != n.event.pitch) fail("sounded pitch differs from the melody");
  if (!satisfies_span(n.state, fingering, spec)) fail("finger outside its span window");
  if (prev && !transition_allowed(prev->state, n.state, prev->event.ioi_s, fingering)) {
    fail("infeasible transition from previous note");
  }

  std::set<TechniqueKind> seen;
  for (const auto& t : n.techniques) {
    if (!seen.insert(t.kind).second) fail("duplicate " + std::string(technique_key(t.kind)));
  }

  for (const auto& t : n.techniques) {
    switch (t.kind) {
      case TechniqueKind::HammerOn:
      case TechniqueKind::PullOff: {
        const bool hammer = t.kind == TechniqueKind::HammerOn;
        if (!prev || !(hammer ? can_hammer_on(*prev, n) : can_pull_off(*prev, n))) {
          fail(std::string(technique_key(t.kind)) + " precondition fails");
        }
        if (n.has(hammer ? TechniqueKind::PullOff : TechniqueKind::HammerOn)) {
          fail("hammer-on and pull-off on one note");
        }
        if (n.has(TechniqueKind::Bend) || n.has(TechniqueKind::BendRelease) ||
            n.has(TechniqueKind::SlideStop)) {
          fail("legato conflicts with bend or slide on the same note");
        }
        if (prev && prev->has(TechniqueKind::Bend)) fail("legato out of a bent note");
        break;
      }
      case TechniqueKind::Vibrato:
        if (vibrato_level(n, targets) == VibratoLevel::None) fail("vibrato precondition fails");
        if (n.has(TechniqueKind::Bend) || n.has(TechniqueKind::BendRelease)) {
          fail("vibrato conflicts with bend");
        }
        break;
      case TechniqueKind::SlideStart:
        if (!next || !can_slide(n, *next) || !next->has(TechniqueKind::SlideStop)) {
          fail("slide start without a valid slide stop");
        }
        if (n.has(TechniqueKind::Bend)) fail("slide start on a bent note");
        if (next && next->has(TechniqueKind::Bend)) fail("slide into a bent note");
        break;
      case TechniqueKind::SlideStop:
        if (!prev || !prev->has(TechniqueKind::SlideStart)) fail("slide stop without slide start");
        break;
      case TechniqueKind::Bend:
        if (n.state.finger < 1) fail("bend on an open string");
        if (t.bend_semitones < 1 || t.bend_semitones > targets.max_bend(n.state.finger)) {
          fail("bend amplitude exceeds the finger's maximum");
        }
        if (n.event.duration_s + kDurationEpsilon < targets.min_bend_duration_s) {
          fail("bend on a note shorter than the minimum bend duration");
        }
        if (n.has(TechniqueKind::HammerOn) || n.has(TechniqueKind::PullOff) ||
            n.has(TechniqueKind::Vibrato) || n.has(TechniqueKind::SlideStart)) {
          fail("bend combined with a conflicting technique");
        }
        if (prev && prev->has(TechniqueKind::SlideStart)) fail("bend on a slide target");
        break;
      case TechniqueKind::BendRelease: {
        const Technique* bent = prev ? prev->find(TechniqueKind::Bend) : nullptr;
        if (!bent || bent->bend_semitones != t.bend_semitones ||
            prev->state.placement != n.state.placement || prev->state.finger != n.state.finger) {
          fail("release without a matching bend on the same string, fret and finger");
        }
        if (n.techniques.size() != 1) fail("release combined with another technique");
        break;
      }
    }
  }
}

void check_window(std::span<const RichNote> notes, std::size_t lo, std::size_t hi,
                  const InstrumentSpec& spec, const FingeringConfig& fingering,
                  const TechniqueTargets& targets, std::vector<std::string>& out) {
  lo = lo > 0 ? lo - 1 : 0;
  hi = std::min(hi + 1, notes.size() - 1);
  for (std::size_t i = lo; i <= hi; ++i) check_note(notes, i, spec, fingering, targets, out);
}

// Cheapest state at (string, fret) whose finger can bend `semitones` and that connects
// feasibly to the neighbours of note j.
std::optional<FingeringState> best_bend_state(std::span<const RichNote> notes, std::size_t j,
                                              Placement placement, int semitones,
                                              const InstrumentSpec& spec,
                                              const FingeringConfig& fingering,
                                              const TechniqueTargets& targets) {
  std::optional<FingeringState> best;
  double best_cost = std::numeric_limits<double>::infinity();
  const int lo = fingering.hand_lo;
  const int hi = fingering.hand_max(spec);
  for (int k = 1; k <= 4; ++k) {
    if (targets.max_bend(k) < semitones) continue;
    const auto& w = fingering.span(k);
    for (int h = std::max(lo, placement.fret - w.max); h <= std::min(hi, placement.fret - w.min); ++h) {
      FingeringState s{placement, k, h};
      double cost = node_cost(s, fingering).total();
      if (j > 0) {
        const auto& p = notes[j - 1];
        if (!transition_allowed(p.state, s, p.event.ioi_s, fingering)) continue;
        cost += transition_cost(p.state, s, fingering).total();
      }
      if (j + 1 < notes.size()) {
        const auto& nx = notes[j + 1];
        if (!transition_allowed(s, nx.state, notes[j].event.ioi_s, fingering)) continue;
        cost += transition_cost(s, nx.state, fingering).total();
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = s;
      }
    }
  }
  return best;
}

// Next string down in pitch from `string`: the highest open pitch below it.
std::optional<int> next_lower_string(const InstrumentSpec& spec, int string) {
  const int open = spec.open_pitch(string);
  std::optional<int> best;
  for (int s = 1; s <= spec.string_count(); ++s) {
    const int p = spec.open_pitch(s);
    if (p < open && (!best || p > spec.open_pitch(*best))) best = s;
  }
  return best;
}

bool long_enough(const RichNote& n, const TechniqueTargets& targets) {
  return n.event.duration_s + kDurationEpsilon >= targets.min_bend_duration_s;
}

bool transition_ok(const FingeringState& a, const FingeringState& b, const RichNote& from,
                   const FingeringConfig& fingering) {
  return transition_allowed(a, b, from.event.ioi_s, fingering);
}

}  // namespace

bool RichNote::has(TechniqueKind kind) const { return find(kind) != nullptr; }

const Technique* RichNote::find(TechniqueKind kind) const {
  auto it = std::find_if(techniques.begin(), techniques.end(),
                         [&](const Technique& t) { return t.kind == kind; });
  return it == techniques.end() ? nullptr : &*it;
}

int RichNote::bend() const {
  const Technique* t = find(TechniqueKind::Bend);
  return t ? t->bend_semitones : 0;
}

std::vector<RichNote> make_rich_notes(std::span<const NoteEvent> events,
                                      std::span<const FingeringState> states) {
  std::vector<RichNote> out;
  out.reserve(events.size());
  for (std::size_t i = 0; i < events.size() && i < states.size(); ++i) {
    out.push_back({events[i], states[i], {}});
  }
  return out;
}

bool can_hammer_on(const RichNote& prev, const RichNote& cur) {
  return prev.string() == cur.string() && prev.event.pitch < cur.event.pitch &&
         (prev.is_open() || prev.state.finger < cur.state.finger);
}

bool can_pull_off(const RichNote& prev, const RichNote& cur) {
  return prev.string() == cur.string() && prev.event.pitch > cur.event.pitch &&
         (cur.is_open() || prev.state.finger > cur.state.finger);
}

bool can_slide(const RichNote& cur, const RichNote& next) {
  return cur.string() == next.string() && cur.fret() != next.fret() && cur.state.finger >= 1 &&
         cur.state.finger == next.state.finger;
}

VibratoLevel vibrato_level(const RichNote& note, const TechniqueTargets& targets) {
  if (note.is_open()) return VibratoLevel::None;
  const double d = note.event.duration_s + kDurationEpsilon;
  if (d < targets.vibrato_possible_s) return VibratoLevel::None;
  if (d < targets.vibrato_likely_s) return VibratoLevel::Possible;
  return VibratoLevel::Likely;
}

std::vector<BendProposal> find_bend_opportunities(std::span<const RichNote> notes,
                                                  const InstrumentSpec& spec,
                                                  const FingeringConfig& fingering,
                                                  const TechniqueTargets& targets,
                                                  std::vector<std::string>* diagnostics) {
  std::vector<BendProposal> out;
  const std::size_t n = notes.size();

  // X-Y-X: bend up to Y from X's position and release back.
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const auto& x1 = notes[i];
    const auto& y = notes[i + 1];
    const auto& x2 = notes[i + 2];
    if (x1.event.pitch != x2.event.pitch || y.event.pitch == x1.event.pitch) continue;
    if (y.event.pitch < x1.event.pitch) {
      if (diagnostics) {
        diagnostics->push_back("notes " + std::to_string(i) + "-" + std::to_string(i + 2) +
                               ": lower neighbour pattern needs a pre-bend; left unbent");
      }
      continue;
    }
    const int semis = y.event.pitch - x1.event.pitch;
    if (x1.state.finger < 1 || semis > targets.max_bend(x1.state.finger)) continue;
    if (!long_enough(y, targets)) continue;
    const FingeringState& x = x1.state;
    if (i + 3 < n && !transition_ok(x, notes[i + 3].state, x2, fingering)) continue;
    BendProposal p;
    p.pattern = BendPattern::Return;
    p.bend_index = i + 1;
    p.string = x.placement.string;
    p.semitones = semis;
    p.rewrites = {{i + 1, x}, {i + 2, x}};
    p.annotations = {{i + 1, {TechniqueKind::Bend, semis}}, {i + 2, {TechniqueKind::BendRelease, semis}}};
    p.anchors = {{i, x}};
    out.push_back(std::move(p));
  }

  // Unison runs: every second occurrence is fretted lower on the next string and bent up.
  int max_any = 0;
  for (int k = 1; k <= 4; ++k) max_any = std::max(max_any, targets.max_bend(k));
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a + 1;
    while (b < n && notes[b].event.pitch == notes[a].event.pitch) ++b;
    for (std::size_t j = a + 1; j < b; j += 2) {
      const auto& ref = notes[j - 1];
      const auto lower = next_lower_string(spec, ref.string());
      if (!lower || !long_enough(notes[j], targets)) continue;
      for (int semis = max_any; semis >= 1; --semis) {
        const int fret = notes[j].event.pitch - spec.open_pitch(*lower) - semis;
        if (fret < 1 || fret > spec.fret_count()) continue;
        auto state = best_bend_state(notes, j, {*lower, fret}, semis, spec, fingering, targets);
        if (!state) continue;
        BendProposal p;
        p.pattern = BendPattern::UnisonRun;
        p.bend_index = j;
        p.string = *lower;
        p.semitones = semis;
        p.rewrites = {{j, *state}};
        p.annotations = {{j, {TechniqueKind::Bend, semis}}};
        p.anchors = {{j - 1, ref.state}};
        out.push_back(std::move(p));
        break;
      }
    }
    a = b;
  }

  // Ascending pair on one string: play the second note as a bend from the first's fret.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& lo = notes[i];
    const auto& hi = notes[i + 1];
    if (lo.string() != hi.string() || hi.event.pitch <= lo.event.pitch) continue;
    const int semis = hi.event.pitch - lo.event.pitch;
    if (lo.state.finger < 1 || semis > targets.max_bend(lo.state.finger)) continue;
    if (!long_enough(hi, targets)) continue;
    if (i + 2 < n && !transition_ok(lo.state, notes[i + 2].state, hi, fingering)) continue;
    BendProposal p;
    p.pattern = BendPattern::AscendingPair;
    p.bend_index = i + 1;
    p.string = lo.string();
    p.semitones = semis;
    p.rewrites = {{i + 1, lo.state}};
    p.annotations = {{i + 1, {TechniqueKind::Bend, semis}}};
    p.anchors = {{i, lo.state}};
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> validate_annotations(std::span<const RichNote> notes,
                                              const InstrumentSpec& spec,
                                              const FingeringConfig& fingering,
                                              const TechniqueTargets& targets) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < notes.size(); ++i) check_note(notes, i, spec, fingering, targets, out);
  return out;
}

AnnotationResult annotate(std::vector<RichNote> notes, const InstrumentSpec& spec,
                          const FingeringConfig& fingering, const TechniqueTargets& targets) {
  AnnotationResult result;
  result.notes = std::move(notes);
  auto& ns = result.notes;
  auto& report = result.report;
  Sampler rng(targets.seed);
  const int strings = spec.string_count();

  auto add = [&](std::size_t i, Technique t) { ns[i].techniques.push_back(t); };

  // Slides: opt-in, connects every eligible pair.
  if (targets.slides) {
    for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
      if (!can_slide(ns[i], ns[i + 1])) continue;
      auto& c = report.counts[{ns[i].string(), TechniqueKind::SlideStart}];
      ++c.candidates;
      ++c.inserted;
      add(i, {TechniqueKind::SlideStart, 0});
      add(i + 1, {TechniqueKind::SlideStop, 0});
    }
    for (auto& [key, c] : report.counts) {
      c.notes_on_string = count_on_string(ns, key.first);
      c.target = c.candidates;
    }
  }

  // Bends: sample cliche rewrites per string of the bent note.
  {
    auto proposals = find_bend_opportunities(ns, spec, fingering, targets, &report.diagnostics);
    std::set<std::size_t> seen;
    std::map<int, std::vector<BendProposal>> by_string;
    for (auto& p : proposals) {
      if (seen.insert(p.bend_index).second) by_string[p.string].push_back(std::move(p));
    }
    std::map<int, int> notes_before;
    for (int s = 1; s <= strings; ++s) notes_before[s] = count_on_string(ns, s);

    auto try_apply = [&](const BendProposal& p) {
      for (const auto& [i, state] : p.anchors) {
        if (ns[i].state != state) return false;
      }
      std::size_t lo = p.bend_index;
      std::size_t hi = p.bend_index;
      for (const auto& [i, state] : p.rewrites) {
        if (!ns[i].techniques.empty()) return false;
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
      std::vector<std::pair<std::size_t, RichNote>> saved;
      for (const auto& [i, state] : p.rewrites) {
        saved.emplace_back(i, ns[i]);
        ns[i].state = state;
      }
      for (const auto& [i, t] : p.annotations) ns[i].techniques.push_back(t);
      std::vector<std::string> problems;
      check_window(ns, lo, hi, spec, fingering, targets, problems);
      if (problems.empty()) return true;
      for (auto& [i, note] : saved) ns[i] = std::move(note);
      return false;
    };

    for (int s = 1; s <= strings; ++s) {
      auto it = by_string.find(s);
      auto& c = report.counts[{s, TechniqueKind::Bend}];
      c.notes_on_string = notes_before[s];
      c.target = target_count(targets.ratio(s, TechniqueKind::Bend), c.notes_on_string);
      if (it == by_string.end()) continue;
      auto& cands = it->second;
      c.candidates = static_cast<int>(cands.size());
      const bool all = targets.insert_everywhere.count(TechniqueKind::Bend) > 0 ||
                       c.candidates <= c.target;
      if (!all) rng.shuffle(cands);
      for (const auto& p : cands) {
        if (!all && c.inserted >= c.target) break;
        if (try_apply(p)) ++c.inserted;
      }
    }
  }

  // Hammer-ons and pull-offs: uniform sampling among feasible notes.
  for (int s = 1; s <= strings; ++s) {
    const int on_string = count_on_string(ns, s);
    for (auto kind : {TechniqueKind::HammerOn, TechniqueKind::PullOff}) {
      std::vector<std::size_t> cands;
      for (std::size_t i = 1; i < ns.size(); ++i) {
        const auto& cur = ns[i];
        const auto& prev = ns[i - 1];
        if (cur.string() != s) continue;
        const bool ok = kind == TechniqueKind::HammerOn ? can_hammer_on(prev, cur) : can_pull_off(prev, cur);
        if (!ok || cur.has(TechniqueKind::HammerOn) || cur.has(TechniqueKind::PullOff) ||
            cur.has(TechniqueKind::Bend) || cur.has(TechniqueKind::BendRelease) ||
            cur.has(TechniqueKind::SlideStop) || prev.has(TechniqueKind::Bend)) {
          continue;
        }
        cands.push_back(i);
      }
      auto& c = report.counts[{s, kind}];
      c.notes_on_string = on_string;
      c.target = target_count(targets.ratio(s, kind), on_string);
      c.candidates = static_cast<int>(cands.size());
      const bool all = targets.insert_everywhere.count(kind) > 0 || c.candidates <= c.target;
      if (!all) {
        rng.shuffle(cands);
        cands.resize(static_cast<std::size_t>(c.target));
        std::sort(cands.begin(), cands.end());
      }
      for (std::size_t i : cands) add(i, {kind, 0});
      c.inserted = static_cast<int>(cands.size());
    }
  }

  // Vibrato: "likely" notes first, then longest first, then earliest.
  for (int s = 1; s <= strings; ++s) {
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto& n = ns[i];
      if (n.string() != s || vibrato_level(n, targets) == VibratoLevel::None) continue;
      if (n.has(TechniqueKind::Bend) || n.has(TechniqueKind::BendRelease)) continue;
      cands.push_back(i);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
      const bool la = vibrato_level(ns[a], targets) == VibratoLevel::Likely;
      const bool lb = vibrato_level(ns[b], targets) == VibratoLevel::Likely;
      if (la != lb) return la;
      return ns[a].event.duration_s > ns[b].event.duration_s;
    });
    auto& c = report.counts[{s, TechniqueKind::Vibrato}];
    c.notes_on_string = count_on_string(ns, s);
    c.target = target_count(targets.ratio(s, TechniqueKind::Vibrato), c.notes_on_string);
    c.candidates = static_cast<int>(cands.size());
    const bool all = targets.insert_everywhere.count(TechniqueKind::Vibrato) > 0 ||
                     c.candidates <= c.target;
    if (!all) cands.resize(static_cast<std::size_t>(c.target));
    for (std::size_t i : cands) add(i, {TechniqueKind::Vibrato, 0});
    c.inserted = static_cast<int>(cands.size());
  }

  // Keep each note's technique list in a canonical order for stable output.
  for (auto& n : ns) {
    std::stable_sort(n.techniques.begin(), n.techniques.end(),
                     [](const Technique& a, const Technique& b) { return a.kind < b.kind; });
  }
  return result;
}

}  // namespace richtab
