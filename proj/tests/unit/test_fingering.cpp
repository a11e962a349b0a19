#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "melodies.hpp"
#include "oracles.hpp"
#include "richtab/errors.hpp"
#include "richtab/fingering.hpp"

using namespace richtab;
using testsupport::FingeringOracle;
using testsupport::feasible_events;
using testsupport::reachable_last;

namespace {

const InstrumentSpec k612({64, 59, 55, 50, 45, 40}, 12);

NoteEvent note(int pitch, std::size_t index = 0, double ioi = 1.0) {
  NoteEvent e;
  e.index = index;
  e.pitch = pitch;
  e.ioi_s = ioi;
  return e;
}

FingeringState st(int string, int fret, int finger, int hand) { return {{string, fret}, finger, hand}; }

void expect_valid(const std::vector<NoteEvent>& ev, const FingeringSolution& sol, const InstrumentSpec& spec,
                  const FingeringConfig& cfg) {
  ASSERT_EQ(sol.states.size(), ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto& s = sol.states[i];
    EXPECT_EQ(spec.pitch_at(s.placement), ev[i].pitch);
    EXPECT_EQ(s.finger == 0, s.placement.fret == 0);
    EXPECT_TRUE(satisfies_span(s, cfg, spec));
    if (i > 0) EXPECT_TRUE(feasible(sol.states[i - 1], s, ev[i - 1].ioi_s, cfg).ok) << "pair " << i;
  }
}

}  // namespace

TEST(Enumerate, Pitch64Defaults) {
  FingeringConfig cfg;
  InstrumentSpec spec;
  const auto states = enumerate_states(note(64), spec, cfg);
  auto has = [&](FingeringState s) { return std::find(states.begin(), states.end(), s) != states.end(); };
  EXPECT_TRUE(has(st(2, 5, 1, 5)));
  for (int p : {3, 4}) EXPECT_TRUE(has(st(2, 5, 2, p)));
  for (int p : {1, 2, 3}) EXPECT_TRUE(has(st(2, 5, 3, p)));
  for (int p : {1, 2}) EXPECT_TRUE(has(st(2, 5, 4, p)));
  for (int p = 1; p <= 22; ++p) EXPECT_TRUE(has(st(1, 0, 0, p)));
  // exactly these on string 2
  EXPECT_EQ(std::count_if(states.begin(), states.end(), [](auto& s) { return s.placement.string == 2; }), 8);
  EXPECT_TRUE(std::is_sorted(states.begin(), states.end()));
  EXPECT_EQ(states, (FingeringOracle{spec, cfg}.states(64)));
}

TEST(Enumerate, UnplayableAndOpenOnly) {
  FingeringConfig cfg;
  InstrumentSpec spec;
  try {
    enumerate_states(note(39, 4), spec, cfg);
    FAIL();
  } catch (const UnplayableNoteError& e) {
    EXPECT_EQ(e.note_index(), 4u);
    EXPECT_EQ(e.pitch(), 39);
  }
  const auto states = enumerate_states(note(40), spec, cfg);
  ASSERT_EQ(states.size(), 22u);
  for (int p = 1; p <= 22; ++p) EXPECT_EQ(states[static_cast<std::size_t>(p - 1)], st(6, 0, 0, p));
}

TEST(Costs, NodeExamples) {
  FingeringConfig cfg;
  auto a = node_cost(st(2, 5, 1, 5), cfg);
  EXPECT_EQ(a.zone, 0);
  EXPECT_EQ(a.hs, 0);
  EXPECT_EQ(a.open, 0);
  auto b = node_cost(st(1, 0, 0, 7), cfg);
  EXPECT_EQ(b.open, 1);
  EXPECT_EQ(b.zone, 0);
  EXPECT_EQ(node_cost(st(3, 9, 4, 4), cfg).hs, 4);
  EXPECT_EQ(node_cost(st(3, 9, 4, 4), cfg).zone, 1);  // hand at 4 is one below the zone
  EXPECT_EQ(node_cost(st(1, 0, 0, 15), cfg).zone, 3);
  const auto c = node_cost(st(3, 9, 4, 4), cfg);
  EXPECT_EQ(c.total(), c.pc + c.sc + c.hs + c.open + c.zone);
}

TEST(Costs, TransitionExamples) {
  FingeringConfig cfg;
  auto same = transition_cost(st(2, 5, 1, 5), st(2, 7, 3, 5), cfg);
  EXPECT_EQ(same.pc, 0);
  EXPECT_EQ(same.sc, 0);
  EXPECT_EQ(transition_cost(st(2, 5, 1, 5), st(2, 8, 1, 8), cfg).pc, 12);
  EXPECT_EQ(transition_cost(st(2, 8, 1, 8), st(2, 5, 1, 5), cfg).sc, 0);
  EXPECT_EQ(transition_cost(st(3, 5, 1, 5), st(1, 5, 1, 5), cfg).sc, 2);
}

TEST(Feasible, Examples) {
  FingeringConfig cfg;
  cfg.t_long = 0.05;
  auto f = feasible(st(2, 5, 1, 5), st(2, 10, 1, 10), 0.1, cfg);
  EXPECT_FALSE(f.ok);
  EXPECT_FALSE(f.reason.empty());
  cfg = FingeringConfig{};
  EXPECT_TRUE(feasible(st(2, 7, 2, 6), st(3, 7, 2, 6), 0.5, cfg).ok);  // mini-barre
  EXPECT_TRUE(feasible(st(2, 7, 2, 6), st(2, 9, 2, 8), 0.5, cfg).ok);  // slide posture
  EXPECT_FALSE(feasible(st(2, 7, 2, 6), st(3, 9, 2, 8), 0.5, cfg).ok);
  cfg.same_finger = SameFingerPolicy::Forbid;
  EXPECT_FALSE(feasible(st(2, 7, 2, 6), st(3, 7, 2, 6), 0.5, cfg).ok);
  EXPECT_TRUE(feasible(st(2, 7, 2, 6), st(2, 7, 2, 6), 0.5, cfg).ok);
  cfg.same_finger = SameFingerPolicy::AllowAll;
  EXPECT_TRUE(feasible(st(2, 7, 2, 6), st(3, 9, 2, 8), 0.5, cfg).ok);
  // exactly enough time
  cfg = FingeringConfig{};
  EXPECT_TRUE(feasible(st(2, 5, 1, 5), st(3, 9, 2, 8), 0.03 * 3 + 0.02, cfg).ok);
  EXPECT_FALSE(feasible(st(2, 5, 1, 5), st(3, 9, 2, 8), 0.03 * 3 + 0.02 - 1e-6, cfg).ok);
}

TEST(Config, Validation) {
  FingeringConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.w_pc = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = FingeringConfig{};
  cfg.spans[2] = {4, 2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = FingeringConfig{};
  cfg.t_vert = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Solve, SingleNote64) {
  const std::vector<NoteEvent> ev{note(64)};
  const auto sol = solve(ev, InstrumentSpec(), FingeringConfig{});
  ASSERT_EQ(sol.states.size(), 1u);
  EXPECT_EQ(sol.states[0], st(2, 5, 1, 5));
  EXPECT_EQ(sol.objective, 0.0);
}

TEST(Solve, EmptyMelody) {
  const std::vector<NoteEvent> ev;
  EXPECT_TRUE(solve(ev, InstrumentSpec(), FingeringConfig{}).states.empty());
  const auto bf = brute_force_solve(ev, InstrumentSpec(), FingeringConfig{});
  EXPECT_TRUE(bf.states.empty());
  EXPECT_EQ(bf.objective, 0.0);
}

TEST(Solve, OneNoteMatchesBruteForce) {
  FingeringConfig cfg;
  for (int p = 40; p <= 86; ++p) {
    const std::vector<NoteEvent> ev{note(p)};
    const auto a = solve(ev, InstrumentSpec(), cfg);
    const auto b = brute_force_solve(ev, InstrumentSpec(), cfg);
    EXPECT_EQ(a.states, b.states) << p;
    EXPECT_EQ(a.objective, b.objective) << p;
  }
}

TEST(Solve, UnplayableNoteIndex) {
  std::vector<NoteEvent> ev;
  for (int i = 0; i < 9; ++i) ev.push_back(note(i == 7 ? 30 : 60, static_cast<std::size_t>(i), 0.5));
  try {
    solve(ev, InstrumentSpec(), FingeringConfig{});
    FAIL();
  } catch (const UnplayableNoteError& e) {
    EXPECT_EQ(e.note_index(), 7u);
    EXPECT_NE(std::string(e.what()).find("note 7 unplayable"), std::string::npos);
  }
}

TEST(Solve, NoFeasiblePathNamesFirstEmptyLayer) {
  FingeringConfig cfg;
  cfg.t_long = 1e6;
  cfg.t_vert = 1e6;
  // 40 exists only on string 6, 86 only on string 1: the string change cannot happen.
  const std::vector<NoteEvent> ev{note(40, 0), note(40, 1), note(86, 2), note(86, 3)};
  try {
    solve(ev, InstrumentSpec(), cfg);
    FAIL();
  } catch (const NoFeasiblePathError& e) {
    EXPECT_EQ(e.layer(), 2u);
    EXPECT_NE(std::string(e.what()).find("note 2"), std::string::npos);
  }
  try {
    brute_force_solve(ev, InstrumentSpec(), cfg);
    FAIL();
  } catch (const NoFeasiblePathError& e) {
    EXPECT_EQ(e.layer(), 2u);
  }
}

TEST(BruteForce, VisitBudget) {
  std::mt19937_64 rng(1);
  const auto ev = testsupport::random_events(rng, 8, 55, 70, 0.5, 1.0);
  BruteForceOptions opts;
  opts.max_visits = 1000;
  opts.prune = false;
  EXPECT_THROW(brute_force_solve(ev, k612, FingeringConfig{}, opts), InstanceTooLargeError);
}

TEST(Oracle, SolveMatchesBruteForceOn200RandomMelodies) {
  std::mt19937_64 rng(2024);
  FingeringConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ev = feasible_events(rng, k612, cfg, 4 + trial % 3, 40, 76, 0.1, 1.0);
    const auto a = solve(ev, k612, cfg);
    const auto b = brute_force_solve(ev, k612, cfg);
    ASSERT_EQ(a.objective, b.objective) << "trial " << trial;
    ASSERT_EQ(a.states, b.states) << "trial " << trial;
  }
}

TEST(Oracle, PruningDoesNotChangeBruteForce) {
  std::mt19937_64 rng(99);
  FingeringConfig cfg;
  BruteForceOptions no_prune;
  no_prune.prune = false;
  for (int trial = 0; trial < 30; ++trial) {
    const auto ev = feasible_events(rng, k612, cfg, 4, 40, 76, 0.1, 1.0);
    const auto a = brute_force_solve(ev, k612, cfg);
    const auto b = brute_force_solve(ev, k612, cfg, no_prune);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.states, b.states);
  }
}

TEST(Oracle, SolveMatchesTestSideEnumeration) {
  std::mt19937_64 rng(7);
  int feasible_count = 0;
  for (int trial = 0; trial < 60; ++trial) {
    FingeringConfig cfg;
    cfg.w_pc = static_cast<double>(rng() % 5);
    cfg.w_sc = static_cast<double>(rng() % 5);
    cfg.w_hs = static_cast<double>(rng() % 5);
    cfg.w_open = static_cast<double>(rng() % 5);
    cfg.w_zone = static_cast<double>(rng() % 3);
    cfg.same_finger = static_cast<SameFingerPolicy>(trial % 3);
    const auto ev = testsupport::random_events(rng, 4, 40, 76, 0.05, 0.6);
    const double expected = FingeringOracle{k612, cfg}.minimum(ev);
    if (std::isinf(expected)) {
      EXPECT_THROW(solve(ev, k612, cfg), NoFeasiblePathError);
      continue;
    }
    ++feasible_count;
    const auto sol = solve(ev, k612, cfg);
    EXPECT_DOUBLE_EQ(sol.objective, expected) << "trial " << trial;
    expect_valid(ev, sol, k612, cfg);
  }
  EXPECT_GT(feasible_count, 20);
}

TEST(Oracle, InfeasibleLayerMatchesReachability) {
  std::mt19937_64 rng(8);
  FingeringConfig cfg;
  cfg.t_long = 0.1;
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto ev = testsupport::random_events(rng, 2 + trial % 30, 40, 86, 0.05, 0.8);
    const auto dead = FingeringOracle{InstrumentSpec(), cfg}.dead_layer(ev);
    if (!dead) {
      expect_valid(ev, solve(ev, InstrumentSpec(), cfg), InstrumentSpec(), cfg);
      continue;
    }
    ++infeasible;
    try {
      solve(ev, InstrumentSpec(), cfg);
      ADD_FAILURE() << "trial " << trial << " solved an infeasible instance";
    } catch (const NoFeasiblePathError& e) {
      EXPECT_EQ(e.layer(), *dead) << "trial " << trial;
    }
  }
  EXPECT_GT(infeasible, 10);
}

TEST(Properties, FeasibilityOfOutputOnRandomMelodies) {
  std::mt19937_64 rng(31);
  const InstrumentSpec spec;
  FingeringConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const auto ev = feasible_events(rng, spec, cfg, 1 + trial % 64, 40, 86, 0.1, 1.0);
    const auto sol = solve(ev, spec, cfg);
    expect_valid(ev, sol, spec, cfg);
    EXPECT_DOUBLE_EQ(evaluate_path(sol.states, cfg), sol.objective);
    double sum = 0;
    for (const auto& c : sol.per_transition) sum += c.total();
    EXPECT_NEAR(sum, sol.objective, 1e-9);
  }
}

TEST(Properties, ScaleInvariance) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    FingeringConfig cfg;
    const auto ev = feasible_events(rng, k612, cfg, 3 + trial % 20, 40, 76, 0.1, 1.0);
    const auto base = solve(ev, k612, cfg);
    for (double c : {0.5, 3.0, 10.0}) {
      FingeringConfig scaled = cfg;
      scaled.w_pc *= c;
      scaled.w_sc *= c;
      scaled.w_hs *= c;
      scaled.w_open *= c;
      scaled.w_zone *= c;
      EXPECT_EQ(solve(ev, k612, scaled).states, base.states) << "trial " << trial << " c " << c;
    }
  }
}

TEST(Properties, ZeroWeightsDeterministic) {
  std::mt19937_64 rng(5);
  FingeringConfig cfg;
  cfg.w_pc = cfg.w_sc = cfg.w_hs = cfg.w_open = cfg.w_zone = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto ev = feasible_events(rng, k612, cfg, 4, 40, 76, 0.2, 1.0);
    const auto a = solve(ev, k612, cfg);
    EXPECT_EQ(a.objective, 0.0);
    EXPECT_EQ(a.states, solve(ev, k612, cfg).states);
    EXPECT_EQ(a.states, brute_force_solve(ev, k612, cfg).states);
    // every path costs zero, so the tie-break alone picks the lowest reachable final state
    EXPECT_EQ(a.states.back(), reachable_last(FingeringOracle{k612, cfg}, ev).front());
  }
}

TEST(Properties, WeightMonotonicityOnFixtures) {
  const std::vector<double> sweep{0, 1, 2, 4, 8, 16};
  const InstrumentSpec spec;
  for (const auto& name : testsupport::fixture_names()) {
    const auto m = testsupport::load_fixture(name);
    int prev_pc = INT32_MAX, prev_sc = INT32_MAX, prev_open = INT32_MAX;
    for (double w : sweep) {
      FingeringConfig a, b, c;
      a.w_pc = w;
      b.w_sc = w;
      c.w_open = w;
      const int pc = total_position_change(solve(m.notes, spec, a).states);
      const int sc = total_string_change(solve(m.notes, spec, b).states);
      const int open = open_string_count(solve(m.notes, spec, c).states);
      EXPECT_LE(pc, prev_pc) << name << " w_pc=" << w;
      EXPECT_LE(sc, prev_sc) << name << " w_sc=" << w;
      EXPECT_LE(open, prev_open) << name << " w_open=" << w;
      prev_pc = pc;
      prev_sc = sc;
      prev_open = open;
    }
  }
}
