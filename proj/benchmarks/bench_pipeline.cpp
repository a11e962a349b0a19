#include <benchmark/benchmark.h>

#include <random>
#include <tuple>
#include <vector>

#include "richtab/fingering.hpp"
#include "richtab/midi_ingest.hpp"
#include "richtab/musicxml.hpp"
#include "richtab/pipeline.hpp"
#include "richtab/techniques.hpp"

using namespace richtab;

namespace {

// Random walk over a pentatonic-ish range; IOIs between 0.25 and 0.75 s at 120 BPM.
Melody walk(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(-3, 3);
  std::uniform_int_distribution<Tick> gap(240, 720);
  std::vector<std::tuple<int, Tick, Tick>> notes;
  int pitch = 64;
  Tick t = 0;
  for (int i = 0; i < n; ++i) {
    pitch = std::clamp(pitch + step(rng), 45, 84);
    const Tick d = gap(rng);
    notes.emplace_back(pitch, t, d);
    t += d;
  }
  return make_melody(notes);
}

void BM_Solve(benchmark::State& state) {
  const auto m = walk(static_cast<int>(state.range(0)), 1);
  const InstrumentSpec spec;
  const FingeringConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(solve(m.notes, spec, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Solve)->RangeMultiplier(2)->Range(64, 2048)->Complexity(benchmark::oN);

void BM_Annotate(benchmark::State& state) {
  const auto m = walk(static_cast<int>(state.range(0)), 2);
  const InstrumentSpec spec;
  const FingeringConfig cfg;
  const auto rich = make_rich_notes(m.notes, solve(m.notes, spec, cfg).states);
  const auto targets = TechniqueTargets::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(annotate(rich, spec, cfg, targets));
}
BENCHMARK(BM_Annotate)->Arg(500)->Arg(2000);

void BM_Generate(benchmark::State& state) {
  const auto m = walk(static_cast<int>(state.range(0)), 3);
  const RunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(generate(m, cfg, "bench.mid"));
}
BENCHMARK(BM_Generate)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
