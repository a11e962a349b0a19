#include "richtab/quantize.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/rational.hpp>

namespace richtab {

namespace {

using Rational = boost::rational<std::int64_t>;

Fraction to_fraction(const Rational& r) { return {r.numerator(), r.denominator()}; }
Rational to_rational(const Fraction& f) { return {f.num, f.den}; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

struct Glyph {
  Rational base;  // fraction of a whole note
  int dots;
  bool triplet;
};

// Finds a single glyph (breve down to 1024th, up to two dots, optional 3:2) for `whole`.
std::optional<Glyph> single_glyph(const Rational& whole) {
  for (bool triplet : {false, true}) {
    for (int dots = 0; dots <= 2; ++dots) {
      for (std::int64_t den = 1; den <= 1024; den *= 2) {
        for (std::int64_t num : {std::int64_t{2}, std::int64_t{1}}) {
          if (num == 2 && den != 1) continue;
          Rational base(num, den);
          Rational dotted = base * (Rational(2) - Rational(1, std::int64_t{1} << dots));
          if (triplet) dotted *= Rational(2, 3);
          if (dotted == whole) return Glyph{base, dots, triplet};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_allowed_grid(int grid) {
  return std::find(kAllowedGrids.begin(), kAllowedGrids.end(), grid) != kAllowedGrids.end();
}

std::int64_t snap_to_grid(Tick ticks, int ppq, int grid) {
  // nearest n with n * ppq / grid ~ ticks; exact halves go down
  return ceil_div(2 * ticks * grid - ppq, 2 * static_cast<std::int64_t>(ppq));
}

std::vector<MeasureSpan> layout_measures(std::span<const MeterChange> meter, int ppq,
                                         Fraction end_quarters) {
  std::vector<MeasureSpan> bars;
  const Rational end = to_rational(end_quarters);
  Rational start(0);
  std::size_t active = 0;
  int beats = 4;
  int beat_type = 4;
  do {
    while (active < meter.size() && Rational(meter[active].tick, ppq) <= start) {
      beats = meter[active].beats;
      beat_type = meter[active].beat_type;
      ++active;
    }
    Rational length(std::int64_t{4} * beats, beat_type);
    bars.push_back({to_fraction(start), to_fraction(length), beats, beat_type});
    start += length;
  } while (start < end);
  return bars;
}

std::vector<QuantizedRhythm> quantize(std::span<const NoteEvent> events, int ppq, int grid,
                                      std::span<const MeterChange> meter) {
  if (!is_allowed_grid(grid)) throw std::invalid_argument("unsupported quantization grid");
  std::vector<QuantizedRhythm> out(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& q = out[i];
    q.grid = grid;
    q.onset_units = std::max<std::int64_t>(0, snap_to_grid(events[i].onset_ticks, ppq, grid));
    if (i > 0 && q.onset_units <= out[i - 1].onset_units) q.onset_units = out[i - 1].onset_units + 1;
    q.duration_units =
        std::max<std::int64_t>(1, snap_to_grid(events[i].duration_ticks, ppq, grid));
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    out[i].duration_units =
        std::min(out[i].duration_units, out[i + 1].onset_units - out[i].onset_units);
  }

  Rational end_q(0);
  if (!out.empty()) end_q = Rational(out.back().onset_units + out.back().duration_units, grid);
  const auto bars = layout_measures(meter, ppq, to_fraction(end_q));

  std::size_t bar = 0;
  for (auto& q : out) {
    Rational whole(q.duration_units, std::int64_t{4} * grid);
    if (auto glyph = single_glyph(whole)) {
      q.value = to_fraction(glyph->base);
      q.dots = glyph->dots;
      if (glyph->triplet) q.tuplet = TupletRatio{3, 2};
    } else {
      q.value = to_fraction(whole);
    }
    Rational onset(q.onset_units, grid);
    while (bar + 1 < bars.size() && to_rational(bars[bar + 1].start) <= onset) ++bar;
    q.measure = bar;
    q.beat_offset = to_fraction(onset - to_rational(bars[bar].start));
  }
  return out;
}

std::vector<QuantizedRhythm> quantize(const Melody& melody, int grid) {
  return quantize(melody.notes, melody.ppq, grid, melody.meter);
}

std::vector<NoteEvent> expand(std::span<const QuantizedRhythm> rhythm,
                              std::span<const NoteEvent> events, int ppq) {
  std::vector<NoteEvent> out(events.begin(), events.end());
  for (std::size_t i = 0; i < out.size() && i < rhythm.size(); ++i) {
    const Tick unit = ppq / rhythm[i].grid;
    out[i].onset_ticks = rhythm[i].onset_units * unit;
    out[i].duration_ticks = rhythm[i].duration_units * unit;
  }
  return out;
}

}  // namespace richtab
