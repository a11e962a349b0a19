#include <algorithm>
#include <cmath>

#include "richtab/errors.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

std::string_view technique_key(TechniqueKind kind) {
  switch (kind) {
    case TechniqueKind::HammerOn: return "hammer_on";
    case TechniqueKind::PullOff: return "pull_off";
    case TechniqueKind::Vibrato: return "vibrato";
    case TechniqueKind::SlideStart: return "slide_start";
    case TechniqueKind::SlideStop: return "slide_stop";
    case TechniqueKind::Bend: return "bend";
    case TechniqueKind::BendRelease: return "bend_release";
  }
  return "unknown";
}

std::optional<TechniqueKind> technique_from_key(std::string_view key) {
  for (auto kind : {TechniqueKind::HammerOn, TechniqueKind::PullOff, TechniqueKind::Vibrato,
                    TechniqueKind::SlideStart, TechniqueKind::SlideStop, TechniqueKind::Bend,
                    TechniqueKind::BendRelease}) {
    if (technique_key(kind) == key) return kind;
  }
  return std::nullopt;
}

std::string_view rated_key(TechniqueKind kind) {
  return kind == TechniqueKind::SlideStart ? std::string_view("slide") : technique_key(kind);
}

std::optional<TechniqueKind> rated_from_key(std::string_view key) {
  for (auto kind : kRatedKinds) {
    if (rated_key(kind) == key) return kind;
  }
  return std::nullopt;
}

double TechniqueTargets::ratio(int string, TechniqueKind kind) const {
  auto s = ratios.find(string);
  if (s == ratios.end()) return 0.0;
  auto k = s->second.find(kind);
  return k == s->second.end() ? 0.0 : k->second;
}

int TechniqueTargets::max_bend(int finger) const {
  if (finger < 1 || finger > 4) return 0;
  return max_bend_semitones[static_cast<std::size_t>(finger - 1)];
}

void TechniqueTargets::validate() const {
  for (const auto& [string, row] : ratios) {
    if (string < 1) throw ConfigError("ratio table string index must be >= 1");
    for (const auto& [kind, r] : row) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw ConfigError("ratio for string " + std::to_string(string) + " " +
                          std::string(rated_key(kind)) + " outside [0,1]");
      }
      if (std::find(kRatedKinds.begin(), kRatedKinds.end(), kind) == kRatedKinds.end()) {
        throw ConfigError("technique " + std::string(technique_key(kind)) + " takes no ratio");
      }
    }
  }
  for (int m : max_bend_semitones) {
    if (m < 0) throw ConfigError("max bend semitones must be >= 0");
  }
  if (!(vibrato_possible_s >= 0.0) || !(vibrato_possible_s <= vibrato_likely_s)) {
    throw ConfigError("vibrato thresholds must satisfy 0 <= possible <= likely");
  }
  if (!(min_bend_duration_s >= 0.0)) throw ConfigError("min bend duration must be >= 0");
}

RatioTable TechniqueTargets::default_ratios(int string_count) {
  // hammer_on, pull_off, vibrato, slide, bend for strings 1..6
  static constexpr double kRows[6][5] = {
      {0.06, 0.07, 0.14, 0.02, 0.12},
      {0.06, 0.08, 0.14, 0.02, 0.12},
      {0.07, 0.07, 0.12, 0.02, 0.09},
      {0.08, 0.05, 0.09, 0.02, 0.03},
      {0.07, 0.05, 0.07, 0.02, 0.01},
      {0.05, 0.04, 0.06, 0.02, 0.01},
  };
  RatioTable table;
  for (int s = 1; s <= string_count; ++s) {
    const auto& row = kRows[std::min(s, 6) - 1];
    for (std::size_t k = 0; k < kRatedKinds.size(); ++k) table[s][kRatedKinds[k]] = row[k];
  }
  return table;
}

TechniqueTargets TechniqueTargets::defaults(int string_count) {
  TechniqueTargets t;
  t.ratios = default_ratios(string_count);
  return t;
}

}  // namespace richtab
