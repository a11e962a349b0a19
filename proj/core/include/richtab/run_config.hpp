#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "richtab/fingering.hpp"
#include "richtab/fretboard.hpp"
#include "richtab/quantize.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

struct RunConfig {
  std::string instrument_name = "Guitar";
  InstrumentSpec instrument;
  FingeringConfig fingering;
  TechniqueTargets techniques = TechniqueTargets::defaults();
  int grid = kDefaultGrid;
  std::uint64_t seed = 1;
  std::optional<std::size_t> track;
  bool clip_overlaps = false;
  std::string input;
  std::string output;
  std::string dump_solution;
  std::string dump_annotations;
  int verbosity = 0;

  /// Throws ConfigError on any broken invariant.
  void validate() const;
};

/// Parses the JSON configuration. Missing keys keep their defaults, unknown keys are
/// rejected. `techniques.ratios` is either an inline table, a stats document, or a
/// path to a stats file resolved against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

/// Complete configuration with every field spelled out; parses back to `config`.
std::string run_config_to_json(const RunConfig& config, int indent = 2);

/// Ratio table from either {"1": {"bend": 0.1, ...}} or a stats document.
RatioTable ratio_table_from_json(std::string_view json_text);

}  // namespace richtab
