#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "richtab/fingering.hpp"
#include "richtab/midi_ingest.hpp"
#include "richtab/musicxml.hpp"
#include "richtab/quantize.hpp"
#include "richtab/run_config.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

std::string_view version();

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitInfeasible = 2, kExitInternal = 3 };

/// Everything one melody produces, in memory.
struct GenerateResult {
  Melody melody;
  std::vector<QuantizedRhythm> rhythm;
  FingeringSolution solution;
  AnnotationResult annotation;
  std::string musicxml;
  std::string solution_json;
  std::string annotations_json;
};

/// Solve, annotate and export an already parsed melody. `input_name` is recorded in
/// the metadata. Throws the stage errors.
GenerateResult generate(const Melody& melody, const RunConfig& config, const std::string& input_name);

struct GenerateOptions {
  std::filesystem::path midi;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<std::size_t> track;
  bool clip_overlaps = false;
  std::optional<std::filesystem::path> dump_solution;
  std::optional<std::filesystem::path> dump_annotations;
};

struct StatsOptions {
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> output;
  /// One file: compare the scanned corpus with it. Two files: compare them.
  std::vector<std::filesystem::path> compare;
};

/// Exit code for an exception escaping a command; writes "error [stage]: ..." to err.
int report_error(const std::exception& e, std::ostream& err);

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);
/// Writes the complete default configuration to `output` or to `out`.
int cmd_config_init(const std::optional<std::filesystem::path>& output, std::ostream& out,
                    std::ostream& err);

}  // namespace richtab
