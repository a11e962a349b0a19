#include "richtab/pipeline.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "richtab/corpus_stats.hpp"
#include "richtab/errors.hpp"
#include "richtab/json_dump.hpp"

namespace richtab {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Stage::Export, "cannot write " + p.string());
  out << text;
  if (!out.flush()) throw Error(Stage::Export, "write failed for " + p.string());
}

std::string read_text(const std::filesystem::path& p, Stage stage) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(stage, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view version() { return "0.1.0"; }

GenerateResult generate(const Melody& melody, const RunConfig& config, const std::string& input_name) {
  GenerateResult r;
  r.melody = melody;
  r.rhythm = quantize(melody, config.grid);
  r.solution = solve(melody.notes, config.instrument, config.fingering);

  TechniqueTargets targets = config.techniques;
  targets.seed = config.seed;
  r.annotation = annotate(make_rich_notes(melody.notes, r.solution.states), config.instrument,
                          config.fingering, targets);
  const auto problems = validate_annotations(r.annotation.notes, config.instrument, config.fingering, targets);
  if (!problems.empty()) {
    throw std::logic_error("annotation self-check failed: " + problems.front());
  }

  RunMetadata meta;
  meta.version = std::string(version());
  meta.seed = config.seed;
  meta.input = input_name;
  meta.config_json = run_config_to_json(config, -1);

  ScoreOptions opts;
  opts.ppq = melody.ppq;
  opts.grid = config.grid;
  opts.meter = melody.meter.empty() ? std::vector<MeterChange>{MeterChange{}} : melody.meter;
  opts.title = input_name;
  opts.metadata = {{"richtab-version", meta.version},
                   {"seed", std::to_string(meta.seed)},
                   {"input", input_name},
                   {"config", meta.config_json}};
  auto doc = build_score(r.annotation.notes, r.rhythm, config.instrument, opts);
  doc.part_name = config.instrument_name;
  r.musicxml = serialize(doc);
  r.solution_json = dump_solution(melody.notes, r.solution, meta);
  r.annotations_json = dump_annotations(r.annotation.notes, r.annotation.report, meta);
  return r;
}

int report_error(const std::exception& e, std::ostream& err) {
  if (const auto* re = dynamic_cast<const Error*>(&e)) {
    err << "error [" << stage_name(re->stage()) << "]: " << re->what() << '\n';
    if (dynamic_cast<const NoFeasiblePathError*>(re)) return kExitInfeasible;
    if (dynamic_cast<const InstanceTooLargeError*>(re)) return kExitInternal;
    return kExitInput;
  }
  err << "internal error: " << e.what() << '\n';
  return kExitInternal;
}

int cmd_generate(const GenerateOptions& options, std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = options.config ? load_run_config(*options.config) : RunConfig{};
    if (options.seed) config.seed = *options.seed;
    if (options.grid) config.grid = *options.grid;
    if (options.track) config.track = *options.track;
    if (options.clip_overlaps) config.clip_overlaps = true;
    config.input = options.midi.string();
    if (options.output) config.output = options.output->string();
    if (config.output.empty()) {
      config.output = std::filesystem::path(options.midi).replace_extension(".musicxml").string();
    }
    if (options.dump_solution) config.dump_solution = options.dump_solution->string();
    if (options.dump_annotations) config.dump_annotations = options.dump_annotations->string();
    config.techniques.seed = config.seed;
    config.validate();

    ParseOptions parse;
    parse.track = config.track;
    parse.overlap = config.clip_overlaps ? OverlapPolicy::Clip : OverlapPolicy::Error;
    const Melody melody = read_midi_file(options.midi, parse);

    const auto result = generate(melody, config, options.midi.filename().string());
    write_file(config.output, result.musicxml);
    if (!config.dump_solution.empty()) write_file(config.dump_solution, result.solution_json);
    if (!config.dump_annotations.empty()) write_file(config.dump_annotations, result.annotations_json);

    std::size_t techniques = 0;
    for (const auto& n : result.annotation.notes) techniques += n.techniques.size();
    out << "wrote " << config.output << ": " << melody.notes.size() << " notes, objective "
        << result.solution.objective << ", " << techniques << " technique marks\n";
    if (config.verbosity > 0) {
      for (const auto& d : result.annotation.report.diagnostics) err << "note: " << d << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err) {
  try {
    std::optional<CorpusStats> scanned;
    if (options.corpus) {
      const auto files = collect_corpus_files(*options.corpus);
      auto result = scan_corpus(files);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      out << "scanned " << result.files_used << " of " << files.size() << " files\n";
      out << format_stats_table(result.stats);
      if (options.output) write_file(*options.output, stats_to_json(result.stats));
      scanned = std::move(result.stats);
    }
    if (options.compare.size() > 2 || (options.compare.size() == 1 && !scanned)) {
      throw ConfigError("--compare takes two stats files, or one alongside a corpus directory");
    }
    if (!options.compare.empty()) {
      const CorpusStats a =
          scanned ? *scanned : stats_from_json(read_text(options.compare[0], Stage::Stats));
      const CorpusStats b = stats_from_json(read_text(options.compare.back(), Stage::Stats));
      out << format_comparison(compare_distributions(a, b));
    }
    if (!scanned && options.compare.empty()) {
      throw ConfigError("stats needs a corpus directory or --compare");
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_config_init(const std::optional<std::filesystem::path>& output, std::ostream& out,
                    std::ostream& err) {
  try {
    const std::string text = run_config_to_json(RunConfig{});
    if (output) {
      write_file(*output, text);
      out << "wrote " << output->string() << '\n';
    } else {
      out << text;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

}  // namespace richtab
