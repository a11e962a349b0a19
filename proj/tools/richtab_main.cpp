// richtab: MIDI melody -> fingered, technique-annotated MusicXML tablature.
#include <CLI11.hpp>
#include <iostream>

#include "richtab/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Guitar tablature with playing techniques from monophonic MIDI"};
  app.set_version_flag("--version", std::string(richtab::version()));
  app.require_subcommand(1);

  richtab::GenerateOptions gen;
  std::string midi, config, output, dump_solution, dump_annotations;
  auto* generate = app.add_subcommand("generate", "Fingering, techniques and MusicXML for one MIDI file");
  generate->add_option("midi", midi, "Input Standard MIDI File")->required()->check(CLI::ExistingFile);
  generate->add_option("-c,--config", config, "JSON configuration file")->check(CLI::ExistingFile);
  generate->add_option("-o,--output", output, "Output .musicxml (default: input name)");
  generate->add_option("--seed", gen.seed, "Override the configured seed");
  generate->add_option("--grid", gen.grid, "Quantization grid, subdivisions per quarter");
  generate->add_option("--track", gen.track, "Track index to read (default: first with notes)");
  generate->add_flag("--clip-overlaps", gen.clip_overlaps, "Truncate overlapping notes instead of failing");
  generate->add_option("--dump-solution", dump_solution, "Write the fingering solution as JSON");
  generate->add_option("--dump-annotations", dump_annotations, "Write the annotated notes as JSON");

  richtab::StatsOptions stats;
  std::string corpus, stats_out;
  auto* st = app.add_subcommand("stats", "Per-string technique statistics of a corpus");
  st->add_option("corpus", corpus, "Directory of .musicxml files or annotation dumps")
      ->check(CLI::ExistingDirectory);
  st->add_option("-o,--output", stats_out, "Write the stats JSON here");
  st->add_option("--compare", stats.compare, "Stats file(s) to compare note distributions with")
      ->expected(1, 2)
      ->check(CLI::ExistingFile);

  auto* cfg = app.add_subcommand("config", "Configuration helpers");
  cfg->require_subcommand(1);
  std::string init_out;
  auto* init = cfg->add_subcommand("init", "Print or write the complete default configuration");
  init->add_option("-o,--output", init_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : richtab::kExitInput;
  }

  if (*generate) {
    gen.midi = midi;
    if (!config.empty()) gen.config = config;
    if (!output.empty()) gen.output = output;
    if (!dump_solution.empty()) gen.dump_solution = dump_solution;
    if (!dump_annotations.empty()) gen.dump_annotations = dump_annotations;
    return richtab::cmd_generate(gen, std::cout, std::cerr);
  }
  if (*st) {
    if (!corpus.empty()) stats.corpus = corpus;
    if (!stats_out.empty()) stats.output = stats_out;
    return richtab::cmd_stats(stats, std::cout, std::cerr);
  }
  if (*init) {
    std::optional<std::filesystem::path> out;
    if (!init_out.empty()) out = init_out;
    return richtab::cmd_config_init(out, std::cout, std::cerr);
  }
  return richtab::kExitInput;
}
