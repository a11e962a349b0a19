#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "richtab/musicxml.hpp"
#include "richtab/techniques.hpp"

namespace richtab {

/// Per-string note counts and technique usage. Bends count once on the bent note,
/// slides once on their start note.
struct CorpusStats {
  long total_notes = 0;
  std::map<int, long> notes_per_string;
  std::map<int, std::map<TechniqueKind, long>> technique_counts;

  void add_note(int string, std::span<const Technique> techniques);
  CorpusStats& merge(const CorpusStats& other);
  /// technique_counts / notes_per_string, every rated kind present for every string seen.
  RatioTable ratios() const;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct ScanResult {
  CorpusStats stats;
  std::vector<std::string> warnings;
  std::size_t files_used = 0;
};

/// .musicxml / .xml / .json files under `dir`, recursively, in path order.
std::vector<std::filesystem::path> collect_corpus_files(const std::filesystem::path& dir);

/// Counts notes from MusicXML tablature or annotation dumps. Unreadable files and
/// notes without string info become warnings. Throws EmptyCorpusError when no note
/// was usable.
ScanResult scan_corpus(std::span<const std::filesystem::path> paths);

CorpusStats stats_from_notes(std::span<const ReparsedNote> notes);

struct ShareRow {
  int string = 0;
  double share_a = 0.0;
  double share_b = 0.0;
};

struct DistributionComparison {
  std::vector<ShareRow> rows;
  double l1 = 0.0;  // in [0, 2]
};

/// Per-string note shares of both corpora and their L1 distance.
/// Throws EmptyCorpusError when either side has no notes.
DistributionComparison compare_distributions(const CorpusStats& a, const CorpusStats& b);

/// Stats file: counts plus a "ratios" table loadable as annotator targets.
std::string stats_to_json(const CorpusStats& stats);
CorpusStats stats_from_json(std::string_view text);

std::string format_stats_table(const CorpusStats& stats);
std::string format_comparison(const DistributionComparison& cmp);

}  // namespace richtab
