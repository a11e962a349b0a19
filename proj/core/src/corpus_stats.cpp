#include "richtab/corpus_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "richtab/errors.hpp"
#include "richtab/json_dump.hpp"

namespace richtab {

namespace {

bool is_rated(TechniqueKind kind) {
  return std::find(kRatedKinds.begin(), kRatedKinds.end(), kind) != kRatedKinds.end();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Stage::Stats, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

}  // namespace

void CorpusStats::add_note(int string, std::span<const Technique> techniques) {
  ++total_notes;
  ++notes_per_string[string];
  for (const auto& t : techniques) {
    if (is_rated(t.kind)) ++technique_counts[string][t.kind];
  }
}

CorpusStats& CorpusStats::merge(const CorpusStats& other) {
  total_notes += other.total_notes;
  for (const auto& [s, n] : other.notes_per_string) notes_per_string[s] += n;
  for (const auto& [s, row] : other.technique_counts) {
    for (const auto& [k, c] : row) technique_counts[s][k] += c;
  }
  return *this;
}

RatioTable CorpusStats::ratios() const {
  RatioTable table;
  for (const auto& [s, n] : notes_per_string) {
    auto counts = technique_counts.find(s);
    for (auto kind : kRatedKinds) {
      long c = 0;
      if (counts != technique_counts.end()) {
        auto it = counts->second.find(kind);
        if (it != counts->second.end()) c = it->second;
      }
      table[s][kind] = n > 0 ? static_cast<double>(c) / static_cast<double>(n) : 0.0;
    }
  }
  return table;
}

std::vector<std::filesystem::path> collect_corpus_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(Stage::Stats, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string e = lower_ext(entry.path());
    if (e == ".musicxml" || e == ".xml" || e == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

CorpusStats stats_from_notes(std::span<const ReparsedNote> notes) {
  CorpusStats stats;
  for (const auto& n : notes) stats.add_note(n.string, n.techniques);
  return stats;
}

ScanResult scan_corpus(std::span<const std::filesystem::path> paths) {
  ScanResult result;
  for (const auto& p : paths) {
    try {
      const std::string text = read_file(p);
      std::vector<ReparsedNote> notes;
      if (lower_ext(p) == ".json") {
        notes = parse_annotation_dump(text);
      } else {
        auto parsed = reparse(text);
        for (const auto& w : parsed.warnings) result.warnings.push_back(p.string() + ": " + w);
        notes = std::move(parsed.notes);
      }
      result.stats.merge(stats_from_notes(notes));
      ++result.files_used;
    } catch (const std::exception& e) {
      result.warnings.push_back(p.string() + ": skipped (" + e.what() + ")");
    }
  }
  if (result.stats.total_notes == 0) {
    throw EmptyCorpusError("no usable notes in " + std::to_string(paths.size()) + " corpus file(s)");
  }
  return result;
}

DistributionComparison compare_distributions(const CorpusStats& a, const CorpusStats& b) {
  if (a.total_notes == 0 || b.total_notes == 0) {
    throw EmptyCorpusError("cannot compare against an empty corpus");
  }
  std::map<int, ShareRow> rows;
  for (const auto& [s, n] : a.notes_per_string) {
    rows[s].string = s;
    rows[s].share_a = static_cast<double>(n) / static_cast<double>(a.total_notes);
  }
  for (const auto& [s, n] : b.notes_per_string) {
    rows[s].string = s;
    rows[s].share_b = static_cast<double>(n) / static_cast<double>(b.total_notes);
  }
  DistributionComparison out;
  for (const auto& [s, r] : rows) {
    out.rows.push_back(r);
    out.l1 += std::abs(r.share_a - r.share_b);
  }
  return out;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json doc;
  doc["format"] = kStatsFormat;
  doc["total_notes"] = stats.total_notes;
  nlohmann::ordered_json per_string = nlohmann::ordered_json::object();
  for (const auto& [s, n] : stats.notes_per_string) per_string[std::to_string(s)] = n;
  doc["notes_per_string"] = per_string;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [s, n] : stats.notes_per_string) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    auto it = stats.technique_counts.find(s);
    for (auto kind : kRatedKinds) {
      long c = 0;
      if (it != stats.technique_counts.end() && it->second.count(kind)) c = it->second.at(kind);
      row[std::string(rated_key(kind))] = c;
    }
    counts[std::to_string(s)] = row;
  }
  doc["technique_counts"] = counts;
  nlohmann::ordered_json ratios = nlohmann::ordered_json::object();
  for (const auto& [s, row] : stats.ratios()) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [kind, v] : row) r[std::string(rated_key(kind))] = v;
    ratios[std::to_string(s)] = r;
  }
  doc["ratios"] = ratios;
  return doc.dump(2) + "\n";
}

CorpusStats stats_from_json(std::string_view text) {
  CorpusStats stats;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", std::string()) != kStatsFormat) {
      throw Error(Stage::Stats, "not a stats file (format is not " + std::string(kStatsFormat) + ")");
    }
    stats.total_notes = doc.at("total_notes").get<long>();
    for (const auto& [s, n] : doc.at("notes_per_string").items()) {
      stats.notes_per_string[std::stoi(s)] = n.get<long>();
    }
    for (const auto& [s, row] : doc.at("technique_counts").items()) {
      for (const auto& [k, c] : row.items()) {
        const auto kind = rated_from_key(k);
        if (!kind) throw Error(Stage::Stats, "unknown technique key " + k);
        if (c.get<long>() > 0) stats.technique_counts[std::stoi(s)][*kind] = c.get<long>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Stage::Stats, std::string("malformed stats file: ") + e.what());
  }
  return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-7s %7s", "string", "notes");
  os << line;
  for (auto kind : kRatedKinds) {
    std::snprintf(line, sizeof line, " %10s", std::string(rated_key(kind)).c_str());
    os << line;
  }
  os << '\n';
  const auto ratios = stats.ratios();
  for (const auto& [s, n] : stats.notes_per_string) {
    std::snprintf(line, sizeof line, "%-7d %7ld", s, n);
    os << line;
    for (auto kind : kRatedKinds) {
      std::snprintf(line, sizeof line, " %10.4f", ratios.at(s).at(kind));
      os << line;
    }
    os << '\n';
  }
  os << "total notes: " << stats.total_notes << '\n';
  return os.str();
}

std::string format_comparison(const DistributionComparison& cmp) {
  std::ostringstream os;
  char line[120];
  std::snprintf(line, sizeof line, "%-7s %9s %9s %9s\n", "string", "share_a", "share_b", "|diff|");
  os << line;
  for (const auto& r : cmp.rows) {
    std::snprintf(line, sizeof line, "%-7d %9.4f %9.4f %9.4f\n", r.string, r.share_a, r.share_b,
                  std::abs(r.share_a - r.share_b));
    os << line;
  }
  std::snprintf(line, sizeof line, "L1 distance: %.6f\n", cmp.l1);
  os << line;
  return os.str();
}

}  // namespace richtab
