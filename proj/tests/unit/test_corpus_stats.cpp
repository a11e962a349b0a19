#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "melodies.hpp"
#include "tempdir.hpp"
#include "richtab/corpus_stats.hpp"
#include "richtab/errors.hpp"
#include "richtab/json_dump.hpp"
#include "richtab/musicxml.hpp"
#include "richtab/pipeline.hpp"
#include "richtab/run_config.hpp"

using namespace richtab;
namespace fs = std::filesystem;

namespace {

using testsupport::TempDir;

RunConfig seeded(std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  return c;
}

// Ten notes on string 1 alternating frets 5/7, notes 3 and 7 with vibrato.
std::string ten_note_score() {
  std::vector<std::tuple<int, Tick, Tick>> raw;
  for (int i = 0; i < 10; ++i) raw.emplace_back(i % 2 ? 71 : 69, i * 480, 480);
  const auto m = make_melody(raw);
  std::vector<RichNote> notes;
  for (int i = 0; i < 10; ++i) {
    RichNote n{m.notes[static_cast<std::size_t>(i)], {{1, i % 2 ? 7 : 5}, i % 2 ? 3 : 1, 5}, {}};
    if (i == 3 || i == 7) n.techniques = {{TechniqueKind::Vibrato, 0}};
    notes.push_back(n);
  }
  return serialize(build_score(notes, quantize(m, 4), InstrumentSpec(), ScoreOptions{}));
}

CorpusStats on_string(int string, int notes) {
  CorpusStats s;
  for (int i = 0; i < notes; ++i) s.add_note(string, {});
  return s;
}

}  // namespace

TEST(Stats, TenNotesTwoVibratos) {
  TempDir dir;
  dir.write("one.musicxml", ten_note_score());
  const auto files = collect_corpus_files(dir.path());
  ASSERT_EQ(files.size(), 1u);
  const auto r = scan_corpus(files);
  EXPECT_EQ(r.stats.total_notes, 10);
  EXPECT_EQ(r.stats.notes_per_string.at(1), 10);
  EXPECT_EQ(r.stats.ratios().at(1).at(TechniqueKind::Vibrato), 0.2);
  EXPECT_EQ(r.stats.ratios().at(1).at(TechniqueKind::Bend), 0.0);
}

TEST(Stats, EmptyDirectoryIsAnError) {
  TempDir dir;
  const auto files = collect_corpus_files(dir.path());
  EXPECT_TRUE(files.empty());
  EXPECT_THROW(scan_corpus(files), EmptyCorpusError);
  EXPECT_THROW(collect_corpus_files(dir.path() / "missing"), Error);
}

TEST(Stats, UnreadableFilesWarnAndScanContinues) {
  TempDir dir;
  dir.write("a_good.musicxml", ten_note_score());
  dir.write("b_broken.xml", "<score-partwise><part>");
  dir.write("c_bad.json", "{\"format\": 3}");
  dir.write("ignored.txt", "hello");
  const auto files = collect_corpus_files(dir.path());
  ASSERT_EQ(files.size(), 3u);
  const auto r = scan_corpus(files);
  EXPECT_EQ(r.files_used, 1u);
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_EQ(r.stats.total_notes, 10);

  TempDir bad;
  bad.write("only.xml", "<nope");
  EXPECT_THROW(scan_corpus(collect_corpus_files(bad.path())), EmptyCorpusError);
}

TEST(Stats, BendAndSlidePairsCountOnce) {
  CorpusStats s;
  const std::vector<Technique> bend{{TechniqueKind::Bend, 2}};
  const std::vector<Technique> release{{TechniqueKind::BendRelease, 2}};
  const std::vector<Technique> start{{TechniqueKind::SlideStart, 0}};
  const std::vector<Technique> stop{{TechniqueKind::SlideStop, 0}};
  s.add_note(2, bend);
  s.add_note(2, release);
  s.add_note(2, start);
  s.add_note(2, stop);
  EXPECT_EQ(s.technique_counts.at(2).at(TechniqueKind::Bend), 1);
  EXPECT_EQ(s.technique_counts.at(2).at(TechniqueKind::SlideStart), 1);
  EXPECT_EQ(s.technique_counts.at(2).count(TechniqueKind::BendRelease), 0u);
  EXPECT_EQ(s.ratios().at(2).at(TechniqueKind::Bend), 0.25);
}

TEST(Compare, IdentityAndDisjointSupport) {
  const auto a = on_string(1, 30);
  auto mixed = on_string(3, 10);
  mixed.merge(on_string(5, 7));
  EXPECT_EQ(compare_distributions(a, a).l1, 0.0);
  EXPECT_EQ(compare_distributions(mixed, mixed).l1, 0.0);
  EXPECT_DOUBLE_EQ(compare_distributions(a, on_string(6, 4)).l1, 2.0);
  const auto c = compare_distributions(a, mixed);
  EXPECT_DOUBLE_EQ(c.l1, 2.0);
  // shares sum to one on each side
  double sa = 0, sb = 0;
  for (const auto& r : c.rows) {
    sa += r.share_a;
    sb += r.share_b;
  }
  EXPECT_NEAR(sa, 1.0, 1e-12);
  EXPECT_NEAR(sb, 1.0, 1e-12);
  EXPECT_THROW(compare_distributions(a, CorpusStats{}), EmptyCorpusError);
}

TEST(Compare, HalfOverlap) {
  auto a = on_string(1, 5);
  a.merge(on_string(2, 5));
  auto b = on_string(2, 5);
  b.merge(on_string(3, 5));
  EXPECT_DOUBLE_EQ(compare_distributions(a, b).l1, 1.0);
}

TEST(Properties, CountingIsOrderIndependent) {
  TempDir dir;
  std::vector<fs::path> files;
  for (const auto& name : testsupport::fixture_names()) {
    const auto r = generate(testsupport::load_fixture(name), seeded(4), name);
    files.push_back(dir.write(name + ".musicxml", r.musicxml));
    files.push_back(dir.write(name + ".json", r.annotations_json));
  }
  const auto base = scan_corpus(files).stats;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(files.begin(), files.end(), rng);
    EXPECT_EQ(scan_corpus(files).stats, base);
  }
  long sum = 0;
  for (const auto& [s, n] : base.notes_per_string) sum += n;
  EXPECT_EQ(sum, base.total_notes);
}

TEST(Properties, XmlAndJsonDumpAgree) {
  for (const auto& name : testsupport::fixture_names()) {
    RunConfig c = seeded(9);
    c.techniques.slides = true;
    const auto r = generate(testsupport::load_fixture(name), c, name);
    const auto from_xml = stats_from_notes(reparse(r.musicxml).notes);
    const auto from_json = stats_from_notes(parse_annotation_dump(r.annotations_json));
    EXPECT_EQ(from_xml, from_json) << name;
    CorpusStats direct;
    for (const auto& n : r.annotation.notes) direct.add_note(n.string(), n.techniques);
    EXPECT_EQ(direct, from_xml) << name;
  }
}

TEST(Properties, RatiosRecomputeExactlyFromCounts) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    CorpusStats s;
    const int n = 1 + static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) {
      std::vector<Technique> t;
      for (auto k : kRatedKinds) {
        if (rng() % 4 == 0) t.push_back({k, k == TechniqueKind::Bend ? 1 : 0});
      }
      s.add_note(1 + static_cast<int>(rng() % 6), t);
    }
    for (const auto& [str, row] : s.ratios()) {
      for (const auto& [kind, ratio] : row) {
        const auto& counts = s.technique_counts[str];
        const long c = counts.count(kind) ? counts.at(kind) : 0;
        EXPECT_EQ(ratio, static_cast<double>(c) / static_cast<double>(s.notes_per_string.at(str)));
        EXPECT_GE(ratio, 0.0);
        EXPECT_LE(ratio, 1.0);
      }
    }
  }
}

TEST(Json, RoundTripAndLoadableAsTargets) {
  TempDir dir;
  dir.write("one.musicxml", ten_note_score());
  const auto stats = scan_corpus(collect_corpus_files(dir.path())).stats;
  const auto text = stats_to_json(stats);
  EXPECT_EQ(stats_from_json(text), stats);
  EXPECT_EQ(ratio_table_from_json(text), stats.ratios());

  // A stats file referenced from a run configuration becomes the annotator's targets.
  dir.write("targets.json", text);
  const auto cfg = parse_run_config(R"({"techniques": {"ratios": "targets.json"}})", dir.path());
  EXPECT_EQ(cfg.techniques.ratios.at(1).at(TechniqueKind::Vibrato), 0.2);
  EXPECT_THROW(stats_from_json("{\"format\": \"something-else\"}"), Error);
  EXPECT_THROW(stats_from_json("[1,2"), Error);
}

TEST(Format, TablesMentionEveryString) {
  auto s = on_string(1, 3);
  s.merge(on_string(4, 1));
  const auto table = format_stats_table(s);
  EXPECT_NE(table.find("1"), std::string::npos);
  EXPECT_NE(table.find("4"), std::string::npos);
  const auto cmp = format_comparison(compare_distributions(s, s));
  EXPECT_NE(cmp.find("L1"), std::string::npos);
}
