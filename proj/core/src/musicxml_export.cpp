#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "richtab/musicxml.hpp"

namespace richtab {

namespace {

struct Glyph {
  const char* type;
  int dots;
  bool triplet;
  std::int64_t duration;  // divisions
};

constexpr const char* kTypes[] = {"whole", "half", "quarter", "eighth", "16th",
                                  "32nd",  "64th", "128th",   "256th"};

std::vector<Glyph> glyph_table(int divisions) {
  std::vector<Glyph> out;
  for (int k = 0; k < 9; ++k) {
    for (int dots = 0; dots <= 2; ++dots) {
      for (bool triplet : {false, true}) {
        // 4 quarters / 2^k, times (2 - 2^-dots), times 2/3 for a triplet
        std::int64_t num = std::int64_t{4} * divisions * ((std::int64_t{2} << dots) - 1) * (triplet ? 2 : 1);
        std::int64_t den = (std::int64_t{1} << (k + dots)) * (triplet ? 3 : 1);
        if (num % den != 0) continue;
        out.push_back({kTypes[k], dots, triplet, num / den});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Glyph& a, const Glyph& b) {
    if (a.duration != b.duration) return a.duration > b.duration;
    return a.dots < b.dots;
  });
  return out;
}

// A single glyph when one fits exactly, otherwise greedy plain values then triplets.
std::vector<Glyph> decompose(std::int64_t length, const std::vector<Glyph>& glyphs) {
  std::vector<Glyph> out;
  for (const auto& g : glyphs) {
    if (g.duration == length) return {g};
  }
  while (length > 0) {
    const Glyph* pick = nullptr;
    for (bool triplet : {false, true}) {
      for (const auto& g : glyphs) {
        if (g.triplet == triplet && g.duration <= length) {
          pick = &g;
          break;
        }
      }
      if (pick) break;
    }
    if (!pick) throw std::logic_error("duration not expressible in the chosen divisions");
    out.push_back(*pick);
    length -= pick->duration;
  }
  return out;
}

std::int64_t to_divisions(const Fraction& quarters, int divisions) {
  const std::int64_t num = quarters.num * divisions;
  if (num % quarters.den != 0) throw std::logic_error("bar position off the division grid");
  return num / quarters.den;
}

class XmlWriter {
 public:
  void open(std::string_view name, std::initializer_list<std::pair<std::string_view, std::string>> attrs = {}) {
    indent();
    out_ << '<' << name;
    for (const auto& [k, v] : attrs) out_ << ' ' << k << "=\"" << escape(v) << '"';
    out_ << ">\n";
    ++depth_;
  }
  void close(std::string_view name) {
    --depth_;
    indent();
    out_ << "</" << name << ">\n";
  }
  void leaf(std::string_view name, const std::string& text,
            std::initializer_list<std::pair<std::string_view, std::string>> attrs = {}) {
    indent();
    out_ << '<' << name;
    for (const auto& [k, v] : attrs) out_ << ' ' << k << "=\"" << escape(v) << '"';
    out_ << '>' << escape(text) << "</" << name << ">\n";
  }
  void empty(std::string_view name, std::initializer_list<std::pair<std::string_view, std::string>> attrs = {}) {
    indent();
    out_ << '<' << name;
    for (const auto& [k, v] : attrs) out_ << ' ' << k << "=\"" << escape(v) << '"';
    out_ << "/>\n";
  }
  void raw(std::string_view text) { out_ << text; }
  std::string str() const { return out_.str(); }

  static std::string escape(std::string_view s) {
    std::string r;
    r.reserve(s.size());
    for (char c : s) {
      switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        case '\'': r += "&apos;"; break;
        default: r += c;
      }
    }
    return r;
  }

 private:
  void indent() {
    for (int i = 0; i < depth_; ++i) out_ << "  ";
  }
  std::ostringstream out_;
  int depth_ = 0;
};

struct Spelling {
  char step;
  int alter;
  int octave;
};

Spelling spell(int pitch) {
  static constexpr char kSteps[] = {'C', 'C', 'D', 'D', 'E', 'F', 'F', 'G', 'G', 'A', 'A', 'B'};
  static constexpr int kAlter[] = {0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0};
  const int pc = ((pitch % 12) + 12) % 12;
  return {kSteps[pc], kAlter[pc], pitch / 12 - 1};
}

void write_pitch(XmlWriter& w, std::string_view prefix, int pitch) {
  const Spelling s = spell(pitch);
  w.leaf(std::string(prefix) + "step", std::string(1, s.step));
  if (s.alter != 0) w.leaf(std::string(prefix) + "alter", std::to_string(s.alter));
  w.leaf(std::string(prefix) + "octave", std::to_string(s.octave));
}

void write_notations(XmlWriter& w, const ScoreNote& n) {
  const auto& m = n.marks;
  w.open("notations");
  if (n.tie_stop) w.empty("tied", {{"type", "stop"}});
  if (n.tie_start) w.empty("tied", {{"type", "start"}});
  if (m.slide_stop) w.empty("slide", {{"type", "stop"}, {"number", "1"}});
  if (m.slide_start) w.empty("slide", {{"type", "start"}, {"number", "1"}});
  if (m.wavy_start || m.wavy_stop) {
    w.open("ornaments");
    if (m.wavy_start) w.empty("wavy-line", {{"type", "start"}, {"number", "1"}});
    if (m.wavy_stop) w.empty("wavy-line", {{"type", "stop"}, {"number", "1"}});
    w.close("ornaments");
  }
  w.open("technical");
  if (n.finger > 0) w.leaf("fingering", std::to_string(n.finger));
  w.leaf("string", std::to_string(n.string));
  w.leaf("fret", std::to_string(n.fret));
  if (m.hammer_stop) w.leaf("hammer-on", "H", {{"type", "stop"}, {"number", "1"}});
  if (m.pull_stop) w.leaf("pull-off", "P", {{"type", "stop"}, {"number", "1"}});
  if (m.hammer_start) w.leaf("hammer-on", "H", {{"type", "start"}, {"number", "1"}});
  if (m.pull_start) w.leaf("pull-off", "P", {{"type", "start"}, {"number", "1"}});
  if (m.bend_alter) {
    w.open("bend");
    w.leaf("bend-alter", std::to_string(*m.bend_alter));
    if (m.release) w.empty("release");
    w.close("bend");
  }
  w.close("technical");
  w.close("notations");
}

void write_note(XmlWriter& w, const ScoreNote& n, int staff) {
  const std::string voice = std::to_string(staff);
  w.open("note");
  if (n.rest) {
    if (n.measure_rest) {
      w.empty("rest", {{"measure", "yes"}});
    } else {
      w.empty("rest");
    }
  } else {
    w.open("pitch");
    write_pitch(w, "", n.pitch);
    w.close("pitch");
  }
  w.leaf("duration", std::to_string(n.duration));
  if (n.tie_stop) w.empty("tie", {{"type", "stop"}});
  if (n.tie_start) w.empty("tie", {{"type", "start"}});
  w.leaf("voice", voice);
  if (!n.type.empty()) w.leaf("type", n.type);
  for (int d = 0; d < n.dots; ++d) w.empty("dot");
  if (n.triplet) {
    w.open("time-modification");
    w.leaf("actual-notes", "3");
    w.leaf("normal-notes", "2");
    w.close("time-modification");
  }
  if (!n.rest && staff == 2) w.leaf("stem", "none");
  w.leaf("staff", std::to_string(staff));
  if (!n.rest) write_notations(w, n);
  w.close("note");
}

}  // namespace

int score_divisions(int grid, std::span<const MeterChange> meter) {
  int d = grid;
  for (const auto& m : meter) {
    // bar length beats*4/beat_type quarters must be a whole number of divisions
    const int need = m.beat_type / std::gcd(4 * m.beats, m.beat_type);
    d = std::lcm(d, need);
  }
  return d;
}

ScoreDocument build_score(std::span<const RichNote> notes, std::span<const QuantizedRhythm> rhythm,
                          const InstrumentSpec& spec, const ScoreOptions& options) {
  if (notes.size() != rhythm.size()) {
    throw std::logic_error("build_score: " + std::to_string(notes.size()) + " notes but " +
                           std::to_string(rhythm.size()) + " rhythm entries");
  }
  ScoreDocument doc;
  doc.title = options.title;
  doc.metadata = options.metadata;
  doc.open_pitches = spec.open_pitches();
  doc.divisions = score_divisions(options.grid, options.meter);
  const int unit = doc.divisions / options.grid;
  const auto glyphs = glyph_table(doc.divisions);

  std::int64_t end_units = 0;
  for (const auto& r : rhythm) {
    if (r.grid != options.grid) throw std::logic_error("build_score: rhythm grid differs from options");
    end_units = std::max(end_units, r.onset_units + r.duration_units);
  }
  const auto bars = layout_measures(options.meter, options.ppq, Fraction{end_units, options.grid});

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pieces(notes.size());
  std::size_t next = 0;  // first note not yet fully placed
  int prev_beats = 0;
  int prev_type = 0;
  for (std::size_t b = 0; b < bars.size(); ++b) {
    ScoreMeasure m;
    m.number = static_cast<int>(b) + 1;
    m.beats = bars[b].beats;
    m.beat_type = bars[b].beat_type;
    m.show_time = b == 0 || m.beats != prev_beats || m.beat_type != prev_type;
    prev_beats = m.beats;
    prev_type = m.beat_type;
    const std::int64_t start = to_divisions(bars[b].start, doc.divisions);
    m.capacity = static_cast<int>(to_divisions(bars[b].length, doc.divisions));
    const std::int64_t end = start + m.capacity;
    std::int64_t cursor = start;

    auto push_rest = [&](std::int64_t len) {
      for (const auto& g : decompose(len, glyphs)) {
        ScoreNote r;
        r.rest = true;
        r.duration = static_cast<int>(g.duration);
        r.type = g.type;
        r.dots = g.dots;
        r.triplet = g.triplet;
        m.notes.push_back(r);
      }
    };

    for (std::size_t i = next; i < notes.size(); ++i) {
      const std::int64_t on = rhythm[i].onset_units * unit;
      const std::int64_t off = on + rhythm[i].duration_units * unit;
      if (on >= end) break;
      const std::int64_t seg_on = std::max(on, start);
      const std::int64_t seg_off = std::min(off, end);
      if (seg_off <= seg_on) continue;
      if (seg_on > cursor) push_rest(seg_on - cursor);
      const auto parts = decompose(seg_off - seg_on, glyphs);
      for (std::size_t p = 0; p < parts.size(); ++p) {
        ScoreNote n;
        n.pitch = notes[i].event.pitch;
        n.duration = static_cast<int>(parts[p].duration);
        n.type = parts[p].type;
        n.dots = parts[p].dots;
        n.triplet = parts[p].triplet;
        n.string = notes[i].string();
        n.fret = notes[i].fret();
        n.finger = notes[i].state.finger;
        n.tie_stop = seg_on > on || p > 0;
        n.tie_start = seg_off < off || p + 1 < parts.size();
        pieces[i].emplace_back(b, m.notes.size());
        m.notes.push_back(n);
      }
      cursor = seg_off;
      if (off <= end) next = i + 1;
    }
    if (m.notes.empty()) {
      ScoreNote r;
      r.rest = true;
      r.measure_rest = true;
      r.duration = m.capacity;
      m.notes.push_back(r);
    } else if (cursor < end) {
      push_rest(end - cursor);
    }
    doc.measures.push_back(std::move(m));
  }

  auto piece = [&](std::size_t i, bool first) -> ScoreNote& {
    const auto& [b, k] = first ? pieces[i].front() : pieces[i].back();
    return doc.measures[b].notes[k];
  };
  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (pieces[i].empty()) throw std::logic_error("build_score: note " + std::to_string(i) + " not placed");
    for (const auto& t : notes[i].techniques) {
      switch (t.kind) {
        case TechniqueKind::HammerOn:
          piece(i, true).marks.hammer_stop = true;
          if (i > 0) piece(i - 1, false).marks.hammer_start = true;
          break;
        case TechniqueKind::PullOff:
          piece(i, true).marks.pull_stop = true;
          if (i > 0) piece(i - 1, false).marks.pull_start = true;
          break;
        case TechniqueKind::SlideStart: piece(i, false).marks.slide_start = true; break;
        case TechniqueKind::SlideStop: piece(i, true).marks.slide_stop = true; break;
        case TechniqueKind::Vibrato:
          piece(i, true).marks.wavy_start = true;
          piece(i, false).marks.wavy_stop = true;
          break;
        case TechniqueKind::Bend: piece(i, true).marks.bend_alter = t.bend_semitones; break;
        case TechniqueKind::BendRelease:
          piece(i, true).marks.bend_alter = -t.bend_semitones;
          piece(i, true).marks.release = true;
          break;
      }
    }
  }
  return doc;
}

std::string serialize(const ScoreDocument& doc) {
  XmlWriter w;
  w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
  w.raw("<!DOCTYPE score-partwise PUBLIC \"-//Recordare//DTD MusicXML 3.1 Partwise//EN\" "
        "\"http://www.musicxml.org/dtds/partwise.dtd\">\n");
  w.open("score-partwise", {{"version", "3.1"}});
  if (!doc.title.empty()) w.leaf("movement-title", doc.title);
  w.open("identification");
  w.open("encoding");
  w.leaf("software", "richtab");
  w.close("encoding");
  if (!doc.metadata.empty()) {
    w.open("miscellaneous");
    for (const auto& [k, v] : doc.metadata) w.leaf("miscellaneous-field", v, {{"name", k}});
    w.close("miscellaneous");
  }
  w.close("identification");
  w.open("part-list");
  w.open("score-part", {{"id", "P1"}});
  w.leaf("part-name", doc.part_name);
  w.close("score-part");
  w.close("part-list");

  const int strings = static_cast<int>(doc.open_pitches.size());
  w.open("part", {{"id", "P1"}});
  for (const auto& m : doc.measures) {
    w.open("measure", {{"number", std::to_string(m.number)}});
    if (m.number == 1 || m.show_time) {
      w.open("attributes");
      if (m.number == 1) {
        w.leaf("divisions", std::to_string(doc.divisions));
        w.open("key");
        w.leaf("fifths", "0");
        w.close("key");
      }
      w.open("time");
      w.leaf("beats", std::to_string(m.beats));
      w.leaf("beat-type", std::to_string(m.beat_type));
      w.close("time");
      if (m.number == 1) {
        w.leaf("staves", "2");
        w.open("clef", {{"number", "1"}});
        w.leaf("sign", "G");
        w.leaf("line", "2");
        w.leaf("clef-octave-change", "-1");
        w.close("clef");
        w.open("clef", {{"number", "2"}});
        w.leaf("sign", "TAB");
        w.leaf("line", "5");
        w.close("clef");
        w.open("staff-details", {{"number", "2"}});
        w.leaf("staff-lines", std::to_string(strings));
        // line 1 is the bottom line, i.e. the lowest string
        for (int line = 1; line <= strings; ++line) {
          w.open("staff-tuning", {{"line", std::to_string(line)}});
          write_pitch(w, "tuning-", doc.open_pitches[static_cast<std::size_t>(strings - line)]);
          w.close("staff-tuning");
        }
        w.close("staff-details");
      }
      w.close("attributes");
    }
    for (const auto& n : m.notes) write_note(w, n, 1);
    w.open("backup");
    w.leaf("duration", std::to_string(m.capacity));
    w.close("backup");
    for (const auto& n : m.notes) write_note(w, n, 2);
    if (&m == &doc.measures.back()) {
      w.open("barline", {{"location", "right"}});
      w.leaf("bar-style", "light-heavy");
      w.close("barline");
    }
    w.close("measure");
  }
  w.close("part");
  w.close("score-partwise");
  return w.str();
}

}  // namespace richtab
