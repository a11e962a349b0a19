#include "richtab/json_dump.hpp"

#include <nlohmann/json.hpp>

#include "richtab/errors.hpp"

namespace richtab {

namespace {

using ojson = nlohmann::ordered_json;

ojson metadata_block(const RunMetadata& meta) {
  ojson m;
  m["tool"] = "richtab";
  m["version"] = meta.version;
  m["seed"] = meta.seed;
  m["input"] = meta.input;
  m["config"] = meta.config_json.empty() ? ojson::object() : ojson::parse(meta.config_json);
  return m;
}

ojson cost_json(const CostBreakdown& c) {
  return ojson{{"pc", c.pc}, {"sc", c.sc}, {"hs", c.hs}, {"open", c.open}, {"zone", c.zone},
               {"total", c.total()}};
}

}  // namespace

std::string dump_solution(std::span<const NoteEvent> events, const FingeringSolution& solution,
                          const RunMetadata& meta) {
  ojson doc;
  doc["format"] = kSolutionFormat;
  doc["metadata"] = metadata_block(meta);
  doc["objective"] = solution.objective;
  ojson notes = ojson::array();
  for (std::size_t i = 0; i < solution.states.size(); ++i) {
    const auto& s = solution.states[i];
    ojson n;
    n["index"] = i;
    n["pitch"] = i < events.size() ? events[i].pitch : 0;
    n["string"] = s.placement.string;
    n["fret"] = s.placement.fret;
    n["finger"] = s.finger;
    n["hand_position"] = s.hand_position;
    if (i < solution.per_transition.size()) n["cost"] = cost_json(solution.per_transition[i]);
    notes.push_back(std::move(n));
  }
  doc["notes"] = std::move(notes);
  return doc.dump(2) + "\n";
}

std::string dump_annotations(std::span<const RichNote> notes, const AnnotationReport& report,
                             const RunMetadata& meta) {
  ojson doc;
  doc["format"] = kAnnotationsFormat;
  doc["metadata"] = metadata_block(meta);
  ojson list = ojson::array();
  for (const auto& rn : notes) {
    ojson n;
    n["index"] = rn.event.index;
    n["pitch"] = rn.event.pitch;
    n["onset_s"] = rn.event.onset_s;
    n["duration_s"] = rn.event.duration_s;
    n["string"] = rn.string();
    n["fret"] = rn.fret();
    n["finger"] = rn.state.finger;
    n["hand_position"] = rn.state.hand_position;
    ojson techniques = ojson::array();
    for (const auto& t : rn.techniques) {
      ojson tj{{"kind", technique_key(t.kind)}};
      if (t.kind == TechniqueKind::Bend || t.kind == TechniqueKind::BendRelease) {
        tj["semitones"] = t.bend_semitones;
      }
      techniques.push_back(std::move(tj));
    }
    n["techniques"] = std::move(techniques);
    list.push_back(std::move(n));
  }
  doc["notes"] = std::move(list);
  ojson passes = ojson::array();
  for (const auto& [key, c] : report.counts) {
    passes.push_back(ojson{{"string", key.first},
                           {"technique", rated_key(key.second)},
                           {"notes_on_string", c.notes_on_string},
                           {"target", c.target},
                           {"candidates", c.candidates},
                           {"inserted", c.inserted}});
  }
  doc["passes"] = std::move(passes);
  doc["diagnostics"] = report.diagnostics;
  return doc.dump(2) + "\n";
}

std::vector<ReparsedNote> parse_annotation_dump(std::string_view text) {
  std::vector<ReparsedNote> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("format", std::string()) != kAnnotationsFormat) {
      throw Error(Stage::Stats, "not an annotation dump (format is not " + std::string(kAnnotationsFormat) + ")");
    }
    for (const auto& n : doc.at("notes")) {
      ReparsedNote r;
      r.pitch = n.at("pitch").get<int>();
      r.string = n.at("string").get<int>();
      r.fret = n.at("fret").get<int>();
      r.finger = n.at("finger").get<int>();
      r.has_fingering = r.finger > 0;
      for (const auto& t : n.at("techniques")) {
        const auto kind = technique_from_key(t.at("kind").get<std::string>());
        if (!kind) throw Error(Stage::Stats, "unknown technique " + t.at("kind").dump());
        r.techniques.push_back({*kind, t.value("semitones", 0)});
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Stage::Stats, std::string("malformed annotation dump: ") + e.what());
  }
  return out;
}

}  // namespace richtab
