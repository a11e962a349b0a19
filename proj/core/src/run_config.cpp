#include "richtab/run_config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "richtab/errors.hpp"

namespace richtab {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::pair<SameFingerPolicy, std::string_view> kPolicies[] = {
    {SameFingerPolicy::Forbid, "forbid"},
    {SameFingerPolicy::AllowSameFretOrSameString, "allow_same_fret_or_string"},
    {SameFingerPolicy::AllowAll, "allow_all"},
};

// Object view that remembers which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + "wrong type (" + std::string(it->type_name()) + ")");
    }
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key = nullptr) const {
    std::string p = path_;
    if (key) p += (p.empty() ? "" : ".") + std::string(key);
    return "config" + (p.empty() ? std::string() : " " + p) + ": ";
  }
  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where() + "unknown key \"" + k + "\"");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string child_path(const Section& parent, const char* key) {
  return parent.path().empty() ? key : parent.path() + "." + key;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RatioTable ratio_table(const json& j) {
  const json& table = j.contains("ratios") ? j.at("ratios") : j;
  if (!table.is_object()) throw ConfigError("ratio table must be an object");
  RatioTable out;
  for (const auto& [s, row] : table.items()) {
    int string = 0;
    try {
      std::size_t used = 0;
      string = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("ratio table: string key \"" + s + "\" is not an integer");
    }
    if (!row.is_object()) throw ConfigError("ratio table: row " + s + " must be an object");
    for (const auto& [k, v] : row.items()) {
      const auto kind = rated_from_key(k);
      if (!kind) throw ConfigError("ratio table: unknown technique \"" + k + "\"");
      if (!v.is_number()) throw ConfigError("ratio table: " + s + "." + k + " must be a number");
      out[string][*kind] = v.get<double>();
    }
  }
  return out;
}

void read_instrument(Section& root, RunConfig& c) {
  const json* j = root.find("instrument");
  if (!j) return;
  Section s(*j, "instrument");
  std::vector<int> pitches = c.instrument.open_pitches();
  int frets = c.instrument.fret_count();
  s.read("name", c.instrument_name);
  s.read("open_pitches", pitches);
  s.read("frets", frets);
  s.finish();
  try {
    c.instrument = InstrumentSpec(pitches, frets);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config instrument: ") + e.what());
  }
}

void read_fingering(Section& root, RunConfig& c) {
  const json* j = root.find("fingering");
  if (!j) return;
  Section s(*j, "fingering");
  auto& f = c.fingering;
  if (const json* w = s.find("weights")) {
    Section ws(*w, child_path(s, "weights"));
    ws.read("position_change", f.w_pc);
    ws.read("string_change", f.w_sc);
    ws.read("hand_spread", f.w_hs);
    ws.read("open_string", f.w_open);
    ws.read("comfort_zone", f.w_zone);
    ws.finish();
  }
  std::array<int, 2> zone{f.comfort_lo, f.comfort_hi};
  s.read("comfort_zone", zone);
  f.comfort_lo = zone[0];
  f.comfort_hi = zone[1];
  if (const json* sp = s.find("finger_spans")) {
    Section ss(*sp, child_path(s, "finger_spans"));
    for (int k = 1; k <= 4; ++k) {
      const std::string key = std::to_string(k);
      std::array<int, 2> w{f.spans[k - 1].min, f.spans[k - 1].max};
      ss.read(key.c_str(), w);
      f.spans[k - 1] = {w[0], w[1]};
    }
    ss.finish();
  }
  s.read("t_long", f.t_long);
  s.read("t_vert", f.t_vert);
  std::string policy;
  s.read("same_finger", policy);
  if (!policy.empty()) {
    bool known = false;
    for (const auto& [p, name] : kPolicies) {
      if (name == policy) {
        f.same_finger = p;
        known = true;
      }
    }
    if (!known) throw ConfigError(s.where("same_finger") + "unknown policy \"" + policy + "\"");
  }
  s.read("hand_position_min", f.hand_lo);
  if (const json* hi = s.find("hand_position_max")) {
    if (hi->is_null()) {
      f.hand_hi = 0;
    } else if (hi->is_number_integer()) {
      f.hand_hi = hi->get<int>();
    } else {
      throw ConfigError(s.where("hand_position_max") + "expected an integer or null");
    }
  }
  s.finish();
}

void read_techniques(Section& root, RunConfig& c, const std::filesystem::path& base_dir) {
  const json* j = root.find("techniques");
  if (!j) return;
  Section s(*j, "techniques");
  auto& t = c.techniques;
  if (const json* r = s.find("ratios")) {
    if (r->is_string()) {
      std::filesystem::path p = r->get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      try {
        t.ratios = ratio_table(json::parse(slurp(p)));
      } catch (const json::exception& e) {
        throw ConfigError("config techniques.ratios: " + p.string() + ": " + e.what());
      }
    } else {
      t.ratios = ratio_table(*r);
    }
  }
  s.read("max_bend_semitones", t.max_bend_semitones);
  s.read("vibrato_possible_s", t.vibrato_possible_s);
  s.read("vibrato_likely_s", t.vibrato_likely_s);
  s.read("min_bend_duration_s", t.min_bend_duration_s);
  s.read("slides", t.slides);
  std::vector<std::string> everywhere;
  s.read("insert_everywhere", everywhere);
  if (s.find("insert_everywhere")) {
    t.insert_everywhere.clear();
    for (const auto& k : everywhere) {
      const auto kind = rated_from_key(k);
      if (!kind) throw ConfigError(s.where("insert_everywhere") + "unknown technique \"" + k + "\"");
      t.insert_everywhere.insert(*kind);
    }
  }
  s.finish();
}

}  // namespace

void RunConfig::validate() const {
  fingering.validate();
  techniques.validate();
  if (!is_allowed_grid(grid)) throw ConfigError("grid " + std::to_string(grid) + " not in {1,2,4,8,12,16,24,48}");
  for (const auto& [s, row] : techniques.ratios) {
    if (s > instrument.string_count()) {
      throw ConfigError("ratio table names string " + std::to_string(s) + " but the instrument has " +
                        std::to_string(instrument.string_count()));
    }
  }
  if (fingering.hand_hi > instrument.fret_count()) {
    throw ConfigError("hand_position_max exceeds the instrument's fret count");
  }
  if (verbosity < 0) throw ConfigError("verbosity must be >= 0");
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section root(doc, "");
  read_instrument(root, c);
  // Default ratios follow the configured string count unless given explicitly.
  c.techniques.ratios = TechniqueTargets::default_ratios(c.instrument.string_count());
  read_fingering(root, c);
  read_techniques(root, c, base_dir);
  if (const json* q = root.find("quantization")) {
    Section s(*q, "quantization");
    s.read("grid", c.grid);
    s.finish();
  }
  if (const json* in = root.find("input")) {
    Section s(*in, "input");
    s.read("path", c.input);
    if (const json* tr = s.find("track")) {
      if (tr->is_null()) {
        c.track.reset();
      } else if (tr->is_number_unsigned()) {
        c.track = tr->get<std::size_t>();
      } else {
        throw ConfigError(s.where("track") + "expected a non-negative integer or null");
      }
    }
    s.read("clip_overlaps", c.clip_overlaps);
    s.finish();
  }
  if (const json* out = root.find("output")) {
    Section s(*out, "output");
    s.read("path", c.output);
    s.read("dump_solution", c.dump_solution);
    s.read("dump_annotations", c.dump_annotations);
    s.finish();
  }
  root.read("seed", c.seed);
  root.read("verbosity", c.verbosity);
  root.finish();
  c.techniques.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(slurp(path), path.parent_path());
}

RatioTable ratio_table_from_json(std::string_view json_text) {
  try {
    return ratio_table(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ratio table: ") + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c, int indent) {
  const auto& f = c.fingering;
  const auto& t = c.techniques;
  ojson doc;
  doc["instrument"] = {{"name", c.instrument_name},
                       {"open_pitches", c.instrument.open_pitches()},
                       {"frets", c.instrument.fret_count()}};
  ojson spans = ojson::object();
  for (int k = 1; k <= 4; ++k) spans[std::to_string(k)] = {f.span(k).min, f.span(k).max};
  std::string policy;
  for (const auto& [p, name] : kPolicies) {
    if (p == f.same_finger) policy = name;
  }
  doc["fingering"] = {{"weights",
                       {{"position_change", f.w_pc},
                        {"string_change", f.w_sc},
                        {"hand_spread", f.w_hs},
                        {"open_string", f.w_open},
                        {"comfort_zone", f.w_zone}}},
                      {"comfort_zone", {f.comfort_lo, f.comfort_hi}},
                      {"finger_spans", spans},
                      {"t_long", f.t_long},
                      {"t_vert", f.t_vert},
                      {"same_finger", policy},
                      {"hand_position_min", f.hand_lo},
                      {"hand_position_max", f.hand_hi > 0 ? ojson(f.hand_hi) : ojson(nullptr)}};
  ojson ratios = ojson::object();
  for (const auto& [s, row] : t.ratios) {
    ojson r = ojson::object();
    for (const auto& [kind, v] : row) r[std::string(rated_key(kind))] = v;
    ratios[std::to_string(s)] = r;
  }
  std::vector<std::string> everywhere;
  for (auto k : t.insert_everywhere) everywhere.emplace_back(rated_key(k));
  doc["techniques"] = {{"ratios", ratios},
                       {"max_bend_semitones", t.max_bend_semitones},
                       {"vibrato_possible_s", t.vibrato_possible_s},
                       {"vibrato_likely_s", t.vibrato_likely_s},
                       {"min_bend_duration_s", t.min_bend_duration_s},
                       {"slides", t.slides},
                       {"insert_everywhere", everywhere}};
  doc["quantization"] = {{"grid", c.grid}};
  doc["input"] = {{"path", c.input},
                  {"track", c.track ? ojson(*c.track) : ojson(nullptr)},
                  {"clip_overlaps", c.clip_overlaps}};
  doc["output"] = {{"path", c.output},
                   {"dump_solution", c.dump_solution},
                   {"dump_annotations", c.dump_annotations}};
  doc["seed"] = c.seed;
  doc["verbosity"] = c.verbosity;
  return doc.dump(indent) + (indent >= 0 ? "\n" : "");
}

}  // namespace richtab
