#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>

#include "richtab/errors.hpp"
#include "richtab/musicxml.hpp"

namespace richtab {

namespace {

struct Node {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<std::unique_ptr<Node>> children;

  const Node* child(std::string_view n) const {
    for (const auto& c : children) {
      if (c->name == n) return c.get();
    }
    return nullptr;
  }
  std::string attr(const std::string& k) const {
    auto it = attrs.find(k);
    return it == attrs.end() ? std::string() : it->second;
  }
};

struct TreeBuilder {
  std::unique_ptr<Node> root;
  std::vector<Node*> stack;

  static void on_start(void* data, const XML_Char* name, const XML_Char** atts) {
    auto* self = static_cast<TreeBuilder*>(data);
    auto node = std::make_unique<Node>();
    node->name = name;
    for (int i = 0; atts[i]; i += 2) node->attrs[atts[i]] = atts[i + 1];
    Node* raw = node.get();
    if (self->stack.empty()) {
      self->root = std::move(node);
    } else {
      self->stack.back()->children.push_back(std::move(node));
    }
    self->stack.push_back(raw);
  }
  static void on_end(void* data, const XML_Char*) { static_cast<TreeBuilder*>(data)->stack.pop_back(); }
  static void on_text(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<TreeBuilder*>(data);
    if (!self->stack.empty()) self->stack.back()->text.append(s, static_cast<std::size_t>(len));
  }
};

std::unique_ptr<Node> parse_tree(std::string_view xml) {
  TreeBuilder builder;
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                        &XML_ParserFree);
  if (!parser) throw XmlError("cannot create XML parser");
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &TreeBuilder::on_start, &TreeBuilder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &TreeBuilder::on_text);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw XmlError("malformed XML at line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) +
                   ": " + XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!builder.root) throw XmlError("empty XML document");
  return std::move(builder.root);
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<int> int_text(const Node* n) {
  if (!n) return std::nullopt;
  const std::string t = trimmed(n->text);
  int v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
  return v;
}

// MusicXML allows decimal semitone values; rounds to the nearest integer.
int rounded_text(const Node* n) {
  if (!n) return 0;
  const std::string t = trimmed(n->text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) return 0;
  return static_cast<int>(std::lround(v));
}

int staff_of(const Node& note) { return int_text(note.child("staff")).value_or(1); }

bool has_tab(const Node& note) {
  const Node* notations = note.child("notations");
  if (!notations) return false;
  for (const auto& c : notations->children) {
    if (c->name == "technical" && c->child("string") && c->child("fret")) return true;
  }
  return false;
}

int sounding_pitch(const Node& note) {
  const Node* p = note.child("pitch");
  if (!p) return 0;
  static const std::map<std::string, int> kStep{{"C", 0}, {"D", 2}, {"E", 4}, {"F", 5},
                                                {"G", 7}, {"A", 9}, {"B", 11}};
  const Node* step = p->child("step");
  auto it = step ? kStep.find(trimmed(step->text)) : kStep.end();
  if (it == kStep.end()) return 0;
  const int octave = int_text(p->child("octave")).value_or(4);
  const int alter = rounded_text(p->child("alter"));
  return (octave + 1) * 12 + it->second + alter;
}

bool tied_from_previous(const Node& note) {
  for (const auto& c : note.children) {
    if (c->name == "tie" && c->attr("type") == "stop") return true;
  }
  return false;
}

void add_technique(ReparsedNote& n, Technique t) {
  if (std::none_of(n.techniques.begin(), n.techniques.end(),
                   [&](const Technique& x) { return x.kind == t.kind; })) {
    n.techniques.push_back(t);
  }
}

void read_marks(const Node& note, ReparsedNote& out) {
  for (const auto& group : note.children) {
    if (group->name != "notations") continue;
    for (const auto& c : group->children) {
      if (c->name == "slide") {
        if (c->attr("type") == "start") add_technique(out, {TechniqueKind::SlideStart, 0});
        if (c->attr("type") == "stop") add_technique(out, {TechniqueKind::SlideStop, 0});
      } else if (c->name == "ornaments") {
        for (const auto& o : c->children) {
          if (o->name == "wavy-line" && o->attr("type") == "start") {
            add_technique(out, {TechniqueKind::Vibrato, 0});
          }
        }
      } else if (c->name == "technical") {
        for (const auto& t : c->children) {
          if (t->name == "hammer-on" && t->attr("type") == "stop") {
            add_technique(out, {TechniqueKind::HammerOn, 0});
          } else if (t->name == "pull-off" && t->attr("type") == "stop") {
            add_technique(out, {TechniqueKind::PullOff, 0});
          } else if (t->name == "bend") {
            const int semis = rounded_text(t->child("bend-alter"));
            if (t->child("release")) {
              add_technique(out, {TechniqueKind::BendRelease, std::abs(semis)});
            } else {
              add_technique(out, {TechniqueKind::Bend, semis});
            }
          } else if (t->name == "fingering" && !out.has_fingering) {
            if (auto f = int_text(t.get())) {
              out.finger = *f;
              out.has_fingering = true;
            }
          }
        }
      }
    }
  }
}

}  // namespace

ReparseResult reparse(std::string_view xml) {
  const auto root = parse_tree(xml);
  if (root->name != "score-partwise") {
    throw XmlError("unsupported root element <" + root->name + ">; expected score-partwise");
  }
  ReparseResult result;
  if (const Node* ident = root->child("identification")) {
    if (const Node* misc = ident->child("miscellaneous")) {
      for (const auto& f : misc->children) {
        if (f->name == "miscellaneous-field") result.metadata[f->attr("name")] = f->text;
      }
    }
  }

  // Notes in document order, with their measure numbers, from the first part.
  const Node* part = root->child("part");
  if (!part) return result;
  std::vector<std::pair<const Node*, std::string>> notes;
  for (const auto& m : part->children) {
    if (m->name != "measure") continue;
    for (const auto& c : m->children) {
      if (c->name == "note" && !c->child("rest")) notes.emplace_back(c.get(), m->attr("number"));
    }
  }

  std::map<int, int> tab_per_staff;
  for (const auto& [n, measure] : notes) {
    tab_per_staff[staff_of(*n)] += has_tab(*n) ? 1 : 0;
  }
  int staff = 1;
  int best = -1;
  for (const auto& [s, count] : tab_per_staff) {
    if (count > best) {
      best = count;
      staff = s;
    }
  }

  std::size_t ordinal = 0;
  bool last_kept = false;
  for (const auto& [n, measure] : notes) {
    if (staff_of(*n) != staff) continue;
    const bool continuation = tied_from_previous(*n);
    if (continuation && last_kept && !result.notes.empty()) {
      read_marks(*n, result.notes.back());
      continue;
    }
    if (continuation) continue;
    ++ordinal;
    const Node* technical = nullptr;
    if (const Node* notations = n->child("notations")) technical = notations->child("technical");
    const auto string = technical ? int_text(technical->child("string")) : std::nullopt;
    const auto fret = technical ? int_text(technical->child("fret")) : std::nullopt;
    if (!string || !fret) {
      result.warnings.push_back("note " + std::to_string(ordinal) + " (measure " + measure +
                                "): no string/fret; skipped");
      last_kept = false;
      continue;
    }
    ReparsedNote r;
    r.pitch = sounding_pitch(*n);
    r.string = *string;
    r.fret = *fret;
    read_marks(*n, r);
    last_kept = true;
    result.notes.push_back(std::move(r));
  }
  for (auto& r : result.notes) {
    std::sort(r.techniques.begin(), r.techniques.end(),
              [](const Technique& a, const Technique& b) { return a.kind < b.kind; });
  }
  return result;
}

}  // namespace richtab
