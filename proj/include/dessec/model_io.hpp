#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "dessec/attack.hpp"

namespace dessec {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* attacked_model_format = "dessec-attacked-model";

/// Plant, supervisor or specification file.
struct ModelFile {
  Automaton automaton;
  std::set<std::string> unsafe;
};

namespace io {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ModelFormatError(source_, line_of(at), msg);
  }

  YAML::Node root(const std::string& text) const {
    YAML::Node doc;
    try {
      doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
      throw ModelFormatError(source_, e.mark.line + 1, e.msg);
    }
    if (!doc.IsMap()) throw ModelFormatError(source_, line_of(doc), "expected a mapping at top level");
    return doc;
  }

  void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed) const {
    for (const auto& kv : map) {
      auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, "unknown key '" + key + "'");
      }
    }
  }

  YAML::Node required(const YAML::Node& map, const std::string& key) const {
    YAML::Node n = map[key];
    if (!n) fail(map, "missing key '" + key + "'");
    return n;
  }

  std::string scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    return n.Scalar();
  }

  bool boolean(const YAML::Node& map, const std::string& key, bool fallback) const {
    YAML::Node n = map[key];
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + key + "' must be true or false");
    }
  }

  YAML::Node sequence(const YAML::Node& map, const std::string& key, bool optional) const {
    YAML::Node n = map[key];
    if (!n) {
      if (optional) return YAML::Node(YAML::NodeType::Sequence);
      fail(map, "missing key '" + key + "'");
    }
    if (!n.IsSequence()) fail(n, "'" + key + "' must be a list");
    return n;
  }

  std::set<std::string> name_set(const YAML::Node& map, const std::string& key,
                                 const Automaton& a, bool states) const {
    std::set<std::string> out;
    for (const auto& n : sequence(map, key, true)) {
      auto name = scalar(n, key + " entry");
      bool known = states ? a.find_state(name).has_value() : a.alphabet().contains(name);
      if (!known) fail(n, std::string("undeclared ") + (states ? "state" : "event") + " '" + name + "'");
      out.insert(name);
    }
    return out;
  }

  void transitions(const YAML::Node& map, Automaton& a) const {
    for (const auto& t : sequence(map, "transitions", true)) {
      if (!t.IsMap()) fail(t, "transition must be a mapping");
      only_keys(t, {"from", "event", "to"});
      auto from = scalar(required(t, "from"), "from");
      auto event = scalar(required(t, "event"), "event");
      auto to = scalar(required(t, "to"), "to");
      auto fs = a.find_state(from);
      auto ts = a.find_state(to);
      auto e = a.alphabet().find(event);
      if (!fs) fail(t["from"], "undeclared state '" + from + "'");
      if (!ts) fail(t["to"], "undeclared state '" + to + "'");
      if (!e) fail(t["event"], "undeclared event '" + event + "'");
      try {
        a.add_transition(*fs, *e, *ts);
      } catch (const NondeterminismError& err) {
        fail(t, err.what());
      }
    }
  }

  void initial(const YAML::Node& map, Automaton& a) const {
    YAML::Node n = required(map, "initial");
    auto name = scalar(n, "initial");
    auto s = a.find_state(name);
    if (!s) fail(n, "undeclared initial state '" + name + "'");
    a.set_initial(*s);
  }

  const std::string& source() const { return source_; }

private:
  std::string source_;
};

inline void emit_string_list(YAML::Emitter& out, const std::string& key,
                             const std::vector<std::string>& items) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& s : items) out << YAML::DoubleQuoted << s;
  out << YAML::EndSeq;
}

inline void emit_transitions(YAML::Emitter& out, const Automaton& a) {
  out << YAML::Key << "transitions" << YAML::Value << YAML::BeginSeq;
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (const auto& edge : a.edges(s)) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "from" << YAML::Value << YAML::DoubleQuoted << a.state_name(s);
      out << YAML::Key << "event" << YAML::Value << YAML::DoubleQuoted << a.event_name(edge.event);
      out << YAML::Key << "to" << YAML::Value << YAML::DoubleQuoted << a.state_name(edge.target);
      out << YAML::EndMap;
    }
  }
  out << YAML::EndSeq;
}

inline std::vector<std::string> marked_names(const Automaton& a) {
  std::vector<std::string> out;
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (a.is_marked(s)) out.push_back(a.state_name(s));
  }
  return out;
}

}  // namespace io

inline ModelFile parse_model(const std::string& text, const std::string& source = "<input>") {
  io::Reader r(source);
  YAML::Node doc = r.root(text);
  r.only_keys(doc, {"states", "initial", "marked", "events", "transitions", "unsafe"});
  ModelFile m;
  Automaton& a = m.automaton;

  for (const auto& ev : r.sequence(doc, "events", false)) {
    if (!ev.IsMap()) r.fail(ev, "event must be a mapping");
    r.only_keys(ev, {"name", "observable", "controllable"});
    auto name = r.scalar(r.required(ev, "name"), "event name");
    if (has_reserved_suffix(name)) r.fail(ev, "event '" + name + "' uses a reserved suffix");
    if (a.alphabet().contains(name)) r.fail(ev, "duplicate event '" + name + "'");
    EventAttrs attrs;
    attrs.observable = r.boolean(ev, "observable", true);
    attrs.controllable = r.boolean(ev, "controllable", true);
    a.add_event(name, attrs);
  }
  auto states = r.sequence(doc, "states", false);
  if (states.size() == 0) r.fail(states, "'states' must not be empty");
  for (const auto& s : states) {
    auto name = r.scalar(s, "state");
    if (a.find_state(name)) r.fail(s, "duplicate state '" + name + "'");
    a.add_state(name);
  }
  r.initial(doc, a);
  for (const auto& name : r.name_set(doc, "marked", a, true)) a.set_marked(a.state(name));
  m.unsafe = r.name_set(doc, "unsafe", a, true);
  r.transitions(doc, a);
  return m;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ModelFile load_model(const std::string& path) { return parse_model(read_file(path), path); }

inline std::string serialize_model(const Automaton& a, const std::set<std::string>& unsafe = {}) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
  for (EventId e = 0; e < a.num_events(); ++e) {
    const auto& attrs = a.attrs(e);
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << a.event_name(e);
    out << YAML::Key << "observable" << YAML::Value << attrs.observable;
    out << YAML::Key << "controllable" << YAML::Value << attrs.controllable;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  io::emit_string_list(out, "states", a.state_names());
  if (!a.empty()) out << YAML::Key << "initial" << YAML::Value << YAML::DoubleQuoted << a.state_name(a.initial());
  io::emit_string_list(out, "marked", io::marked_names(a));
  io::emit_string_list(out, "unsafe", {unsafe.begin(), unsafe.end()});
  io::emit_transitions(out, a);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

inline AttackedModel parse_attacked_model(const std::string& text,
                                          const std::string& source = "<input>") {
  io::Reader r(source);
  YAML::Node doc = r.root(text);
  r.only_keys(doc, {"format", "tool_version", "mode", "vulnerable", "attack_events", "events",
                    "states", "initial", "unsafe_plant_states", "transitions"});
  auto fmt = r.scalar(r.required(doc, "format"), "format");
  if (fmt != attacked_model_format) r.fail(doc["format"], "unexpected format '" + fmt + "'");
  r.scalar(r.required(doc, "tool_version"), "tool_version");
  AttackedModel m;
  auto mode = parse_mode(r.scalar(r.required(doc, "mode"), "mode"));
  if (!mode) r.fail(doc["mode"], "mode must be ae, se or si");
  m.mode = *mode;
  Automaton& a = m.model;

  for (const auto& ev : r.sequence(doc, "events", false)) {
    if (!ev.IsMap()) r.fail(ev, "event must be a mapping");
    r.only_keys(ev, {"name", "observable", "controllable", "vulnerable", "kind"});
    auto name = r.scalar(r.required(ev, "name"), "event name");
    if (a.alphabet().contains(name)) r.fail(ev, "duplicate event '" + name + "'");
    EventAttrs attrs;
    attrs.observable = r.boolean(ev, "observable", true);
    attrs.controllable = r.boolean(ev, "controllable", true);
    attrs.vulnerable = r.boolean(ev, "vulnerable", false);
    auto kind_text = ev["kind"] ? r.scalar(ev["kind"], "kind") : std::string("genuine");
    auto kind = parse_kind(kind_text);
    if (!kind) r.fail(ev["kind"], "unknown event kind '" + kind_text + "'");
    if (*kind != kind_from_name(name)) r.fail(ev, "kind of '" + name + "' does not match its suffix");
    attrs.kind = *kind;
    a.add_event(name, attrs);
  }
  auto states = r.sequence(doc, "states", false);
  if (states.size() == 0) r.fail(states, "'states' must not be empty");
  for (const auto& s : states) {
    if (!s.IsMap()) r.fail(s, "state must be a mapping");
    r.only_keys(s, {"name", "supervisor", "plant", "marked"});
    auto name = r.scalar(r.required(s, "name"), "state name");
    if (a.find_state(name)) r.fail(s, "duplicate state '" + name + "'");
    auto sup = r.scalar(r.required(s, "supervisor"), "supervisor");
    auto plant = r.scalar(r.required(s, "plant"), "plant");
    StateId id = a.add_state(name, {sup, plant});
    a.set_marked(id, r.boolean(s, "marked", false));
  }
  r.initial(doc, a);
  m.vulnerable = r.name_set(doc, "vulnerable", a, false);
  m.attack_events = r.name_set(doc, "attack_events", a, false);
  for (const auto& f : m.attack_events) {
    if (a.alphabet().attrs(f).kind != attack_kind(m.mode)) {
      r.fail(doc["attack_events"], "attack event '" + f + "' does not match mode " +
                                       std::string(mode_name(m.mode)));
    }
  }
  for (const auto& n : r.sequence(doc, "unsafe_plant_states", true)) {
    m.unsafe_plant_states.insert(r.scalar(n, "unsafe plant state"));
  }
  r.transitions(doc, a);
  m.refresh_unsafe();
  return m;
}

inline AttackedModel load_attacked_model(const std::string& path) {
  return parse_attacked_model(read_file(path), path);
}

inline std::string serialize_attacked_model(const AttackedModel& m) {
  const Automaton& a = m.model;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "format" << YAML::Value << attacked_model_format;
  out << YAML::Key << "tool_version" << YAML::Value << YAML::DoubleQuoted << tool_version;
  out << YAML::Key << "mode" << YAML::Value << std::string(mode_name(m.mode));
  io::emit_string_list(out, "vulnerable", {m.vulnerable.begin(), m.vulnerable.end()});
  io::emit_string_list(out, "attack_events", {m.attack_events.begin(), m.attack_events.end()});
  io::emit_string_list(out, "unsafe_plant_states",
                       {m.unsafe_plant_states.begin(), m.unsafe_plant_states.end()});
  out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
  for (EventId e = 0; e < a.num_events(); ++e) {
    const auto& attrs = a.attrs(e);
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << a.event_name(e);
    out << YAML::Key << "observable" << YAML::Value << attrs.observable;
    out << YAML::Key << "controllable" << YAML::Value << attrs.controllable;
    out << YAML::Key << "vulnerable" << YAML::Value << attrs.vulnerable;
    out << YAML::Key << "kind" << YAML::Value << std::string(kind_name(attrs.kind));
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
  for (StateId s = 0; s < a.num_states(); ++s) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << a.state_name(s);
    out << YAML::Key << "supervisor" << YAML::Value << YAML::DoubleQuoted << m.supervisor_of(s);
    out << YAML::Key << "plant" << YAML::Value << YAML::DoubleQuoted << m.plant_of(s);
    if (a.is_marked(s)) out << YAML::Key << "marked" << YAML::Value << true;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "initial" << YAML::Value << YAML::DoubleQuoted << a.state_name(a.initial());
  io::emit_transitions(out, a);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dessec
