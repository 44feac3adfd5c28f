#pragma once

#include <sstream>
#include <string>

#include "dessec/safety.hpp"
#include "json.hpp"

namespace dessec {

inline nlohmann::ordered_json to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["safe"] = v.safe;
  j["method"] = std::string(method_name(v.method));
  j["condition"] = v.condition ? nlohmann::ordered_json(std::string(condition_name(*v.condition)))
                               : nlohmann::ordered_json();
  j["counterexample"] = v.counterexample ? nlohmann::ordered_json(*v.counterexample)
                                         : nlohmann::ordered_json();
  j["x_uc"] = v.x_uc ? nlohmann::ordered_json(*v.x_uc) : nlohmann::ordered_json();
  j["witness_states"] = v.witness_states;
  return j;
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

/// Graphviz rendering. Unsafe states are boxes, marked states double
/// circles, attack-artifact events dashed.
inline std::string to_dot(const Automaton& a, const std::set<std::string>& unsafe,
                          const std::string& name = "G") {
  std::ostringstream out;
  out << "digraph " << dot_quote(name) << " {\n  rankdir=LR;\n";
  if (!a.empty()) {
    out << "  __init [shape=point];\n";
  }
  for (StateId s = 0; s < a.num_states(); ++s) {
    const auto& n = a.state_name(s);
    std::string shape = unsafe.count(n) ? "box" : a.is_marked(s) ? "doublecircle" : "circle";
    if (unsafe.count(n) && a.is_marked(s)) shape = "box, peripheries=2";
    out << "  " << dot_quote(n) << " [shape=" << shape << "];\n";
  }
  if (!a.empty()) out << "  __init -> " << dot_quote(a.state_name(a.initial())) << ";\n";
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (const auto& edge : a.edges(s)) {
      out << "  " << dot_quote(a.state_name(s)) << " -> " << dot_quote(a.state_name(edge.target))
          << " [label=" << dot_quote(a.event_name(edge.event));
      if (a.attrs(edge.event).kind != EventKind::genuine) out << ", style=dashed";
      out << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

inline std::string to_dot(const AttackedModel& m, const std::string& name = "G_M") {
  std::set<std::string> unsafe;
  for (StateId s : m.unsafe_states) unsafe.insert(m.model.state_name(s));
  return to_dot(m.model, unsafe, name);
}

}  // namespace dessec
