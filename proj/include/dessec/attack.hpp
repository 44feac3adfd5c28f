#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dessec/algorithms.hpp"

namespace dessec {

enum class AttackMode { ae, se, si };

inline std::string_view mode_name(AttackMode m) noexcept {
  switch (m) {
    case AttackMode::ae: return "ae";
    case AttackMode::se: return "se";
    case AttackMode::si: return "si";
  }
  return "ae";
}

inline std::optional<AttackMode> parse_mode(std::string_view text) noexcept {
  if (text == "ae") return AttackMode::ae;
  if (text == "se") return AttackMode::se;
  if (text == "si") return AttackMode::si;
  return std::nullopt;
}

/// Artifact kind produced by each mode's builder.
inline EventKind attack_kind(AttackMode m) noexcept {
  switch (m) {
    case AttackMode::ae: return EventKind::ae_attacked;
    case AttackMode::se: return EventKind::se_erased;
    case AttackMode::si: return EventKind::si_onset;
  }
  return EventKind::ae_attacked;
}

struct VulnerabilitySpec {
  EventSet vulnerable_actuators;
  EventSet vulnerable_sensors;
  std::set<std::string> unsafe_plant_states;
};

/// Closed-loop model under attack. States of `model` are (supervisor, plant)
/// pairs; their components hold the two names.
struct AttackedModel {
  Automaton model;
  AttackMode mode = AttackMode::ae;
  EventSet vulnerable;
  EventSet attack_events;
  std::set<std::string> unsafe_plant_states;
  StateSet unsafe_states;

  const std::string& supervisor_of(StateId s) const { return model.components(s).at(0); }
  const std::string& plant_of(StateId s) const { return model.components(s).at(1); }
  bool is_unsafe(StateId s) const { return unsafe_states.count(s) > 0; }
  bool is_attack(EventId e) const { return attack_events.count(model.event_name(e)) > 0; }

  std::vector<std::string> unsafe_state_names() const {
    return state_names(model, unsafe_states);
  }

  /// Recomputes `unsafe_states` from the plant components.
  void refresh_unsafe() {
    unsafe_states.clear();
    for (StateId s = 0; s < model.num_states(); ++s) {
      if (unsafe_plant_states.count(plant_of(s))) unsafe_states.insert(s);
    }
  }
};

// ---------------------------------------------------------------------------
// Dilation and compression
// ---------------------------------------------------------------------------

/// D(s): every occurrence of a vulnerable event branches into itself and its
/// attacked copy.
inline std::set<Trace> dilate(const Trace& trace, const EventSet& vulnerable,
                              EventKind kind = EventKind::ae_attacked) {
  std::set<Trace> out{Trace{}};
  for (const auto& e : trace) {
    std::set<Trace> next;
    for (const auto& prefix : out) {
      Trace t = prefix;
      t.push_back(e);
      next.insert(t);
      if (vulnerable.count(e)) {
        t.back() = artifact_name(e, kind);
        next.insert(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// C(t): maps attacked copies back to their base events.
inline Trace compress(const Trace& trace) {
  Trace out;
  out.reserve(trace.size());
  for (const auto& e : trace) {
    EventKind k = kind_from_name(e);
    if (k == EventKind::si_onset || k == EventKind::renamed) {
      throw InvalidInputError("compress: '" + e + "' is not a dilation artifact");
    }
    out.push_back(base_event(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {

inline void check_plant_names(const Automaton& g) {
  for (const auto& name : g.alphabet().names()) {
    if (has_reserved_suffix(name)) {
      throw InvalidInputError("event '" + name + "' uses a reserved suffix");
    }
  }
}

/// Copy of `a` over `alphabet` (which must contain a's events).
inline Automaton copy_over(const Automaton& a, const Alphabet& alphabet) {
  Automaton out;
  for (const auto& name : alphabet.names()) out.add_event(name, alphabet.attrs(name));
  for (StateId s = 0; s < a.num_states(); ++s) {
    out.add_state(a.state_name(s));
    out.set_marked(s, a.is_marked(s));
  }
  if (!a.empty()) out.set_initial(a.initial());
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (const auto& edge : a.edges(s)) {
      out.add_transition(s, out.alphabet().id(a.event_name(edge.event)), edge.target);
    }
  }
  return out;
}

inline void check_inputs(const Automaton& g, const Automaton& h) {
  if (g.empty()) throw InvalidInputError("plant has no states");
  if (h.empty()) throw InvalidInputError("supervisor has no states");
  check_plant_names(g);
  for (EventId e = 0; e < h.num_events(); ++e) {
    const auto& name = h.event_name(e);
    auto ge = g.alphabet().find(name);
    if (!ge) {
      throw InvalidInputError("supervisor event '" + name + "' is not a plant event");
    }
    if (!g.attrs(*ge).compatible_with(h.attrs(e))) {
      throw AttributeConflictError("conflicting attributes for event '" + name + "'");
    }
  }
}

inline void check_vulnerable(const Automaton& g, const EventSet& vulnerable,
                             bool actuators) {
  for (const auto& name : vulnerable) {
    auto e = g.alphabet().find(name);
    if (!e) throw SpecError("vulnerable event '" + name + "' is not a plant event");
    if (actuators && !g.attrs(*e).controllable) {
      throw SpecError("vulnerable actuator '" + name + "' is not controllable");
    }
    if (!actuators && !g.attrs(*e).observable) {
      throw SpecError("vulnerable sensor '" + name + "' is not observable");
    }
  }
}

inline void check_unsafe(const Automaton& g, const std::set<std::string>& unsafe) {
  for (const auto& x : unsafe) {
    if (!g.find_state(x)) throw SpecError("unsafe state '" + x + "' is not a plant state");
  }
}

/// E_a: plant events (vulnerable flags set) followed by the attack events.
inline Alphabet attacked_alphabet(const Automaton& g, const EventSet& vulnerable,
                                  AttackMode mode) {
  Alphabet out;
  for (EventId e = 0; e < g.num_events(); ++e) {
    EventAttrs a = g.attrs(e);
    a.vulnerable = vulnerable.count(g.event_name(e)) > 0;
    out.add(g.event_name(e), a);
  }
  for (EventId e = 0; e < g.num_events(); ++e) {
    const auto& name = g.event_name(e);
    if (!vulnerable.count(name)) continue;
    EventAttrs a = g.attrs(e);
    a.vulnerable = false;
    a.kind = attack_kind(mode);
    switch (mode) {
      case AttackMode::ae: a.controllable = false; break;
      case AttackMode::se: a.observable = false; break;
      case AttackMode::si:
        a.observable = false;
        a.controllable = false;
        break;
    }
    out.add(artifact_name(name, a.kind), a);
  }
  return out;
}

inline AttackedModel finish(const Automaton& h_a, const Automaton& g_a,
                            AttackMode mode, const EventSet& vulnerable,
                            const std::set<std::string>& unsafe,
                            const Limits& limits) {
  AttackedModel m;
  m.model = parallel_compose(h_a, g_a, ComposeOptions{TupleStyle::parens, limits});
  m.mode = mode;
  m.vulnerable = vulnerable;
  for (const auto& v : vulnerable) m.attack_events.insert(artifact_name(v, attack_kind(mode)));
  m.unsafe_plant_states = unsafe;
  m.refresh_unsafe();
  return m;
}

inline bool defined(const Automaton& a, StateId s, const std::string& event) {
  return a.next(s, event).has_value();
}

}  // namespace detail

/// Closed loop under actuator-enablement attacks.
inline AttackedModel build_ae_model(const Automaton& g, const Automaton& h,
                                    const VulnerabilitySpec& spec,
                                    const Limits& limits = {}) {
  detail::check_inputs(g, h);
  detail::check_vulnerable(g, spec.vulnerable_actuators, true);
  detail::check_unsafe(g, spec.unsafe_plant_states);
  const auto& vul = spec.vulnerable_actuators;
  Alphabet ea = detail::attacked_alphabet(g, vul, AttackMode::ae);

  Automaton g_a = detail::copy_over(g, ea);
  for (StateId x = 0; x < g.num_states(); ++x) {
    for (const auto& edge : g.edges(x)) {
      const auto& name = g.event_name(edge.event);
      if (vul.count(name)) {
        g_a.add_transition(x, ea.id(artifact_name(name, EventKind::ae_attacked)),
                           edge.target);
      }
    }
  }

  Automaton h_a = detail::copy_over(h, ea);
  auto uncontrollable = g.alphabet().uncontrollable();
  for (StateId x = 0; x < h.num_states(); ++x) {
    for (const auto& sigma : vul) {
      if (!detail::defined(h, x, sigma)) {
        h_a.add_transition(x, ea.id(artifact_name(sigma, EventKind::ae_attacked)), x);
      }
    }
    for (const auto& e : uncontrollable) {
      if (!detail::defined(h, x, e)) h_a.add_transition(x, ea.id(e), x);
    }
  }
  return detail::finish(h_a, g_a, AttackMode::ae, vul, spec.unsafe_plant_states, limits);
}

/// Closed loop under sensor-erasure attacks.
inline AttackedModel build_se_model(const Automaton& g, const Automaton& h,
                                    const VulnerabilitySpec& spec,
                                    const Limits& limits = {}) {
  detail::check_inputs(g, h);
  detail::check_vulnerable(g, spec.vulnerable_sensors, false);
  detail::check_unsafe(g, spec.unsafe_plant_states);
  const auto& vul = spec.vulnerable_sensors;
  Alphabet ea = detail::attacked_alphabet(g, vul, AttackMode::se);

  Automaton g_a = detail::copy_over(g, ea);
  for (StateId x = 0; x < g.num_states(); ++x) {
    for (const auto& edge : g.edges(x)) {
      const auto& name = g.event_name(edge.event);
      if (vul.count(name)) {
        g_a.add_transition(x, ea.id(artifact_name(name, EventKind::se_erased)),
                           edge.target);
      }
    }
  }

  Automaton h_a = detail::copy_over(h, ea);
  auto uncontrollable = ea.uncontrollable();
  for (StateId x = 0; x < h.num_states(); ++x) {
    for (const auto& sigma : vul) {
      if (detail::defined(h, x, sigma)) {
        h_a.add_transition(x, ea.id(artifact_name(sigma, EventKind::se_erased)), x);
      }
    }
    for (const auto& e : uncontrollable) {
      if (!h_a.next(x, ea.id(e))) h_a.add_transition(x, ea.id(e), x);
    }
  }
  return detail::finish(h_a, g_a, AttackMode::se, vul, spec.unsafe_plant_states, limits);
}

/// Name of the fresh plant state between an inserted event and its replay.
inline std::string insertion_state_name(const std::string& j, const std::string& sigma) {
  return "ins(" + j + "," + sigma + ")";
}

/// Closed loop under sensor-insertion attacks.
inline AttackedModel build_si_model(const Automaton& g, const Automaton& h,
                                    const VulnerabilitySpec& spec,
                                    const Limits& limits = {}) {
  detail::check_inputs(g, h);
  detail::check_vulnerable(g, spec.vulnerable_sensors, false);
  detail::check_unsafe(g, spec.unsafe_plant_states);
  const auto& vul = spec.vulnerable_sensors;
  Alphabet ea = detail::attacked_alphabet(g, vul, AttackMode::si);

  Automaton g_a = detail::copy_over(g, ea);
  for (StateId j = 0; j < g.num_states(); ++j) {
    for (const auto& sigma : vul) {
      StateId x = g_a.add_state(insertion_state_name(g.state_name(j), sigma));
      g_a.add_transition(j, ea.id(artifact_name(sigma, EventKind::si_onset)), x);
      g_a.add_transition(x, ea.id(sigma), j);
    }
  }

  Automaton h_a = detail::copy_over(h, ea);
  auto uncontrollable = g.alphabet().uncontrollable();
  for (StateId x = 0; x < h.num_states(); ++x) {
    for (const auto& sigma : vul) {
      if (detail::defined(h, x, sigma)) {
        h_a.add_transition(x, ea.id(artifact_name(sigma, EventKind::si_onset)), x);
      }
    }
    for (const auto& e : uncontrollable) {
      if (!detail::defined(h, x, e)) h_a.add_transition(x, ea.id(e), x);
    }
  }
  return detail::finish(h_a, g_a, AttackMode::si, vul, spec.unsafe_plant_states, limits);
}

inline AttackedModel build_model(AttackMode mode, const Automaton& g,
                                 const Automaton& h, const EventSet& vulnerable,
                                 const std::set<std::string>& unsafe,
                                 const Limits& limits = {}) {
  VulnerabilitySpec spec;
  spec.unsafe_plant_states = unsafe;
  switch (mode) {
    case AttackMode::ae:
      spec.vulnerable_actuators = vulnerable;
      return build_ae_model(g, h, spec, limits);
    case AttackMode::se:
      spec.vulnerable_sensors = vulnerable;
      return build_se_model(g, h, spec, limits);
    case AttackMode::si:
      spec.vulnerable_sensors = vulnerable;
      return build_si_model(g, h, spec, limits);
  }
  throw UnsupportedModeError("unknown attack mode");
}

// ---------------------------------------------------------------------------
// Sub-attackers
// ---------------------------------------------------------------------------

/// An attack self-loop of H_a: attack event at a supervisor state.
struct AttackSite {
  std::string supervisor_state;
  std::string event;

  auto operator<=>(const AttackSite&) const = default;
};

/// Attack self-loops that are exercised somewhere in G_M.
inline std::set<AttackSite> attack_sites(const AttackedModel& m) {
  std::set<AttackSite> out;
  for (StateId s = 0; s < m.model.num_states(); ++s) {
    for (const auto& edge : m.model.edges(s)) {
      if (m.is_attack(edge.event)) {
        out.insert({m.supervisor_of(s), m.model.event_name(edge.event)});
      }
    }
  }
  return out;
}

/// Model whose attacker only uses the attack self-loops in `keep`.
inline AttackedModel sub_attacker(const AttackedModel& m, const std::set<AttackSite>& keep) {
  if (m.mode != AttackMode::ae) {
    throw UnsupportedModeError("sub-attackers are defined for AE models only");
  }
  auto sub = sub_automaton(
      m.model, std::vector<bool>(m.model.num_states(), true),
      [&](StateId from, EventId e, StateId) {
        return !m.is_attack(e) || keep.count({m.supervisor_of(from), m.model.event_name(e)});
      });
  AttackedModel out;
  out.model = std::move(sub.automaton);
  out.mode = m.mode;
  out.vulnerable = m.vulnerable;
  out.attack_events = m.attack_events;
  out.unsafe_plant_states = m.unsafe_plant_states;
  out.refresh_unsafe();
  return out;
}

/// Sub-attacker keeping each attack site independently with probability 1/2.
inline AttackedModel sub_attacker(const AttackedModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::set<AttackSite> keep;
  for (const auto& site : attack_sites(m)) {
    if (coin(rng)) keep.insert(site);
  }
  return sub_attacker(m, keep);
}

}  // namespace dessec
