#pragma once

#include <map>
#include <string>
#include <vector>

#include "dessec/attack.hpp"

namespace dessec {

enum class Label : std::uint8_t { N, Y };

inline std::string_view label_name(Label l) noexcept { return l == Label::Y ? "Y" : "N"; }

/// G_l = G_M || A_l. `base[s]` is the G_M state of s.
struct LabeledAutomaton {
  Automaton automaton;
  EventSet label_events;
  std::vector<StateId> base;
  std::vector<Label> label;
};

/// Two-state label automaton: N -f-> Y on every f in `label_events`, Y absorbing.
inline Automaton label_automaton(const Alphabet& alphabet, const EventSet& label_events) {
  Automaton a;
  for (const auto& f : label_events) a.add_event(f, alphabet.attrs(f));
  StateId n = a.add_state("N");
  StateId y = a.add_state("Y");
  a.set_marked(n);
  a.set_marked(y);
  for (const auto& f : label_events) {
    a.add_transition(n, a.alphabet().id(f), y);
    a.add_transition(y, a.alphabet().id(f), y);
  }
  return a;
}

inline LabeledAutomaton label_compose(const AttackedModel& m, const Limits& limits = {}) {
  LabeledAutomaton out;
  out.label_events = m.attack_events;
  auto tracked = compose_tracked(m.model, label_automaton(m.model.alphabet(), m.attack_events),
                                 ComposeOptions{TupleStyle::parens, limits});
  out.automaton = std::move(tracked.automaton);
  for (auto [x, l] : tracked.origin) {
    out.base.push_back(x);
    out.label.push_back(l == 1 ? Label::Y : Label::N);
  }
  return out;
}

enum class Certainty { normal, certain, uncertain };

inline std::string_view certainty_name(Certainty c) noexcept {
  switch (c) {
    case Certainty::normal: return "normal";
    case Certainty::certain: return "certain";
    case Certainty::uncertain: return "uncertain";
  }
  return "normal";
}

template <typename Range>
Certainty classify_labels(const LabeledAutomaton& l, const Range& members) {
  bool any_y = false;
  bool any_n = false;
  for (StateId s : members) {
    (l.label[s] == Label::Y ? any_y : any_n) = true;
  }
  if (any_y && any_n) return Certainty::uncertain;
  return any_y ? Certainty::certain : Certainty::normal;
}

struct Diagnoser {
  Automaton automaton;
  /// Labeled states making up each diagnoser state (sorted ids).
  std::vector<std::vector<StateId>> members;
  std::vector<Certainty> certainty;

  std::vector<StateId> of(Certainty c) const {
    std::vector<StateId> out;
    for (StateId q = 0; q < certainty.size(); ++q) {
      if (certainty[q] == c) out.push_back(q);
    }
    return out;
  }
};

/// Observer of the labeled automaton w.r.t. `unobservable`.
inline Diagnoser build_diagnoser(const LabeledAutomaton& l, const EventSet& unobservable,
                                 const Limits& limits = {}) {
  auto sc = subset_construct(l.automaton, unobservable, limits);
  Diagnoser d;
  d.automaton = std::move(sc.automaton);
  d.members = std::move(sc.members);
  for (const auto& m : d.members) d.certainty.push_back(classify_labels(l, m));
  return d;
}

/// Diagnoser over the unobservable events of the labeled automaton's alphabet.
inline Diagnoser build_diagnoser(const LabeledAutomaton& l, const Limits& limits = {}) {
  return build_diagnoser(l, l.automaton.alphabet().unobservable(), limits);
}

/// Certain states with at least one predecessor that is normal or uncertain.
inline StateSet first_entered_certain(const Diagnoser& d) {
  StateSet out;
  for (StateId q = 0; q < d.automaton.num_states(); ++q) {
    if (d.certainty[q] == Certainty::certain) continue;
    for (const auto& edge : d.automaton.edges(q)) {
      if (d.certainty[edge.target] == Certainty::certain) out.insert(edge.target);
    }
  }
  return out;
}

/// On-the-fly diagnoser: the caller holds the current estimate.
class OnlineDiagnoser {
public:
  using Estimate = std::vector<StateId>;

  explicit OnlineDiagnoser(const LabeledAutomaton& l)
      : l_(&l), hidden_(l.automaton.num_events()) {
    for (EventId e = 0; e < hidden_.size(); ++e) {
      hidden_[e] = !l.automaton.attrs(e).observable;
    }
  }

  Estimate initial() const {
    if (l_->automaton.empty()) return {};
    return closure(l_->automaton, {l_->automaton.initial()}, hidden_);
  }

  /// Successor estimate on an observable event; empty if infeasible.
  Estimate step(const Estimate& q, EventId e) const {
    std::vector<StateId> targets;
    for (StateId s : q) {
      if (auto t = l_->automaton.next(s, e)) targets.push_back(*t);
    }
    if (targets.empty()) return {};
    return closure(l_->automaton, targets, hidden_);
  }

  Certainty classify(const Estimate& q) const { return classify_labels(*l_, q); }

  bool hidden(EventId e) const { return hidden_[e]; }

  std::string name(const Estimate& q) const { return set_name(l_->automaton, q); }

private:
  const LabeledAutomaton* l_;
  std::vector<bool> hidden_;
};

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

struct VerifierArtifacts {
  LabeledAutomaton labeled;
  /// Normal behavior with unobservable events renamed.
  Automaton g_n;
  /// Labeled behavior trimmed to prefixes of attacked strings; `g_f_origin`
  /// maps its states to labeled states.
  Automaton g_f;
  std::vector<StateId> g_f_origin;
  Automaton g_v;
  std::vector<std::pair<StateId, StateId>> g_v_origin;  // (g_n, g_f)
  Automaton g_v_cd;
  StateId sink = no_state;                              // A in g_v_cd
  Automaton g_t;
  std::vector<std::pair<StateId, StateId>> g_t_origin;  // (g_v_cd, g_f)
};

inline constexpr const char* verifier_sink_name = "A";

inline VerifierArtifacts build_verifier(const AttackedModel& m, const Limits& limits = {}) {
  VerifierArtifacts v;
  v.labeled = label_compose(m, limits);
  const Automaton& gl = v.labeled.automaton;
  const Alphabet& em = gl.alphabet();

  // G_N: no attack transitions; observable events kept, the rest renamed.
  auto normal = sub_automaton(gl, std::vector<bool>(gl.num_states(), true),
                              [&](StateId, EventId e, StateId) {
                                return !m.attack_events.count(gl.event_name(e));
                              });
  std::vector<EventId> rename(em.size(), 0);
  for (EventId e = 0; e < em.size(); ++e) {
    EventAttrs a = em.attrs(e);
    const auto& name = em.name(e);
    if (a.observable) {
      rename[e] = v.g_n.add_event(name, a);
    } else if (!m.attack_events.count(name)) {
      a.kind = EventKind::renamed;
      rename[e] = v.g_n.add_event(artifact_name(name, EventKind::renamed), a);
    }
  }
  const Automaton& na = normal.automaton;
  for (StateId s = 0; s < na.num_states(); ++s) v.g_n.add_state(na.state_name(s));
  for (StateId s = 0; s < na.num_states(); ++s) {
    for (const auto& edge : na.edges(s)) v.g_n.add_transition(s, rename[edge.event], edge.target);
  }

  // G_F: states from which a Y-labeled state is reachable.
  std::vector<bool> is_y(gl.num_states());
  for (StateId s = 0; s < gl.num_states(); ++s) is_y[s] = v.labeled.label[s] == Label::Y;
  auto faulty = sub_automaton(gl, coreachable(gl, is_y));
  v.g_f = std::move(faulty.automaton);
  v.g_f_origin = std::move(faulty.origin);

  ComposeOptions braces{TupleStyle::braces, limits};
  auto gv = compose_tracked(v.g_n, v.g_f, braces);
  v.g_v = std::move(gv.automaton);
  v.g_v_origin = std::move(gv.origin);

  // G_V^cd: unexpected observable events lead to A.
  v.g_v_cd = v.g_v;
  if (!v.g_v.empty()) {
    v.sink = v.g_v_cd.add_state(verifier_sink_name);
    const Alphabet& ev = v.g_v.alphabet();
    for (StateId s = 0; s < v.g_v.num_states(); ++s) {
      for (EventId e = 0; e < ev.size(); ++e) {
        if (ev.attrs(e).observable && !v.g_v.next(s, e)) v.g_v_cd.add_transition(s, e, v.sink);
      }
    }
    for (EventId e = 0; e < ev.size(); ++e) {
      const auto& a = ev.attrs(e);
      if (!a.controllable && a.kind != EventKind::renamed) v.g_v_cd.add_transition(v.sink, e, v.sink);
    }
  }

  auto gt = compose_tracked(v.g_v_cd, v.g_f, braces);
  v.g_t = std::move(gt.automaton);
  v.g_t_origin = std::move(gt.origin);
  return v;
}

}  // namespace dessec
