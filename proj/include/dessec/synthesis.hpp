#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dessec/algorithms.hpp"

namespace dessec {

/// Strings s1, s2 with equal projection where s1+event stays in the
/// specification and s2+event leaves it while the plant allows it.
struct ObservabilityWitness {
  Trace s1;
  Trace s2;
  std::string event;
};

class RealizationRefusedError : public Error {
public:
  explicit RealizationRefusedError(ObservabilityWitness w)
      : Error("specification is not observable: event '" + w.event + "' after [" + join(w.s1) +
              "] and [" + join(w.s2) + "]"),
        witness_(std::move(w)) {}

  const ObservabilityWitness& witness() const noexcept { return witness_; }

private:
  static std::string join(const Trace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? " " : "") + t[i];
    return out;
  }

  ObservabilityWitness witness_;
};

namespace detail {

inline void check_spec_alphabet(const Automaton& g, const Automaton& k) {
  for (const auto& name : k.alphabet().names()) {
    if (!g.alphabet().contains(name)) {
      throw InvalidInputError("specification event '" + name + "' is not a plant event");
    }
  }
}

/// Copy of `k` over G's alphabet, so that composition is an intersection.
inline Automaton over_plant_alphabet(const Automaton& g, const Automaton& k) {
  check_spec_alphabet(g, k);
  Automaton out;
  for (const auto& name : g.alphabet().names()) out.add_event(name, g.alphabet().attrs(name));
  for (StateId s = 0; s < k.num_states(); ++s) {
    out.add_state(k.state_name(s));
    out.set_marked(s, k.is_marked(s));
  }
  if (!k.empty()) out.set_initial(k.initial());
  for (StateId s = 0; s < k.num_states(); ++s) {
    for (const auto& edge : k.edges(s)) {
      out.add_transition(s, out.alphabet().id(k.event_name(edge.event)), edge.target);
    }
  }
  return out;
}

}  // namespace detail

/// supC(K) by iterated removal of product states where an uncontrollable
/// plant event is cut. States are (plant, spec) pairs.
inline Automaton supremal_controllable(const Automaton& g, const Automaton& spec,
                                       const EventSet& uncontrollable, const Limits& limits = {}) {
  auto prod = compose_tracked(g, detail::over_plant_alphabet(g, spec),
                              ComposeOptions{TupleStyle::parens, limits});
  const Automaton& p = prod.automaton;
  auto uc = event_mask(g, uncontrollable);
  std::vector<bool> keep(p.num_states(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId s = 0; s < p.num_states(); ++s) {
      if (!keep[s]) continue;
      StateId x = prod.origin[s].first;
      for (const auto& edge : g.edges(x)) {
        if (!uc[edge.event]) continue;
        auto t = p.next(s, edge.event);
        if (!t || !keep[*t]) {
          keep[s] = false;
          changed = true;
          break;
        }
      }
    }
  }
  return sub_automaton(p, keep).automaton;
}

/// Definitional controllability check of L(k) against L(g).
inline bool is_controllable(const Automaton& g, const Automaton& k, const EventSet& uncontrollable) {
  if (k.empty()) return true;
  auto prod = compose_tracked(g, detail::over_plant_alphabet(g, k));
  auto uc = event_mask(g, uncontrollable);
  for (StateId s = 0; s < prod.automaton.num_states(); ++s) {
    for (const auto& edge : g.edges(prod.origin[s].first)) {
      if (uc[edge.event] && !prod.automaton.next(s, edge.event)) return false;
    }
  }
  return true;
}

struct ObservabilityResult {
  bool observable = true;
  std::optional<ObservabilityWitness> witness;
};

/// Observability of L(k) w.r.t. L(g): pairs of strings with equal
/// projection must agree on every controllable event the plant allows.
inline ObservabilityResult check_observability(const Automaton& g, const Automaton& k,
                                               const EventSet& observable,
                                               const EventSet& controllable,
                                               const Limits& limits = {}) {
  ObservabilityResult r;
  if (k.empty()) return r;
  auto prod = compose_tracked(g, detail::over_plant_alphabet(g, k),
                              ComposeOptions{TupleStyle::parens, limits});
  const Automaton& p = prod.automaton;
  auto obs = event_mask(g, observable);
  auto ctrl = event_mask(g, controllable);

  using Pair = std::pair<StateId, StateId>;
  struct Back {
    Pair from;
    EventId event;
    int mover;  // 0 both, 1 first, 2 second
  };
  std::map<Pair, Back> parent;
  std::deque<Pair> queue;
  Pair start{p.initial(), p.initial()};
  parent.emplace(start, Back{start, 0, -1});
  queue.push_back(start);

  auto rebuild = [&](Pair at) {
    Trace s1, s2;
    while (at != start) {
      const Back& b = parent.at(at);
      const auto& name = p.event_name(b.event);
      if (b.mover != 2) s1.push_back(name);
      if (b.mover != 1) s2.push_back(name);
      at = b.from;
    }
    std::reverse(s1.begin(), s1.end());
    std::reverse(s2.begin(), s2.end());
    return std::pair{s1, s2};
  };
  auto push = [&](Pair from, Pair to, EventId e, int mover) {
    if (parent.size() >= limits.max_states) {
      throw ResourceLimitError("observability check", limits.max_states);
    }
    if (parent.emplace(to, Back{from, e, mover}).second) queue.push_back(to);
  };

  while (!queue.empty()) {
    Pair cur = queue.front();
    queue.pop_front();
    auto [a, b] = cur;
    StateId gb = prod.origin[b].first;
    for (const auto& edge : p.edges(a)) {
      if (ctrl[edge.event] && g.next(gb, edge.event) && !p.next(b, edge.event)) {
        auto [s1, s2] = rebuild(cur);
        r.observable = false;
        r.witness = ObservabilityWitness{s1, s2, p.event_name(edge.event)};
        return r;
      }
    }
    for (const auto& edge : p.edges(a)) {
      if (!obs[edge.event]) {
        push(cur, {edge.target, b}, edge.event, 1);
      } else if (auto t = p.next(b, edge.event)) {
        push(cur, {edge.target, *t}, edge.event, 0);
      }
    }
    for (const auto& edge : p.edges(b)) {
      if (!obs[edge.event]) push(cur, {a, edge.target}, edge.event, 2);
    }
  }
  return r;
}

/// Supervisor realization: observer of L(k)||L(g) over the observable events,
/// enabled unobservable events as self-loops. States are numbered "0", "1", ...
inline Automaton realize_supervisor(const Automaton& g, const Automaton& k, const EventSet& observable,
                                    const Limits& limits = {}) {
  auto check = check_observability(g, k, observable, g.alphabet().controllable(), limits);
  if (!check.observable) throw RealizationRefusedError(*check.witness);

  Automaton h;
  for (const auto& name : g.alphabet().names()) h.add_event(name, g.alphabet().attrs(name));
  if (k.empty()) return h;
  auto prod = parallel_compose(g, detail::over_plant_alphabet(g, k),
                               ComposeOptions{TupleStyle::parens, limits});
  EventSet hidden;
  for (const auto& name : g.alphabet().names()) {
    if (!observable.count(name)) hidden.insert(name);
  }
  auto sc = subset_construct(prod, hidden, limits);
  const Automaton& obs = sc.automaton;
  for (StateId q = 0; q < obs.num_states(); ++q) {
    h.add_state(std::to_string(q));
    h.set_marked(q, obs.is_marked(q));
  }
  for (StateId q = 0; q < obs.num_states(); ++q) {
    for (const auto& edge : obs.edges(q)) {
      h.add_transition(q, h.alphabet().id(obs.event_name(edge.event)), edge.target);
    }
    for (StateId s : sc.members[q]) {
      for (const auto& edge : prod.edges(s)) {
        const auto& name = prod.event_name(edge.event);
        if (hidden.count(name)) h.add_transition(q, h.alphabet().id(name), q);
      }
    }
  }
  return h;
}

}  // namespace dessec
