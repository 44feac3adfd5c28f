#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dessec/automaton.hpp"

namespace dessec {

using StateSet = std::set<StateId>;

struct Limits {
  std::size_t max_states = 1'000'000;
};

// ---------------------------------------------------------------------------
// Sub-automata
// ---------------------------------------------------------------------------

/// Accessible part of an automaton restricted to a set of states and edges,
/// together with the map from new to original state ids.
struct SubAutomaton {
  Automaton automaton;
  std::vector<StateId> origin;
};

using EdgeFilter = std::function<bool(StateId from, EventId e, StateId to)>;

/// Keeps the states with `keep_state[s]` and the edges accepted by
/// `keep_edge`, then prunes what is no longer reachable. Event ids and state
/// names are preserved; if the initial state is dropped the result is empty.
inline SubAutomaton sub_automaton(const Automaton& a,
                                  const std::vector<bool>& keep_state,
                                  const EdgeFilter& keep_edge = {}) {
  SubAutomaton out;
  for (std::size_t e = 0; e < a.num_events(); ++e) {
    out.automaton.add_event(a.event_name(static_cast<EventId>(e)),
                            a.attrs(static_cast<EventId>(e)));
  }
  if (a.empty() || !keep_state[a.initial()]) return out;

  std::vector<StateId> renumber(a.num_states(), no_state);
  std::deque<StateId> queue;
  auto visit = [&](StateId s) {
    if (renumber[s] != no_state) return renumber[s];
    renumber[s] = out.automaton.add_state(a.state_name(s), a.components(s));
    out.automaton.set_marked(renumber[s], a.is_marked(s));
    out.origin.push_back(s);
    queue.push_back(s);
    return renumber[s];
  };
  visit(a.initial());
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& edge : a.edges(s)) {
      if (!keep_state[edge.target]) continue;
      if (keep_edge && !keep_edge(s, edge.event, edge.target)) continue;
      StateId t = visit(edge.target);
      out.automaton.add_transition(renumber[s], edge.event, t);
    }
  }
  return out;
}

/// Removes states unreachable from the initial state.
inline Automaton accessible(const Automaton& a) {
  return sub_automaton(a, std::vector<bool>(a.num_states(), true)).automaton;
}

// ---------------------------------------------------------------------------
// Reachability
// ---------------------------------------------------------------------------

inline std::vector<bool> event_mask(const Automaton& a, const EventSet& events) {
  std::vector<bool> mask(a.num_events(), false);
  for (const auto& name : events) {
    if (auto id = a.alphabet().find(name)) mask[*id] = true;
  }
  return mask;
}

/// States reachable from any state in `from` using only events with
/// `allowed[e]`. The seeds are included.
inline StateSet reach_mask(const Automaton& a, const StateSet& from,
                           const std::vector<bool>& allowed) {
  StateSet seen(from.begin(), from.end());
  std::vector<StateId> stack(from.begin(), from.end());
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const auto& edge : a.edges(s)) {
      if (allowed[edge.event] && seen.insert(edge.target).second) {
        stack.push_back(edge.target);
      }
    }
  }
  return seen;
}

/// Reach(A, from, allowed).
inline StateSet reach(const Automaton& a, StateId from, const EventSet& allowed) {
  if (from >= a.num_states()) throw LookupError("unknown state id");
  return reach_mask(a, StateSet{from}, event_mask(a, allowed));
}

inline StateSet reach(const Automaton& a, std::string_view from,
                      const EventSet& allowed) {
  return reach(a, a.state(from), allowed);
}

/// States from which some state in `targets` is reachable (targets included).
inline std::vector<bool> coreachable(const Automaton& a,
                                     const std::vector<bool>& targets) {
  std::vector<std::vector<StateId>> preds(a.num_states());
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (const auto& edge : a.edges(s)) preds[edge.target].push_back(s);
  }
  std::vector<bool> seen = targets;
  std::vector<StateId> stack;
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (seen[s]) stack.push_back(s);
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s]) {
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

/// Shortest event sequence from the initial state to any state accepted by
/// `is_target`, restricted to edges accepted by `keep_edge` (all if empty).
inline std::optional<Trace> shortest_trace_to(
    const Automaton& a, const std::function<bool(StateId)>& is_target,
    const EdgeFilter& keep_edge = {}) {
  if (a.empty()) return std::nullopt;
  std::vector<std::pair<StateId, EventId>> parent(
      a.num_states(), {no_state, 0});
  std::vector<bool> seen(a.num_states(), false);
  std::deque<StateId> queue{a.initial()};
  seen[a.initial()] = true;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    if (is_target(s)) {
      Trace trace;
      for (StateId cur = s; cur != a.initial(); cur = parent[cur].first) {
        trace.push_back(a.event_name(parent[cur].second));
      }
      std::reverse(trace.begin(), trace.end());
      return trace;
    }
    for (const auto& edge : a.edges(s)) {
      if (keep_edge && !keep_edge(s, edge.event, edge.target)) continue;
      if (!seen[edge.target]) {
        seen[edge.target] = true;
        parent[edge.target] = {s, edge.event};
        queue.push_back(edge.target);
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parallel composition
// ---------------------------------------------------------------------------

enum class TupleStyle { parens, braces };

struct ComposeOptions {
  TupleStyle style = TupleStyle::parens;
  Limits limits{};
};

struct Composition {
  Automaton automaton;
  /// (state of A, state of B) for every composed state.
  std::vector<std::pair<StateId, StateId>> origin;
};

inline std::string tuple_name(const std::string& a, const std::string& b,
                              TupleStyle style) {
  return style == TupleStyle::parens ? "(" + a + "," + b + ")"
                                     : "{" + a + "," + b + "}";
}

/// A || B: shared events synchronize, private events interleave. Only the
/// accessible part is built. The alphabet is A's events followed by B's
/// private events.
inline Composition compose_tracked(const Automaton& a, const Automaton& b,
                                   const ComposeOptions& options = {}) {
  Composition out;
  Automaton& c = out.automaton;
  std::vector<EventId> a_to_c(a.num_events()), b_to_c(b.num_events());
  std::vector<bool> a_shared(a.num_events(), false);
  std::vector<bool> b_shared(b.num_events(), false);
  for (EventId e = 0; e < a.num_events(); ++e) {
    a_to_c[e] = c.add_event(a.event_name(e), a.attrs(e));
  }
  for (EventId e = 0; e < b.num_events(); ++e) {
    if (auto ea = a.alphabet().find(b.event_name(e))) {
      if (!a.attrs(*ea).compatible_with(b.attrs(e))) {
        throw AttributeConflictError("conflicting attributes for shared event '" +
                                     b.event_name(e) + "'");
      }
      a_shared[*ea] = true;
      b_shared[e] = true;
    }
    b_to_c[e] = c.add_event(b.event_name(e), b.attrs(e));
  }
  if (a.empty() || b.empty()) return out;

  std::map<std::pair<StateId, StateId>, StateId> index;
  std::deque<std::pair<StateId, StateId>> queue;
  auto visit = [&](StateId x, StateId y) {
    auto [it, fresh] = index.try_emplace({x, y}, 0);
    if (!fresh) return it->second;
    if (c.num_states() >= options.limits.max_states) {
      throw ResourceLimitError("parallel composition",
                               options.limits.max_states);
    }
    const auto& na = a.state_name(x);
    const auto& nb = b.state_name(y);
    it->second = c.add_state(tuple_name(na, nb, options.style), {na, nb});
    c.set_marked(it->second, a.is_marked(x) && b.is_marked(y));
    out.origin.emplace_back(x, y);
    queue.emplace_back(x, y);
    return it->second;
  };
  visit(a.initial(), b.initial());
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    StateId from = index.at({x, y});
    for (const auto& edge : a.edges(x)) {
      if (a_shared[edge.event]) {
        auto eb = b.alphabet().id(a.event_name(edge.event));
        auto ty = b.next(y, eb);
        if (!ty) continue;
        c.add_transition(from, a_to_c[edge.event], visit(edge.target, *ty));
      } else {
        c.add_transition(from, a_to_c[edge.event], visit(edge.target, y));
      }
    }
    for (const auto& edge : b.edges(y)) {
      if (b_shared[edge.event]) continue;
      c.add_transition(from, b_to_c[edge.event], visit(x, edge.target));
    }
  }
  return out;
}

inline Automaton parallel_compose(const Automaton& a, const Automaton& b,
                                  const ComposeOptions& options = {}) {
  return compose_tracked(a, b, options).automaton;
}

// ---------------------------------------------------------------------------
// Observer (subset construction)
// ---------------------------------------------------------------------------

struct SubsetConstruction {
  Automaton automaton;
  /// Sorted ids of the source states making up each observer state.
  std::vector<std::vector<StateId>> members;
};

/// "{n1,n2,...}" with member names sorted lexicographically.
inline std::string set_name(const Automaton& a, const std::vector<StateId>& ids) {
  std::vector<std::string> names;
  names.reserve(ids.size());
  for (StateId s : ids) names.push_back(a.state_name(s));
  std::sort(names.begin(), names.end());
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",";
    out += names[i];
  }
  return out + "}";
}

/// Unobservable closure of a set of states.
inline std::vector<StateId> closure(const Automaton& a,
                                    const std::vector<StateId>& seeds,
                                    const std::vector<bool>& hidden) {
  StateSet s = reach_mask(a, StateSet(seeds.begin(), seeds.end()), hidden);
  return {s.begin(), s.end()};
}

/// Observer of `a` w.r.t. the hidden (unobservable) events. The observer's
/// alphabet is E \ hidden.
inline SubsetConstruction subset_construct(const Automaton& a,
                                           const EventSet& hidden,
                                           const Limits& limits = {}) {
  SubsetConstruction out;
  Automaton& obs = out.automaton;
  auto hidden_mask = event_mask(a, hidden);
  std::vector<EventId> visible;  // source event ids, in alphabet order
  std::vector<EventId> to_obs(a.num_events(), 0);
  for (EventId e = 0; e < a.num_events(); ++e) {
    if (hidden_mask[e]) continue;
    visible.push_back(e);
    to_obs[e] = obs.add_event(a.event_name(e), a.attrs(e));
  }
  if (a.empty()) return out;

  std::map<std::vector<StateId>, StateId> index;
  std::deque<StateId> queue;
  auto visit = [&](std::vector<StateId> set) {
    auto it = index.find(set);
    if (it != index.end()) return it->second;
    if (obs.num_states() >= limits.max_states) {
      throw ResourceLimitError("observer construction", limits.max_states);
    }
    StateId id = obs.add_state(set_name(a, set));
    bool marked = std::any_of(set.begin(), set.end(),
                              [&](StateId s) { return a.is_marked(s); });
    obs.set_marked(id, marked);
    index.emplace(set, id);
    out.members.push_back(std::move(set));
    queue.push_back(id);
    return id;
  };
  visit(closure(a, {a.initial()}, hidden_mask));
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    std::map<EventId, std::vector<StateId>> successors;
    for (StateId s : out.members[q]) {
      for (const auto& edge : a.edges(s)) {
        if (!hidden_mask[edge.event]) successors[edge.event].push_back(edge.target);
      }
    }
    for (auto& [e, targets] : successors) {
      StateId t = visit(closure(a, targets, hidden_mask));
      obs.add_transition(q, to_obs[e], t);
    }
  }
  return out;
}

inline Automaton observer(const Automaton& a, const EventSet& hidden,
                          const Limits& limits = {}) {
  return subset_construct(a, hidden, limits).automaton;
}

// ---------------------------------------------------------------------------
// Deadlock and blocking
// ---------------------------------------------------------------------------

/// Non-marked states with an empty active event set.
inline StateSet deadlock_states(const Automaton& a) {
  StateSet out;
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (a.edges(s).empty() && !a.is_marked(s)) out.insert(s);
  }
  return out;
}

/// Reachable states from which no marked state can be reached. Empty when the
/// automaton has no marked states (blocking is not considered then).
inline StateSet blocking_states(const Automaton& a) {
  StateSet out;
  if (!a.has_marked()) return out;
  std::vector<bool> marked(a.num_states());
  for (StateId s = 0; s < a.num_states(); ++s) marked[s] = a.is_marked(s);
  auto co = coreachable(a, marked);
  auto acc = reach_mask(a, StateSet{a.initial()},
                        std::vector<bool>(a.num_events(), true));
  for (StateId s : acc) {
    if (!co[s]) out.insert(s);
  }
  return out;
}

inline std::vector<std::string> state_names(const Automaton& a, const StateSet& s) {
  std::vector<std::string> out;
  for (StateId id : s) out.push_back(a.state_name(id));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dessec
