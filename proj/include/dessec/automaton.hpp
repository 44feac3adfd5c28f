#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dessec/errors.hpp"
#include "dessec/events.hpp"

namespace dessec {

using StateId = std::uint32_t;
inline constexpr StateId no_state = std::numeric_limits<StateId>::max();

struct Edge {
  EventId event;
  StateId target;
};

/// Deterministic finite automaton with a partial transition function.
///
/// States carry display names (unique) and, for composed automata, the tuple
/// of component state names. A missing transition means the event is
/// infeasible at that state. An automaton with no states generates the empty
/// language.
class Automaton {
public:
  Automaton() = default;

  // -- construction ---------------------------------------------------------

  EventId add_event(const std::string& name, const EventAttrs& attrs = {}) {
    return alphabet_.add(name, attrs);
  }

  StateId add_state(const std::string& name,
                    std::vector<std::string> components = {}) {
    if (index_.count(name)) {
      throw InvalidInputError("duplicate state '" + name + "'");
    }
    auto id = static_cast<StateId>(names_.size());
    names_.push_back(name);
    components_.push_back(std::move(components));
    edges_.emplace_back();
    marked_.push_back(false);
    index_.emplace(name, id);
    if (initial_ == no_state) initial_ = id;
    return id;
  }

  void set_initial(StateId s) {
    check_state(s);
    initial_ = s;
  }

  void set_marked(StateId s, bool marked = true) {
    check_state(s);
    marked_[s] = marked;
  }

  /// Adds `from -e-> to`. Re-adding an identical transition is a no-op; a
  /// second target for the same (state, event) is rejected.
  void add_transition(StateId from, EventId e, StateId to) {
    check_state(from);
    check_state(to);
    if (e >= alphabet_.size()) throw LookupError("unknown event id");
    auto& out = edges_[from];
    auto it = std::lower_bound(out.begin(), out.end(), e,
                               [](const Edge& x, EventId v) { return x.event < v; });
    if (it != out.end() && it->event == e) {
      if (it->target != to) {
        throw NondeterminismError("state '" + names_[from] +
                                  "' has two targets for event '" +
                                  alphabet_.name(e) + "'");
      }
      return;
    }
    out.insert(it, Edge{e, to});
    ++transition_count_;
  }

  void add_transition(std::string_view from, std::string_view event,
                      std::string_view to) {
    add_transition(state(from), alphabet_.id(event), state(to));
  }

  // -- queries --------------------------------------------------------------

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  Alphabet& alphabet_mut() noexcept { return alphabet_; }

  std::size_t num_states() const noexcept { return names_.size(); }
  std::size_t num_events() const noexcept { return alphabet_.size(); }
  std::size_t num_transitions() const noexcept { return transition_count_; }
  bool empty() const noexcept { return names_.empty(); }

  StateId initial() const noexcept { return initial_; }

  const std::string& state_name(StateId s) const { return names_.at(s); }
  const std::vector<std::string>& state_names() const noexcept {
    return names_;
  }
  const std::vector<std::string>& components(StateId s) const {
    return components_.at(s);
  }

  std::optional<StateId> find_state(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  StateId state(std::string_view name) const {
    if (auto s = find_state(name)) return *s;
    throw LookupError("unknown state '" + std::string(name) + "'");
  }

  const std::string& event_name(EventId e) const { return alphabet_.name(e); }
  const EventAttrs& attrs(EventId e) const { return alphabet_.attrs(e); }

  bool is_marked(StateId s) const { return marked_.at(s); }
  bool has_marked() const {
    return std::find(marked_.begin(), marked_.end(), true) != marked_.end();
  }

  std::span<const Edge> edges(StateId s) const { return edges_.at(s); }

  std::optional<StateId> next(StateId s, EventId e) const {
    const auto& out = edges_.at(s);
    auto it = std::lower_bound(out.begin(), out.end(), e,
                               [](const Edge& x, EventId v) { return x.event < v; });
    if (it == out.end() || it->event != e) return std::nullopt;
    return it->target;
  }

  std::optional<StateId> next(StateId s, std::string_view event) const {
    auto e = alphabet_.find(event);
    if (!e) return std::nullopt;
    return next(s, *e);
  }

  /// Names of the events defined at `s` (the active event set).
  EventSet active_events(StateId s) const {
    EventSet out;
    for (const auto& edge : edges_.at(s)) out.insert(alphabet_.name(edge.event));
    return out;
  }

  /// State reached from the initial state by `trace`, if defined.
  std::optional<StateId> run(const Trace& trace) const {
    if (empty()) return std::nullopt;
    StateId cur = initial_;
    for (const auto& e : trace) {
      auto nxt = next(cur, e);
      if (!nxt) return std::nullopt;
      cur = *nxt;
    }
    return cur;
  }

  bool accepts_prefix(const Trace& trace) const { return run(trace).has_value(); }

private:
  void check_state(StateId s) const {
    if (s >= names_.size()) throw LookupError("unknown state id");
  }

  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> components_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<bool> marked_;
  std::unordered_map<std::string, StateId> index_;
  StateId initial_ = no_state;
  std::size_t transition_count_ = 0;
};

}  // namespace dessec
