#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dessec/diagnosis.hpp"
#include "json.hpp"

namespace dessec {

struct AttackerPolicy {
  enum class Kind { all_out, scripted, random };

  Kind kind = Kind::all_out;
  /// Decision per attack opportunity, consumed in order (scripted).
  std::vector<bool> script;
  /// Probability of attacking at an opportunity (random).
  double probability = 1.0;

  static AttackerPolicy all_out() { return {}; }
  static AttackerPolicy scripted(std::vector<bool> decisions) {
    return {Kind::scripted, std::move(decisions), 0.0};
  }
  static AttackerPolicy random(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInputError("attack probability must be in [0,1]");
    return {Kind::random, {}, p};
  }

  /// False only for a policy that never attacks.
  bool may_attack() const {
    switch (kind) {
      case Kind::all_out: return true;
      case Kind::random: return probability > 0.0;
      case Kind::scripted:
        return std::find(script.begin(), script.end(), true) != script.end();
    }
    return true;
  }
};

struct ExecutionState {
  StateId state = no_state;  // labeled state
  OnlineDiagnoser::Estimate estimate;
  bool safe_mode = false;
  Trace trace;
  Trace observed;
  std::size_t opportunities = 0;
  std::optional<std::size_t> first_attack;  // index into trace
  std::optional<std::size_t> detected;      // index into trace
};

/// Closed-loop execution of plant, supervisor, attacker and intrusion
/// detection with safe-mode switching.
class Simulator {
public:
  Simulator(const AttackedModel& m, AttackerPolicy policy, std::uint64_t seed = 0)
      : model_(&m),
        labeled_(std::make_shared<LabeledAutomaton>(label_compose(m))),
        diagnoser_(*labeled_),
        policy_(std::move(policy)),
        rng_(seed) {}

  const LabeledAutomaton& labeled() const { return *labeled_; }

  ExecutionState initial() const {
    ExecutionState s;
    if (labeled_->automaton.empty()) throw InvalidInputError("model has no states");
    s.state = labeled_->automaton.initial();
    s.estimate = diagnoser_.initial();
    s.safe_mode = diagnoser_.classify(s.estimate) == Certainty::certain;
    return s;
  }

  /// Events that may occur next, after safe-mode filtering.
  std::vector<EventId> enabled(const ExecutionState& s) const {
    std::vector<EventId> out;
    const auto& a = labeled_->automaton;
    for (const auto& edge : a.edges(s.state)) {
      if (s.safe_mode && a.attrs(edge.event).controllable) continue;
      if (!policy_.may_attack() && is_attack(edge.event)) continue;
      out.push_back(edge.event);
    }
    return out;
  }

  std::vector<std::string> enabled_names(const ExecutionState& s) const {
    std::vector<std::string> out;
    for (EventId e : enabled(s)) out.push_back(labeled_->automaton.event_name(e));
    return out;
  }

  /// Advances by `choice`, or by a policy-driven pick when it is empty.
  /// Returns nullopt when no event can occur.
  std::optional<ExecutionState> step(const ExecutionState& s,
                                     const std::optional<std::string>& choice = std::nullopt) {
    auto en = enabled(s);
    const auto& a = labeled_->automaton;
    ExecutionState next = s;
    EventId e;
    if (choice) {
      auto id = a.alphabet().find(*choice);
      if (!id || std::find(en.begin(), en.end(), *id) == en.end()) {
        throw IllegalEventError(*choice, enabled_names(s));
      }
      e = *id;
      if (is_attack(e)) ++next.opportunities;
    } else {
      std::vector<EventId> attacks, others;
      for (EventId x : en) (is_attack(x) ? attacks : others).push_back(x);
      bool attack = false;
      if (!attacks.empty()) attack = decide(next);
      if (attack) {
        e = pick(attacks);
      } else if (!others.empty()) {
        e = pick(others);
      } else {
        return std::nullopt;
      }
    }
    apply(next, e);
    return next;
  }

  /// Line-delimited log record for a state reached by the last event.
  std::string log_line(std::size_t index, const ExecutionState& s) const {
    nlohmann::ordered_json j;
    j["step"] = index;
    j["event"] = s.trace.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(s.trace.back());
    j["plant"] = plant(s);
    j["supervisor"] = supervisor(s);
    j["diagnoser"] = diagnoser_state(s);
    j["safe_mode"] = s.safe_mode;
    return j.dump();
  }

  std::string plant(const ExecutionState& s) const {
    return model_->plant_of(labeled_->base[s.state]);
  }
  std::string supervisor(const ExecutionState& s) const {
    return model_->supervisor_of(labeled_->base[s.state]);
  }
  std::string diagnoser_state(const ExecutionState& s) const { return diagnoser_.name(s.estimate); }
  bool unsafe(const ExecutionState& s) const {
    return model_->is_unsafe(labeled_->base[s.state]);
  }

private:
  bool is_attack(EventId e) const {
    return labeled_->label_events.count(labeled_->automaton.event_name(e)) > 0;
  }

  bool decide(ExecutionState& s) {
    std::size_t i = s.opportunities++;
    switch (policy_.kind) {
      case AttackerPolicy::Kind::all_out: return true;
      case AttackerPolicy::Kind::scripted: return i < policy_.script.size() && policy_.script[i];
      case AttackerPolicy::Kind::random:
        return std::bernoulli_distribution(policy_.probability)(rng_);
    }
    return false;
  }

  EventId pick(const std::vector<EventId>& from) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    return from[d(rng_)];
  }

  void apply(ExecutionState& s, EventId e) {
    const auto& a = labeled_->automaton;
    s.state = *a.next(s.state, e);
    s.trace.push_back(a.event_name(e));
    if (is_attack(e) && !s.first_attack) s.first_attack = s.trace.size() - 1;
    if (!diagnoser_.hidden(e)) {
      s.observed.push_back(a.event_name(e));
      s.estimate = diagnoser_.step(s.estimate, e);
    }
    if (!s.safe_mode && diagnoser_.classify(s.estimate) == Certainty::certain) {
      s.safe_mode = true;
      s.detected = s.trace.size() - 1;
    }
  }

  const AttackedModel* model_;
  std::shared_ptr<LabeledAutomaton> labeled_;
  OnlineDiagnoser diagnoser_;
  AttackerPolicy policy_;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Exhaustive exploration under the defense
// ---------------------------------------------------------------------------

/// Product of the labeled model with the online diagnoser estimate. Once the
/// estimate is certain only uncontrollable events remain (when pruning).
struct DefenseProduct {
  struct Node {
    StateId state;
    std::uint32_t estimate;
  };

  std::vector<Node> nodes;
  std::vector<OnlineDiagnoser::Estimate> estimates;
  std::vector<Certainty> certainty;  // per estimate
  std::vector<std::vector<Edge>> edges;
  std::vector<std::pair<std::uint32_t, EventId>> parent;

  bool detected(std::uint32_t n) const { return certainty[nodes[n].estimate] == Certainty::certain; }

  Trace trace_to(const LabeledAutomaton& l, std::uint32_t n) const {
    Trace out;
    for (; n != 0; n = parent[n].first) out.push_back(l.automaton.event_name(parent[n].second));
    std::reverse(out.begin(), out.end());
    return out;
  }
};

struct ExploreOptions {
  bool prune = true;
  bool attacks = true;
  Limits limits{};
};

inline DefenseProduct explore_defense(const LabeledAutomaton& l, const ExploreOptions& opt = {}) {
  DefenseProduct p;
  if (l.automaton.empty()) return p;
  OnlineDiagnoser diag(l);
  std::map<OnlineDiagnoser::Estimate, std::uint32_t> est_index;
  std::map<std::pair<StateId, std::uint32_t>, std::uint32_t> index;
  auto intern = [&](OnlineDiagnoser::Estimate q) {
    auto [it, fresh] = est_index.try_emplace(q, static_cast<std::uint32_t>(p.estimates.size()));
    if (fresh) {
      p.certainty.push_back(diag.classify(q));
      p.estimates.push_back(std::move(q));
    }
    return it->second;
  };
  auto visit = [&](StateId s, std::uint32_t q, std::uint32_t from, EventId e) {
    auto [it, fresh] = index.try_emplace({s, q}, static_cast<std::uint32_t>(p.nodes.size()));
    if (fresh) {
      if (p.nodes.size() >= opt.limits.max_states) {
        throw ResourceLimitError("defense exploration", opt.limits.max_states);
      }
      p.nodes.push_back({s, q});
      p.edges.emplace_back();
      p.parent.emplace_back(from, e);
    }
    return it->second;
  };
  visit(l.automaton.initial(), intern(diag.initial()), 0, 0);
  for (std::uint32_t n = 0; n < p.nodes.size(); ++n) {
    auto [s, q] = p.nodes[n];
    bool certain = p.certainty[q] == Certainty::certain;
    for (const auto& edge : l.automaton.edges(s)) {
      const auto& attrs = l.automaton.attrs(edge.event);
      if (opt.prune && certain && attrs.controllable) continue;
      if (!opt.attacks && l.label_events.count(l.automaton.event_name(edge.event))) continue;
      std::uint32_t q2 = q;
      if (!diag.hidden(edge.event)) q2 = intern(diag.step(p.estimates[q], edge.event));
      std::uint32_t t = visit(edge.target, q2, n, edge.event);
      p.edges[n].push_back({edge.event, t});
    }
  }
  return p;
}

/// Plant components of unmarked states of the defended closed loop where
/// no event can occur, sorted by name.
inline std::vector<std::string> reachable_deadlocks(const AttackedModel& m, const Limits& limits = {}) {
  LabeledAutomaton l = label_compose(m, limits);
  auto p = explore_defense(l, {true, true, limits});
  std::set<std::string> out;
  for (std::uint32_t n = 0; n < p.nodes.size(); ++n) {
    StateId s = p.nodes[n].state;
    if (!p.edges[n].empty() || l.automaton.is_marked(s)) continue;
    if (l.label[s] == Label::Y && m.is_unsafe(l.base[s])) continue;
    out.insert(m.plant_of(l.base[s]));
  }
  return {out.begin(), out.end()};
}

struct RunReport {
  std::size_t runs = 0;
  std::size_t attack_runs = 0;
  std::size_t product_states = 0;
  std::vector<Trace> unsafe_runs;
  std::vector<Trace> deadlock_runs;
  /// Events from the first attack to certain detection, per detected run.
  std::vector<std::size_t> detection_latencies;

  bool reaches_unsafe() const { return !unsafe_runs.empty(); }
};

/// Enumerates every run of the defended closed loop. A run ends when it
/// reaches an unsafe state, has no enabled event, or closes a cycle.
/// Random and scripted policies are explored as "may attack anywhere"
/// unless they can never attack.
inline RunReport run_exhaustive(const AttackedModel& m, const AttackerPolicy& policy = {},
                                const Limits& limits = {}, std::size_t max_runs = 1'000'000) {
  RunReport r;
  LabeledAutomaton l = label_compose(m, limits);
  auto p = explore_defense(l, {true, policy.may_attack(), limits});
  r.product_states = p.nodes.size();
  if (p.nodes.empty()) return r;

  auto unsafe_node = [&](std::uint32_t n) {
    StateId s = p.nodes[n].state;
    return l.label[s] == Label::Y && m.is_unsafe(l.base[s]);
  };

  struct Frame {
    std::uint32_t node;
    std::size_t next_edge;
  };
  std::vector<Frame> stack{{0, 0}};
  std::vector<bool> on_path(p.nodes.size(), false);
  on_path[0] = true;
  Trace trace;

  auto finish = [&](bool unsafe, bool deadlock) {
    if (++r.runs > max_runs) throw ResourceLimitError("run enumeration", max_runs);
    std::optional<std::size_t> first_attack, detected;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (!first_attack && l.label_events.count(trace[i])) first_attack = i;
    }
    for (std::size_t i = 1; i < stack.size(); ++i) {
      if (p.detected(stack[i].node)) {
        detected = i - 1;
        break;
      }
    }
    if (first_attack) ++r.attack_runs;
    if (first_attack && detected) r.detection_latencies.push_back(*detected - *first_attack);
    if (unsafe) r.unsafe_runs.push_back(trace);
    if (deadlock) r.deadlock_runs.push_back(trace);
  };

  while (!stack.empty()) {
    Frame& f = stack.back();
    std::uint32_t n = f.node;
    const auto& out = p.edges[n];
    if (f.next_edge == 0 && (unsafe_node(n) || out.empty())) {
      bool unsafe = unsafe_node(n);
      bool deadlock = !unsafe && out.empty() &&
                      !l.automaton.is_marked(p.nodes[n].state);
      finish(unsafe, deadlock);
      on_path[n] = false;
      stack.pop_back();
      if (!trace.empty()) trace.pop_back();
      continue;
    }
    if (f.next_edge == out.size()) {
      on_path[n] = false;
      stack.pop_back();
      if (!trace.empty()) trace.pop_back();
      continue;
    }
    const Edge e = out[f.next_edge++];
    trace.push_back(l.automaton.event_name(e.event));
    if (on_path[e.target]) {
      finish(false, false);
      trace.pop_back();
      continue;
    }
    on_path[e.target] = true;
    stack.push_back({e.target, 0});
  }
  return r;
}

}  // namespace dessec
