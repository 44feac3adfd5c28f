#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dessec/runtime.hpp"

namespace dessec {

enum class Method { diagnoser, verifier, oracle };

inline std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::diagnoser: return "diagnoser";
    case Method::verifier: return "verifier";
    case Method::oracle: return "oracle";
  }
  return "diagnoser";
}

enum class Condition {
  uncertain_unsafe,
  first_certain_unsafe,
  uncontrollable_unsafe,
  verifier_pair_unsafe,
  verifier_post_detection_unsafe,
  oracle_unsafe_run,
};

inline std::string_view condition_name(Condition c) noexcept {
  switch (c) {
    case Condition::uncertain_unsafe: return "uncertain-unsafe";
    case Condition::first_certain_unsafe: return "first-certain-unsafe";
    case Condition::uncontrollable_unsafe: return "uncontrollable-unsafe";
    case Condition::verifier_pair_unsafe: return "verifier-pair-unsafe";
    case Condition::verifier_post_detection_unsafe: return "verifier-post-detection-unsafe";
    case Condition::oracle_unsafe_run: return "oracle-unsafe-run";
  }
  return "";
}

struct Verdict {
  bool safe = true;
  Method method = Method::diagnoser;
  std::optional<Condition> condition;
  /// Shortest string of L_M reaching an unsafe state after an attack.
  std::optional<Trace> counterexample;
  /// X^uc (diagnoser method only), as G_M state names.
  std::optional<std::vector<std::string>> x_uc;
  /// States that triggered the condition (diagnoser, verifier or G_M names).
  std::vector<std::string> witness_states;
};

namespace detail {

inline bool unsafe_y(const AttackedModel& m, const LabeledAutomaton& l, StateId s) {
  return l.label[s] == Label::Y && m.is_unsafe(l.base[s]);
}

/// Shortest attack run that the defense does not stop; falls back to the
/// shortest attacked run into an unsafe state when the defense stops all.
inline std::optional<Trace> counterexample(const AttackedModel& m, const LabeledAutomaton& l,
                                           const Limits& limits) {
  auto p = explore_defense(l, {true, true, limits});
  for (std::uint32_t n = 0; n < p.nodes.size(); ++n) {
    if (unsafe_y(m, l, p.nodes[n].state)) return p.trace_to(l, n);
  }
  return shortest_trace_to(l.automaton, [&](StateId s) { return unsafe_y(m, l, s); });
}

inline Verdict unsafe_verdict(Method method, Condition c, const AttackedModel& m,
                              const LabeledAutomaton& l, const Limits& limits) {
  Verdict v;
  v.safe = false;
  v.method = method;
  v.condition = c;
  v.counterexample = counterexample(m, l, limits);
  return v;
}

}  // namespace detail

struct DiagnoserTestOptions {
  /// Literal reading: conditions 2 and 3 start from every state of a
  /// first-entered certain diagnoser state, not only from the states entered
  /// by the detecting event. Can report unsafe although the defense works.
  bool close_over_unobservable = false;
  Limits limits{};
};

/// Entry states of a first-entered certain state: labeled states reached
/// directly by the detecting event from a non-certain predecessor.
inline std::vector<StateId> entry_states(const LabeledAutomaton& l, const Diagnoser& d, StateId q) {
  std::set<StateId> out;
  for (StateId p = 0; p < d.automaton.num_states(); ++p) {
    if (d.certainty[p] == Certainty::certain) continue;
    for (const auto& edge : d.automaton.edges(p)) {
      if (edge.target != q) continue;
      auto e = l.automaton.alphabet().id(d.automaton.event_name(edge.event));
      for (StateId s : d.members[p]) {
        if (auto t = l.automaton.next(s, e)) out.insert(*t);
      }
    }
  }
  return {out.begin(), out.end()};
}

/// GF-safe controllability through the diagnoser (conditions checked in order).
inline Verdict check_gf_safe_diagnoser(const AttackedModel& m, const DiagnoserTestOptions& opt = {}) {
  LabeledAutomaton l = label_compose(m, opt.limits);
  Diagnoser d = build_diagnoser(l, opt.limits);
  const Automaton& gm = m.model;

  for (StateId q = 0; q < d.automaton.num_states(); ++q) {
    if (d.certainty[q] != Certainty::uncertain) continue;
    for (StateId s : d.members[q]) {
      if (detail::unsafe_y(m, l, s)) {
        auto v = detail::unsafe_verdict(Method::diagnoser, Condition::uncertain_unsafe, m, l, opt.limits);
        v.witness_states = {d.automaton.state_name(q)};
        return v;
      }
    }
  }

  auto fc = first_entered_certain(d);
  std::vector<bool> uc_hidden(gm.num_events()), uc(gm.num_events());
  for (EventId e = 0; e < gm.num_events(); ++e) {
    uc[e] = !gm.attrs(e).controllable;
    uc_hidden[e] = uc[e] && !gm.attrs(e).observable;
  }

  StateSet x_uc;
  std::optional<StateId> cond2;
  for (StateId q : fc) {
    std::vector<StateId> entries =
        opt.close_over_unobservable ? d.members[q] : entry_states(l, d, q);
    StateSet seeds;
    for (StateId s : entries) seeds.insert(l.base[s]);
    if (!cond2) {
      StateSet near = opt.close_over_unobservable ? seeds : reach_mask(gm, seeds, uc_hidden);
      for (StateId x : near) {
        if (m.is_unsafe(x)) {
          cond2 = q;
          break;
        }
      }
    }
    auto r = reach_mask(gm, seeds, uc);
    x_uc.insert(r.begin(), r.end());
  }
  auto x_uc_names = state_names(gm, x_uc);

  if (cond2) {
    auto v = detail::unsafe_verdict(Method::diagnoser, Condition::first_certain_unsafe, m, l, opt.limits);
    v.witness_states = {d.automaton.state_name(*cond2)};
    v.x_uc = x_uc_names;
    return v;
  }
  StateSet bad;
  for (StateId x : x_uc) {
    if (m.is_unsafe(x)) bad.insert(x);
  }
  if (!bad.empty()) {
    auto v = detail::unsafe_verdict(Method::diagnoser, Condition::uncontrollable_unsafe, m, l, opt.limits);
    v.witness_states = state_names(gm, bad);
    v.x_uc = x_uc_names;
    return v;
  }
  Verdict v;
  v.method = Method::diagnoser;
  v.x_uc = x_uc_names;
  return v;
}

/// Safe controllability through the verifier and its completion.
inline Verdict check_ae_safe_verifier(const AttackedModel& m, const Limits& limits = {}) {
  VerifierArtifacts va = build_verifier(m, limits);
  const auto& l = va.labeled;

  std::vector<std::string> pairs;
  for (StateId s = 0; s < va.g_v.num_states(); ++s) {
    StateId f = va.g_f_origin[va.g_v_origin[s].second];
    if (detail::unsafe_y(m, l, f)) pairs.push_back(va.g_v.state_name(s));
  }
  if (!pairs.empty()) {
    auto v = detail::unsafe_verdict(Method::verifier, Condition::verifier_pair_unsafe, m, l, limits);
    v.witness_states = std::move(pairs);
    return v;
  }

  std::vector<std::string> post;
  for (StateId s = 0; s < va.g_t.num_states(); ++s) {
    auto [vcd, f] = va.g_t_origin[s];
    if (vcd == va.sink && detail::unsafe_y(m, l, va.g_f_origin[f])) {
      post.push_back(va.g_t.state_name(s));
    }
  }
  if (!post.empty()) {
    std::sort(post.begin(), post.end());
    auto v = detail::unsafe_verdict(Method::verifier, Condition::verifier_post_detection_unsafe, m, l, limits);
    v.witness_states = std::move(post);
    return v;
  }
  Verdict v;
  v.method = Method::verifier;
  return v;
}

/// Brute force: explore the closed loop under the defense and look for an
/// attacked run into an unsafe state.
inline Verdict oracle_defense_simulation(const AttackedModel& m, const Limits& limits = {}) {
  LabeledAutomaton l = label_compose(m, limits);
  auto p = explore_defense(l, {true, true, limits});
  Verdict v;
  v.method = Method::oracle;
  for (std::uint32_t n = 0; n < p.nodes.size(); ++n) {
    StateId s = p.nodes[n].state;
    if (detail::unsafe_y(m, l, s)) {
      v.safe = false;
      v.condition = Condition::oracle_unsafe_run;
      v.counterexample = p.trace_to(l, n);
      v.witness_states = {m.model.state_name(l.base[s])};
      return v;
    }
  }
  return v;
}

struct MonotonicityReport {
  bool skipped = false;
  std::string reason;
  std::size_t trials = 0;
  std::vector<std::set<AttackSite>> violations;

  bool ok() const { return violations.empty(); }
};

/// Samples sub-attackers of a safe all-out AE model and checks each is safe.
inline MonotonicityReport check_sub_attacker_monotonicity(const AttackedModel& m, std::size_t trials,
                                                          std::uint64_t seed) {
  MonotonicityReport r;
  if (m.mode != AttackMode::ae) {
    r.skipped = true;
    r.reason = "not an AE model";
    return r;
  }
  if (!check_gf_safe_diagnoser(m).safe) {
    r.skipped = true;
    r.reason = "all-out model is not safe";
    return r;
  }
  std::mt19937_64 rng(seed);
  auto sites = attack_sites(m);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < trials; ++i) {
    std::set<AttackSite> keep;
    for (const auto& s : sites) {
      if (coin(rng)) keep.insert(s);
    }
    ++r.trials;
    if (!check_gf_safe_diagnoser(sub_attacker(m, keep)).safe) r.violations.push_back(keep);
  }
  return r;
}

/// Attack-free string of L_M with the same projection as `t`, if any.
inline std::optional<Trace> normal_twin(const AttackedModel& m, const Trace& t) {
  const Automaton& a = m.model;
  std::vector<bool> hidden(a.num_events()), normal(a.num_events());
  for (EventId e = 0; e < a.num_events(); ++e) {
    hidden[e] = !a.attrs(e).observable;
    normal[e] = !m.is_attack(e);
  }
  Trace obs;
  for (const auto& e : t) {
    auto id = a.alphabet().find(e);
    if (!id) return std::nullopt;
    if (!hidden[*id]) obs.push_back(e);
  }
  // BFS over (state, observed prefix length).
  using Node = std::pair<StateId, std::size_t>;
  std::map<Node, std::pair<Node, EventId>> parent;
  std::deque<Node> queue;
  Node start{a.initial(), 0};
  parent.emplace(start, std::pair{start, EventId{0}});
  queue.push_back(start);
  while (!queue.empty()) {
    Node cur = queue.front();
    queue.pop_front();
    if (cur.second == obs.size()) {
      Trace out;
      for (Node n = cur; n != start; n = parent.at(n).first) {
        out.push_back(a.event_name(parent.at(n).second));
      }
      std::reverse(out.begin(), out.end());
      return out;
    }
    for (const auto& edge : a.edges(cur.first)) {
      if (!normal[edge.event]) continue;
      Node next = cur;
      next.first = edge.target;
      if (!hidden[edge.event]) {
        if (a.event_name(edge.event) != obs[cur.second]) continue;
        ++next.second;
      }
      if (parent.emplace(next, std::pair{cur, edge.event}).second) queue.push_back(next);
    }
  }
  return std::nullopt;
}

/// Verdicts of all three methods.
struct Agreement {
  Verdict diagnoser;
  Verdict verifier;
  Verdict oracle;

  bool agree() const { return diagnoser.safe == verifier.safe && verifier.safe == oracle.safe; }
};

inline Agreement check_all(const AttackedModel& m, const Limits& limits = {}) {
  return {check_gf_safe_diagnoser(m, {false, limits}), check_ae_safe_verifier(m, limits),
          oracle_defense_simulation(m, limits)};
}

}  // namespace dessec
