#pragma once

#include <string>
#include <vector>

#include "dessec/dessec.hpp"

namespace fixtures {

using dessec::Automaton;
using dessec::EventAttrs;

struct Ev {
  std::string name;
  bool observable = true;
  bool controllable = true;
};

struct Tr {
  std::string from, event, to;
};

inline Automaton make(const std::vector<Ev>& events, const std::vector<std::string>& states,
                      const std::vector<Tr>& transitions, const std::vector<std::string>& marked = {}) {
  Automaton a;
  for (const auto& e : events) a.add_event(e.name, EventAttrs{e.observable, e.controllable});
  for (const auto& s : states) a.add_state(s);
  for (const auto& t : transitions) a.add_transition(t.from, t.event, t.to);
  for (const auto& m : marked) a.set_marked(a.state(m));
  return a;
}

struct Instance {
  Automaton g;
  Automaton h;
  dessec::EventSet vulnerable;
  std::set<std::string> unsafe;
  dessec::AttackMode mode;

  dessec::AttackedModel build() const {
    return dessec::build_model(mode, g, h, vulnerable, unsafe);
  }
};

// G: 1-a->2-b->3-c->4, H disables b. Only b is controllable.
inline Instance ex1() {
  std::vector<Ev> ev{{"a", true, false}, {"b", true, true}, {"c", true, false}};
  return {make(ev, {"1", "2", "3", "4"}, {{"1", "a", "2"}, {"2", "b", "3"}, {"3", "c", "4"}}),
          make(ev, {"1", "2"}, {{"1", "a", "2"}}),
          {"b"},
          {"4"},
          dessec::AttackMode::ae};
}

inline Instance ex4() {
  std::vector<Ev> ev{{"a", true, true}, {"b", true, false}, {"c", true, true}};
  return {make(ev, {"1", "2", "3", "4", "5"},
               {{"1", "a", "2"}, {"2", "c", "3"}, {"2", "b", "4"}, {"4", "c", "5"}}),
          make(ev, {"1", "2", "3", "4"}, {{"1", "a", "2"}, {"2", "b", "4"}, {"2", "c", "3"}}),
          {"b"},
          {"5"},
          dessec::AttackMode::se};
}

inline Instance ex6() {
  std::vector<Ev> ev{{"a"}, {"b"}, {"c"}};
  return {make(ev, {"1", "2", "3", "4", "5"},
               {{"1", "a", "2"}, {"2", "b", "3"}, {"3", "c", "4"}, {"2", "c", "5"}}),
          make(ev, {"1", "2", "3", "4"}, {{"1", "a", "2"}, {"2", "b", "3"}, {"3", "c", "4"}}),
          {"b"},
          {"5"},
          dessec::AttackMode::si};
}

// Erasing b leaves the supervisor waiting in 4 while the plant sits in 5.
inline Instance blocking() {
  std::vector<Ev> ev{{"a"}, {"b"}, {"c"}, {"d"}};
  return {make(ev, {"1", "4", "5", "6", "7"},
               {{"1", "a", "4"}, {"4", "b", "5"}, {"4", "d", "7"}, {"5", "c", "6"}}, {"6"}),
          make(ev, {"1", "4", "5", "6"}, {{"1", "a", "4"}, {"4", "b", "5"}, {"5", "c", "6"}}, {"6"}),
          {"b"},
          {"7"},
          dessec::AttackMode::se};
}

// The attack b#a is observed; the follow-up cu is unobservable but
// controllable, so safe mode stops the run before u.
inline Instance observed_attack() {
  std::vector<Ev> ev{{"b", true, true}, {"cu", false, true}, {"u", false, false}};
  return {make(ev, {"0", "1", "2", "3"}, {{"0", "b", "1"}, {"1", "cu", "2"}, {"2", "u", "3"}}),
          make(ev, {"0"}, {{"0", "cu", "0"}}),
          {"b"},
          {"3"},
          dessec::AttackMode::ae};
}

inline std::string pos(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

inline std::vector<Ev> traffic_events() {
  std::vector<Ev> ev;
  for (int i = 1; i <= 5; ++i) {
    for (char v : {'a', 'b'}) {
      bool c = i == 1 || i == 2 || i == 4;
      bool o = i != 2;
      ev.push_back({std::string(1, v) + std::to_string(i), o, c});
    }
  }
  return ev;
}

/// Two vehicles on a five-section road, built as the product of two chains.
inline Automaton traffic_plant() {
  std::vector<std::string> chain{"0", "1", "2", "3", "4", "5"};
  std::vector<Ev> all = traffic_events();
  std::vector<Ev> ea, eb;
  for (const auto& e : all) (e.name[0] == 'a' ? ea : eb).push_back(e);
  std::vector<Tr> ta, tb;
  for (int i = 1; i <= 5; ++i) {
    ta.push_back({chain[i - 1], "a" + std::to_string(i), chain[i]});
    tb.push_back({chain[i - 1], "b" + std::to_string(i), chain[i]});
  }
  Automaton gva = make(ea, chain, ta, {"5"});
  Automaton gvb = make(eb, chain, tb, {"5"});
  return dessec::parallel_compose(gva, gvb);
}

inline std::set<std::string> traffic_unsafe() {
  return {pos(1, 1), pos(2, 2), pos(3, 3), pos(4, 4)};
}

/// Plant minus the collision states and (1,2), (2,1).
inline Automaton traffic_spec() {
  Automaton g = traffic_plant();
  std::set<std::string> drop = traffic_unsafe();
  drop.insert(pos(1, 2));
  drop.insert(pos(2, 1));
  std::vector<bool> keep(g.num_states());
  for (dessec::StateId s = 0; s < g.num_states(); ++s) keep[s] = !drop.count(g.state_name(s));
  return dessec::sub_automaton(g, keep).automaton;
}

inline Automaton traffic_supervisor() {
  Automaton g = traffic_plant();
  auto k = dessec::supremal_controllable(g, traffic_spec(), g.alphabet().uncontrollable());
  return dessec::realize_supervisor(g, k, g.alphabet().observable());
}

inline Instance traffic(dessec::AttackMode mode, dessec::EventSet vulnerable) {
  return {traffic_plant(), traffic_supervisor(), std::move(vulnerable), traffic_unsafe(), mode};
}

// Two unobservable branches into one state; the spec cuts s on one branch only.
inline Automaton unobservable_plant() {
  std::vector<Ev> ev{{"u1", false, false}, {"u2", false, false}, {"s", true, true}};
  return make(ev, {"0", "1", "2", "3"}, {{"0", "u1", "1"}, {"0", "u2", "2"}, {"1", "s", "3"}, {"2", "s", "3"}});
}

inline Automaton unobservable_spec() {
  std::vector<Ev> ev{{"u1", false, false}, {"u2", false, false}, {"s", true, true}};
  return make(ev, {"0", "1", "2", "3"}, {{"0", "u1", "1"}, {"0", "u2", "2"}, {"1", "s", "3"}});
}

}  // namespace fixtures
