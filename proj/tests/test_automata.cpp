#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace dessec;
using fixtures::make;

namespace {

std::set<std::string> names(const Automaton& a, const StateSet& s) {
  auto v = state_names(a, s);
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Compose, SelfLoopSynchronizesWithChain) {
  auto a = make({{"a"}}, {"1"}, {{"1", "a", "1"}});
  auto b = make({{"a"}}, {"1", "2"}, {{"1", "a", "2"}});
  auto c = parallel_compose(a, b);
  ASSERT_EQ(c.num_states(), 2u);
  EXPECT_EQ(c.state_name(c.initial()), "(1,1)");
  EXPECT_EQ(c.run({"a"}), c.find_state("(1,2)"));
  EXPECT_FALSE(c.accepts_prefix({"a", "a"}));
}

TEST(Compose, TrafficShuffleHas36States) {
  auto g = fixtures::traffic_plant();
  EXPECT_EQ(g.num_states(), 36u);
  EXPECT_EQ(accessible(g).num_states(), 36u);
  EXPECT_TRUE(g.is_marked(g.state("(5,5)")));
  EXPECT_EQ(g.components(g.state("(2,3)")), (std::vector<std::string>{"2", "3"}));
}

TEST(Compose, Ex1ClosedLoopChain) {
  auto m = fixtures::ex1().build();
  const auto& g = m.model;
  ASSERT_EQ(g.num_states(), 4u);
  auto end = g.run({"a", "b#a", "c"});
  ASSERT_TRUE(end);
  EXPECT_EQ(g.state_name(*end), "(2,4)");
  EXPECT_EQ(g.state_name(*g.run({"a", "b#a"})), "(2,3)");
}

TEST(Compose, AttributeConflictIsRejected) {
  auto a = make({{"a", true, true}}, {"1"}, {});
  auto b = make({{"a", false, true}}, {"1"}, {});
  EXPECT_THROW(parallel_compose(a, b), AttributeConflictError);
}

TEST(Compose, StateLimit) {
  auto g = fixtures::traffic_plant();
  EXPECT_THROW(parallel_compose(g, g, {TupleStyle::parens, Limits{10}}), ResourceLimitError);
}

TEST(Compose, ProjectionsStayInComponents) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    auto a = fixtures::random_plant(rng, {6, 4, 4, 0.4});
    auto b = fixtures::random_plant(rng, {6, 4, 4, 0.4});
    // Make shared events agree: rename b's events apart except e0 and e1.
    Automaton b2;
    for (EventId e = 0; e < b.num_events(); ++e) {
      std::string n = b.event_name(e);
      EventAttrs at = b.attrs(e);
      if (e < 2 && a.alphabet().contains(n)) at = a.attrs(a.alphabet().id(n));
      else n = "f" + n;
      b2.add_event(n, at);
    }
    for (const auto& s : b.state_names()) b2.add_state(s);
    for (StateId s = 0; s < b.num_states(); ++s)
      for (const auto& e : b.edges(s)) b2.add_transition(s, e.event, e.target);
    auto c = parallel_compose(a, b2);
    auto ea = a.alphabet().all(), eb = b2.alphabet().all();
    for (const auto& t : oracle::traces(c, 5)) {
      EXPECT_TRUE(a.accepts_prefix(oracle::restrict_to(t, ea)));
      EXPECT_TRUE(b2.accepts_prefix(oracle::restrict_to(t, eb)));
    }
    // Converse on all words up to length 4.
    std::vector<std::string> all(c.alphabet().names());
    for (const auto& w : oracle::words(all, 4)) {
      bool both = a.accepts_prefix(oracle::restrict_to(w, ea)) && b2.accepts_prefix(oracle::restrict_to(w, eb));
      EXPECT_EQ(c.accepts_prefix(w), both);
    }
  }
}

TEST(Observer, NothingHiddenIsIsomorphic) {
  auto a = make({{"a"}, {"b"}}, {"1", "2", "3", "9"}, {{"1", "a", "2"}, {"2", "b", "3"}, {"3", "a", "1"}});
  auto o = observer(a, {});
  EXPECT_EQ(o.num_states(), 3u);
  EXPECT_EQ(o.num_transitions(), 3u);
  for (const auto& t : oracle::traces(a, 6)) EXPECT_TRUE(o.accepts_prefix(t));
}

TEST(Observer, EpsilonClosure) {
  auto a = make({{"u", false}, {"a"}}, {"1", "2", "3"}, {{"1", "u", "2"}, {"2", "a", "3"}});
  auto o = observer(a, {"u"});
  ASSERT_EQ(o.num_states(), 2u);
  EXPECT_EQ(o.state_name(o.initial()), "{1,2}");
  EXPECT_EQ(o.state_name(*o.run({"a"})), "{3}");
  EXPECT_FALSE(o.alphabet().contains("u"));
}

TEST(Observer, Ex4LabeledContainsUncertainState) {
  auto m = fixtures::ex4().build();
  auto l = label_compose(m);
  auto o = observer(l.automaton, m.model.alphabet().unobservable());
  EXPECT_TRUE(o.find_state("{((3,3),N),((3,5),Y)}"));
}

TEST(Observer, GeneratesProjectedLanguage) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 80; ++i) {
    auto a = fixtures::random_plant(rng);
    auto hidden = a.alphabet().unobservable();
    auto o = observer(a, hidden);
    for (const auto& t : oracle::traces(a, 6)) {
      EXPECT_TRUE(o.accepts_prefix(oracle::restrict_to(t, a.alphabet().observable())));
    }
    for (const auto& w : oracle::traces(o, 5)) EXPECT_TRUE(oracle::has_projection(a, w, hidden));
  }
}

TEST(Observer, Canonical) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    auto a = fixtures::random_plant(rng);
    auto hidden = a.alphabet().unobservable();
    EXPECT_EQ(serialize_model(observer(a, hidden)), serialize_model(observer(a, hidden)));
  }
}

TEST(Reach, EmptyAllowedIsSelf) {
  auto m = fixtures::ex1().build();
  EXPECT_EQ(names(m.model, reach(m.model, "(2,2)", {})), (std::set<std::string>{"(2,2)"}));
}

TEST(Reach, Ex1UncontrollableReach) {
  auto m = fixtures::ex1().build();
  EXPECT_EQ(names(m.model, reach(m.model, "(2,3)", {"c", "b#a"})),
            (std::set<std::string>{"(2,3)", "(2,4)"}));
}

TEST(Reach, UnknownStateThrows) {
  auto m = fixtures::ex1().build();
  EXPECT_THROW(reach(m.model, "(9,9)", {}), LookupError);
}

TEST(Reach, MatchesFixpointAndIsMonotone) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    fixtures::RandomOptions o{50, 5, 1, 0.06};
    auto a = fixtures::random_plant(rng, o);
    std::set<std::string> small, big = a.alphabet().all();
    for (const auto& e : big) if (rng() % 2) small.insert(e);
    for (StateId s = 0; s < a.num_states(); s += 7) {
      auto r_small = names(a, reach(a, s, small));
      auto r_big = names(a, reach(a, s, big));
      EXPECT_EQ(r_big, oracle::reach_fixpoint(a, a.state_name(s), big));
      EXPECT_EQ(r_small, oracle::reach_fixpoint(a, a.state_name(s), small));
      EXPECT_TRUE(std::includes(r_big.begin(), r_big.end(), r_small.begin(), r_small.end()));
    }
  }
}

TEST(Project, Examples) {
  EXPECT_EQ(project({}, {"a"}), Trace{});
  EXPECT_EQ(project({"a", "u", "b"}, {"a", "b"}), (Trace{"a", "b"}));
  EventSet si_obs{"a1", "b1", "a3", "b3", "a4", "b4", "a5", "b5"};
  Trace t{"b1", "b2", "b3", "b4#i", "b4", "a1", "a2", "a3"};
  EXPECT_EQ(project(t, si_obs), (Trace{"b1", "b3", "b4", "a1", "a3"}));
}

TEST(Deadlock, ChainEnd) {
  auto a = make({{"a"}}, {"1", "2"}, {{"1", "a", "2"}});
  EXPECT_EQ(names(a, deadlock_states(a)), (std::set<std::string>{"2"}));
}

TEST(Deadlock, MarkedTerminalIsNotADeadlock) {
  auto a = make({{"a"}}, {"1", "2"}, {{"1", "a", "2"}}, {"2"});
  EXPECT_TRUE(deadlock_states(a).empty());
  EXPECT_TRUE(blocking_states(a).empty());
}

TEST(Deadlock, TrafficSePlantComponents) {
  auto m = fixtures::traffic(AttackMode::se, {"a3", "b3"}).build();
  std::set<std::string> plants;
  for (StateId s : deadlock_states(m.model)) plants.insert(m.plant_of(s));
  EXPECT_EQ(plants, (std::set<std::string>{"(0,3)", "(3,0)", "(5,3)", "(3,5)"}));
}

TEST(Deadlock, BlockingFixture) {
  auto m = fixtures::blocking().build();
  auto dl = names(m.model, deadlock_states(m.model));
  EXPECT_EQ(dl, (std::set<std::string>{"(4,5)"}));
  EXPECT_TRUE(names(m.model, blocking_states(m.model)).count("(4,5)"));
}

TEST(Accessible, DropsDisconnectedAndIsIdempotent) {
  auto a = make({{"a"}}, {"1", "2", "3"}, {{"1", "a", "2"}, {"3", "a", "3"}});
  auto b = accessible(a);
  EXPECT_EQ(b.num_states(), 2u);
  EXPECT_FALSE(b.find_state("3"));
  EXPECT_EQ(serialize_model(accessible(b)), serialize_model(b));
}

TEST(Automaton, Nondeterminism) {
  Automaton a;
  a.add_event("a");
  a.add_state("1");
  a.add_state("2");
  a.add_transition(0, 0, 1);
  a.add_transition(0, 0, 1);
  EXPECT_EQ(a.num_transitions(), 1u);
  EXPECT_THROW(a.add_transition(0, 0, 0), NondeterminismError);
  EXPECT_THROW(a.add_state("1"), InvalidInputError);
}
