#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace livesynth;
using testing_support::parse;

namespace {

MooreMachine relay_cycle() {
  std::ifstream in(std::filesystem::path(LIVESYNTH_DATA_DIR) / "relay_cycle.machine");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_machine(ss.str(), true);
}

const Formula phi1 = parse("G (m1 -> X F i1)");

bool same_set(std::vector<Formula> a, std::vector<Formula> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::vector<Formula> response_labels() {
  return {Formula::tt(), parse("X F i1"), parse("F i1 && X F i1"), parse("F i1")};
}

}  // namespace

TEST(Monitor, ResponseOffsetModeHasFourLabels) {
  auto mon = build_monitor(phi1, {StepMode::MooreOffset});
  EXPECT_TRUE(same_set(mon.labels(), response_labels()));
  EXPECT_EQ(mon.label(mon.initial()), Formula::tt());
}

TEST(Monitor, ResponseOffsetModeEdges) {
  auto mon = build_monitor(phi1, {StepMode::MooreOffset});
  Letter m1 = Letter::of({"m1"});
  EXPECT_EQ(mon.label(mon.step(mon.initial(), m1)), parse("X F i1"));
  // returning to the empty obligation needs i1 without a new m1
  bool any = false;
  for (auto& from : mon.labels()) {
    if (from.is_true())
      continue;
    for (auto& l : mon.letters_between(from, Formula::tt())) {
      any = true;
      EXPECT_TRUE(l.contains(PropRegistry::intern("i1"))) << from << " " << l.str();
      EXPECT_FALSE(l.contains(PropRegistry::intern("m1"))) << from << " " << l.str();
    }
  }
  EXPECT_TRUE(any);
}

TEST(Monitor, ResponseExactModeLabels) {
  auto mon = build_monitor(phi1);
  EXPECT_TRUE(same_set(mon.labels(), {Formula::tt(), parse("F i1")}));
}

TEST(Monitor, EventuallyAbsorbsIntoTrue) {
  auto mon = build_monitor(parse("F a"));
  EXPECT_EQ(mon.size(), 2u);
  std::size_t t = mon.step(mon.initial(), Letter::of({"a"}));
  EXPECT_TRUE(mon.state(t).formula.is_true());
  EXPECT_EQ(mon.step(t, Letter()), t);
  EXPECT_EQ(mon.step(t, Letter::of({"a"})), t);
  EXPECT_EQ(mon.step(mon.initial(), Letter()), mon.initial());
}

TEST(Monitor, TrueIsSingleState) {
  auto mon = build_monitor(Formula::tt(), {StepMode::MooreOffset});
  EXPECT_EQ(mon.size(), 1u);
  EXPECT_TRUE(mon.label(0).is_true());
}

TEST(Monitor, ReleaseFreeLabelsAreStates) {
  auto mon = build_monitor(parse("a U (b && X c)"));
  for (std::size_t s = 0; s < mon.size(); ++s)
    EXPECT_EQ(mon.label(s), mon.state(s).formula);
}

TEST(Monitor, StepWordIsAfWord) {
  Formula f = parse("G (a -> X F b) && (c U d)");
  auto mon = build_monitor(f);
  testing_support::Gen gen(3);
  auto aps = testing_support::props({"a", "b", "c", "d"});
  for (int k = 0; k < 100; ++k) {
    auto w = gen.word(aps, gen.below(6));
    Formula got = mon.state(mon.step_word(mon.initial(), w)).formula;
    EXPECT_TRUE(detail::propositionally_equivalent(got, af_word(f, w))) << got;
  }
}

TEST(Monitor, NestedReleaseClosureIsFinite) {
  auto mon = build_monitor(parse("(G b) R (F a)"), {StepMode::Exact, 1000});
  EXPECT_LE(mon.size(), 8u);
}

TEST(ReducedDnf, FlattensAndAbsorbs) {
  EXPECT_EQ(reduced_dnf(parse("x || (y && (x || z))")), parse("x || (y && z)"));
  EXPECT_EQ(reduced_dnf(parse("(a || b) && (a || c)")), parse("a || (b && c)"));
  EXPECT_EQ(reduced_dnf(parse("a && (!a || F b)")), parse("a && F b"));
  EXPECT_EQ(reduced_dnf(parse("F a")), parse("F a"));
}

TEST(Monitor, BudgetExceeded) {
  EXPECT_THROW(build_monitor(phi1, {StepMode::Exact, 1}), MonitorBudgetExceeded);
  try {
    build_monitor(make_benchmark(Family::Relay, 2).formula(), {StepMode::Exact, 3});
    FAIL();
  } catch (const MonitorBudgetExceeded& e) {
    EXPECT_GT(e.frontier(), 0u);
  }
}

TEST(CutMonitor, RelayCycleGivesFiveStatesFourLabels) {
  auto cut = cut_monitor(build_monitor(phi1, {StepMode::MooreOffset}), relay_cycle());
  EXPECT_TRUE(cut.is_cut());
  EXPECT_EQ(cut.size(), 5u);
  EXPECT_TRUE(same_set(cut.labels(), response_labels()));
  EXPECT_THROW(cut.step(0, Letter()), Error);
  EXPECT_THROW(cut_monitor(cut, relay_cycle()), Error);
}

TEST(CutMonitor, NeverEmittedOutputKeepsObligation) {
  auto mon = build_monitor(parse("F a"));
  MooreMachine never(ApTable({"x"}, {"a"}));
  never.add_state("s", Letter());
  never.add_edge(0, Cube(), 0);
  EXPECT_TRUE(same_set(cut_monitor(mon, never).labels(), {parse("F a")}));
  MooreMachine once(ApTable({"x"}, {"a"}));
  once.add_state("s", Letter::of({"a"}));
  once.add_edge(0, Cube(), 0);
  EXPECT_TRUE(same_set(cut_monitor(mon, once).labels(), {parse("F a"), Formula::tt()}));
}

TEST(CutMonitor, StatesAreAfOfMachineTraces) {
  testing_support::Gen gen(5);
  ApTable aps({"a"}, {"b", "c"});
  Formula f = parse("G (a -> X F b) && F c");
  auto mon = build_monitor(f);
  for (int k = 0; k < 30; ++k) {
    auto m = gen.machine(aps, 3);
    auto cut = cut_monitor(mon, m);
    std::set<std::size_t> expected, got;
    for (auto& t : fin_traces(m, cut.size() + 2))
      expected.insert(mon.state(mon.step_word(mon.initial(), t)).formula.id());
    for (std::size_t s = 0; s < cut.size(); ++s)
      got.insert(cut.state(s).formula.id());
    EXPECT_EQ(got, expected);
    for (auto& t : fin_traces(m, 3))
      EXPECT_TRUE(detail::propositionally_equivalent(
          mon.state(mon.step_word(mon.initial(), t)).formula, af_word(f, t)));
  }
}

TEST(CutMonitor, LabelsAreSubsetOfUncut) {
  auto mon = build_monitor(make_benchmark(Family::Relay, 2).formula());
  std::ifstream in(std::filesystem::path(LIVESYNTH_DATA_DIR) / "relay_two_station.machine");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cut = cut_monitor(mon, parse_machine(ss.str()));
  auto all = mon.labels();
  for (auto& l : cut.labels())
    EXPECT_NE(std::find(all.begin(), all.end(), l), all.end()) << l;
}

TEST(Obligations, SemanticMergeFoldsEquivalentLabels) {
  auto mon = build_monitor(phi1, {StepMode::MooreOffset});
  EXPECT_EQ(reachable_obligations(mon).size(), 4u);
  EXPECT_LE(reachable_obligations(mon, true).size(), 4u);
}

TEST(Obligations, LabelsAreStripOfEvolve) {
  Formula f = make_benchmark(Family::Relay, 2).formula();
  auto mon = build_monitor(f);
  testing_support::Gen gen(9);
  auto aps = make_benchmark(Family::Relay, 2).aps().all();
  for (int k = 0; k < 100; ++k) {
    auto w = gen.word(aps, gen.below(5));
    Formula label = mon.label(mon.step_word(mon.initial(), w));
    EXPECT_TRUE(detail::propositionally_equivalent(label, evolve(w, f))) << label;
  }
}

TEST(Monitor, Dot) {
  auto dot = to_dot(build_monitor(phi1, {StepMode::MooreOffset}));
  EXPECT_NE(dot.find("digraph monitor"), std::string::npos);
  EXPECT_NE(dot.find("⊤"), std::string::npos);
}
