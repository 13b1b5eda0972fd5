#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace livesynth;
using testing_support::trace;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::filesystem::path(LIVESYNTH_DATA_DIR) / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MooreMachine relay_machine() { return parse_machine(slurp("relay_two_station.machine")); }

MooreMachine constant_grant() {
  MooreMachine m(ApTable({"r"}, {"g"}));
  m.add_state("s", Letter::of({"g"}));
  m.add_edge(0, Cube(), 0);
  return m;
}

}  // namespace

TEST(Run, OutputUnionInput) {
  EXPECT_EQ(run(constant_grant(), trace({{"r"}, {}})), trace({{"g", "r"}, {"g"}}));
}

TEST(Run, RelayStaysOnBothMessages) {
  auto m = relay_machine();
  EXPECT_EQ(run(m, trace({{"m0", "m1"}})), trace({{"i0", "i1", "r", "m0", "m1"}}));
  EXPECT_EQ(m.step(m.initial(), Letter::of({"m0", "m1"})), m.initial());
}

TEST(Run, RelayMovesToStationOneStateWithoutM0) {
  auto m = relay_machine();
  StateId s = m.step(m.initial(), Letter::of({"m1"}));
  EXPECT_EQ(m.state(s).output, Letter::of({"i1"}));
}

TEST(Run, RejectsNonInputLetters) {
  EXPECT_THROW(run(constant_grant(), trace({{"g"}})), Error);
}

TEST(FinTraces, DepthZeroIsEmptyTraceOnly) {
  auto t = fin_traces(relay_machine(), 0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.begin()->empty());
}

TEST(FinTraces, OneStateDepthOne) {
  std::set<FiniteTrace> expected{{}, trace({{"g", "r"}}), trace({{"g"}})};
  EXPECT_EQ(fin_traces(constant_grant(), 1), expected);
}

TEST(FinTraces, PrefixClosedAndMatchesRun) {
  auto m = relay_machine();
  auto ts = fin_traces(m, 3);
  EXPECT_EQ(ts.size(), 1u + 4 + 16 + 64);
  for (auto& t : ts) {
    if (!t.empty()) {
      EXPECT_TRUE(ts.count(FiniteTrace(t.begin(), t.end() - 1)));
    }
    FiniteTrace ins;
    for (auto& l : t)
      ins.push_back(l.restrict_to(m.aps().inputs()));
    EXPECT_EQ(run(m, ins), t);
  }
}

TEST(FinTraces, PartialMachineStops) {
  auto m = parse_machine(slurp("relay_cycle.machine"), true);
  EXPECT_FALSE(m.is_total());
  for (auto& t : fin_traces(m, 4))
    for (auto& l : t)
      EXPECT_FALSE(l.contains(PropRegistry::intern("m0")));
}

TEST(RunLasso, AgreesWithFiniteRuns) {
  auto m = relay_machine();
  for (auto& in : input_lassos(m.input_letters(), 3)) {
    auto out = run_lasso(m, in);
    EXPECT_EQ(out.take(12), run(m, in.take(12)));
  }
}

TEST(AllLassos, CountsInputLassos) {
  // alphabets of size 2, period <= 2: 2 + (2*2 + 4) = 10
  EXPECT_EQ(all_lassos(constant_grant(), 2).size(), 10u);
}

TEST(MachineText, RelayRoundTrip) {
  auto m = relay_machine();
  EXPECT_EQ(m.size(), 6u);
  EXPECT_TRUE(m.is_total());
  EXPECT_EQ(parse_machine(serialize_machine(m)), m);
}

TEST(MachineText, EmptyOutputState) {
  auto m = parse_machine("inputs: r\noutputs: g\nstate q initial { }\nq --true--> q\n");
  EXPECT_TRUE(m.state(0).output.empty());
  EXPECT_EQ(parse_machine(serialize_machine(m)), m);
}

TEST(MachineText, RandomRoundTrip) {
  testing_support::Gen gen(11);
  ApTable aps({"a", "b"}, {"x", "y"});
  for (int k = 0; k < 50; ++k) {
    auto m = gen.machine(aps, 5);
    EXPECT_EQ(parse_machine(serialize_machine(m)), m);
  }
}

TEST(MachineText, Errors) {
  const std::string head = "inputs: r\noutputs: g\n";
  EXPECT_THROW(parse_machine(head + "state q initial { }\n"), Error);  // not total
  EXPECT_NO_THROW(parse_machine(head + "state q initial { }\n", true));
  EXPECT_THROW(parse_machine(head + "state q initial { h }\nq --true--> q\n"), Error);
  EXPECT_THROW(parse_machine(head + "state q initial { }\nq --g--> q\n"), Error);
  EXPECT_THROW(parse_machine(head + "state q initial { }\nq --true--> z\n"), Error);
  EXPECT_THROW(parse_machine(head + "state q initial { }\nq --true--> q\nq --r--> q\n"), Error);
  EXPECT_THROW(parse_machine(head + "state q { }\nq --true--> q\n"), Error);
  EXPECT_THROW(parse_machine(head + "state q initial { }\nstate q { }\n"), Error);
  EXPECT_THROW(parse_machine(head + "bogus line\n"), Error);
}

TEST(MachineText, Dot) {
  auto dot = to_dot(relay_machine());
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("i0, i1, r"), std::string::npos);
}

TEST(Cube, MintermAndMerge) {
  auto ps = testing_support::props({"a", "b"});
  Cube c = Cube::minterm(Letter::of({"a"}), ps);
  EXPECT_TRUE(c.matches(Letter::of({"a"})));
  EXPECT_FALSE(c.matches(Letter::of({"a", "b"})));
  auto merged = merge_cubes(c, Cube::minterm(Letter::of({"a", "b"}), ps));
  ASSERT_TRUE(merged);
  EXPECT_TRUE(merged->matches(Letter::of({"a", "b"})));
  EXPECT_FALSE(merged->matches(Letter()));
}
