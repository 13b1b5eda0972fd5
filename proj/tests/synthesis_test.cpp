#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace livesynth;
using testing_support::parse;
using testing_support::trace;

namespace {

const ApTable req_grant({"r"}, {"g"});

SynthesisOptions quick() {
  SynthesisOptions opt;
  opt.time_budget = std::chrono::seconds(120);
  return opt;
}

}  // namespace

TEST(SynthLtl, ResponseIsRealizableWithOneState) {
  Formula spec = parse("G (r -> F g)");
  auto res = synth_ltl(spec, req_grant, quick());
  ASSERT_EQ(res.outcome, Outcome::Realizable);
  ASSERT_TRUE(res.machine);
  EXPECT_EQ(res.machine->size(), 1u);
  EXPECT_TRUE(res.machine->state(0).output.contains(PropRegistry::intern("g")));
  EXPECT_TRUE(mc_ltl(*res.machine, spec).pass);
  EXPECT_FALSE(res.stats.empty());
}

TEST(SynthLtl, ContradictionIsUnrealizable) {
  auto res = synth_ltl(parse("G (g <-> !g)"), req_grant, quick());
  EXPECT_EQ(res.outcome, Outcome::Unrealizable);
  EXPECT_FALSE(res.machine);
}

TEST(SynthLtl, MooreMachineCannotEchoCurrentInput) {
  Formula spec = parse("G (r <-> g)");
  auto res = synth_ltl(spec, req_grant, quick());
  ASSERT_EQ(res.outcome, Outcome::Unrealizable);
  ASSERT_TRUE(res.counter_strategy);
  // every play against the counter-strategy violates the spec
  EXPECT_TRUE(check_graph(res.counter_strategy->graph(), negate(spec)).pass);
}

TEST(SynthLtl, DelayedEchoIsRealizable) {
  Formula spec = parse("G (r <-> X g)");
  auto res = synth_ltl(spec, req_grant, quick());
  ASSERT_EQ(res.outcome, Outcome::Realizable);
  EXPECT_TRUE(mc_ltl(*res.machine, spec).pass);
  EXPECT_EQ(synth_ltl(parse("G (g <-> X r)"), req_grant, quick()).outcome,
            Outcome::Unrealizable);
}

TEST(SynthLtl, RelayTwoStations) {
  auto b = make_benchmark(Family::Relay, 2);
  auto res = synth_ltl(b.formula(), b.aps(), quick());
  ASSERT_EQ(res.outcome, Outcome::Realizable);
  EXPECT_LE(res.machine->size(), 8u);
  EXPECT_TRUE(res.machine->is_total());
  EXPECT_TRUE(mc_ltl(*res.machine, b.formula()).pass);
}

TEST(SynthLtl, BoundCapGivesUnknownWithoutDual) {
  SynthesisOptions opt = quick();
  opt.dual = false;
  opt.system_bounds = {1};
  opt.bound_cap = 1;
  // needs two states: alternate g
  auto res = synth_ltl(parse("G (g <-> X !g)"), req_grant, opt);
  EXPECT_EQ(res.outcome, Outcome::Unknown);
  opt.system_bounds = {1, 2};
  opt.bound_cap = 2;
  EXPECT_EQ(synth_ltl(parse("G (g <-> X !g)"), req_grant, opt).outcome, Outcome::Realizable);
}

TEST(SynthLtl, RejectsUndeclaredPropositions) {
  EXPECT_THROW(synth_ltl(parse("G F h"), req_grant, quick()), Error);
}

TEST(Encoding, BitsFor) {
  EXPECT_EQ(detail::bits_for(0), 1u);
  EXPECT_EQ(detail::bits_for(1), 1u);
  EXPECT_EQ(detail::bits_for(2), 2u);
  EXPECT_EQ(detail::bits_for(255), 8u);
  EXPECT_EQ(detail::bits_for(256), 9u);
}

TEST(Encoding, DecodedSystemSatisfiesSpec) {
  Formula spec = parse("G (r -> X g) && G F !g");
  auto neg = ltl_to_nba(negate(spec));
  for (std::size_t k = 1; k <= 3; ++k) {
    auto enc = detail::encode_system(neg, req_grant, k);
    auto out = sat::solve_internal(enc.cnf);
    if (out.result != sat::Result::Sat)
      continue;
    auto m = detail::decode_system(enc, out.model, req_grant);
    EXPECT_LE(m.size(), k);
    EXPECT_TRUE(mc_ltl(m, spec).pass) << serialize_machine(m);
  }
}

TEST(FiniteLiveSynth, EmptyHistoryIsPlainSynthesis) {
  Formula psi = parse("G (r -> X g)");
  auto a = synth_finite_live(Formula::tt(), psi, FiniteTrace{}, req_grant, quick());
  auto b = synth_ltl(psi, req_grant, quick());
  EXPECT_EQ(a.outcome, b.outcome);
  EXPECT_EQ(a.outcome, Outcome::Realizable);
}

TEST(FiniteLiveSynth, SingleStationMustStillServePendingInstruction) {
  auto aps = make_benchmark(Family::Relay, 2).aps();
  Formula phi = make_benchmark(Family::Relay, 2).formula();
  Formula psi = make_benchmark(Family::Relay, 1).formula();
  auto eta = trace({{"m1", "i0", "i1", "r"}, {"i1"}, {"m0", "m1"}});
  auto res = synth_finite_live(phi, psi, eta, aps, quick());
  ASSERT_EQ(res.outcome, Outcome::Realizable);
  LiveProblem p{phi, psi, aps, eta, std::nullopt};
  EXPECT_TRUE(mc_finite_live(*res.machine, p).pass);
  EXPECT_TRUE(mc_ltl(*res.machine, parse("F i1")).pass);
}

TEST(FiniteLiveSynth, PendingGrantAgainstSpuriousGrantBan) {
  ApTable aps({"r0", "r1"}, {"g0", "g1"});
  Formula phi = make_benchmark(Family::ArbiterSimple, 2).formula();
  Formula psi = make_benchmark(Family::ArbiterFull, 2).formula();
  auto res = synth_finite_live(phi, psi, trace({{"r0"}}), aps, quick());
  EXPECT_EQ(res.outcome, Outcome::Unrealizable);
}

TEST(UniversalSynth, TrivialInitialMachineReducesToPlainSynthesis) {
  MooreMachine ts_i(req_grant);
  ts_i.add_state("s", Letter());
  ts_i.add_edge(0, Cube(), 0);
  Formula psi = parse("G (r -> F g) && G F !g");
  auto u = synth_universal_live(ts_i, Formula::tt(), psi, req_grant, quick());
  EXPECT_EQ(u.per_obligation.size(), 1u);
  EXPECT_EQ(u.universal.outcome, synth_ltl(psi, req_grant, quick()).outcome);
}

TEST(UniversalSynth, ArbiterSimpleTwoToFour) {
  auto rows = update_rows();
  auto it = std::find_if(rows.begin(), rows.end(),
                         [](auto& r) { return r.label() == "arbiter-simple 2->4"; });
  ASSERT_NE(it, rows.end());
  auto rep = run_row(*it, quick());
  EXPECT_TRUE(rep.error.empty()) << rep.error;
  EXPECT_EQ(rep.universal, Outcome::Realizable);
}

TEST(UniversalSynth, ArbiterSimpleToFull) {
  auto rows = update_rows();
  auto it = std::find_if(rows.begin(), rows.end(),
                         [](auto& r) { return r.label() == "arbiter-simple -> arbiter-full"; });
  ASSERT_NE(it, rows.end());
  auto rep = run_row(*it, quick());
  EXPECT_TRUE(rep.error.empty()) << rep.error;
  EXPECT_EQ(rep.universal, Outcome::Unrealizable);
  EXPECT_GE(rep.finite_realizable, 1u);
  EXPECT_GE(rep.finite_unrealizable, 1u);
}

TEST(Benchmarks, FamiliesParseAndDeclareTheirPropositions) {
  for (auto& [family, name] : family_names()) {
    EXPECT_EQ(parse_family(name), family);
    for (int n = 1; n <= 3; ++n) {
      auto b = make_benchmark(family, n);
      EXPECT_NO_THROW(b.aps().check_declared(b.formula())) << b.name();
    }
  }
  EXPECT_THROW(parse_family("nope"), Error);
  EXPECT_THROW(make_benchmark(Family::Visit, 0), Error);
  EXPECT_EQ(update_rows().size(), 21u);
}
