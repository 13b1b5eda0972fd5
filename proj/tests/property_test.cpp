// Randomized agreement between the library and brute-force references.
// Every property runs kCases instances from a fixed seed.

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"

using namespace livesynth;
using testing_support::Gen;
using testing_support::ref_initial;
using testing_support::ref_ltl;
using testing_support::ref_words;

namespace {

constexpr int kCases = 500;

const std::vector<PropId> ab = testing_support::props({"a", "b"});
const std::vector<PropId> abc = testing_support::props({"a", "b", "c"});

bool has_next(const Formula& f) {
  if (f.op() == Op::Next)
    return true;
  for (auto& c : f.children())
    if (has_next(c))
      return true;
  return false;
}

}  // namespace

TEST(Property, AfIsTheOneLetterDerivative) {
  Gen gen(101);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 3);
    Letter nu = gen.letter(abc);
    auto w = gen.lasso(abc);
    LassoTrace nw = w.after(FiniteTrace{nu});
    ASSERT_EQ(ref_ltl(nw, f), ref_ltl(w, af(f, nu))) << f << " " << nu.str() << " " << w.str();
  }
}

TEST(Property, AfWordIsTheWordDerivative) {
  Gen gen(102);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(ab, 3);
    auto u = gen.word(ab, gen.below(5));
    auto w = gen.lasso(ab);
    ASSERT_EQ(ref_ltl(w.after(u), f), ref_ltl(w, af_word(f, u))) << f << " " << w.str();
  }
}

TEST(Property, ExpandPreservesSemantics) {
  Gen gen(103);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 3);
    auto w = gen.lasso(abc);
    std::size_t n = gen.below(4);
    ASSERT_EQ(ref_ltl(w, expand_n(f, n)), ref_ltl(w, f)) << f << " n=" << n;
  }
}

TEST(Property, StripWeakens) {
  Gen gen(104);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 3);
    Formula s = strip(f);
    ASSERT_FALSE(contains_release(s)) << f;
    auto w = gen.lasso(abc);
    if (ref_ltl(w, f)) {
      ASSERT_TRUE(ref_ltl(w, s)) << f << " " << w.str();
    }
  }
}

TEST(Property, EvolveMatchesInitialSatisfaction) {
  Gen gen(105);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(ab, 3);
    auto eta = gen.word(ab, gen.below(5));
    Formula o = evolve(eta, f);
    for (int s = 0; s < 4; ++s) {
      auto sigma = gen.lasso(ab);
      ASSERT_EQ(ref_ltl(sigma, o), ref_initial(eta.size(), sigma.after(eta), f))
          << f << " eta=" << LassoTrace(eta, {Letter()}).str() << " sigma=" << sigma.str();
    }
  }
}

TEST(Property, LibraryEvaluatorsMatchReference) {
  Gen gen(106);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 3);
    auto w = gen.lasso(abc, 4, 4);
    std::size_t i = gen.below(6), n = gen.below(5);
    ASSERT_EQ(eval_ltl(w, i, f), ref_ltl(w, f, i)) << f << " " << w.str();
    ASSERT_EQ(eval_initial(n, w, 0, f), ref_initial(n, w, f)) << f << " " << w.str();
  }
}

TEST(Property, UnrollInitialMatchesBoundedSatisfaction) {
  Gen gen(116);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(ab, 3);
    std::size_t n = gen.below(5);
    Formula u = unroll_initial(f, n);
    for (int s = 0; s < 3; ++s) {
      auto w = gen.lasso(ab);
      ASSERT_EQ(ref_ltl(w, u), ref_initial(n, w, f)) << f << " n=" << n << " " << w.str();
    }
  }
}

TEST(Property, UnrollInitialIsStripExpandWithoutNext) {
  Gen gen(117);
  int checked = 0;
  while (checked < kCases) {
    Formula f = gen.formula(ab, 3);
    if (has_next(f))
      continue;
    ++checked;
    std::size_t n = gen.below(4);
    auto w = gen.lasso(ab);
    ASSERT_EQ(ref_ltl(w, unroll_initial(f, n)), ref_ltl(w, strip(expand_n(f, n)))) << f;
  }
}

TEST(Property, ReductionToLtlPreservesWords) {
  Gen gen(107);
  auto aps = abc;
  for (int k = 0; k < kCases; ++k) {
    Formula phi = gen.formula(aps, 3), psi = gen.formula(aps, 2);
    auto eta = gen.word(aps, gen.below(4));
    Formula red = liveltl_to_ltl(phi, psi, eta, aps);
    auto sigma = gen.lasso(aps);
    ASSERT_EQ(ref_ltl(sigma.after(eta), red), ref_words(phi, psi, eta, sigma))
        << phi << " / " << psi << " " << sigma.str();
    ASSERT_EQ(words_membership(phi, psi, eta, sigma), ref_words(phi, psi, eta, sigma));
  }
}

TEST(Property, AutomatonLanguageMatchesReference) {
  Gen gen(108);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 3);
    auto nba = ltl_to_nba(f);
    for (int s = 0; s < 3; ++s) {
      auto w = gen.lasso(abc);
      ASSERT_EQ(nba_accepts(nba, w), ref_ltl(w, f)) << f << " " << w.str();
    }
    if (auto w = nba_emptiness(nba)) {
      ASSERT_TRUE(ref_ltl(*w, f)) << f << " " << w->str();
    }
  }
}

TEST(Property, ModelCheckingMatchesLassoEnumeration) {
  Gen gen(109);
  ApTable aps({"a"}, {"b", "c"});
  for (int k = 0; k < kCases; ++k) {
    auto m = gen.machine(aps, 4);
    Formula f = gen.formula(aps.all(), 3);
    bool all_ok = true;
    for (auto& w : all_lassos(m, 3))
      all_ok = all_ok && ref_ltl(w, f);
    auto v = mc_ltl(m, f);
    if (!all_ok) {
      ASSERT_FALSE(v.pass) << f << "\n" << serialize_machine(m);
    }
    if (!v.pass) {
      ASSERT_TRUE(v.witness);
      auto& w = v.witness->lasso;
      ASSERT_FALSE(ref_ltl(w, f));
      // the witness is a trace of the machine
      FiniteTrace in_p, in_l;
      for (auto& l : w.prefix())
        in_p.push_back(l.restrict_to(aps.inputs()));
      for (auto& l : w.loop())
        in_l.push_back(l.restrict_to(aps.inputs()));
      auto replay = run_lasso(m, LassoTrace(in_p, in_l));
      ASSERT_EQ(replay.take(w.positions() * 2), w.take(w.positions() * 2));
    }
  }
}

TEST(Property, MonitorLabelsAreEvolve) {
  Gen gen(110);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(ab, 3);
    auto mon = build_monitor(f, {StepMode::Exact, 5000});
    for (int s = 0; s < 3; ++s) {
      auto eta = gen.word(ab, gen.below(6));
      std::size_t t = mon.step_word(mon.initial(), eta);
      ASSERT_TRUE(detail::propositionally_equivalent(mon.label(t), evolve(eta, f)))
          << f << " " << mon.label(t) << " vs " << evolve(eta, f);
    }
  }
}

TEST(Property, ReducedDnfIsEquivalent) {
  Gen gen(111);
  for (int k = 0; k < kCases; ++k) {
    Formula f = gen.formula(abc, 4);
    Formula d = reduced_dnf(f);
    ASSERT_TRUE(detail::propositionally_equivalent(f, d)) << f << " vs " << d;
    ASSERT_EQ(reduced_dnf(d), d) << f;
  }
}

TEST(Property, UniversalChecksAgreeWithHistoryEnumeration) {
  Gen gen(112);
  ApTable aps({"a"}, {"b", "c"});
  int checked = 0;
  for (int k = 0; checked < kCases; ++k) {
    auto ts_i = gen.machine(aps, 3);
    auto ts_u = gen.machine(aps, 3);
    Formula phi = gen.formula(aps.all(), 2), psi = gen.formula(aps.all(), 2);
    auto cut = cut_monitor(build_monitor(phi), ts_i);
    if (cut.size() > 12)
      continue;
    ++checked;
    bool expected = true;
    std::set<std::size_t> seen;
    for (auto& eta : fin_traces(ts_i, cut.size())) {
      if (!seen.insert(evolve(eta, phi).id()).second)
        continue;
      if (!mc_finite_live(ts_u, LiveProblem{phi, psi, aps, eta, std::nullopt}).pass) {
        expected = false;
        break;
      }
    }
    LiveProblem p{phi, psi, aps, std::nullopt, ts_i};
    ASSERT_EQ(mc_universal_live(ts_u, p).pass, expected) << phi << " / " << psi;
    ASSERT_EQ(mc_universal_product(ts_i, ts_u, phi, psi).pass, expected) << phi << " / " << psi;
  }
}

TEST(Property, SynthesisResultsVerify) {
  Gen gen(113);
  ApTable aps({"r"}, {"g"});
  SynthesisOptions opt;
  opt.system_bounds = {1, 2, 3, 4};
  opt.bound_cap = 4;
  opt.dual_cap = 4;
  opt.time_budget = std::chrono::seconds(5);
  int realizable = 0, unrealizable = 0;
  for (int k = 0; k < kCases; ++k) {
    Formula spec = gen.formula(aps.all(), 3);
    auto res = synth_ltl(spec, aps, opt);
    if (res.outcome == Outcome::Realizable) {
      ++realizable;
      ASSERT_TRUE(res.machine->is_total());
      ASSERT_TRUE(mc_ltl(*res.machine, spec).pass) << spec;
    } else if (res.outcome == Outcome::Unrealizable) {
      ++unrealizable;
      ASSERT_TRUE(check_graph(res.counter_strategy->graph(), negate(spec)).pass) << spec;
    }
  }
  EXPECT_GT(realizable, 50);
  EXPECT_GT(unrealizable, 50);
}

TEST(Property, SatMatchesBruteForce) {
  std::mt19937_64 rng(114);
  for (int k = 0; k < kCases; ++k) {
    sat::Cnf cnf;
    std::uint32_t vars = 3 + static_cast<std::uint32_t>(rng() % 8);
    for (std::uint32_t v = 0; v < vars; ++v)
      cnf.new_var();
    std::size_t clauses = vars * (3 + rng() % 3);
    for (std::size_t c = 0; c < clauses; ++c) {
      std::vector<sat::Lit> cl;
      for (std::size_t l = 0, len = 1 + rng() % 3; l < len; ++l)
        cl.push_back(sat::Lit::make(static_cast<std::uint32_t>(rng() % vars), rng() & 1U));
      cnf.add(cl);
    }
    bool expected = false;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars) && !expected; ++m) {
      bool all = true;
      for (auto& cl : cnf.clauses()) {
        bool any = false;
        for (auto l : cl)
          any = any || (((m >> l.var()) & 1U) != l.negative());
        all = all && any;
      }
      expected = all;
    }
    auto out = sat::solve_internal(cnf);
    ASSERT_EQ(out.result == sat::Result::Sat, expected) << "case " << k;
  }
}

TEST(Property, FiniteTracesArePrefixesOfLassos) {
  Gen gen(115);
  ApTable aps({"a"}, {"b"});
  for (int k = 0; k < kCases; ++k) {
    auto m = gen.machine(aps, 3);
    auto traces = fin_traces(m, 3);
    std::set<FiniteTrace> from_lassos;
    for (auto& w : all_lassos(m, 3))
      for (std::size_t n = 0; n <= 3; ++n)
        from_lassos.insert(w.take(n));
    ASSERT_EQ(traces, from_lassos);
    auto u = gen.word(aps.inputs(), 3);
    ASSERT_TRUE(traces.count(run(m, u)));
  }
}
