#pragma once

// Bounded synthesis.
//
// A candidate Moore machine with k states is encoded propositionally
// together with an annotation of the run graph of the universal co-Büchi
// reading of NBA(¬spec): reachable (machine, automaton) pairs carry a
// numeric rank that must strictly grow whenever an accepting automaton
// state is entered. A satisfying assignment is a machine none of whose
// traces is accepted by NBA(¬spec).
//
// Unrealizability is shown the same way from the other side: a Mealy
// environment reading outputs and choosing inputs, annotated against
// NBA(spec).

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "livesynth/ap_table.hpp"
#include "livesynth/automata.hpp"
#include "livesynth/machine.hpp"
#include "livesynth/model_check.hpp"
#include "livesynth/monitor.hpp"
#include "livesynth/sat.hpp"

namespace livesynth {

/// A counter-strategy: reads the system's outputs and picks inputs.
class EnvironmentStrategy {
public:
  EnvironmentStrategy(ApTable aps, std::size_t size) : aps_(std::move(aps)), size_(size) {
    std::size_t outs = std::size_t{1} << aps_.outputs().size();
    inputs_.assign(size, std::vector<Letter>(outs));
    next_.assign(size, std::vector<std::size_t>(outs, 0));
  }

  const ApTable& aps() const { return aps_; }
  std::size_t size() const { return size_; }
  const Letter& input(std::size_t e, std::uint64_t out_mask) const { return inputs_[e][out_mask]; }
  std::size_t next(std::size_t e, std::uint64_t out_mask) const { return next_[e][out_mask]; }
  void set(std::size_t e, std::uint64_t out_mask, Letter in, std::size_t nxt) {
    inputs_[e][out_mask] = std::move(in);
    next_[e][out_mask] = nxt;
  }

  /// Every word the environment can produce against some system.
  LetterGraph graph() const {
    LetterGraph g;
    g.initial.push_back(0);
    g.succ.resize(size_);
    for (std::size_t e = 0; e < size_; ++e)
      for (std::uint64_t o = 0; o < inputs_[e].size(); ++o)
        g.succ[e].emplace_back(aps_.output_letter(o) | inputs_[e][o], next_[e][o]);
    return g;
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t e = 0; e < size_; ++e)
      for (std::uint64_t o = 0; o < inputs_[e].size(); ++o)
        os << "e" << e << " --" << aps_.output_letter(o).str() << " / " << inputs_[e][o].str()
           << "--> e" << next_[e][o] << "\n";
    return os.str();
  }

private:
  ApTable aps_;
  std::size_t size_;
  std::vector<std::vector<Letter>> inputs_;
  std::vector<std::vector<std::size_t>> next_;
};

enum class Outcome { Realizable, Unrealizable, Unknown };

inline const char* to_string(Outcome o) {
  switch (o) {
  case Outcome::Realizable:
    return "realizable";
  case Outcome::Unrealizable:
    return "unrealizable";
  default:
    return "unknown";
  }
}

struct BoundStat {
  bool dual;
  std::size_t bound;
  std::size_t variables;
  std::size_t clauses;
  sat::Result result;
  double seconds;
};

struct SynthesisOptions {
  std::vector<std::size_t> system_bounds{1, 2, 3, 4, 6, 8, 12, 16};
  std::size_t bound_cap = 16;
  bool dual = true;
  std::size_t dual_cap = 8;
  // Environment queries are skipped once their estimated encoding exceeds
  // this many clauses, and given up after this many conflicts each.
  std::size_t dual_clause_cap = 1'500'000;
  std::uint64_t dual_conflicts = 25'000;
  std::optional<std::chrono::steady_clock::duration> time_budget;
  std::string solver = "internal";  // or a path to an external DIMACS solver
};

struct SynthesisResult {
  Outcome outcome = Outcome::Unknown;
  std::optional<MooreMachine> machine;
  std::optional<EnvironmentStrategy> counter_strategy;
  std::vector<BoundStat> stats;
  double seconds = 0;
};

namespace detail {

inline std::size_t bits_for(std::size_t max_value) {
  std::size_t b = 1;
  while ((std::size_t{1} << b) <= max_value)
    ++b;
  return b;
}

// Shared encoding of "annotated run graph has no accepting cycle" for a
// strategy whose states choose a letter and a successor per direction.
// Directions are input valuations for the system and output valuations for
// the environment.
class AnnotationEncoder {
public:
  AnnotationEncoder(sat::Cnf& cnf, const BuchiAutomaton& a, std::size_t k)
      : cnf_(cnf), a_(a), k_(k) {
    std::size_t accepting = 0;
    for (std::size_t q = 0; q < a.size(); ++q)
      accepting += a.accepting(q);
    rank_bits_ = bits_for(k * std::max<std::size_t>(accepting, 1));
    reach_.resize(k * a.size());
    rank_.resize(k * a.size());
    for (std::size_t i = 0; i < k * a.size(); ++i) {
      reach_[i] = cnf.new_var();
      for (std::size_t b = 0; b < rank_bits_; ++b)
        rank_[i].push_back(cnf.new_var());
    }
    for (auto q0 : a.initial())
      cnf.add({sat::Lit::pos(reach(0, q0))});
  }

  std::uint32_t reach(std::size_t t, std::size_t q) const { return reach_[t * a_.size() + q]; }

  // Literal that, if true, forces rank(t2,q2) > rank(t,q) (strict) or >=.
  sat::Lit rank_step(std::size_t t, std::size_t q, std::size_t t2, std::size_t q2, bool strict) {
    auto key = std::make_tuple(t, q, t2, q2, strict);
    if (auto it = cmp_.find(key); it != cmp_.end())
      return it->second;
    const auto& hi = rank_[t2 * a_.size() + q2];
    const auto& lo = rank_[t * a_.size() + q];
    // c_i: the low i+1 bits of hi compare (> or >=) to those of lo
    std::optional<sat::Lit> prev;  // nullopt encodes the base constant
    for (std::size_t i = 0; i < rank_bits_; ++i) {
      sat::Lit c = sat::Lit::pos(cnf_.new_var());
      sat::Lit x = sat::Lit::pos(hi[i]), y = sat::Lit::pos(lo[i]);
      cnf_.add({~c, x, ~y});
      if (prev) {
        cnf_.add({~c, x, *prev});
        cnf_.add({~c, ~y, *prev});
      } else if (strict) {
        // base is false: need x & !y at bit 0
        cnf_.add({~c, x});
        cnf_.add({~c, ~y});
      }
      prev = c;
    }
    cmp_.emplace(key, *prev);
    return *prev;
  }

  std::size_t rank_bits() const { return rank_bits_; }

private:
  sat::Cnf& cnf_;
  const BuchiAutomaton& a_;
  std::size_t k_;
  std::size_t rank_bits_;
  std::vector<std::uint32_t> reach_;
  std::vector<std::vector<std::uint32_t>> rank_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, bool>, sat::Lit> cmp_;
};

inline void exactly_one(sat::Cnf& cnf, const std::vector<std::uint32_t>& vars) {
  std::vector<sat::Lit> alo;
  for (auto v : vars)
    alo.push_back(sat::Lit::pos(v));
  cnf.add(alo);
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      cnf.add({sat::Lit::neg(vars[i]), sat::Lit::neg(vars[j])});
}

struct SystemEncoding {
  sat::Cnf cnf;
  std::size_t k = 0;
  std::vector<std::vector<std::uint32_t>> out;                 // [t][output]
  std::vector<std::vector<std::vector<std::uint32_t>>> trans;  // [t][input mask][t']
};

inline SystemEncoding encode_system(const BuchiAutomaton& neg, const ApTable& aps, std::size_t k) {
  SystemEncoding enc;
  enc.k = k;
  auto& cnf = enc.cnf;
  const std::size_t n_in = std::size_t{1} << aps.inputs().size();
  enc.out.assign(k, {});
  enc.trans.assign(k, std::vector<std::vector<std::uint32_t>>(n_in));
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < aps.outputs().size(); ++p)
      enc.out[t].push_back(cnf.new_var());
    for (std::size_t i = 0; i < n_in; ++i) {
      for (std::size_t t2 = 0; t2 < k; ++t2)
        enc.trans[t][i].push_back(cnf.new_var());
      exactly_one(cnf, enc.trans[t][i]);
    }
  }
  // Symmetry breaking: state t > 0 is entered from some lower state. Any
  // machine can be renumbered this way, and smaller machines padded with
  // copies of their states, so no bound loses solutions.
  for (std::size_t t = 1; t < k; ++t) {
    std::vector<sat::Lit> from_below;
    for (std::size_t s = 0; s < t; ++s)
      for (std::size_t i = 0; i < n_in; ++i)
        from_below.push_back(sat::Lit::pos(enc.trans[s][i][t]));
    cnf.add(from_below);
  }
  AnnotationEncoder ann(cnf, neg, k);
  std::vector<Letter> in_letters;
  for (std::size_t i = 0; i < n_in; ++i)
    in_letters.push_back(aps.input_letter(i));

  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t q = 0; q < neg.size(); ++q)
      for (auto& e : neg.edges(q))
        for (std::size_t i = 0; i < n_in; ++i) {
          // guard: input literals are fixed by i, output literals by out[t]
          std::vector<sat::Lit> premise{sat::Lit::neg(ann.reach(t, q))};
          bool possible = true;
          for (auto& l : e.guard.literals()) {
            if (aps.is_input(l.prop)) {
              if (in_letters[i].contains(l.prop) != l.positive) {
                possible = false;
                break;
              }
            } else if (aps.is_output(l.prop)) {
              auto idx = static_cast<std::size_t>(
                  std::find(aps.outputs().begin(), aps.outputs().end(), l.prop) -
                  aps.outputs().begin());
              premise.push_back(sat::Lit::make(enc.out[t][idx], l.positive));
            } else if (l.positive) {
              possible = false;  // undeclared propositions are never set
              break;
            }
          }
          if (!possible)
            continue;
          for (std::size_t t2 = 0; t2 < k; ++t2) {
            auto c = premise;
            c.push_back(sat::Lit::neg(enc.trans[t][i][t2]));
            auto c2 = c;
            c.push_back(sat::Lit::pos(ann.reach(t2, e.target)));
            cnf.add(c);
            c2.push_back(ann.rank_step(t, q, t2, e.target, neg.accepting(e.target)));
            cnf.add(c2);
          }
        }
  return enc;
}

inline MooreMachine decode_system(const SystemEncoding& enc, const std::vector<bool>& model,
                                  const ApTable& aps) {
  const std::size_t n_in = std::size_t{1} << aps.inputs().size();
  MooreMachine full(aps);
  for (std::size_t t = 0; t < enc.k; ++t) {
    Letter o;
    for (std::size_t p = 0; p < aps.outputs().size(); ++p)
      if (model[enc.out[t][p]])
        o.insert(aps.outputs()[p]);
    full.add_state("s" + std::to_string(t), o);
  }
  std::vector<std::vector<std::size_t>> succ(enc.k, std::vector<std::size_t>(n_in));
  for (std::size_t t = 0; t < enc.k; ++t)
    for (std::size_t i = 0; i < n_in; ++i)
      for (std::size_t t2 = 0; t2 < enc.k; ++t2)
        if (model[enc.trans[t][i][t2]])
          succ[t][i] = t2;
  // keep the part reachable from state 0
  std::vector<std::size_t> order{0}, rename(enc.k, SIZE_MAX);
  rename[0] = 0;
  for (std::size_t j = 0; j < order.size(); ++j)
    for (std::size_t i = 0; i < n_in; ++i)
      if (rename[succ[order[j]][i]] == SIZE_MAX) {
        rename[succ[order[j]][i]] = order.size();
        order.push_back(succ[order[j]][i]);
      }
  MooreMachine m(aps);
  for (std::size_t j = 0; j < order.size(); ++j)
    m.add_state("s" + std::to_string(j), full.state(order[j]).output);
  for (std::size_t j = 0; j < order.size(); ++j)
    for (std::size_t i = 0; i < n_in; ++i)
      m.add_edge(j, Cube::minterm(aps.input_letter(i), aps.inputs()),
                 rename[succ[order[j]][i]]);
  m.compact();
  return m;
}

struct EnvironmentEncoding {
  sat::Cnf cnf;
  std::size_t k = 0;
  std::vector<std::vector<std::vector<std::uint32_t>>> in;     // [e][out mask][input]
  std::vector<std::vector<std::vector<std::uint32_t>>> trans;  // [e][out mask][e']
};

inline EnvironmentEncoding encode_environment(const BuchiAutomaton& pos, const ApTable& aps,
                                              std::size_t k) {
  EnvironmentEncoding enc;
  enc.k = k;
  auto& cnf = enc.cnf;
  const std::size_t n_out = std::size_t{1} << aps.outputs().size();
  enc.in.assign(k, std::vector<std::vector<std::uint32_t>>(n_out));
  enc.trans.assign(k, std::vector<std::vector<std::uint32_t>>(n_out));
  for (std::size_t e = 0; e < k; ++e)
    for (std::size_t o = 0; o < n_out; ++o) {
      for (std::size_t p = 0; p < aps.inputs().size(); ++p)
        enc.in[e][o].push_back(cnf.new_var());
      for (std::size_t e2 = 0; e2 < k; ++e2)
        enc.trans[e][o].push_back(cnf.new_var());
      exactly_one(cnf, enc.trans[e][o]);
    }
  AnnotationEncoder ann(cnf, pos, k);
  std::vector<Letter> out_letters;
  for (std::size_t o = 0; o < n_out; ++o)
    out_letters.push_back(aps.output_letter(o));

  for (std::size_t e = 0; e < k; ++e)
    for (std::size_t q = 0; q < pos.size(); ++q)
      for (auto& edge : pos.edges(q))
        for (std::size_t o = 0; o < n_out; ++o) {
          std::vector<sat::Lit> premise{sat::Lit::neg(ann.reach(e, q))};
          bool possible = true;
          for (auto& l : edge.guard.literals()) {
            if (aps.is_output(l.prop)) {
              if (out_letters[o].contains(l.prop) != l.positive) {
                possible = false;
                break;
              }
            } else if (aps.is_input(l.prop)) {
              auto idx = static_cast<std::size_t>(
                  std::find(aps.inputs().begin(), aps.inputs().end(), l.prop) -
                  aps.inputs().begin());
              premise.push_back(sat::Lit::make(enc.in[e][o][idx], l.positive));
            } else if (l.positive) {
              possible = false;
              break;
            }
          }
          if (!possible)
            continue;
          for (std::size_t e2 = 0; e2 < k; ++e2) {
            auto c = premise;
            c.push_back(sat::Lit::neg(enc.trans[e][o][e2]));
            auto c2 = c;
            c.push_back(sat::Lit::pos(ann.reach(e2, edge.target)));
            cnf.add(c);
            c2.push_back(ann.rank_step(e, q, e2, edge.target, pos.accepting(edge.target)));
            cnf.add(c2);
          }
        }
  return enc;
}

inline EnvironmentStrategy decode_environment(const EnvironmentEncoding& enc,
                                              const std::vector<bool>& model,
                                              const ApTable& aps) {
  const std::size_t n_out = std::size_t{1} << aps.outputs().size();
  EnvironmentStrategy env(aps, enc.k);
  for (std::size_t e = 0; e < enc.k; ++e)
    for (std::size_t o = 0; o < n_out; ++o) {
      Letter in;
      for (std::size_t p = 0; p < aps.inputs().size(); ++p)
        if (model[enc.in[e][o][p]])
          in.insert(aps.inputs()[p]);
      std::size_t nxt = 0;
      for (std::size_t e2 = 0; e2 < enc.k; ++e2)
        if (model[enc.trans[e][o][e2]])
          nxt = e2;
      env.set(e, o, in, nxt);
    }
  return env;
}

inline sat::SolveOutcome run_solver(const sat::Cnf& cnf, const SynthesisOptions& opt,
                                    std::optional<std::chrono::steady_clock::time_point> deadline,
                                    std::optional<std::uint64_t> max_conflicts = std::nullopt) {
  if (opt.solver == "internal" || opt.solver.empty())
    return sat::solve_internal(cnf, {max_conflicts, deadline});
  return sat::solve_external(cnf, opt.solver);
}

}  // namespace detail

/// Interleaves system bounds with environment bounds until one side
/// produces a verified strategy, the bounds run out, or time is up.
inline SynthesisResult synth_ltl(const Formula& spec, const ApTable& aps,
                                 const SynthesisOptions& opt = {}) {
  aps.check_declared(spec);
  if (aps.inputs().size() > 16 || aps.outputs().size() > 16)
    throw Error("too many propositions for explicit bounded synthesis");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::optional<clock::time_point> deadline;
  if (opt.time_budget)
    deadline = start + *opt.time_budget;

  SynthesisResult res;
  BuchiAutomaton neg = ltl_to_nba(negate(spec));
  std::optional<BuchiAutomaton> pos;
  if (opt.dual)
    pos = ltl_to_nba(spec);

  std::vector<std::size_t> sys;
  for (auto b : opt.system_bounds)
    if (b >= 1 && b <= opt.bound_cap)
      sys.push_back(b);
  std::size_t env_bound = 0;
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
  auto timed_out = [&] { return deadline && clock::now() >= *deadline; };

  for (std::size_t round = 0; round < std::max(sys.size(), opt.dual ? opt.dual_cap : 0);
       ++round) {
    if (round < sys.size()) {
      auto t0 = clock::now();
      auto enc = detail::encode_system(neg, aps, sys[round]);
      auto r = detail::run_solver(enc.cnf, opt, deadline);
      res.stats.push_back({false, sys[round], enc.cnf.num_vars(), enc.cnf.clauses().size(),
                           r.result, std::chrono::duration<double>(clock::now() - t0).count()});
      if (r.result == sat::Result::Sat) {
        MooreMachine m = detail::decode_system(enc, r.model, aps);
        if (!mc_ltl(m, spec).pass)
          throw Error("internal error: synthesized machine violates the specification");
        res.outcome = Outcome::Realizable;
        res.machine = std::move(m);
        res.seconds = elapsed();
        return res;
      }
      if (timed_out())
        break;
    }
    const std::size_t n_out = std::size_t{1} << aps.outputs().size();
    if (opt.dual && env_bound < opt.dual_cap &&
        2 * pos->num_edges() * n_out * (env_bound + 1) * (env_bound + 1) <= opt.dual_clause_cap) {
      ++env_bound;
      auto t0 = clock::now();
      auto enc = detail::encode_environment(*pos, aps, env_bound);
      auto r = detail::run_solver(enc.cnf, opt, deadline, opt.dual_conflicts);
      res.stats.push_back({true, env_bound, enc.cnf.num_vars(), enc.cnf.clauses().size(),
                           r.result, std::chrono::duration<double>(clock::now() - t0).count()});
      if (r.result == sat::Result::Sat) {
        EnvironmentStrategy env = detail::decode_environment(enc, r.model, aps);
        if (!check_graph(env.graph(), negate(spec)).pass)
          throw Error("internal error: counter-strategy does not refute the specification");
        res.outcome = Outcome::Unrealizable;
        res.counter_strategy = std::move(env);
        res.seconds = elapsed();
        return res;
      }
      if (timed_out())
        break;
    }
  }
  res.seconds = elapsed();
  return res;
}

/// Synthesizes an update for one concrete history: evolve(η, φ) && ψ.
inline SynthesisResult synth_finite_live(const Formula& phi, const Formula& psi,
                                         std::span<const Letter> eta, const ApTable& aps,
                                         const SynthesisOptions& opt = {}) {
  LiveProblem p{phi, psi, aps, FiniteTrace(eta.begin(), eta.end()), std::nullopt};
  p.validate();
  auto res = synth_ltl(Formula::conj({evolve(eta, phi), psi}), aps, opt);
  if (res.machine && !mc_finite_live(*res.machine, p).pass)
    throw Error("internal error: update fails the finite-trace check");
  return res;
}

struct ObligationSynthesis {
  Formula obligation;
  Outcome outcome;
  double seconds;
};

struct UniversalSynthesisResult {
  SynthesisResult universal;
  std::vector<ObligationSynthesis> per_obligation;
  std::size_t monitor_states = 0;
};

/// Synthesizes one update that discharges every obligation reachable by a
/// history of ts_i. With `per_obligation`, each obligation is also
/// synthesized on its own.
inline UniversalSynthesisResult synth_universal_live(const MooreMachine& ts_i, const Formula& phi,
                                                     const Formula& psi, const ApTable& aps,
                                                     const SynthesisOptions& opt = {},
                                                     bool per_obligation = true) {
  LiveProblem p{phi, psi, aps, std::nullopt, ts_i};
  p.validate();
  auto cut = cut_monitor(build_monitor(phi), ts_i);
  auto obligations = reachable_obligations(cut);
  UniversalSynthesisResult out;
  out.monitor_states = cut.size();
  if (per_obligation)
    for (auto& o : obligations) {
      auto r = synth_ltl(Formula::conj({o, psi}), aps, opt);
      out.per_obligation.push_back({o, r.outcome, r.seconds});
    }
  std::vector<Formula> parts = obligations;
  parts.push_back(psi);
  out.universal = synth_ltl(Formula::conj(parts), aps, opt);
  if (out.universal.machine && !mc_universal_live(*out.universal.machine, p).pass)
    throw Error("internal error: update fails the universal check");
  return out;
}

}  // namespace livesynth
