#pragma once

#include <optional>
#include <string>
#include <vector>

#include "livesynth/ap_table.hpp"
#include "livesynth/automata.hpp"
#include "livesynth/machine.hpp"
#include "livesynth/monitor.hpp"
#include "livesynth/rewrite.hpp"
#include "livesynth/semantics.hpp"

namespace livesynth {

/// Initial spec, update spec, and either a concrete history or the initial
/// implementation whose every history has to be handled.
struct LiveProblem {
  Formula phi;
  Formula psi;
  ApTable aps;
  std::optional<FiniteTrace> eta;
  std::optional<MooreMachine> ts_i;

  void validate() const {
    aps.check_declared(phi);
    aps.check_declared(psi);
    if (eta)
      for (auto& l : *eta)
        aps.check_letter(l);
    if (ts_i)
      for (PropId p : ts_i->aps().all())
        if (!aps.declared(p))
          throw Error("initial machine proposition '" + PropRegistry::name(p) +
                      "' is not declared by the problem");
  }
};

namespace detail {
inline void check_machine_aps(const MooreMachine& m, const Formula& f) {
  for (PropId p : props_of(f))
    if (!m.aps().declared(p))
      throw Error("machine does not declare '" + PropRegistry::name(p) + "'");
}
}  // namespace detail

/// η · Traces(ts_u) ⊆ Words(φ, ψ, η)?
inline Verdict mc_finite_live(const MooreMachine& ts_u, const LiveProblem& p) {
  if (!p.eta)
    throw Error("finite-trace check needs a trace");
  p.validate();
  Formula goal = Formula::conj({evolve(*p.eta, p.phi), p.psi});
  detail::check_machine_aps(ts_u, p.psi);
  Verdict v = mc_ltl(ts_u, goal);
  if (!v.pass)
    v.failing_obligation = evolve(*p.eta, p.phi);
  return v;
}

struct ObligationCheck {
  Formula obligation;
  Verdict verdict;
};

/// Checks `o && psi` on ts_u for every obligation o reachable by a history
/// of ts_i. Obligations come from the exact monitor cut against ts_i.
inline std::vector<ObligationCheck> check_obligations(const MooreMachine& ts_u,
                                                      const LiveProblem& p,
                                                      bool stop_at_first_failure = false) {
  if (!p.ts_i)
    throw Error("universal check needs an initial machine");
  p.validate();
  detail::check_machine_aps(ts_u, p.psi);
  auto cut = cut_monitor(build_monitor(p.phi), *p.ts_i);
  std::vector<ObligationCheck> out;
  for (auto& o : reachable_obligations(cut)) {
    Verdict v = mc_ltl(ts_u, Formula::conj({o, p.psi}));
    if (!v.pass)
      v.failing_obligation = o;
    out.push_back({o, v});
    if (!v.pass && stop_at_first_failure)
      break;
  }
  return out;
}

/// For every η ∈ FinTraces(ts_i): η · Traces(ts_u) ⊆ Words(φ, ψ, η)?
inline Verdict mc_universal_live(const MooreMachine& ts_u, const LiveProblem& p) {
  for (auto& c : check_obligations(ts_u, p, true))
    if (!c.verdict.pass)
      return c.verdict;
  return Verdict::ok();
}

namespace detail {

// Bounds every release to the positions before the marker.
inline Formula bound_releases(const Formula& f, const Formula& marker) {
  if (f.op() == Op::Release) {
    Formula l = bound_releases(f.lhs(), marker), r = bound_releases(f.rhs(), marker);
    return Formula::until(r, Formula::disj({marker, Formula::conj({l, r})}));
  }
  if (f.is_literal() || f.is_true() || f.is_false())
    return f;
  return rebuild(f, [&](const Formula& g) { return bound_releases(g, marker); });
}

inline PropId fresh_prop(const std::vector<PropId>& taken, std::string base) {
  for (int i = 0;; ++i) {
    std::string name = i == 0 ? base : base + "_" + std::to_string(i);
    PropId p = PropRegistry::intern(name);
    if (std::find(taken.begin(), taken.end(), p) == taken.end())
      return p;
  }
}

}  // namespace detail

/// The formula checked on the combined system of `combined_graph`:
/// F update -> (φ' && (!update U (update && ψ))), where φ' bounds every
/// release of φ to the positions before the first update.
inline Formula product_formula(const Formula& phi, const Formula& psi, PropId update) {
  Formula u = Formula::atom(update);
  Formula anchored = Formula::until(Formula::neg_atom(update), Formula::conj({u, psi}));
  return implies(Formula::eventually(u),
                 Formula::conj({detail::bound_releases(phi, u), anchored}));
}

/// Graph of all words η·σ: nodes of ts_i first, then ts_u. Every ts_i edge
/// has a duplicate into the initial state of ts_u, and both initial states
/// are initial (η may be empty). Letters emitted in ts_u carry `update`.
inline LetterGraph combined_graph(const MooreMachine& ts_i, const MooreMachine& ts_u,
                                  PropId update) {
  LetterGraph gi = letter_graph(ts_i), gu = letter_graph(ts_u);
  const std::size_t off = ts_i.size();
  LetterGraph g;
  g.initial = {ts_i.initial(), off + ts_u.initial()};
  g.succ.resize(off + ts_u.size());
  for (std::size_t q = 0; q < ts_i.size(); ++q)
    for (auto& [l, t] : gi.succ[q]) {
      g.succ[q].emplace_back(l, t);
      g.succ[q].emplace_back(l, off + ts_u.initial());
    }
  for (std::size_t q = 0; q < ts_u.size(); ++q)
    for (auto& [l, t] : gu.succ[q]) {
      Letter lu = l;
      lu.insert(update);
      g.succ[off + q].emplace_back(lu, off + t);
    }
  return g;
}

/// Universal check on the combined system. Independent of the monitor
/// construction; it must agree with `mc_universal_live`.
inline Verdict mc_universal_product(const MooreMachine& ts_i, const MooreMachine& ts_u,
                                    const Formula& phi, const Formula& psi) {
  auto taken = ts_i.aps().all();
  for (PropId p : ts_u.aps().all())
    taken.push_back(p);
  for (PropId p : props_of(phi))
    taken.push_back(p);
  for (PropId p : props_of(psi))
    taken.push_back(p);
  PropId update = detail::fresh_prop(taken, "update");
  Verdict v = check_graph(combined_graph(ts_i, ts_u, update), product_formula(phi, psi, update));
  if (v.witness) {
    // drop the marker from the reported word
    auto scrub = [&](const FiniteTrace& t) {
      FiniteTrace out = t;
      for (auto& l : out)
        l.erase(update);
      return out;
    };
    v.witness->lasso =
        LassoTrace(scrub(v.witness->lasso.prefix()), scrub(v.witness->lasso.loop()));
  }
  return v;
}

}  // namespace livesynth
