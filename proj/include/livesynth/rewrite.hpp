#pragma once

#include <map>
#include <span>
#include <vector>

#include "livesynth/ap_table.hpp"
#include "livesynth/formula.hpp"

namespace livesynth {

/// A finite word over 2^AP.
using FiniteTrace = std::vector<Letter>;

namespace detail {

template <class Fn>
Formula rebuild(const Formula& f, Fn&& rec) {
  switch (f.op()) {
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.num_children());
    for (auto& k : f.children())
      kids.push_back(rec(k));
    return f.op() == Op::And ? Formula::conj(kids) : Formula::disj(kids);
  }
  case Op::Next:
    return Formula::next(rec(f.child(0)));
  case Op::Until:
    return Formula::until(rec(f.lhs()), rec(f.rhs()));
  case Op::Release:
    return Formula::release(rec(f.lhs()), rec(f.rhs()));
  default:
    return f;
  }
}

inline Formula af_rec(const Formula& f, const Letter& nu, FormulaMap<Formula>& memo) {
  if (auto it = memo.find(f); it != memo.end())
    return it->second;
  Formula r;
  switch (f.op()) {
  case Op::True:
  case Op::False:
    r = f;
    break;
  case Op::Atom:
    r = nu.contains(f.prop()) ? Formula::tt() : Formula::ff();
    break;
  case Op::NegAtom:
    r = nu.contains(f.prop()) ? Formula::ff() : Formula::tt();
    break;
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    for (auto& k : f.children())
      kids.push_back(af_rec(k, nu, memo));
    r = f.op() == Op::And ? Formula::conj(kids) : Formula::disj(kids);
    break;
  }
  case Op::Next:
    r = f.child(0);
    break;
  case Op::Until:
    r = Formula::disj({af_rec(f.rhs(), nu, memo),
                       Formula::conj({af_rec(f.lhs(), nu, memo), f})});
    break;
  case Op::Release: {
    Formula r2 = af_rec(f.rhs(), nu, memo);
    r = Formula::disj({Formula::conj({af_rec(f.lhs(), nu, memo), r2}),
                       Formula::conj({r2, f})});
    break;
  }
  }
  memo.emplace(f, r);
  return r;
}

}  // namespace detail

/// The "after" derivative: the residual formula that the suffix after
/// reading `nu` has to satisfy.
inline Formula af(const Formula& f, const Letter& nu) {
  FormulaMap<Formula> memo;
  return detail::af_rec(f, nu, memo);
}

/// Left fold of `af` over a finite word; `af_word(f, {}) == f`.
inline Formula af_word(Formula f, std::span<const Letter> word) {
  for (const Letter& nu : word)
    f = af(f, nu);
  return f;
}

/// Evaluates `f` at the current letter without advancing time: literals are
/// resolved, `X g` stays `X g`, and U/R are unfolded once with their
/// continuation placed under a fresh next.
inline Formula unfold(const Formula& f, const Letter& nu) {
  using F = Formula;
  switch (f.op()) {
  case Op::Atom:
    return nu.contains(f.prop()) ? F::tt() : F::ff();
  case Op::NegAtom:
    return nu.contains(f.prop()) ? F::ff() : F::tt();
  case Op::Next:
    return f;
  case Op::Until:
    return F::disj({unfold(f.rhs(), nu), F::conj({unfold(f.lhs(), nu), F::next(f)})});
  case Op::Release: {
    F r = unfold(f.rhs(), nu);
    return F::disj({F::conj({unfold(f.lhs(), nu), r}), F::conj({r, F::next(f)})});
  }
  default:
    return detail::rebuild(f, [&](const F& g) { return unfold(g, nu); });
  }
}

/// One step of the obligation monitor as drawn with the Moore offset: like
/// `af`, except that the operands of a release are only unfolded at `nu`, so
/// the obligations a release raises at this step keep their leading next and
/// are discharged starting one step later.
inline Formula af_deferred(const Formula& f, const Letter& nu) {
  using F = Formula;
  switch (f.op()) {
  case Op::True:
  case Op::False:
    return f;
  case Op::Atom:
    return nu.contains(f.prop()) ? F::tt() : F::ff();
  case Op::NegAtom:
    return nu.contains(f.prop()) ? F::ff() : F::tt();
  case Op::Next:
    return f.child(0);
  case Op::Until:
    return F::disj({af_deferred(f.rhs(), nu), F::conj({af_deferred(f.lhs(), nu), f})});
  case Op::Release: {
    F r = unfold(f.rhs(), nu);
    return F::disj({F::conj({unfold(f.lhs(), nu), r}), F::conj({r, f})});
  }
  default:
    return detail::rebuild(f, [&](const F& g) { return af_deferred(g, nu); });
  }
}

/// Replaces every release by `true`. The result is release-free and hence
/// syntactically co-safe.
inline Formula strip(const Formula& f) {
  if (f.op() == Op::Release)
    return Formula::tt();
  if (f.is_literal() || f.is_true() || f.is_false())
    return f;
  return detail::rebuild(f, [](const Formula& g) { return strip(g); });
}

namespace detail {
inline Formula expand_once(const Formula& f, FormulaMap<Formula>& memo) {
  using F = Formula;
  if (auto it = memo.find(f); it != memo.end())
    return it->second;
  F r;
  switch (f.op()) {
  case Op::Until:
    r = F::disj({expand_once(f.rhs(), memo), F::conj({expand_once(f.lhs(), memo), F::next(f)})});
    break;
  case Op::Release: {
    F e2 = expand_once(f.rhs(), memo);
    r = F::disj({F::conj({expand_once(f.lhs(), memo), e2}), F::conj({e2, F::next(f)})});
    break;
  }
  default:
    r = rebuild(f, [&](const F& g) { return expand_once(g, memo); });
  }
  memo.emplace(f, r);
  return r;
}
}  // namespace detail

/// One expansion pass: every until/release that is not under a next created
/// by this very pass is unrolled once (`a U b => b | (a & X(a U b))`).
/// Operands are expanded as well, so after n passes every temporal operator
/// other than X sits below at least n nexts.
inline Formula expand(const Formula& f) {
  FormulaMap<Formula> memo;
  return detail::expand_once(f, memo);
}

inline Formula expand_n(Formula f, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    f = expand(f);
  return f;
}

/// PNF negation.
inline Formula negate(const Formula& f) {
  using F = Formula;
  switch (f.op()) {
  case Op::True:
    return F::ff();
  case Op::False:
    return F::tt();
  case Op::Atom:
    return F::neg_atom(f.prop());
  case Op::NegAtom:
    return F::atom(f.prop());
  case Op::And:
  case Op::Or: {
    std::vector<F> kids;
    for (auto& k : f.children())
      kids.push_back(negate(k));
    return f.op() == Op::And ? F::disj(kids) : F::conj(kids);
  }
  case Op::Next:
    return F::next(negate(f.child(0)));
  case Op::Until:
    return F::release(negate(f.lhs()), negate(f.rhs()));
  case Op::Release:
    return F::until(negate(f.lhs()), negate(f.rhs()));
  }
  return f;
}

inline Formula implies(const Formula& a, const Formula& b) {
  return Formula::disj({negate(a), b});
}

/// Weak until, `a W b == b R (a | b)`.
inline Formula weak_until(const Formula& a, const Formula& b) {
  return Formula::release(b, Formula::disj({a, b}));
}

/// The obligation left to an update system after the initial system
/// produced `eta`: strip(af(phi, eta)).
inline Formula evolve(std::span<const Letter> eta, const Formula& phi) {
  return strip(af_word(phi, eta));
}

/// Encodes a finite word as an LTL formula fixing every declared
/// proposition at each position.
inline Formula trace_formula(std::span<const Letter> eta, std::span<const PropId> aps) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    std::vector<Formula> lits;
    for (PropId p : aps)
      lits.push_back(eta[i].contains(p) ? Formula::atom(p) : Formula::neg_atom(p));
    parts.push_back(Formula::next_n(Formula::conj(lits), i));
  }
  return Formula::conj(parts);
}

namespace detail {
inline Formula unroll_rec(const Formula& f, std::size_t k,
                          std::map<std::pair<std::size_t, std::size_t>, Formula>& memo) {
  using F = Formula;
  if (k == 0)
    return strip(f);
  auto key = std::make_pair(f.id(), k);
  if (auto it = memo.find(key); it != memo.end())
    return it->second;
  F r;
  switch (f.op()) {
  case Op::Next:
    r = F::next(unroll_rec(f.child(0), k - 1, memo));
    break;
  case Op::Until:
    r = F::disj({unroll_rec(f.rhs(), k, memo),
                 F::conj({unroll_rec(f.lhs(), k, memo), F::next(unroll_rec(f, k - 1, memo))})});
    break;
  case Op::Release: {
    F b = unroll_rec(f.rhs(), k, memo);
    r = F::disj({F::conj({unroll_rec(f.lhs(), k, memo), b}),
                 F::conj({b, F::next(unroll_rec(f, k - 1, memo))})});
    break;
  }
  default:
    r = rebuild(f, [&](const F& g) { return unroll_rec(g, k, memo); });
  }
  memo.emplace(key, r);
  return r;
}
}  // namespace detail

/// Initial satisfaction with horizon n as plain LTL: every release and
/// until is unrolled up to absolute position n, releases from n on become
/// true. Counts positions rather than expansion passes, so operators under
/// an X get fewer unrollings. On next-free formulas this is
/// strip(expand_n(f, n)).
inline Formula unroll_initial(const Formula& f, std::size_t n) {
  std::map<std::pair<std::size_t, std::size_t>, Formula> memo;
  return detail::unroll_rec(f, n, memo);
}

/// Plain LTL formula whose language is Words(phi, psi, eta):
/// X^|eta| psi  &&  unroll_initial(phi, |eta|)  &&  LTL(eta).
inline Formula liveltl_to_ltl(const Formula& phi, const Formula& psi,
                              std::span<const Letter> eta, std::span<const PropId> aps) {
  return Formula::conj({Formula::next_n(psi, eta.size()), unroll_initial(phi, eta.size()),
                        trace_formula(eta, aps)});
}

}  // namespace livesynth
