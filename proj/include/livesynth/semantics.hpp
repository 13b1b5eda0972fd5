#pragma once

// Exact LTL evaluation on ultimately periodic words.
//
// A lasso prefix·loop^ω has finitely many distinct positions; the successor
// of the last loop position is the loop start. Each subformula is evaluated
// on all positions at once: until as a least and release as a greatest
// fixpoint of its one-step unfolding.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "livesynth/formula.hpp"
#include "livesynth/rewrite.hpp"

namespace livesynth {

class LassoTrace {
public:
  LassoTrace(FiniteTrace prefix, FiniteTrace loop)
      : prefix_(std::move(prefix)), loop_(std::move(loop)) {
    if (loop_.empty())
      throw Error("lasso loop must be non-empty");
  }

  const FiniteTrace& prefix() const { return prefix_; }
  const FiniteTrace& loop() const { return loop_; }

  /// Number of distinct positions.
  std::size_t positions() const { return prefix_.size() + loop_.size(); }

  /// Maps any index of the infinite word to its representative position.
  std::size_t normalize(std::size_t i) const {
    if (i < positions())
      return i;
    return prefix_.size() + (i - prefix_.size()) % loop_.size();
  }

  std::size_t successor(std::size_t pos) const {
    return pos + 1 < positions() ? pos + 1 : prefix_.size();
  }

  const Letter& at(std::size_t i) const {
    std::size_t p = normalize(i);
    return p < prefix_.size() ? prefix_[p] : loop_[p - prefix_.size()];
  }

  /// The first n letters.
  FiniteTrace take(std::size_t n) const {
    FiniteTrace out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(at(i));
    return out;
  }

  /// Same word, with the loop unrolled until the prefix has at least
  /// `min_prefix` letters.
  LassoTrace unrolled(std::size_t min_prefix) const {
    if (prefix_.size() >= min_prefix)
      return *this;
    FiniteTrace p = take(min_prefix);
    FiniteTrace l;
    for (std::size_t i = 0; i < loop_.size(); ++i)
      l.push_back(at(min_prefix + i));
    return LassoTrace(std::move(p), std::move(l));
  }

  /// The suffix starting at index n.
  LassoTrace suffix(std::size_t n) const {
    LassoTrace u = unrolled(n);
    FiniteTrace p(u.prefix_.begin() + static_cast<std::ptrdiff_t>(n), u.prefix_.end());
    return LassoTrace(std::move(p), u.loop_);
  }

  /// eta · this
  LassoTrace after(std::span<const Letter> eta) const {
    FiniteTrace p(eta.begin(), eta.end());
    p.insert(p.end(), prefix_.begin(), prefix_.end());
    return LassoTrace(std::move(p), loop_);
  }

  friend bool operator==(const LassoTrace&, const LassoTrace&) = default;

  std::string str() const {
    std::string s;
    for (auto& l : prefix_)
      s += l.str();
    s += " (";
    for (auto& l : loop_)
      s += l.str();
    return s + ")^w";
  }

private:
  FiniteTrace prefix_;
  FiniteTrace loop_;
};

namespace detail {

// Truth value of `f` at every position of `w`. If `release_bound` is set,
// release is evaluated in the bounded reading used for initial systems:
// true at every index >= bound, and below the bound its unfolding bottoms
// out in `true` at the bound. `w` must then have a prefix of at least
// `release_bound` letters.
class LassoEvaluator {
public:
  LassoEvaluator(const LassoTrace& w, std::optional<std::size_t> release_bound)
      : w_(w), bound_(release_bound) {}

  const std::vector<char>& values(const Formula& f) {
    if (auto it = memo_.find(f); it != memo_.end())
      return it->second;
    for (const Formula& g : subformulas(f))
      if (!memo_.count(g))
        memo_.emplace(g, compute(g));
    return memo_.at(f);
  }

private:
  std::vector<char> compute(const Formula& f) {
    const std::size_t n = w_.positions();
    std::vector<char> v(n, 0);
    switch (f.op()) {
    case Op::True:
      v.assign(n, 1);
      break;
    case Op::False:
      break;
    case Op::Atom:
    case Op::NegAtom:
      for (std::size_t j = 0; j < n; ++j)
        v[j] = w_.at(j).contains(f.prop()) == (f.op() == Op::Atom);
      break;
    case Op::And:
    case Op::Or: {
      bool is_and = f.op() == Op::And;
      v.assign(n, is_and ? 1 : 0);
      for (auto& k : f.children()) {
        auto& kv = memo_.at(k);
        for (std::size_t j = 0; j < n; ++j)
          v[j] = is_and ? (v[j] && kv[j]) : (v[j] || kv[j]);
      }
      break;
    }
    case Op::Next: {
      auto& kv = memo_.at(f.child(0));
      for (std::size_t j = 0; j < n; ++j)
        v[j] = kv[w_.successor(j)];
      break;
    }
    case Op::Until:
      v = fixpoint(memo_.at(f.lhs()), memo_.at(f.rhs()), false);
      break;
    case Op::Release:
      if (bound_)
        v = bounded_release(memo_.at(f.lhs()), memo_.at(f.rhs()));
      else
        v = fixpoint(memo_.at(f.lhs()), memo_.at(f.rhs()), true);
      break;
    }
    return v;
  }

  // until:   v = r | (l & v')   least
  // release: v = r & (l | v')   greatest
  std::vector<char> fixpoint(const std::vector<char>& l, const std::vector<char>& r,
                             bool greatest) {
    const std::size_t n = w_.positions();
    std::vector<char> v(n, greatest ? 1 : 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t j = n; j-- > 0;) {
        char nv = greatest ? (r[j] && (l[j] || v[w_.successor(j)]))
                           : (r[j] || (l[j] && v[w_.successor(j)]));
        if (nv != v[j]) {
          v[j] = nv;
          changed = true;
        }
      }
    }
    return v;
  }

  std::vector<char> bounded_release(const std::vector<char>& l, const std::vector<char>& r) {
    const std::size_t n = w_.positions();
    const std::size_t b = *bound_;
    std::vector<char> v(n, 1);
    for (std::size_t j = b; j-- > 0;) {
      char next = j + 1 < b ? v[j + 1] : 1;
      v[j] = r[j] && (l[j] || next);
    }
    return v;
  }

  const LassoTrace& w_;
  std::optional<std::size_t> bound_;
  FormulaMap<std::vector<char>> memo_;
};

}  // namespace detail

/// sigma, i |= f
inline bool eval_ltl(const LassoTrace& sigma, std::size_t i, const Formula& f) {
  detail::LassoEvaluator ev(sigma, std::nullopt);
  return ev.values(f)[sigma.normalize(i)];
}

/// Initial-system satisfaction: as `eval_ltl`, except that releases only
/// constrain indices below `eta_len`.
inline bool eval_initial(std::size_t eta_len, const LassoTrace& sigma, std::size_t i,
                         const Formula& f) {
  LassoTrace w = sigma.unrolled(eta_len);
  detail::LassoEvaluator ev(w, eta_len);
  return ev.values(f)[w.normalize(i)];
}

/// Update-system satisfaction: `f` evaluated from index i + eta_len.
inline bool eval_update(std::size_t eta_len, const LassoTrace& sigma, std::size_t i,
                        const Formula& f) {
  return eval_ltl(sigma, i + eta_len, f);
}

/// eta·sigma ∈ Words(phi, psi, eta)
inline bool words_membership(const Formula& phi, const Formula& psi,
                             std::span<const Letter> eta, const LassoTrace& sigma) {
  LassoTrace w = sigma.after(eta);
  return eval_initial(eta.size(), w, 0, phi) && eval_update(eta.size(), w, 0, psi);
}

}  // namespace livesynth
