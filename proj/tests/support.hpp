#pragma once

// Generators and a brute-force reference evaluator shared by the suites.
// The evaluator walks the lasso directly and does not use the library's
// fixpoint evaluator.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "livesynth/livesynth.hpp"

namespace testing_support {

using namespace livesynth;

inline std::vector<PropId> props(std::initializer_list<const char*> names) {
  std::vector<PropId> out;
  for (auto n : names)
    out.push_back(PropRegistry::intern(n));
  return out;
}

inline Formula parse(std::string_view text) { return parse_formula(text); }

inline FiniteTrace trace(std::initializer_list<std::initializer_list<const char*>> letters) {
  FiniteTrace t;
  for (auto& l : letters) {
    Letter x;
    for (auto n : l)
      x.insert(PropRegistry::intern(n));
    t.push_back(x);
  }
  return t;
}

// ------------------------------------------------------------------ oracle

/// Reference satisfaction on a lasso. With `bound`, releases at indices
/// >= bound are true and below it only quantify over indices < bound.
class Oracle {
public:
  explicit Oracle(const LassoTrace& w, std::optional<std::size_t> bound = std::nullopt)
      : w_(bound ? w.unrolled(*bound) : w), bound_(bound) {}

  bool holds(std::size_t i, const Formula& f) {
    i = w_.normalize(i);
    auto key = std::make_pair(i, f.id());
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    bool v = compute(i, f);
    memo_[key] = v;
    return v;
  }

private:
  bool compute(std::size_t i, const Formula& f) {
    const std::size_t horizon = w_.positions();
    switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return w_.at(i).contains(f.prop());
    case Op::NegAtom:
      return !w_.at(i).contains(f.prop());
    case Op::And:
      for (auto& c : f.children())
        if (!holds(i, c))
          return false;
      return true;
    case Op::Or:
      for (auto& c : f.children())
        if (holds(i, c))
          return true;
      return false;
    case Op::Next:
      return holds(i + 1, f.child(0));
    case Op::Until:
      for (std::size_t j = i; j < i + horizon; ++j) {
        if (holds(j, f.rhs()))
          return true;
        if (!holds(j, f.lhs()))
          return false;
      }
      return false;
    case Op::Release: {
      std::size_t end = i + horizon;
      if (bound_) {
        if (i >= *bound_)
          return true;
        end = *bound_;
      }
      for (std::size_t j = i; j < end; ++j) {
        if (!holds(j, f.rhs()))
          return false;
        if (holds(j, f.lhs()))
          return true;
      }
      return true;
    }
    }
    return false;
  }

  LassoTrace w_;
  std::optional<std::size_t> bound_;
  std::map<std::pair<std::size_t, std::size_t>, bool> memo_;
};

inline bool ref_ltl(const LassoTrace& w, const Formula& f, std::size_t i = 0) {
  return Oracle(w).holds(i, f);
}

inline bool ref_initial(std::size_t eta_len, const LassoTrace& w, const Formula& f) {
  return Oracle(w, eta_len).holds(0, f);
}

inline bool ref_words(const Formula& phi, const Formula& psi, const FiniteTrace& eta,
                      const LassoTrace& sigma) {
  LassoTrace w = sigma.after(eta);
  return ref_initial(eta.size(), w, phi) && ref_ltl(w, psi, eta.size());
}

// -------------------------------------------------------------- generators

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  Letter letter(const std::vector<PropId>& aps) {
    Letter l;
    for (PropId p : aps)
      if (coin())
        l.insert(p);
    return l;
  }

  FiniteTrace word(const std::vector<PropId>& aps, std::size_t len) {
    FiniteTrace t;
    for (std::size_t i = 0; i < len; ++i)
      t.push_back(letter(aps));
    return t;
  }

  LassoTrace lasso(const std::vector<PropId>& aps, std::size_t max_prefix = 3,
                   std::size_t max_loop = 3) {
    auto p = word(aps, below(max_prefix + 1));
    auto l = word(aps, 1 + below(max_loop));
    return LassoTrace(p, l);
  }

  Formula formula(const std::vector<PropId>& aps, std::size_t depth) {
    if (depth == 0 || coin(0.2)) {
      std::size_t k = below(aps.size() * 2 + 2);
      if (k == aps.size() * 2)
        return Formula::tt();
      if (k == aps.size() * 2 + 1)
        return Formula::ff();
      return k % 2 ? Formula::neg_atom(aps[k / 2]) : Formula::atom(aps[k / 2]);
    }
    switch (below(8)) {
    case 0:
      return Formula::conj({formula(aps, depth - 1), formula(aps, depth - 1)});
    case 1:
      return Formula::disj({formula(aps, depth - 1), formula(aps, depth - 1)});
    case 2:
      return Formula::next(formula(aps, depth - 1));
    case 3:
      return Formula::until(formula(aps, depth - 1), formula(aps, depth - 1));
    case 4:
      return Formula::release(formula(aps, depth - 1), formula(aps, depth - 1));
    case 5:
      return Formula::eventually(formula(aps, depth - 1));
    case 6:
      return Formula::globally(formula(aps, depth - 1));
    default:
      return Formula::conj({formula(aps, depth - 1), Formula::globally(formula(aps, depth - 1))});
    }
  }

  /// Total machine with random outputs and successors.
  MooreMachine machine(const ApTable& aps, std::size_t max_states) {
    std::size_t n = 1 + below(max_states);
    MooreMachine m(aps);
    for (std::size_t s = 0; s < n; ++s) {
      Letter out;
      for (PropId p : aps.outputs())
        if (coin())
          out.insert(p);
      m.add_state("s" + std::to_string(s), out);
    }
    for (std::size_t s = 0; s < n; ++s)
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << aps.inputs().size()); ++i)
        m.add_edge(s, Cube::minterm(aps.input_letter(i), aps.inputs()), below(n));
    m.compact();
    return m;
  }

  std::mt19937_64& rng() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
