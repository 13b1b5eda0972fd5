#pragma once

// Deterministic obligation monitors.
//
// States are derivatives of the initial formula, brought into a reduced
// disjunctive form over literals and temporal subformulas and compared by
// canonical key. Plain junction simplification does not bound the closure
// (derivatives of `(G b) R (F a)` nest forever); terms of the reduced form
// are subsets of a finite atom set, so this one does. The label of a state
// is its stripped form, i.e. the obligation an update would inherit at that
// point. Two step functions are offered:
//
//   Exact        the `af` derivative. Labels are equivalent to `evolve`.
//   MooreOffset  `af_deferred`, where release-raised obligations start one
//                step later. This is the layout used when drawing a monitor
//                next to a Moore machine, whose edges already commit to the
//                current letter.

#include <algorithm>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "livesynth/formula.hpp"
#include "livesynth/machine.hpp"
#include "livesynth/rewrite.hpp"

namespace livesynth {

enum class StepMode { Exact, MooreOffset };

class MonitorBudgetExceeded : public Error {
public:
  MonitorBudgetExceeded(std::size_t budget, std::size_t frontier)
      : Error("monitor exceeds " + std::to_string(budget) + " states (frontier " +
              std::to_string(frontier) + ")"),
        frontier_(frontier) {}
  std::size_t frontier() const { return frontier_; }

private:
  std::size_t frontier_;
};

struct MonitorOptions {
  StepMode mode = StepMode::Exact;
  std::size_t max_states = 100000;
};

namespace detail {

using Term = std::vector<Formula>;  // sorted conjunction of atoms

inline bool complementary(const Formula& a, const Formula& b) {
  return a.prop() == b.prop() &&
         ((a.op() == Op::Atom && b.op() == Op::NegAtom) ||
          (a.op() == Op::NegAtom && b.op() == Op::Atom));
}

// Drops duplicate terms and terms that contain another term.
inline void absorb(std::vector<Term>& ts) {
  std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<Term> kept;
  for (auto& t : ts)
    if (std::none_of(kept.begin(), kept.end(), [&](const Term& k) {
          return std::includes(t.begin(), t.end(), k.begin(), k.end());
        }))
      kept.push_back(std::move(t));
  ts = std::move(kept);
}

// nullopt once an intermediate set exceeds max_terms.
inline std::optional<std::vector<Term>> dnf_terms(const Formula& f, std::size_t max_terms) {
  switch (f.op()) {
  case Op::True:
    return std::vector<Term>{Term{}};
  case Op::False:
    return std::vector<Term>{};
  case Op::Or: {
    std::vector<Term> out;
    for (auto& c : f.children()) {
      auto ts = dnf_terms(c, max_terms);
      if (!ts)
        return std::nullopt;
      out.insert(out.end(), ts->begin(), ts->end());
    }
    absorb(out);
    if (out.size() > max_terms)
      return std::nullopt;
    return out;
  }
  case Op::And: {
    std::vector<Term> acc{Term{}};
    for (auto& c : f.children()) {
      auto ts = dnf_terms(c, max_terms);
      if (!ts)
        return std::nullopt;
      std::vector<Term> next;
      for (auto& a : acc)
        for (auto& b : *ts) {
          Term t;
          std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(t));
          bool clash = false;
          for (std::size_t i = 0; i + 1 < t.size() && !clash; ++i)
            for (std::size_t j = i + 1; j < t.size() && !clash; ++j)
              clash = complementary(t[i], t[j]);
          if (!clash)
            next.push_back(std::move(t));
        }
      absorb(next);
      if (next.size() > max_terms)
        return std::nullopt;
      acc = std::move(next);
    }
    return acc;
  }
  default:
    return std::vector<Term>{Term{f}};
  }
}

}  // namespace detail

/// Reduced disjunctive form of the boolean structure of `f`, with literals
/// and temporal subformulas as atoms. Returns `f` unchanged if the form
/// would exceed `max_terms` terms.
inline Formula reduced_dnf(const Formula& f, std::size_t max_terms = 4096) {
  if (f.op() != Op::And && f.op() != Op::Or)
    return f;
  auto ts = detail::dnf_terms(f, max_terms);
  if (!ts)
    return f;
  std::vector<Formula> disjuncts;
  for (auto& t : *ts)
    disjuncts.push_back(Formula::conj(std::span<const Formula>(t)));
  return Formula::disj(std::span<const Formula>(disjuncts));
}

inline Formula monitor_step(StepMode mode, const Formula& state, const Letter& letter) {
  return reduced_dnf(mode == StepMode::Exact ? af(state, letter) : af_deferred(state, letter));
}

class ObligationMonitor {
public:
  struct State {
    Formula formula;
    Formula label;
    std::optional<StateId> machine_state;  // set in cut monitors
  };
  struct Edge {
    Letter letter;  // restricted to aps()
    std::size_t target;
  };

  ObligationMonitor(Formula root, std::vector<PropId> aps, StepMode mode)
      : root_(root), aps_(std::move(aps)), mode_(mode) {}

  const Formula& root() const { return root_; }
  const std::vector<PropId>& aps() const { return aps_; }
  StepMode mode() const { return mode_; }
  bool is_cut() const { return cut_; }
  std::size_t size() const { return states_.size(); }
  std::size_t initial() const { return 0; }
  const State& state(std::size_t s) const { return states_.at(s); }
  const Formula& label(std::size_t s) const { return states_.at(s).label; }
  const std::vector<Edge>& edges(std::size_t s) const { return edges_.at(s); }

  /// Successor of `s` on `letter` (uncut monitors only).
  std::size_t step(std::size_t s, const Letter& letter) const {
    if (cut_)
      throw Error("step is defined on uncut monitors only");
    Letter l = letter.restrict_to(aps_);
    for (auto& e : edges_.at(s))
      if (e.letter == l)
        return e.target;
    throw Error("monitor has no edge for " + l.str());
  }

  std::size_t step_word(std::size_t s, std::span<const Letter> word) const {
    for (auto& l : word)
      s = step(s, l);
    return s;
  }

  /// Distinct labels in state order.
  std::vector<Formula> labels() const {
    std::vector<Formula> out;
    FormulaSet seen;
    for (auto& s : states_)
      if (seen.insert(s.label).second)
        out.push_back(s.label);
    return out;
  }

  /// Letters on which some state labeled `from` moves to a state labeled `to`.
  std::vector<Letter> letters_between(const Formula& from, const Formula& to) const {
    std::vector<Letter> out;
    for (std::size_t s = 0; s < size(); ++s)
      if (label(s) == from)
        for (auto& e : edges_[s])
          if (label(e.target) == to)
            out.push_back(e.letter);
    return out;
  }

private:
  friend ObligationMonitor build_monitor(const Formula&, const MonitorOptions&);
  friend ObligationMonitor cut_monitor(const ObligationMonitor&, const MooreMachine&,
                                       std::size_t);

  std::size_t add(State s) {
    states_.push_back(std::move(s));
    edges_.emplace_back();
    return states_.size() - 1;
  }

  Formula root_;
  std::vector<PropId> aps_;
  StepMode mode_;
  bool cut_ = false;
  std::vector<State> states_;
  std::vector<std::vector<Edge>> edges_;
};

/// Closure of the initial formula under the step function, over all
/// letters of its propositions.
inline ObligationMonitor build_monitor(const Formula& phi, const MonitorOptions& opt = {}) {
  ObligationMonitor mon(phi, props_of(phi), opt.mode);
  if (mon.aps().size() > 20)
    throw Error("too many propositions for an explicit monitor");
  std::vector<Letter> letters;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << mon.aps().size()); ++m) {
    Letter l;
    for (std::size_t i = 0; i < mon.aps().size(); ++i)
      if ((m >> i) & 1U)
        l.insert(mon.aps()[i]);
    letters.push_back(std::move(l));
  }
  FormulaMap<std::size_t> index;
  std::size_t expanded = 0;
  auto intern = [&](const Formula& f) {
    if (auto it = index.find(f); it != index.end())
      return it->second;
    if (mon.size() >= opt.max_states)
      throw MonitorBudgetExceeded(opt.max_states, mon.size() - expanded);
    std::size_t id = mon.add({f, reduced_dnf(strip(f)), std::nullopt});
    index.emplace(f, id);
    return id;
  };
  intern(reduced_dnf(phi));
  for (; expanded < mon.size(); ++expanded)
    for (const Letter& l : letters) {
      std::size_t t = intern(monitor_step(opt.mode, mon.state(expanded).formula, l));
      mon.edges_[expanded].push_back({l, t});
    }
  return mon;
}

/// Restricts the monitor to what the machine can drive it through. States
/// are (monitor state, machine state) pairs; from machine state q on input
/// in, the monitor reads o(q) ∪ in. Partial machines are allowed.
inline ObligationMonitor cut_monitor(const ObligationMonitor& mon, const MooreMachine& m,
                                     std::size_t max_states = 100000) {
  if (mon.is_cut())
    throw Error("monitor is already cut");
  for (PropId p : mon.aps())
    if (!m.aps().declared(p))
      throw Error("machine does not declare '" + PropRegistry::name(p) + "'");
  ObligationMonitor out(mon.root(), mon.aps(), mon.mode());
  out.cut_ = true;
  std::map<std::pair<std::size_t, StateId>, std::size_t> index;
  std::vector<std::pair<std::size_t, StateId>> pairs;
  auto intern = [&](std::size_t ms, StateId q) {
    auto [it, fresh] = index.emplace(std::make_pair(ms, q), pairs.size());
    if (fresh) {
      if (pairs.size() >= max_states)
        throw MonitorBudgetExceeded(max_states, pairs.size());
      pairs.emplace_back(ms, q);
      out.add({mon.state(ms).formula, mon.label(ms), q});
    }
    return it->second;
  };
  intern(mon.initial(), m.initial());
  auto ins = m.input_letters();
  for (std::size_t v = 0; v < pairs.size(); ++v) {
    auto [ms, q] = pairs[v];
    for (const Letter& in : ins) {
      auto q2 = m.successor(q, in);
      if (!q2)
        continue;
      Letter l = m.letter(q, in).restrict_to(mon.aps());
      std::size_t w = intern(mon.step(ms, l), *q2);
      auto& es = out.edges_[v];
      bool dup = std::any_of(es.begin(), es.end(),
                             [&](auto& e) { return e.target == w && e.letter == l; });
      if (!dup)
        es.push_back({l, w});
    }
  }
  return out;
}

namespace detail {

// Propositional equivalence with every temporal subformula read as an
// opaque atom. Falls back to key equality beyond 16 distinct atoms.
inline bool propositionally_equivalent(const Formula& a, const Formula& b) {
  if (a == b)
    return true;
  std::vector<Formula> atoms;
  auto collect = [&](auto&& self, const Formula& f) -> void {
    if (f.is_true() || f.is_false())
      return;
    if (f.op() == Op::And || f.op() == Op::Or) {
      for (auto& c : f.children())
        self(self, c);
      return;
    }
    Formula key = f.op() == Op::NegAtom ? Formula::atom(f.prop()) : f;
    if (std::find(atoms.begin(), atoms.end(), key) == atoms.end())
      atoms.push_back(key);
  };
  collect(collect, a);
  collect(collect, b);
  if (atoms.size() > 16)
    return false;
  auto eval = [&](auto&& self, const Formula& f, std::uint32_t v) -> bool {
    switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::And:
      for (auto& c : f.children())
        if (!self(self, c, v))
          return false;
      return true;
    case Op::Or:
      for (auto& c : f.children())
        if (self(self, c, v))
          return true;
      return false;
    case Op::NegAtom: {
      auto i = std::find(atoms.begin(), atoms.end(), Formula::atom(f.prop())) - atoms.begin();
      return !((v >> i) & 1U);
    }
    default: {
      auto i = std::find(atoms.begin(), atoms.end(), f) - atoms.begin();
      return (v >> i) & 1U;
    }
    }
  };
  for (std::uint32_t v = 0; v < (1U << atoms.size()); ++v)
    if (eval(eval, a, v) != eval(eval, b, v))
      return false;
  return true;
}

}  // namespace detail

/// Distinct obligation labels of the monitor. With `semantic_merge`,
/// propositionally equivalent labels are folded into one.
inline std::vector<Formula> reachable_obligations(const ObligationMonitor& mon,
                                                  bool semantic_merge = false) {
  auto labels = mon.labels();
  if (!semantic_merge)
    return labels;
  std::vector<Formula> out;
  for (auto& l : labels)
    if (std::none_of(out.begin(), out.end(),
                     [&](auto& o) { return detail::propositionally_equivalent(o, l); }))
      out.push_back(l);
  return out;
}

inline std::string to_dot(const ObligationMonitor& mon) {
  std::ostringstream os;
  os << "digraph monitor {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";
  os << "  init [shape=point];\n  init -> q0;\n";
  for (std::size_t s = 0; s < mon.size(); ++s) {
    std::string text = mon.label(s).is_true() ? "⊤" : mon.label(s).str();
    os << "  q" << s << " [label=\"" << text << "\"];\n";
  }
  for (std::size_t s = 0; s < mon.size(); ++s) {
    std::map<std::size_t, std::vector<Cube>> by_target;
    for (auto& e : mon.edges(s))
      by_target[e.target].push_back(Cube::minterm(e.letter, mon.aps()));
    for (auto& [t, cs] : by_target)
      for (auto& c : compact_cubes(std::move(cs)))
        os << "  q" << s << " -> q" << t << " [label=\"" << c.str() << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace livesynth
