#pragma once

// LTL to Büchi translation, products with machines, and emptiness.
//
// Automaton states are sets of formulas read conjunctively. The successor
// terms of a state are computed symbolically: each term is a guard cube, the
// set of formulas that must hold from the next position on, and the set of
// untils that were postponed rather than fulfilled. Generalized acceptance
// (one set per until) is then degeneralized with a counter.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "livesynth/formula.hpp"
#include "livesynth/machine.hpp"
#include "livesynth/rewrite.hpp"
#include "livesynth/semantics.hpp"

namespace livesynth {

class BuchiAutomaton {
public:
  struct Edge {
    Cube guard;
    std::size_t target;
  };

  BuchiAutomaton() = default;
  explicit BuchiAutomaton(std::vector<PropId> aps) : aps_(std::move(aps)) {}

  std::size_t add_state(std::string name, bool accepting) {
    names_.push_back(std::move(name));
    accepting_.push_back(accepting);
    edges_.emplace_back();
    return names_.size() - 1;
  }
  void add_initial(std::size_t s) { initial_.push_back(s); }
  void add_edge(std::size_t from, Cube guard, std::size_t to) {
    edges_.at(from).push_back({std::move(guard), to});
  }

  const std::vector<PropId>& aps() const { return aps_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::size_t>& initial() const { return initial_; }
  const std::vector<Edge>& edges(std::size_t s) const { return edges_.at(s); }
  bool accepting(std::size_t s) const { return accepting_.at(s); }
  const std::string& name(std::size_t s) const { return names_.at(s); }
  std::size_t num_edges() const {
    std::size_t n = 0;
    for (auto& e : edges_)
      n += e.size();
    return n;
  }

private:
  std::vector<PropId> aps_;
  std::vector<std::string> names_;
  std::vector<char> accepting_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::size_t> initial_;
};

namespace detail {

inline std::optional<Cube> conjoin(const Cube& a, const Cube& b) {
  auto lits = a.literals();
  for (auto& l : b.literals()) {
    auto it = std::find_if(lits.begin(), lits.end(),
                           [&](const CubeLiteral& x) { return x.prop == l.prop; });
    if (it == lits.end())
      lits.push_back(l);
    else if (it->positive != l.positive)
      return std::nullopt;
  }
  return Cube(std::move(lits));
}

inline bool cube_implies(const Cube& stronger, const Cube& weaker) {
  auto& s = stronger.literals();
  return std::all_of(weaker.literals().begin(), weaker.literals().end(), [&](auto& l) {
    return std::find(s.begin(), s.end(), l) != s.end();
  });
}

inline bool sorted_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::vector<std::size_t> sorted_union(const std::vector<std::size_t>& a,
                                             const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class Translator {
public:
  explicit Translator(const Formula& f) : root_(f) {
    for (auto& g : subformulas(f))
      if (g.op() == Op::Until)
        until_index_.emplace(g, until_index_.size());
  }

  BuchiAutomaton build() {
    BuchiAutomaton a(props_of(root_));
    const std::size_t k = until_index_.size();
    std::vector<std::size_t> init;
    if (!add_conjunct(root_, init))
      return empty_automaton(a);

    std::map<std::pair<std::vector<std::size_t>, std::size_t>, std::size_t> index;
    std::deque<std::pair<std::vector<std::size_t>, std::size_t>> queue;
    auto intern = [&](const std::vector<std::size_t>& set, std::size_t counter) {
      auto key = std::make_pair(set, counter);
      if (auto it = index.find(key); it != index.end())
        return it->second;
      std::size_t id = a.add_state(state_name(set, counter), counter == k);
      index.emplace(key, id);
      queue.push_back(key);
      return id;
    };
    a.add_initial(intern(init, 0));
    while (!queue.empty()) {
      auto [set, counter] = queue.front();
      queue.pop_front();
      std::size_t from = index.at({set, counter});
      std::size_t base = counter == k ? 0 : counter;
      for (auto& t : state_terms(set)) {
        std::size_t j = base;
        while (j < k && !std::binary_search(t.pending.begin(), t.pending.end(), j))
          ++j;
        a.add_edge(from, t.guard, intern(t.next, j));
      }
    }
    return a;
  }

private:
  struct Term {
    Cube guard;
    std::vector<std::size_t> next;     // formula ids, sorted
    std::vector<std::size_t> pending;  // until indices, sorted
  };

  static BuchiAutomaton empty_automaton(BuchiAutomaton& a) {
    a.add_initial(a.add_state("false", false));
    return a;
  }

  std::string state_name(const std::vector<std::size_t>& set, std::size_t counter) const {
    std::string s = "{";
    for (std::size_t i = 0; i < set.size(); ++i)
      s += (i ? ", " : "") + formulas_.at(set[i]).str();
    s += "}";
    if (!until_index_.empty())
      s += "#" + std::to_string(counter);
    return s;
  }

  // Adds g to a conjunctive set; false makes the set unsatisfiable.
  bool add_conjunct(const Formula& g, std::vector<std::size_t>& set) {
    if (g.is_true())
      return true;
    if (g.is_false())
      return false;
    if (g.op() == Op::And) {
      for (auto& c : g.children())
        if (!add_conjunct(c, set))
          return false;
      return true;
    }
    formulas_.emplace(g.id(), g);
    auto it = std::lower_bound(set.begin(), set.end(), g.id());
    if (it == set.end() || *it != g.id())
      set.insert(it, g.id());
    return true;
  }

  std::vector<Term> product(const std::vector<Term>& a, const std::vector<Term>& b) {
    std::vector<Term> out;
    for (auto& x : a)
      for (auto& y : b)
        if (auto c = conjoin(x.guard, y.guard))
          out.push_back({*c, sorted_union(x.next, y.next), sorted_union(x.pending, y.pending)});
    return prune(std::move(out));
  }

  static std::vector<Term> prune(std::vector<Term> ts) {
    std::vector<Term> out;
    std::sort(ts.begin(), ts.end(), [](const Term& x, const Term& y) {
      return x.guard.literals().size() + x.next.size() + x.pending.size() <
             y.guard.literals().size() + y.next.size() + y.pending.size();
    });
    for (auto& t : ts) {
      bool subsumed = std::any_of(out.begin(), out.end(), [&](const Term& o) {
        return cube_implies(t.guard, o.guard) && sorted_subset(o.next, t.next) &&
               sorted_subset(o.pending, t.pending);
      });
      if (!subsumed)
        out.push_back(std::move(t));
    }
    return out;
  }

  // g is an until or release, hence never a constant
  Term next_term(const Formula& g, std::optional<std::size_t> pending) {
    Term t;
    add_conjunct(g, t.next);
    if (pending)
      t.pending.push_back(*pending);
    return t;
  }

  const std::vector<Term>& delta(const Formula& f) {
    if (auto it = memo_.find(f); it != memo_.end())
      return it->second;
    std::vector<Term> r;
    switch (f.op()) {
    case Op::True:
      r.push_back({});
      break;
    case Op::False:
      break;
    case Op::Atom:
    case Op::NegAtom:
      r.push_back({Cube({{f.prop(), f.op() == Op::Atom}}), {}, {}});
      break;
    case Op::And: {
      r.push_back({});
      for (auto& c : f.children())
        r = product(r, delta(c));
      break;
    }
    case Op::Or:
      for (auto& c : f.children()) {
        auto& d = delta(c);
        r.insert(r.end(), d.begin(), d.end());
      }
      r = prune(std::move(r));
      break;
    case Op::Next: {
      Term t;
      if (add_conjunct(f.child(0), t.next))
        r.push_back(std::move(t));
      break;
    }
    case Op::Until: {
      r = delta(f.rhs());
      Term stay = next_term(f, until_index_.at(f));
      auto loop = product(delta(f.lhs()), {stay});
      r.insert(r.end(), loop.begin(), loop.end());
      r = prune(std::move(r));
      break;
    }
    case Op::Release: {
      r = product(delta(f.lhs()), delta(f.rhs()));
      auto loop = product(delta(f.rhs()), {next_term(f, std::nullopt)});
      r.insert(r.end(), loop.begin(), loop.end());
      r = prune(std::move(r));
      break;
    }
    }
    return memo_.emplace(f, std::move(r)).first->second;
  }

  std::vector<Term> state_terms(const std::vector<std::size_t>& set) {
    std::vector<Term> r{Term{}};
    for (std::size_t id : set)
      r = product(r, delta(formulas_.at(id)));
    return r;
  }

  Formula root_;
  FormulaMap<std::size_t> until_index_;
  FormulaMap<std::vector<Term>> memo_;
  std::unordered_map<std::size_t, Formula> formulas_;
};

}  // namespace detail

/// Büchi automaton accepting exactly the words satisfying `f`.
inline BuchiAutomaton ltl_to_nba(const Formula& f) {
  return detail::Translator(f).build();
}

/// HOA v1 rendering.
inline std::string to_hoa(const BuchiAutomaton& a, std::string_view name = "nba") {
  std::ostringstream os;
  os << "HOA: v1\nname: \"" << name << "\"\nStates: " << a.size() << "\n";
  for (auto s : a.initial())
    os << "Start: " << s << "\n";
  os << "AP: " << a.aps().size();
  for (PropId p : a.aps())
    os << " \"" << PropRegistry::name(p) << "\"";
  os << "\nacc-name: Buchi\nAcceptance: 1 Inf(0)\nproperties: trans-labels explicit-labels "
        "state-acc\n--BODY--\n";
  auto ap_pos = [&](PropId p) {
    return std::find(a.aps().begin(), a.aps().end(), p) - a.aps().begin();
  };
  for (std::size_t s = 0; s < a.size(); ++s) {
    os << "State: " << s << " \"" << a.name(s) << "\"" << (a.accepting(s) ? " {0}" : "")
       << "\n";
    for (auto& e : a.edges(s)) {
      os << "  [";
      if (e.guard.is_true())
        os << "t";
      for (std::size_t i = 0; i < e.guard.literals().size(); ++i) {
        auto& l = e.guard.literals()[i];
        os << (i ? "&" : "") << (l.positive ? "" : "!") << ap_pos(l.prop);
      }
      os << "] " << e.target << "\n";
    }
  }
  os << "--END--\n";
  return os.str();
}

/// An explicit graph whose edges carry letters. Machines and environment
/// models are turned into this form before the product.
struct LetterGraph {
  std::vector<std::size_t> initial;
  std::vector<std::vector<std::pair<Letter, std::size_t>>> succ;
};

inline LetterGraph letter_graph(const MooreMachine& m) {
  LetterGraph g;
  g.initial.push_back(m.initial());
  g.succ.resize(m.size());
  auto ins = m.input_letters();
  for (StateId s = 0; s < m.size(); ++s)
    for (const Letter& in : ins)
      if (auto t = m.successor(s, in))
        g.succ[s].emplace_back(m.letter(s, in), *t);
  return g;
}

/// Accepting lasso of a graph, with the graph node at every position.
struct Counterexample {
  LassoTrace lasso;
  std::vector<std::size_t> prefix_states;
  std::vector<std::size_t> cycle_states;
};

namespace detail {

// Finds a reachable accepting node on a cycle; shortest prefix to the
// closest such node, then the shortest cycle through it.
struct LassoSearch {
  std::vector<std::size_t> initial;
  std::vector<std::vector<std::pair<Letter, std::size_t>>> succ;
  std::vector<char> accepting;

  struct Path {
    std::vector<std::size_t> nodes;  // nodes[i] emits letters[i]
    FiniteTrace letters;
  };

  std::optional<std::pair<Path, Path>> run() const {
    auto on_cycle = nontrivial_scc_nodes();
    Tree pre = bfs(initial);
    std::optional<std::size_t> target;
    for (auto v : pre.order)
      if (accepting[v] && on_cycle[v]) {
        target = v;
        break;
      }
    if (!target)
      return std::nullopt;
    Path prefix = path(pre, *target);
    prefix.nodes.pop_back();  // the target opens the loop

    Tree cyc = bfs({*target});
    for (auto v : cyc.order)
      for (std::size_t e = 0; e < succ[v].size(); ++e)
        if (succ[v][e].second == *target) {
          Path loop = path(cyc, v);
          loop.letters.push_back(succ[v][e].first);
          return std::make_pair(std::move(prefix), std::move(loop));
        }
    return std::nullopt;
  }

private:
  struct Tree {
    std::vector<std::size_t> order;  // BFS visiting order
    std::vector<std::size_t> parent, parent_edge;
  };

  Tree bfs(const std::vector<std::size_t>& roots) const {
    Tree t;
    t.parent.assign(succ.size(), SIZE_MAX);
    t.parent_edge.assign(succ.size(), SIZE_MAX);
    std::vector<char> seen(succ.size(), 0);
    for (auto r : roots)
      if (!seen[r]) {
        seen[r] = 1;
        t.order.push_back(r);
      }
    for (std::size_t i = 0; i < t.order.size(); ++i) {
      auto v = t.order[i];
      for (std::size_t e = 0; e < succ[v].size(); ++e) {
        auto w = succ[v][e].second;
        if (!seen[w]) {
          seen[w] = 1;
          t.parent[w] = v;
          t.parent_edge[w] = e;
          t.order.push_back(w);
        }
      }
    }
    return t;
  }

  // Tree path from a root to v: all nodes including v, and the letters of
  // the edges between them.
  Path path(const Tree& t, std::size_t v) const {
    Path p;
    for (std::size_t cur = v; cur != SIZE_MAX; cur = t.parent[cur])
      p.nodes.push_back(cur);
    std::reverse(p.nodes.begin(), p.nodes.end());
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i)
      p.letters.push_back(succ[p.nodes[i]][t.parent_edge[p.nodes[i + 1]]].first);
    return p;
  }

  std::vector<char> nontrivial_scc_nodes() const {
    const std::size_t n = succ.size();
    std::vector<std::size_t> idx(n, SIZE_MAX), low(n, 0), comp(n, SIZE_MAX);
    std::vector<char> on_stack(n, 0), result(n, 0);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    struct Frame {
      std::size_t v, e;
    };
    for (std::size_t root = 0; root < n; ++root) {
      if (idx[root] != SIZE_MAX)
        continue;
      std::vector<Frame> call{{root, 0}};
      idx[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = 1;
      while (!call.empty()) {
        auto& fr = call.back();
        if (fr.e < succ[fr.v].size()) {
          auto w = succ[fr.v][fr.e++].second;
          if (idx[w] == SIZE_MAX) {
            idx[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = 1;
            call.push_back({w, 0});
          } else if (on_stack[w]) {
            low[fr.v] = std::min(low[fr.v], idx[w]);
          }
          continue;
        }
        std::size_t v = fr.v;
        call.pop_back();
        if (!call.empty())
          low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == idx[v]) {
          std::vector<std::size_t> members;
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            members.push_back(w);
          } while (w != v);
          bool nontrivial = members.size() > 1;
          if (!nontrivial)
            for (auto& [l, t] : succ[v])
              if (t == v)
                nontrivial = true;
          if (nontrivial)
            for (auto m : members)
              result[m] = 1;
        }
      }
    }
    return result;
  }
};

}  // namespace detail

/// A word accepted by `a`, or nullopt if its language is empty. Each edge
/// guard is instantiated by its positive literals.
inline std::optional<LassoTrace> nba_emptiness(const BuchiAutomaton& a) {
  detail::LassoSearch s;
  s.initial = a.initial();
  s.succ.resize(a.size());
  s.accepting.resize(a.size());
  for (std::size_t v = 0; v < a.size(); ++v) {
    s.accepting[v] = a.accepting(v);
    for (auto& e : a.edges(v)) {
      Letter l;
      for (auto& lit : e.guard.literals())
        if (lit.positive)
          l.insert(lit.prop);
      s.succ[v].emplace_back(l, e.target);
    }
  }
  auto r = s.run();
  if (!r)
    return std::nullopt;
  return LassoTrace(r->first.letters, r->second.letters);
}

/// An accepting run of `a` over a path of `g`, or nullopt if none exists.
/// Graph nodes of the witness are reported per position.
inline std::optional<Counterexample> product_lasso(const LetterGraph& g, const BuchiAutomaton& a) {
  detail::LassoSearch s;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> nodes;
  std::deque<std::size_t> queue;
  auto intern = [&](std::size_t q, std::size_t b) {
    auto [it, fresh] = index.emplace(std::make_pair(q, b), nodes.size());
    if (fresh) {
      nodes.emplace_back(q, b);
      s.succ.emplace_back();
      s.accepting.push_back(a.accepting(b));
      queue.push_back(it->second);
    }
    return it->second;
  };
  for (auto q : g.initial)
    for (auto b : a.initial())
      s.initial.push_back(intern(q, b));
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    auto [q, b] = nodes[v];
    for (auto& [letter, q2] : g.succ[q])
      for (auto& e : a.edges(b))
        if (e.guard.matches(letter)) {
          auto w = intern(q2, e.target);
          s.succ[v].emplace_back(letter, w);
        }
  }
  auto r = s.run();
  if (!r)
    return std::nullopt;
  Counterexample c{LassoTrace(r->first.letters, r->second.letters), {}, {}};
  for (auto v : r->first.nodes)
    c.prefix_states.push_back(nodes[v].first);
  for (auto v : r->second.nodes)
    c.cycle_states.push_back(nodes[v].first);
  return c;
}

/// Outcome of a check; failures carry a replayable witness.
struct Verdict {
  bool pass = true;
  std::optional<Counterexample> witness;
  std::optional<Formula> failing_obligation;

  static Verdict ok() { return {}; }
  static Verdict fail(Counterexample c) { return {false, std::move(c), std::nullopt}; }
};

/// Traces(g) ⊆ Words(f)?
inline Verdict check_graph(const LetterGraph& g, const Formula& f) {
  auto cex = product_lasso(g, ltl_to_nba(negate(f)));
  return cex ? Verdict::fail(std::move(*cex)) : Verdict::ok();
}

/// Traces(m) ⊆ Words(f)?
inline Verdict mc_ltl(const MooreMachine& m, const Formula& f) {
  return check_graph(letter_graph(m), f);
}

/// Whether the automaton accepts the lasso (product with a lasso-shaped graph).
inline bool nba_accepts(const BuchiAutomaton& a, const LassoTrace& w) {
  LetterGraph g;
  g.initial.push_back(0);
  g.succ.resize(w.positions());
  for (std::size_t i = 0; i < w.positions(); ++i)
    g.succ[i].emplace_back(w.at(i), w.successor(i));
  return product_lasso(g, a).has_value();
}

}  // namespace livesynth
