#pragma once

// Moore machines over an input/output partition, with edges guarded by
// input cubes. Trace letter k is output(state_k) ∪ input_k.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "livesynth/ap_table.hpp"
#include "livesynth/formula.hpp"
#include "livesynth/semantics.hpp"

namespace livesynth {

struct CubeLiteral {
  PropId prop;
  bool positive;
  friend auto operator<=>(const CubeLiteral&, const CubeLiteral&) = default;
};

/// Conjunction of literals; the empty cube is `true`.
class Cube {
public:
  Cube() = default;
  explicit Cube(std::vector<CubeLiteral> lits) : lits_(std::move(lits)) {
    std::sort(lits_.begin(), lits_.end());
    lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
    for (std::size_t i = 1; i < lits_.size(); ++i)
      if (lits_[i].prop == lits_[i - 1].prop)
        throw Error("contradictory cube on '" + PropRegistry::name(lits_[i].prop) + "'");
  }

  /// The minterm over `props` that agrees with `l`.
  static Cube minterm(const Letter& l, std::span<const PropId> props) {
    std::vector<CubeLiteral> lits;
    for (PropId p : props)
      lits.push_back({p, l.contains(p)});
    return Cube(std::move(lits));
  }

  const std::vector<CubeLiteral>& literals() const { return lits_; }
  bool is_true() const { return lits_.empty(); }

  bool matches(const Letter& l) const {
    return std::all_of(lits_.begin(), lits_.end(),
                       [&](const CubeLiteral& c) { return l.contains(c.prop) == c.positive; });
  }

  /// Both cubes admit a common letter.
  bool intersects(const Cube& o) const {
    for (auto& a : lits_)
      for (auto& b : o.lits_)
        if (a.prop == b.prop && a.positive != b.positive)
          return false;
    return true;
  }

  Formula to_formula() const {
    std::vector<Formula> fs;
    for (auto& c : lits_)
      fs.push_back(c.positive ? Formula::atom(c.prop) : Formula::neg_atom(c.prop));
    return Formula::conj(fs);
  }

  /// `a & !b`, or `*` for the empty cube.
  std::string str() const {
    if (lits_.empty())
      return "*";
    std::string s;
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (i)
        s += " & ";
      s += (lits_[i].positive ? "" : "!") + PropRegistry::name(lits_[i].prop);
    }
    return s;
  }

  friend bool operator==(const Cube&, const Cube&) = default;
  friend auto operator<=>(const Cube&, const Cube&) = default;

private:
  std::vector<CubeLiteral> lits_;
};

/// a | b as a single cube, if they differ in the polarity of at most one
/// literal.
inline std::optional<Cube> merge_cubes(const Cube& a, const Cube& b) {
  auto& la = a.literals();
  auto& lb = b.literals();
  if (la.size() != lb.size())
    return std::nullopt;
  std::size_t diff = la.size();
  for (std::size_t i = 0; i < la.size(); ++i) {
    if (la[i].prop != lb[i].prop)
      return std::nullopt;
    if (la[i].positive != lb[i].positive) {
      if (diff != la.size())
        return std::nullopt;
      diff = i;
    }
  }
  if (diff == la.size())
    return a;
  auto lits = la;
  lits.erase(lits.begin() + static_cast<std::ptrdiff_t>(diff));
  return Cube(std::move(lits));
}

/// Repeatedly merges pairs via `merge_cubes`; the disjunction is preserved.
inline std::vector<Cube> compact_cubes(std::vector<Cube> cs) {
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < cs.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < cs.size() && !merged; ++j)
        if (auto c = merge_cubes(cs[i], cs[j])) {
          cs[i] = *c;
          cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
  }
  std::sort(cs.begin(), cs.end());
  return cs;
}

using StateId = std::size_t;

class MooreMachine {
public:
  struct Edge {
    Cube guard;
    StateId target;
    friend bool operator==(const Edge&, const Edge&) = default;
  };
  struct State {
    std::string name;
    Letter output;
    std::vector<Edge> edges;
    friend bool operator==(const State&, const State&) = default;
  };

  MooreMachine() = default;
  explicit MooreMachine(ApTable aps) : aps_(std::move(aps)) {}

  const ApTable& aps() const { return aps_; }
  std::size_t size() const { return states_.size(); }
  StateId initial() const { return initial_; }
  void set_initial(StateId s) { initial_ = s; }
  const State& state(StateId s) const { return states_.at(s); }
  const std::vector<State>& states() const { return states_; }

  StateId add_state(std::string name, Letter output) {
    for (PropId p : output.props())
      if (!aps_.is_output(p))
        throw Error("state '" + name + "' emits non-output '" + PropRegistry::name(p) + "'");
    for (auto& s : states_)
      if (s.name == name)
        throw Error("duplicate state id '" + name + "'");
    states_.push_back({std::move(name), std::move(output), {}});
    return states_.size() - 1;
  }

  void add_edge(StateId from, Cube guard, StateId to) {
    for (auto& c : guard.literals())
      if (!aps_.is_input(c.prop))
        throw Error("edge guard reads non-input '" + PropRegistry::name(c.prop) + "'");
    states_.at(from).edges.push_back({std::move(guard), to});
  }

  std::optional<StateId> find(std::string_view name) const {
    for (StateId i = 0; i < states_.size(); ++i)
      if (states_[i].name == name)
        return i;
    return std::nullopt;
  }

  /// Successor on the input part of `in`; nullopt if no edge matches.
  std::optional<StateId> successor(StateId s, const Letter& in) const {
    for (auto& e : states_.at(s).edges)
      if (e.guard.matches(in))
        return e.target;
    return std::nullopt;
  }

  StateId step(StateId s, const Letter& in) const {
    auto t = successor(s, in);
    if (!t)
      throw Error("no transition from '" + states_.at(s).name + "' on " + in.str());
    return *t;
  }

  Letter letter(StateId s, const Letter& in) const {
    return states_.at(s).output | in.restrict_to(aps_.inputs());
  }

  /// All input valuations in mask order.
  std::vector<Letter> input_letters() const {
    if (aps_.inputs().size() > 20)
      throw Error("too many inputs to enumerate");
    std::vector<Letter> out;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << aps_.inputs().size()); ++m)
      out.push_back(aps_.input_letter(m));
    return out;
  }

  /// Throws unless every state has exactly one matching edge per input
  /// valuation (or at most one, if `allow_partial`).
  void check(bool allow_partial = false) const {
    if (states_.empty())
      throw Error("machine has no states");
    if (initial_ >= states_.size())
      throw Error("initial state out of range");
    for (auto& s : states_) {
      for (auto& e : s.edges)
        if (e.target >= states_.size())
          throw Error("edge target out of range in state '" + s.name + "'");
      for (std::size_t i = 0; i < s.edges.size(); ++i)
        for (std::size_t j = i + 1; j < s.edges.size(); ++j)
          if (s.edges[i].guard.intersects(s.edges[j].guard))
            throw Error("overlapping edges in state '" + s.name + "': " +
                        s.edges[i].guard.str() + " and " + s.edges[j].guard.str());
      if (allow_partial)
        continue;
      for (const Letter& in : input_letters())
        if (!successor(static_cast<StateId>(&s - states_.data()), in))
          throw Error("transition function not total: state '" + s.name + "' on " + in.str());
    }
  }

  bool is_total() const {
    try {
      check(false);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  /// Merges edges to the same target whose guards differ in one literal.
  void compact() {
    for (auto& s : states_) {
      std::map<StateId, std::vector<Cube>> by_target;
      for (auto& e : s.edges)
        by_target[e.target].push_back(e.guard);
      s.edges.clear();
      for (auto& [t, cs] : by_target)
        for (auto& c : compact_cubes(std::move(cs)))
          s.edges.push_back({std::move(c), t});
      std::sort(s.edges.begin(), s.edges.end(),
                [](const Edge& a, const Edge& b) { return a.guard < b.guard; });
    }
  }

  friend bool operator==(const MooreMachine&, const MooreMachine&) = default;

private:
  ApTable aps_;
  std::vector<State> states_;
  StateId initial_ = 0;
};

/// Trace produced by feeding `inputs` from the initial state.
inline FiniteTrace run(const MooreMachine& m, std::span<const Letter> inputs) {
  FiniteTrace out;
  StateId s = m.initial();
  for (const Letter& in : inputs) {
    m.aps().check_letter(in);
    for (PropId p : in.props())
      if (!m.aps().is_input(p))
        throw Error("'" + PropRegistry::name(p) + "' is not an input");
    out.push_back(m.letter(s, in));
    s = m.step(s, in);
  }
  return out;
}

/// All traces of length at most `depth`. Partial machines simply stop.
inline std::set<FiniteTrace> fin_traces(const MooreMachine& m, std::size_t depth) {
  std::set<FiniteTrace> out;
  std::vector<std::pair<StateId, FiniteTrace>> layer{{m.initial(), {}}};
  auto ins = m.input_letters();
  for (std::size_t d = 0;; ++d) {
    for (auto& [s, t] : layer)
      out.insert(t);
    if (d == depth)
      break;
    std::vector<std::pair<StateId, FiniteTrace>> next;
    for (auto& [s, t] : layer)
      for (const Letter& in : ins)
        if (auto n = m.successor(s, in)) {
          FiniteTrace u = t;
          u.push_back(m.letter(s, in));
          next.emplace_back(*n, std::move(u));
        }
    layer = std::move(next);
  }
  return out;
}

/// The trace of `m` on the input lasso `inputs`, as a lasso.
inline LassoTrace run_lasso(const MooreMachine& m, const LassoTrace& inputs) {
  FiniteTrace prefix;
  StateId s = m.initial();
  for (const Letter& in : inputs.prefix()) {
    prefix.push_back(m.letter(s, in));
    s = m.step(s, in);
  }
  // Iterate the input loop until the state at its start repeats.
  std::vector<StateId> starts;
  std::vector<FiniteTrace> rounds;
  for (;;) {
    auto it = std::find(starts.begin(), starts.end(), s);
    if (it != starts.end()) {
      std::size_t k = static_cast<std::size_t>(it - starts.begin());
      for (std::size_t r = 0; r < k; ++r)
        prefix.insert(prefix.end(), rounds[r].begin(), rounds[r].end());
      FiniteTrace loop;
      for (std::size_t r = k; r < rounds.size(); ++r)
        loop.insert(loop.end(), rounds[r].begin(), rounds[r].end());
      return LassoTrace(std::move(prefix), std::move(loop));
    }
    starts.push_back(s);
    FiniteTrace round;
    for (const Letter& in : inputs.loop()) {
      round.push_back(m.letter(s, in));
      s = m.step(s, in);
    }
    rounds.push_back(std::move(round));
  }
}

/// Every input lasso with |prefix| + |loop| <= input_period, as letters.
inline std::vector<LassoTrace> input_lassos(std::span<const Letter> alphabet,
                                            std::size_t input_period) {
  std::vector<LassoTrace> out;
  auto words = [&](std::size_t len) {
    std::vector<FiniteTrace> ws{{}};
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<FiniteTrace> nx;
      for (auto& w : ws)
        for (auto& a : alphabet) {
          auto u = w;
          u.push_back(a);
          nx.push_back(std::move(u));
        }
      ws = std::move(nx);
    }
    return ws;
  };
  for (std::size_t total = 1; total <= input_period; ++total)
    for (std::size_t lp = 1; lp <= total; ++lp)
      for (auto& p : words(total - lp))
        for (auto& l : words(lp))
          out.emplace_back(p, l);
  return out;
}

/// Traces of `m` on every input lasso with |prefix| + |loop| <= input_period.
inline std::vector<LassoTrace> all_lassos(const MooreMachine& m, std::size_t input_period) {
  std::vector<LassoTrace> out;
  for (auto& in : input_lassos(m.input_letters(), input_period))
    out.push_back(run_lasso(m, in));
  return out;
}

// ---------------------------------------------------------------- text I/O

namespace detail {
inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_names(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == ',' || c == '\t' || c == '\r') {
      if (!cur.empty())
        out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    out.push_back(std::move(cur));
  return out;
}

inline Cube parse_cube(std::string_view text, const ApTable& aps) {
  std::string t = trim(text);
  if (t == "*" || t == "true")
    return Cube();
  std::vector<CubeLiteral> lits;
  std::size_t start = 0;
  while (start <= t.size()) {
    std::size_t amp = t.find('&', start);
    std::string lit = trim(t.substr(start, amp == std::string::npos ? std::string::npos : amp - start));
    bool pos = true;
    if (!lit.empty() && lit[0] == '!') {
      pos = false;
      lit = trim(lit.substr(1));
    }
    if (lit.empty())
      throw Error("malformed cube '" + t + "'");
    PropId p = PropRegistry::intern(lit);
    if (!aps.is_input(p))
      throw Error("cube literal '" + lit + "' is not a declared input");
    lits.push_back({p, pos});
    if (amp == std::string::npos)
      break;
    start = amp + 1;
  }
  return Cube(std::move(lits));
}
}  // namespace detail

/// Reads the line-based machine format:
///
///   inputs: m0 m1
///   outputs: i0 i1 r
///   state N0 initial { i0 i1 r }
///   N0 --m0 & m1--> N0
///
/// `#` starts a comment. Edges may reference states declared later.
inline MooreMachine parse_machine(std::string_view text, bool allow_partial = false) {
  std::vector<std::string> inputs, outputs;
  struct RawState {
    std::string name;
    bool initial;
    std::vector<std::string> outs;
  };
  struct RawEdge {
    std::string from, cube, to;
    std::size_t line;
  };
  std::vector<RawState> raw_states;
  std::vector<RawEdge> raw_edges;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    std::string t = detail::trim(line);
    if (t.empty())
      continue;
    auto fail = [&](const std::string& msg) {
      throw Error("machine line " + std::to_string(lineno) + ": " + msg);
    };
    if (t.rfind("inputs:", 0) == 0) {
      inputs = detail::split_names(t.substr(7));
    } else if (t.rfind("outputs:", 0) == 0) {
      outputs = detail::split_names(t.substr(8));
    } else if (t.rfind("state ", 0) == 0) {
      auto lb = t.find('{'), rb = t.rfind('}');
      if (lb == std::string::npos || rb == std::string::npos || rb < lb)
        fail("expected 'state <id> [initial] { ... }'");
      auto head = detail::split_names(t.substr(6, lb - 6));
      if (head.empty() || head.size() > 2 || (head.size() == 2 && head[1] != "initial"))
        fail("expected 'state <id> [initial] { ... }'");
      raw_states.push_back(
          {head[0], head.size() == 2, detail::split_names(t.substr(lb + 1, rb - lb - 1))});
    } else {
      auto a = t.find("--");
      auto b = t.find("-->", a == std::string::npos ? 0 : a + 2);
      if (a == std::string::npos || b == std::string::npos)
        fail("unrecognized line '" + t + "'");
      raw_edges.push_back({detail::trim(t.substr(0, a)), t.substr(a + 2, b - a - 2),
                           detail::trim(t.substr(b + 3)), lineno});
    }
  }

  MooreMachine m(ApTable(inputs, outputs));
  bool have_initial = false;
  for (auto& rs : raw_states) {
    Letter out;
    for (auto& o : rs.outs) {
      PropId p = PropRegistry::intern(o);
      if (!m.aps().is_output(p))
        throw Error("state '" + rs.name + "' emits undeclared output '" + o + "'");
      out.insert(p);
    }
    StateId id = m.add_state(rs.name, out);
    if (rs.initial) {
      if (have_initial)
        throw Error("more than one initial state");
      m.set_initial(id);
      have_initial = true;
    }
  }
  if (!raw_states.empty() && !have_initial)
    throw Error("no initial state");
  for (auto& e : raw_edges) {
    auto from = m.find(e.from), to = m.find(e.to);
    if (!from || !to)
      throw Error("machine line " + std::to_string(e.line) + ": unknown state");
    m.add_edge(*from, detail::parse_cube(e.cube, m.aps()), *to);
  }
  m.check(allow_partial);
  return m;
}

inline std::string serialize_machine(const MooreMachine& m) {
  std::ostringstream os;
  auto names = [](const std::vector<PropId>& ps) {
    std::string s;
    for (PropId p : ps)
      s += " " + PropRegistry::name(p);
    return s;
  };
  os << "inputs:" << names(m.aps().inputs()) << "\n";
  os << "outputs:" << names(m.aps().outputs()) << "\n";
  for (StateId i = 0; i < m.size(); ++i) {
    auto& s = m.state(i);
    os << "state " << s.name << (i == m.initial() ? " initial" : "") << " {";
    for (PropId p : m.aps().outputs())
      if (s.output.contains(p))
        os << " " << PropRegistry::name(p);
    os << " }\n";
  }
  for (StateId i = 0; i < m.size(); ++i)
    for (auto& e : m.state(i).edges)
      os << m.state(i).name << " --" << e.guard.str() << "--> " << m.state(e.target).name
         << "\n";
  return os.str();
}

inline std::string to_dot(const MooreMachine& m) {
  std::ostringstream os;
  os << "digraph machine {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  init [shape=point];\n  init -> s" << m.initial() << ";\n";
  for (StateId i = 0; i < m.size(); ++i) {
    std::string out;
    for (PropId p : m.aps().outputs())
      if (m.state(i).output.contains(p))
        out += (out.empty() ? "" : ", ") + PropRegistry::name(p);
    os << "  s" << i << " [label=\"" << (out.empty() ? " " : out) << "\", tooltip=\""
       << m.state(i).name << "\"];\n";
  }
  for (StateId i = 0; i < m.size(); ++i)
    for (auto& e : m.state(i).edges)
      os << "  s" << i << " -> s" << e.target << " [label=\"" << e.guard.str() << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace livesynth
