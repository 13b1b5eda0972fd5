#pragma once

// A compact CDCL solver: two watched literals, first-UIP learning with local
// minimization, VSIDS with phase saving, Luby restarts, and activity-based
// clause deletion. Plus DIMACS reading/writing and an adapter for external
// solvers that speak the SAT-competition output format.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "livesynth/formula.hpp"

namespace livesynth::sat {

class Lit {
public:
  constexpr Lit() = default;
  static constexpr Lit pos(std::uint32_t var) { return Lit(var << 1); }
  static constexpr Lit neg(std::uint32_t var) { return Lit((var << 1) | 1U); }
  static constexpr Lit make(std::uint32_t var, bool negative) {
    return Lit((var << 1) | (negative ? 1U : 0U));
  }
  static Lit from_dimacs(int d) {
    return make(static_cast<std::uint32_t>(std::abs(d) - 1), d < 0);
  }

  constexpr std::uint32_t var() const { return code_ >> 1; }
  constexpr bool negative() const { return code_ & 1U; }
  constexpr std::uint32_t index() const { return code_; }
  constexpr Lit operator~() const { return Lit(code_ ^ 1U); }
  int to_dimacs() const {
    int v = static_cast<int>(var()) + 1;
    return negative() ? -v : v;
  }
  friend constexpr auto operator<=>(Lit, Lit) = default;

private:
  constexpr explicit Lit(std::uint32_t code) : code_(code) {}
  std::uint32_t code_ = 0;
};

enum class Result { Sat, Unsat, Unknown };

inline const char* to_string(Result r) {
  switch (r) {
  case Result::Sat:
    return "sat";
  case Result::Unsat:
    return "unsat";
  default:
    return "unknown";
  }
}

/// A clause set under construction.
class Cnf {
public:
  std::uint32_t new_var() { return num_vars_++; }
  std::uint32_t num_vars() const { return num_vars_; }
  const std::vector<std::vector<Lit>>& clauses() const { return clauses_; }
  std::size_t num_literals() const {
    std::size_t n = 0;
    for (auto& c : clauses_)
      n += c.size();
    return n;
  }

  void add(std::vector<Lit> c) {
    for (Lit l : c)
      if (l.var() >= num_vars_)
        num_vars_ = l.var() + 1;
    clauses_.push_back(std::move(c));
  }
  void add(std::initializer_list<Lit> c) { add(std::vector<Lit>(c)); }

  void write_dimacs(std::ostream& os) const {
    os << "p cnf " << num_vars_ << " " << clauses_.size() << "\n";
    for (auto& c : clauses_) {
      for (Lit l : c)
        os << l.to_dimacs() << " ";
      os << "0\n";
    }
  }

  static Cnf read_dimacs(std::istream& is) {
    Cnf cnf;
    std::string line;
    std::vector<Lit> cur;
    bool header = false;
    while (std::getline(is, line)) {
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == 'c' || line[b] == '%')
        continue;
      std::istringstream ls(line);
      if (line[b] == 'p') {
        std::string p, fmt;
        long vars = 0, cls = 0;
        if (!(ls >> p >> fmt >> vars >> cls) || fmt != "cnf" || vars < 0 || cls < 0)
          throw Error("malformed DIMACS header: " + line);
        cnf.num_vars_ = static_cast<std::uint32_t>(vars);
        header = true;
        continue;
      }
      if (!header)
        throw Error("DIMACS clause before header");
      int d;
      while (ls >> d) {
        if (d == 0) {
          cnf.add(std::move(cur));
          cur.clear();
        } else {
          cur.push_back(Lit::from_dimacs(d));
        }
      }
      if (!ls.eof())
        throw Error("malformed DIMACS clause line: " + line);
    }
    if (!cur.empty())
      cnf.add(std::move(cur));
    return cnf;
  }

private:
  std::uint32_t num_vars_ = 0;
  std::vector<std::vector<Lit>> clauses_;
};

struct Limits {
  std::optional<std::uint64_t> max_conflicts;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Stats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_literals = 0;
};

class Solver {
public:
  Solver() = default;
  explicit Solver(const Cnf& cnf) {
    reserve(cnf.num_vars());
    for (auto& c : cnf.clauses())
      add_clause(c);
  }

  std::uint32_t new_var() {
    std::uint32_t v = num_vars();
    reserve(v + 1);
    return v;
  }
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(assign_.size()); }

  /// Adds a clause at decision level 0. Returns false once the clause set
  /// is known to be unsatisfiable.
  bool add_clause(std::span<const Lit> lits) {
    if (!ok_)
      return false;
    cancel_until(0);
    std::vector<Lit> c(lits.begin(), lits.end());
    for (Lit l : c)
      if (l.var() >= num_vars())
        reserve(l.var() + 1);
    std::sort(c.begin(), c.end());
    std::vector<Lit> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i && c[i] == c[i - 1])
        continue;
      if (i && c[i] == ~c[i - 1])
        return true;  // tautology
      if (value(c[i]) == kTrue)
        return true;
      if (value(c[i]) == kFalse)
        continue;
      out.push_back(c[i]);
    }
    if (out.empty())
      return ok_ = false;
    if (out.size() == 1) {
      enqueue(out[0], kNoReason);
      return ok_ = (propagate() == kNoReason);
    }
    attach(store(std::move(out), false));
    return true;
  }
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  Result solve(const Limits& limits = {}) {
    if (!ok_)
      return Result::Unsat;
    if (propagate() != kNoReason)
      return (ok_ = false, Result::Unsat);
    max_learnts_ = std::max<double>(static_cast<double>(clauses_.size()) / 3.0, 2000.0);
    for (std::uint64_t restart = 0;; ++restart) {
      std::uint64_t budget = 100 * luby(restart);
      Result r = search(budget, limits);
      if (r != Result::Unknown) {
        if (r == Result::Sat)
          model_.assign(assign_.begin(), assign_.end());
        cancel_until(0);
        return r;
      }
      if (out_of_budget(limits)) {
        cancel_until(0);
        return Result::Unknown;
      }
      ++stats_.restarts;
      cancel_until(0);
      if (learnt_count_ > max_learnts_)
        reduce_db();
      max_learnts_ *= 1.05;
    }
  }

  /// Value of `var` in the last model.
  bool model_value(std::uint32_t var) const { return model_.at(var) == kTrue; }
  bool model_value(Lit l) const { return model_value(l.var()) != l.negative(); }
  const Stats& stats() const { return stats_; }

private:
  using Value = std::int8_t;
  static constexpr Value kTrue = 1, kFalse = -1, kUndef = 0;
  static constexpr std::uint32_t kNoReason = UINT32_MAX;

  struct Clause {
    std::vector<Lit> lits;
    bool learnt;
    double activity = 0;
  };
  struct Watch {
    std::uint32_t cref;
    Lit blocker;
  };

  Value value(Lit l) const {
    Value v = assign_[l.var()];
    return l.negative() ? static_cast<Value>(-v) : v;
  }
  std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  void reserve(std::uint32_t n) {
    while (assign_.size() < n) {
      assign_.push_back(kUndef);
      level_.push_back(0);
      reason_.push_back(kNoReason);
      activity_.push_back(0);
      polarity_.push_back(1);  // prefer false
      seen_.push_back(0);
      heap_index_.push_back(-1);
      watches_.emplace_back();
      watches_.emplace_back();
      heap_insert(static_cast<std::uint32_t>(assign_.size() - 1));
    }
  }

  std::uint32_t store(std::vector<Lit> lits, bool learnt) {
    clauses_.push_back({std::move(lits), learnt, 0});
    if (learnt)
      ++learnt_count_;
    return static_cast<std::uint32_t>(clauses_.size() - 1);
  }

  void attach(std::uint32_t cref) {
    auto& c = clauses_[cref].lits;
    watches_[(~c[0]).index()].push_back({cref, c[1]});
    watches_[(~c[1]).index()].push_back({cref, c[0]});
  }

  void enqueue(Lit l, std::uint32_t reason) {
    assign_[l.var()] = l.negative() ? kFalse : kTrue;
    level_[l.var()] = level();
    reason_[l.var()] = reason;
    trail_.push_back(l);
  }

  void cancel_until(std::uint32_t lvl) {
    if (level() <= lvl)
      return;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[lvl];) {
      std::uint32_t v = trail_[i].var();
      polarity_[v] = trail_[i].negative();
      assign_[v] = kUndef;
      reason_[v] = kNoReason;
      if (heap_index_[v] < 0)
        heap_insert(v);
    }
    qhead_ = trail_lim_[lvl];
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
  }

  // Returns the conflicting clause or kNoReason.
  std::uint32_t propagate() {
    std::uint32_t conflict = kNoReason;
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      Lit false_lit = ~p;
      auto& ws = watches_[p.index()];
      ++stats_.propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watch w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        auto& c = clauses_[w.cref].lits;
        if (c[0] == false_lit)
          std::swap(c[0], c[1]);
        ++i;
        Lit first = c[0];
        Watch nw{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = nw;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k)
          if (value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[(~c[1]).index()].push_back(nw);
            moved = true;
            break;
          }
        if (moved)
          continue;
        ws[j++] = nw;
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason)
        break;
    }
    return conflict;
  }

  void bump_var(std::uint32_t v) {
    if ((activity_[v] += var_inc_) > 1e100) {
      for (auto& a : activity_)
        a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0)
      heap_up(static_cast<std::size_t>(heap_index_[v]));
  }

  void bump_clause(Clause& c) {
    if ((c.activity += cla_inc_) > 1e20) {
      for (auto& d : clauses_)
        if (d.learnt)
          d.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  void analyze(std::uint32_t confl, std::vector<Lit>& learnt, std::uint32_t& back_level) {
    learnt.assign(1, Lit());
    int path = 0;
    std::optional<Lit> p;
    std::size_t index = trail_.size();
    do {
      Clause& c = clauses_[confl];
      if (c.learnt)
        bump_clause(c);
      for (std::size_t j = p ? 1 : 0; j < c.lits.size(); ++j) {
        Lit q = c.lits[j];
        std::uint32_t v = q.var();
        if (!seen_[v] && level_[v] > 0) {
          bump_var(v);
          seen_[v] = 1;
          if (level_[v] >= level())
            ++path;
          else
            learnt.push_back(q);
        }
      }
      while (!seen_[trail_[--index].var()]) {
      }
      p = trail_[index];
      confl = reason_[p->var()];
      seen_[p->var()] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ~*p;

    // local minimization: drop literals implied by the rest
    std::vector<Lit> kept{learnt[0]};
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      std::uint32_t r = reason_[learnt[i].var()];
      bool redundant = r != kNoReason;
      if (redundant)
        for (std::size_t k = 1; k < clauses_[r].lits.size(); ++k) {
          std::uint32_t v = clauses_[r].lits[k].var();
          if (!seen_[v] && level_[v] > 0) {
            redundant = false;
            break;
          }
        }
      if (!redundant)
        kept.push_back(learnt[i]);
    }
    for (std::size_t i = 1; i < learnt.size(); ++i)
      seen_[learnt[i].var()] = 0;
    learnt = std::move(kept);

    back_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i)
        if (level_[learnt[i].var()] > level_[learnt[max_i].var()])
          max_i = i;
      std::swap(learnt[1], learnt[max_i]);
      back_level = level_[learnt[1].var()];
    }
  }

  bool out_of_budget(const Limits& limits) const {
    if (limits.max_conflicts && stats_.conflicts >= *limits.max_conflicts)
      return true;
    if (limits.deadline && std::chrono::steady_clock::now() >= *limits.deadline)
      return true;
    return false;
  }

  Result search(std::uint64_t conflict_budget, const Limits& limits) {
    std::vector<Lit> learnt;
    std::uint64_t local = 0;
    for (;;) {
      std::uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++stats_.conflicts;
        ++local;
        if (level() == 0)
          return (ok_ = false, Result::Unsat);
        std::uint32_t back;
        analyze(confl, learnt, back);
        cancel_until(back);
        stats_.learnt_literals += learnt.size();
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          std::uint32_t cref = store(learnt, true);
          attach(cref);
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], cref);
        }
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;
        if ((stats_.conflicts & 255U) == 0 && out_of_budget(limits))
          return Result::Unknown;
        continue;
      }
      if (local >= conflict_budget || (limits.max_conflicts && out_of_budget(limits)))
        return Result::Unknown;
      std::optional<std::uint32_t> next;
      while (!heap_.empty()) {
        std::uint32_t v = heap_pop();
        if (assign_[v] == kUndef) {
          next = v;
          break;
        }
      }
      if (!next)
        return Result::Sat;
      ++stats_.decisions;
      trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
      enqueue(Lit::make(*next, polarity_[*next]), kNoReason);
    }
  }

  // At level 0: drop satisfied clauses and the less active half of the
  // learnt ones, then rebuild the watch lists.
  void reduce_db() {
    std::vector<double> acts;
    for (auto& c : clauses_)
      if (c.learnt && c.lits.size() > 2)
        acts.push_back(c.activity);
    double cut = 0;
    if (!acts.empty()) {
      std::nth_element(acts.begin(), acts.begin() + static_cast<std::ptrdiff_t>(acts.size() / 2),
                       acts.end());
      cut = acts[acts.size() / 2];
    }
    std::vector<Clause> kept;
    learnt_count_ = 0;
    for (auto& c : clauses_) {
      bool sat = std::any_of(c.lits.begin(), c.lits.end(),
                             [&](Lit l) { return value(l) == kTrue; });
      if (sat)
        continue;
      if (c.learnt && c.lits.size() > 2 && c.activity < cut)
        continue;
      std::erase_if(c.lits, [&](Lit l) { return value(l) == kFalse; });
      if (c.learnt)
        ++learnt_count_;
      kept.push_back(std::move(c));
    }
    clauses_ = std::move(kept);
    for (auto& w : watches_)
      w.clear();
    for (Lit l : trail_)
      reason_[l.var()] = kNoReason;
    for (std::uint32_t i = 0; i < clauses_.size(); ++i)
      attach(i);
  }

  static std::uint64_t luby(std::uint64_t i) {
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    std::uint64_t x = i;
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    return std::uint64_t{1} << seq;
  }

  // binary max-heap over activity
  bool heap_less(std::uint32_t a, std::uint32_t b) const { return activity_[a] > activity_[b]; }
  void heap_insert(std::uint32_t v) {
    heap_index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
  }
  void heap_up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap_[parent]))
        break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = static_cast<int>(i);
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    std::uint32_t v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size())
        break;
      if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child]))
        ++child;
      if (!heap_less(heap_[child], v))
        break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = static_cast<int>(i);
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<int>(i);
  }
  std::uint32_t heap_pop() {
    std::uint32_t top = heap_.front();
    heap_index_[top] = -1;
    heap_.front() = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_index_[heap_.front()] = 0;
      heap_down(0);
    }
    return top;
  }

  bool ok_ = true;
  std::vector<Clause> clauses_;
  std::size_t learnt_count_ = 0;
  double max_learnts_ = 0;
  std::vector<std::vector<Watch>> watches_;
  std::vector<Value> assign_;
  std::vector<Value> model_;
  std::vector<std::uint32_t> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<double> activity_;
  std::vector<char> polarity_;
  std::vector<char> seen_;
  std::vector<int> heap_index_;
  std::vector<std::uint32_t> heap_;
  std::vector<Lit> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1;
  double cla_inc_ = 1;
  Stats stats_;
};

struct SolveOutcome {
  Result result = Result::Unknown;
  std::vector<bool> model;  // indexed by variable
};

/// Solves with the built-in solver.
inline SolveOutcome solve_internal(const Cnf& cnf, const Limits& limits = {}) {
  Solver s(cnf);
  SolveOutcome out;
  out.result = s.solve(limits);
  if (out.result == Result::Sat) {
    out.model.resize(cnf.num_vars());
    for (std::uint32_t v = 0; v < cnf.num_vars(); ++v)
      out.model[v] = s.model_value(v);
  }
  return out;
}

/// Parses SAT-competition style output ("s SATISFIABLE", "v 1 -2 ... 0").
inline SolveOutcome parse_solver_output(std::istream& is, std::uint32_t num_vars) {
  SolveOutcome out;
  out.model.assign(num_vars, false);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        out.result = Result::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        out.result = Result::Sat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      int d;
      while (ls >> d)
        if (d > 0 && static_cast<std::uint32_t>(d) <= num_vars)
          out.model[static_cast<std::size_t>(d - 1)] = true;
    }
  }
  return out;
}

/// Runs an external solver binary on a DIMACS file.
inline SolveOutcome solve_external(const Cnf& cnf, const std::string& solver_path) {
  namespace fs = std::filesystem;
  static int counter = 0;
  fs::path file = fs::temp_directory_path() /
                  ("livesynth_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) +
                   ".cnf");
  {
    std::ofstream os(file);
    cnf.write_dimacs(os);
  }
  std::string cmd = "'" + solver_path + "' '" + file.string() + "' 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    fs::remove(file);
    throw Error("cannot run solver '" + solver_path + "'");
  }
  std::string text;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    text.append(buf, n);
  ::pclose(pipe);
  fs::remove(file);
  std::istringstream is(text);
  auto out = parse_solver_output(is, cnf.num_vars());
  if (out.result == Result::Unknown)
    throw Error("solver '" + solver_path + "' gave no verdict");
  return out;
}

}  // namespace livesynth::sat
