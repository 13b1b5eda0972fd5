#pragma once

// Hash-consed LTL formulas in release-positive normal form.
//
// Every formula is interned in a process-wide table, so structural equality
// is pointer equality and the node id doubles as a canonical key. The
// smart constructors perform the propositional canonicalization used by the
// whole library: constant folding, flattening of nested conjunctions and
// disjunctions, sorting of commutative children by id, idempotence,
// complementary-literal detection and absorption.
//
// None of the rewrites touch the temporal structure of a release, since
// release nodes are later replaced by `true` and a rewrite like
// `a R false => false` would change the stripped meaning.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace livesynth {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using PropId = std::uint32_t;

/// Process-wide interning of proposition names.
class PropRegistry {
public:
  static PropId intern(std::string_view name) {
    auto& r = instance();
    std::lock_guard lock(r.mutex_);
    auto it = r.ids_.find(std::string(name));
    if (it != r.ids_.end())
      return it->second;
    PropId id = static_cast<PropId>(r.names_.size());
    r.names_.emplace_back(name);
    r.ids_.emplace(std::string(name), id);
    return id;
  }

  static const std::string& name(PropId id) {
    auto& r = instance();
    std::lock_guard lock(r.mutex_);
    return r.names_.at(id);
  }

private:
  static PropRegistry& instance() {
    static PropRegistry r;
    return r;
  }
  std::mutex mutex_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, PropId> ids_;
};

/// A set of propositions (one letter of a trace), stored as a bitset over
/// global proposition ids. Trailing zero words are trimmed so that equal
/// sets compare equal.
class Letter {
public:
  Letter() = default;
  Letter(std::initializer_list<PropId> ids) {
    for (PropId p : ids)
      insert(p);
  }

  static Letter of(std::initializer_list<std::string_view> names) {
    Letter l;
    for (auto n : names)
      l.insert(PropRegistry::intern(n));
    return l;
  }

  bool contains(PropId p) const {
    std::size_t w = p / 64;
    return w < words_.size() && ((words_[w] >> (p % 64)) & 1U);
  }

  void insert(PropId p) {
    std::size_t w = p / 64;
    if (w >= words_.size())
      words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (p % 64);
  }

  void erase(PropId p) {
    std::size_t w = p / 64;
    if (w < words_.size()) {
      words_[w] &= ~(std::uint64_t{1} << (p % 64));
      trim();
    }
  }

  Letter& operator|=(const Letter& o) {
    if (o.words_.size() > words_.size())
      words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i)
      words_[i] |= o.words_[i];
    return *this;
  }

  friend Letter operator|(Letter a, const Letter& b) { return a |= b; }

  bool empty() const { return words_.empty(); }

  std::vector<PropId> props() const {
    std::vector<PropId> out;
    for (std::size_t w = 0; w < words_.size(); ++w)
      for (unsigned b = 0; b < 64; ++b)
        if ((words_[w] >> b) & 1U)
          out.push_back(static_cast<PropId>(w * 64 + b));
    return out;
  }

  /// Restriction to the given propositions.
  Letter restrict_to(std::span<const PropId> keep) const {
    Letter out;
    for (PropId p : keep)
      if (contains(p))
        out.insert(p);
    return out;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_)
      h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x100000001b3ULL;
    return h;
  }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter& a, const Letter& b) {
    return a.props() <=> b.props();
  }

  /// `{a,b}` with names sorted alphabetically.
  std::string str() const {
    std::vector<std::string> names;
    for (PropId p : props())
      names.push_back(PropRegistry::name(p));
    std::sort(names.begin(), names.end());
    std::string s = "{";
    for (std::size_t i = 0; i < names.size(); ++i)
      s += (i ? "," : "") + names[i];
    return s + "}";
  }

private:
  void trim() {
    while (!words_.empty() && words_.back() == 0)
      words_.pop_back();
  }
  std::vector<std::uint64_t> words_;
};

struct LetterHash {
  std::size_t operator()(const Letter& l) const { return l.hash(); }
};

enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  NegAtom,
  And,
  Or,
  Next,
  Until,
  Release
};

namespace detail {
struct Node {
  Op op;
  PropId prop;
  std::vector<const Node*> kids;
  std::size_t id;
  std::size_t depth;  // temporal nesting depth
  std::size_t size;   // DAG-unaware node count, saturating
};
}  // namespace detail

class Formula;
struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept;
};

/// Immutable, interned LTL formula handle. Copying is free; `==` is O(1).
class Formula {
public:
  Formula() : Formula(tt()) {}

  static Formula tt() { return make(Op::True, 0, {}); }
  static Formula ff() { return make(Op::False, 0, {}); }
  static Formula atom(PropId p) { return make(Op::Atom, p, {}); }
  static Formula atom(std::string_view name) {
    return atom(PropRegistry::intern(name));
  }
  static Formula neg_atom(PropId p) { return make(Op::NegAtom, p, {}); }
  static Formula neg_atom(std::string_view name) {
    return neg_atom(PropRegistry::intern(name));
  }

  static Formula conj(std::span<const Formula> fs) {
    return junction(Op::And, fs);
  }
  static Formula disj(std::span<const Formula> fs) {
    return junction(Op::Or, fs);
  }
  static Formula conj(std::initializer_list<Formula> fs) {
    return conj(std::span<const Formula>(fs.begin(), fs.size()));
  }
  static Formula disj(std::initializer_list<Formula> fs) {
    return disj(std::span<const Formula>(fs.begin(), fs.size()));
  }

  static Formula next(Formula f) {
    if (f.is_true() || f.is_false())
      return f;
    return make(Op::Next, 0, {f.node_});
  }

  static Formula until(Formula l, Formula r) {
    if (r.is_true() || r.is_false() || l.is_false())
      return r;
    return make(Op::Until, 0, {l.node_, r.node_});
  }

  static Formula release(Formula l, Formula r) {
    if (r.is_true())
      return r;
    return make(Op::Release, 0, {l.node_, r.node_});
  }

  static Formula eventually(Formula f) { return until(tt(), f); }
  static Formula globally(Formula f) { return release(ff(), f); }

  static Formula next_n(Formula f, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      f = next(f);
    return f;
  }

  Op op() const { return node_->op; }
  PropId prop() const { return node_->prop; }
  std::size_t id() const { return node_->id; }
  std::size_t depth() const { return node_->depth; }
  std::size_t num_children() const { return node_->kids.size(); }
  Formula child(std::size_t i) const { return Formula(node_->kids[i]); }
  std::vector<Formula> children() const {
    std::vector<Formula> out;
    out.reserve(node_->kids.size());
    for (auto* k : node_->kids)
      out.push_back(Formula(k));
    return out;
  }
  Formula lhs() const { return child(0); }
  Formula rhs() const { return child(num_children() - 1); }

  bool is_true() const { return op() == Op::True; }
  bool is_false() const { return op() == Op::False; }
  bool is_literal() const { return op() == Op::Atom || op() == Op::NegAtom; }
  bool is_temporal() const {
    return op() == Op::Next || op() == Op::Until || op() == Op::Release;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.node_ == b.node_;
  }
  friend bool operator<(const Formula& a, const Formula& b) {
    return a.id() < b.id();
  }

  /// Human readable rendering using the ASCII grammar; `true U x` and
  /// `false R x` are printed as `F x` and `G x`.
  std::string str() const {
    std::ostringstream os;
    print(os, *this, 0);
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Formula& f) {
    return os << f.str();
  }

  /// Number of interned nodes created so far.
  static std::size_t table_size() {
    auto& t = table();
    std::lock_guard lock(t.mutex);
    return t.nodes.size();
  }

private:
  explicit Formula(const detail::Node* n) : node_(n) {}

  struct KeyHash {
    std::size_t operator()(const std::vector<std::size_t>& k) const {
      std::size_t h = 1469598103934665603ULL;
      for (auto v : k)
        h = (h ^ v) * 1099511628211ULL;
      return h;
    }
  };

  struct Table {
    std::mutex mutex;
    std::deque<detail::Node> nodes;
    std::unordered_map<std::vector<std::size_t>, const detail::Node*, KeyHash>
        index;
  };

  static Table& table() {
    static Table t;
    return t;
  }

  static Formula make(Op op, PropId prop, std::vector<const detail::Node*> kids) {
    std::vector<std::size_t> key;
    key.reserve(kids.size() + 2);
    key.push_back(static_cast<std::size_t>(op));
    key.push_back(prop);
    for (auto* k : kids)
      key.push_back(k->id);
    auto& t = table();
    std::lock_guard lock(t.mutex);
    auto it = t.index.find(key);
    if (it != t.index.end())
      return Formula(it->second);
    std::size_t depth = 0, size = 1;
    for (auto* k : kids) {
      depth = std::max(depth, k->depth);
      size = std::min<std::size_t>(size + k->size, 1U << 30);
    }
    if (op == Op::Next || op == Op::Until || op == Op::Release)
      ++depth;
    t.nodes.push_back(
        detail::Node{op, prop, std::move(kids), t.nodes.size(), depth, size});
    const detail::Node* n = &t.nodes.back();
    t.index.emplace(std::move(key), n);
    return Formula(n);
  }

  static Formula junction(Op op, std::span<const Formula> fs) {
    const Op dual = op == Op::And ? Op::Or : Op::And;
    const Op absorbing = op == Op::And ? Op::False : Op::True;
    const Op neutral = op == Op::And ? Op::True : Op::False;
    std::vector<const detail::Node*> flat;
    for (const Formula& f : fs) {
      if (f.op() == absorbing)
        return f;
      if (f.op() == neutral)
        continue;
      if (f.op() == op)
        flat.insert(flat.end(), f.node_->kids.begin(), f.node_->kids.end());
      else
        flat.push_back(f.node_);
    }
    std::sort(flat.begin(), flat.end(),
              [](auto* a, auto* b) { return a->id < b->id; });
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());

    // x & !x, x | !x
    std::unordered_set<std::size_t> present;
    for (auto* n : flat)
      present.insert(n->id);
    for (auto* n : flat)
      if (n->op == Op::Atom && present.count(neg_atom(n->prop).id()))
        return op == Op::And ? ff() : tt();

    // Absorption: x & (x | y) = x, x | (x & y) = x.
    std::vector<const detail::Node*> kept;
    kept.reserve(flat.size());
    for (auto* n : flat) {
      bool absorbed = false;
      if (n->op == dual)
        for (auto* k : n->kids)
          if (present.count(k->id)) {
            absorbed = true;
            break;
          }
      if (!absorbed)
        kept.push_back(n);
    }

    if (kept.empty())
      return op == Op::And ? tt() : ff();
    if (kept.size() == 1)
      return Formula(kept.front());
    return make(op, 0, std::move(kept));
  }

  static int precedence(Op op) {
    switch (op) {
    case Op::Or:
      return 1;
    case Op::And:
      return 2;
    case Op::Until:
    case Op::Release:
      return 3;
    default:
      return 4;
    }
  }

  static void print(std::ostream& os, const Formula& f, int outer) {
    int p = precedence(f.op());
    bool paren = p < outer || (p == 3 && outer == 3);
    if (paren)
      os << '(';
    switch (f.op()) {
    case Op::True:
      os << "true";
      break;
    case Op::False:
      os << "false";
      break;
    case Op::Atom:
      os << PropRegistry::name(f.prop());
      break;
    case Op::NegAtom:
      os << '!' << PropRegistry::name(f.prop());
      break;
    case Op::And:
    case Op::Or: {
      const char* sep = f.op() == Op::And ? " && " : " || ";
      for (std::size_t i = 0; i < f.num_children(); ++i) {
        if (i)
          os << sep;
        print(os, f.child(i), p + 1);
      }
      break;
    }
    case Op::Next:
      os << "X ";
      print(os, f.child(0), 4);
      break;
    case Op::Until:
      if (f.lhs().is_true()) {
        os << "F ";
        print(os, f.rhs(), 4);
      } else {
        print(os, f.lhs(), 4);
        os << " U ";
        print(os, f.rhs(), 4);
      }
      break;
    case Op::Release:
      if (f.lhs().is_false()) {
        os << "G ";
        print(os, f.rhs(), 4);
      } else {
        print(os, f.lhs(), 4);
        os << " R ";
        print(os, f.rhs(), 4);
      }
      break;
    }
    if (paren)
      os << ')';
  }

  const detail::Node* node_;
};

inline std::size_t FormulaHash::operator()(const Formula& f) const noexcept {
  return std::hash<std::size_t>{}(f.id());
}

template <class V>
using FormulaMap = std::unordered_map<Formula, V, FormulaHash>;
using FormulaSet = std::unordered_set<Formula, FormulaHash>;

/// Collects the propositions occurring in `f`.
inline std::vector<PropId> props_of(const Formula& f) {
  std::vector<PropId> out;
  std::unordered_set<std::size_t> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second)
      continue;
    if (g.is_literal())
      out.push_back(g.prop());
    for (auto& k : g.children())
      stack.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Subformulas in post-order (children before parents), each exactly once.
inline std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> order;
  std::unordered_set<std::size_t> done;
  std::vector<std::pair<Formula, bool>> stack{{f, false}};
  while (!stack.empty()) {
    auto [g, expanded] = stack.back();
    stack.pop_back();
    if (done.count(g.id()))
      continue;
    if (expanded) {
      done.insert(g.id());
      order.push_back(g);
      continue;
    }
    stack.push_back({g, true});
    for (auto& k : g.children())
      if (!done.count(k.id()))
        stack.push_back({k, false});
  }
  return order;
}

inline bool contains_release(const Formula& f) {
  for (auto& g : subformulas(f))
    if (g.op() == Op::Release)
      return true;
  return false;
}

}  // namespace livesynth
