#pragma once

// Recursive-descent parser for the ASCII formula syntax:
//
//   literals   true false
//   atoms      [a-zA-Z_][a-zA-Z0-9_]*
//   unary      ! X F G
//   binary     U R (right-assoc)  &&  ||  -> (right-assoc)  <->
//
// listed from tightest to loosest binding. General negation is accepted and
// pushed to the atoms while building, so the result is in PNF.

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "livesynth/ap_table.hpp"
#include "livesynth/formula.hpp"

namespace livesynth {

class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error("parse error at offset " + std::to_string(pos) + ": " + msg),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

namespace detail {

// Intermediate tree with general negation; lowered to PNF by `lower`.
struct Ast {
  enum Kind { True, False, Atom, Not, And, Or, Implies, Iff, Next, Ev, Alw, Until, Release };
  Kind kind;
  std::string name;
  std::unique_ptr<Ast> l, r;
};
using AstPtr = std::unique_ptr<Ast>;

class FormulaParser {
public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  AstPtr parse() {
    auto a = iff();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return a;
  }

private:
  static AstPtr node(Ast::Kind k, AstPtr l = nullptr, AstPtr r = nullptr) {
    auto a = std::make_unique<Ast>();
    a->kind = k;
    a->l = std::move(l);
    a->r = std::move(r);
    return a;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok)
      return false;
    // keyword operators must not run into an identifier
    if (std::isalpha(static_cast<unsigned char>(tok[0])) && pos_ + tok.size() < text_.size()) {
      char c = text_[pos_ + tok.size()];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
        return false;
    }
    pos_ += tok.size();
    return true;
  }

  AstPtr iff() {
    auto l = implies();
    while (eat("<->"))
      l = node(Ast::Iff, std::move(l), implies());
    return l;
  }

  AstPtr implies() {
    auto l = disj();
    if (eat("->"))
      return node(Ast::Implies, std::move(l), implies());
    return l;
  }

  AstPtr disj() {
    auto l = conj();
    while (eat("||"))
      l = node(Ast::Or, std::move(l), conj());
    return l;
  }

  AstPtr conj() {
    auto l = binary_temporal();
    while (eat("&&"))
      l = node(Ast::And, std::move(l), binary_temporal());
    return l;
  }

  AstPtr binary_temporal() {
    auto l = unary();
    if (eat("U"))
      return node(Ast::Until, std::move(l), binary_temporal());
    if (eat("R"))
      return node(Ast::Release, std::move(l), binary_temporal());
    return l;
  }

  AstPtr unary() {
    skip_ws();
    if (eat("!"))
      return node(Ast::Not, unary());
    if (eat("X"))
      return node(Ast::Next, unary());
    if (eat("F"))
      return node(Ast::Ev, unary());
    if (eat("G"))
      return node(Ast::Alw, unary());
    return primary();
  }

  AstPtr primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input", pos_);
    if (text_[pos_] == '(') {
      ++pos_;
      auto a = iff();
      if (!eat(")"))
        throw ParseError("expected ')'", pos_);
      return a;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      if (id == "true")
        return node(Ast::True);
      if (id == "false")
        return node(Ast::False);
      if (id == "U" || id == "R" || id == "X" || id == "F" || id == "G")
        throw ParseError("operator '" + id + "' used as an atom", start);
      auto a = node(Ast::Atom);
      a->name = std::move(id);
      a->l = nullptr;
      return a;
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Formula lower(const Ast& a, bool neg) {
  using F = Formula;
  switch (a.kind) {
  case Ast::True:
    return neg ? F::ff() : F::tt();
  case Ast::False:
    return neg ? F::tt() : F::ff();
  case Ast::Atom:
    return neg ? F::neg_atom(a.name) : F::atom(a.name);
  case Ast::Not:
    return lower(*a.l, !neg);
  case Ast::And:
    return neg ? F::disj({lower(*a.l, true), lower(*a.r, true)})
               : F::conj({lower(*a.l, false), lower(*a.r, false)});
  case Ast::Or:
    return neg ? F::conj({lower(*a.l, true), lower(*a.r, true)})
               : F::disj({lower(*a.l, false), lower(*a.r, false)});
  case Ast::Implies:
    return neg ? F::conj({lower(*a.l, false), lower(*a.r, true)})
               : F::disj({lower(*a.l, true), lower(*a.r, false)});
  case Ast::Iff: {
    F lp = lower(*a.l, false), ln = lower(*a.l, true);
    F rp = lower(*a.r, false), rn = lower(*a.r, true);
    return neg ? F::disj({F::conj({lp, rn}), F::conj({ln, rp})})
               : F::disj({F::conj({lp, rp}), F::conj({ln, rn})});
  }
  case Ast::Next:
    return F::next(lower(*a.l, neg));
  case Ast::Ev:
    return neg ? F::globally(lower(*a.l, true)) : F::eventually(lower(*a.l, false));
  case Ast::Alw:
    return neg ? F::eventually(lower(*a.l, true)) : F::globally(lower(*a.l, false));
  case Ast::Until:
    return neg ? F::release(lower(*a.l, true), lower(*a.r, true))
               : F::until(lower(*a.l, false), lower(*a.r, false));
  case Ast::Release:
    return neg ? F::until(lower(*a.l, true), lower(*a.r, true))
               : F::release(lower(*a.l, false), lower(*a.r, false));
  }
  return F::tt();
}

inline void check_atoms(const Ast& a, const ApTable& aps, std::string_view text) {
  if (a.kind == Ast::Atom) {
    if (!aps.declared(PropRegistry::intern(a.name))) {
      auto pos = text.find(a.name);
      throw ParseError("undeclared proposition '" + a.name + "'",
                       pos == std::string_view::npos ? 0 : pos);
    }
    return;
  }
  if (a.l)
    check_atoms(*a.l, aps, text);
  if (a.r)
    check_atoms(*a.r, aps, text);
}

}  // namespace detail

/// Parses `text` into a PNF formula. When `aps` is given, every atom must be
/// declared there.
inline Formula parse_formula(std::string_view text, const ApTable* aps = nullptr) {
  detail::FormulaParser p(text);
  auto ast = p.parse();
  if (aps)
    detail::check_atoms(*ast, *aps, text);
  return detail::lower(*ast, false);
}

inline Formula parse_formula(std::string_view text, const ApTable& aps) {
  return parse_formula(text, &aps);
}

}  // namespace livesynth
