#include <gtest/gtest.h>

#include "support.hpp"

using namespace livesynth;
using testing_support::parse;

TEST(Parser, UntilIsAPlainProduction) {
  Formula f = parse("a U b");
  EXPECT_EQ(f.op(), Op::Until);
  EXPECT_EQ(f.lhs(), Formula::atom("a"));
  EXPECT_EQ(f.rhs(), Formula::atom("b"));
}

TEST(Parser, NegatedEventuallyBecomesGloballyNot) {
  Formula f = parse("!(F a)");
  EXPECT_EQ(f, Formula::release(Formula::ff(), Formula::neg_atom("a")));
  EXPECT_EQ(f, parse("G !a"));
}

TEST(Parser, ResponseFormulaLowersToReleaseOfDisjunction) {
  Formula f = parse("G (m1 -> X F i1)");
  Formula expected = Formula::release(
      Formula::ff(),
      Formula::disj({Formula::neg_atom("m1"),
                     Formula::next(Formula::until(Formula::tt(), Formula::atom("i1")))}));
  EXPECT_EQ(f, expected);
}

TEST(Parser, NegationDualities) {
  EXPECT_EQ(parse("!(a U b)"), parse("!a R !b"));
  EXPECT_EQ(parse("!(a R b)"), parse("!a U !b"));
  EXPECT_EQ(parse("!X a"), parse("X !a"));
  EXPECT_EQ(parse("!(a && b)"), parse("!a || !b"));
  EXPECT_EQ(parse("!!a"), parse("a"));
  EXPECT_EQ(parse("!true"), Formula::ff());
}

TEST(Parser, Precedence) {
  // unary binds tighter than U, U tighter than &&, && tighter than ||
  EXPECT_EQ(parse("a && b U c"), parse("a && (b U c)"));
  EXPECT_EQ(parse("a || b && c"), parse("a || (b && c)"));
  EXPECT_EQ(parse("X a U b"), parse("(X a) U b"));
  EXPECT_EQ(parse("a U b U c"), parse("a U (b U c)"));
  EXPECT_EQ(parse("a -> b -> c"), parse("a -> (b -> c)"));
  EXPECT_EQ(parse("a -> b <-> c"), parse("(a -> b) <-> c"));
}

TEST(Parser, IffExpands) {
  EXPECT_EQ(parse("a <-> b"), parse("(a && b) || (!a && !b)"));
}

TEST(Parser, ReportsErrorPosition) {
  try {
    parse("a && (b || ");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GE(e.position(), 10u);
  }
  EXPECT_THROW(parse("a &&& b"), ParseError);
  EXPECT_THROW(parse("(a"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("a b"), ParseError);
}

TEST(Parser, RejectsUndeclaredPropositions) {
  ApTable aps({"r"}, {"g"});
  EXPECT_NO_THROW(parse_formula("G(r -> F g)", aps));
  EXPECT_THROW(parse_formula("G(r -> F h)", aps), Error);
}

TEST(Formula, HashConsingSharesNodes) {
  Formula a = parse("G(a -> F b)");
  Formula b = parse("G (a -> (F b))");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.id(), b.id());
}

TEST(Formula, JunctionsAreCanonical) {
  Formula a = Formula::atom("a"), b = Formula::atom("b");
  EXPECT_EQ(Formula::conj({a, b}), Formula::conj({b, a}));
  EXPECT_EQ(Formula::conj({a, Formula::conj({b, a})}), Formula::conj({a, b}));
  EXPECT_EQ(Formula::conj({a, Formula::tt()}), a);
  EXPECT_EQ(Formula::conj({a, Formula::ff()}), Formula::ff());
  EXPECT_EQ(Formula::disj({a, Formula::tt()}), Formula::tt());
  EXPECT_EQ(Formula::disj({a, Formula::neg_atom("a")}), Formula::tt());
  EXPECT_EQ(Formula::conj({a, Formula::neg_atom("a")}), Formula::ff());
  // absorption
  EXPECT_EQ(Formula::conj({a, Formula::disj({a, b})}), a);
  EXPECT_EQ(Formula::disj({a, Formula::conj({a, b})}), a);
  EXPECT_EQ(Formula::conj({}), Formula::tt());
  EXPECT_EQ(Formula::disj({}), Formula::ff());
}

TEST(Formula, Printing) {
  EXPECT_EQ(parse("G(m1 -> X F i1)").str(), "G (!m1 || X (F i1))");
  EXPECT_EQ(parse("F a && X F a").str(), "(F a) && X (F a)");
  EXPECT_EQ(parse("true").str(), "true");
  // printed text parses back to the same formula
  for (auto text : {"a U (b R !c)", "G F a -> F G b", "X X (a || b) && c", "(a U b) U c"})
    EXPECT_EQ(parse(parse(text).str()), parse(text)) << text;
}

TEST(Formula, PropsAndSubformulas) {
  Formula f = parse("a U (b && X c)");
  auto ps = props_of(f);
  EXPECT_EQ(ps.size(), 3u);
  auto subs = subformulas(f);
  EXPECT_EQ(subs.back(), f);  // post-order
  EXPECT_TRUE(contains_release(parse("a && G b")));
  EXPECT_FALSE(contains_release(parse("a U X b")));
}

TEST(Letter, SetOperations) {
  Letter l = Letter::of({"a", "b"});
  EXPECT_TRUE(l.contains(PropRegistry::intern("a")));
  EXPECT_FALSE(l.contains(PropRegistry::intern("c")));
  l.erase(PropRegistry::intern("a"));
  EXPECT_EQ(l, Letter::of({"b"}));
  EXPECT_EQ(Letter::of({"a"}) | Letter::of({"b"}), Letter::of({"a", "b"}));
  EXPECT_TRUE(Letter().empty());
  auto keep = testing_support::props({"b"});
  EXPECT_EQ(Letter::of({"a", "b"}).restrict_to(keep), Letter::of({"b"}));
}

TEST(ApTable, PartitionAndMasks) {
  ApTable aps({"m0", "m1"}, {"i0"});
  EXPECT_TRUE(aps.is_input(PropRegistry::intern("m1")));
  EXPECT_TRUE(aps.is_output(PropRegistry::intern("i0")));
  EXPECT_EQ(aps.input_letter(2), Letter::of({"m1"}));
  EXPECT_EQ(aps.input_mask(Letter::of({"m0", "m1", "i0"})), 3u);
  EXPECT_EQ(aps.output_mask(Letter::of({"m0", "i0"})), 1u);
  EXPECT_THROW(ApTable({"x"}, {"x"}), Error);
  ApTable more = aps.merged(ApTable({"e"}, {"i0", "r"}));
  EXPECT_EQ(more.inputs().size(), 3u);
  EXPECT_EQ(more.outputs().size(), 2u);
  EXPECT_THROW(aps.merged(ApTable({"i0"}, {})), Error);
}
