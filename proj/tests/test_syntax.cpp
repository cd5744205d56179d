#include <doctest.h>

#include "support.hpp"

using namespace updatepi;
using namespace testsupport;

TEST_CASE("direct grammar readings") {
  CHECK(P("a!(n) | a?(x) > 0") ==
        par(out_name(Name("a"), {Name("n")}),
            input(NamePattern{Name("a"), {Name("x")}}, InputMode::Once, nil())));
  CHECK(P("up?(l@1, X)#{log!(ok)} * l@1[ a!(n) ]") ==
        upd_recv(Name("l", 1), ProcessVar("X"), out_name(Name("log"), {Name("ok")}),
                 loc(Name("l", 1), out_name(Name("a"), {Name("n")}))));
  CHECK(P("a!{b!(n)} | a?(X) * X") == P("a!{b!(n)} | a?{X} * X"));
  CHECK(P("l?[X] > X").as<node::Input>().pattern.index() == 2);
  CHECK(P("up!(l@2){0}") == upd_prov(Name("l", 2), nil()));
  CHECK(P("[[a!(n)]]") == blocked(out_name(Name("a"), {Name("n")})));
  CHECK(P("new x. x!(x)") == restrict(Name("x"), out_name(Name("x"), {Name("x")})));
}

TEST_CASE("precedence and associativity") {
  Process a = P("a!(n)"), b = P("b!(n)"), c = P("c!(n)");
  CHECK(P("a!(n) | b!(n) | c!(n)") == par(par(a, b), c));
  CHECK(P("a!(n) ; b!(n) ; c!(n)") == seq(seq(a, b), c));
  CHECK(P("a!(n) | b!(n) ; c!(n)") == par(a, seq(b, c)));
  CHECK(P("(a!(n) | b!(n)) ; c!(n)") == seq(par(a, b), c));
  // prefixes bind tighter than both operators
  CHECK(P("a?(x) > x!(n) | b!(n)") ==
        par(input(NamePattern{Name("a"), {Name("x")}}, InputMode::Once, P("x!(n)")), b));
  CHECK(P("new x. x!(n) | b!(n)") == par(restrict(Name("x"), P("x!(n)")), b));
}

TEST_CASE("comments and whitespace") {
  CHECK(P("-- nothing here\n  a!(n) -- trailing\n") == P("a!(n)"));
}

TEST_CASE("errors carry spans") {
  try {
    ParseOptions o;
    o.file = "f.upi";
    parse("a!(n) |\n  a?(x) > ", o);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.span().file == "f.upi");
    CHECK(e.span().startLine == 2);
    CHECK_FALSE(e.expected().empty());
    CHECK(std::string(e.what()).rfind("f.upi:2:", 0) == 0);
  }
  try {
    parse("a!{X}");
    FAIL("expected a scope error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Scope);
    CHECK(e.span().startCol == 4);
  }
  ParseOptions open;
  open.closed = false;
  CHECK_NOTHROW(parse("a!{X}", open));
  CHECK_THROWS_AS(parse("new x@1. 0"), ParseError);
  CHECK_THROWS_AS(parse("a!()"), ParseError);
  CHECK_THROWS_AS(parse("up?(l, X)#{0} * k[X]"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("a!(n) b!(n)"), ParseError);
}

TEST_CASE("deep nesting is an error, not a crash") {
  std::string deep(100000, '(');
  CHECK_THROWS_AS(parse(deep + "0" + std::string(100000, ')')), ParseError);
  std::string prefixes;
  for (int i = 0; i < 50000; ++i) prefixes += "a?(x) > ";
  CHECK_THROWS_AS(parse(prefixes + "0"), ParseError);
}

TEST_CASE("names") {
  CHECK(parse_name("l@2") == Name("l", 2));
  CHECK(parse_name("abc") == Name("abc"));
  CHECK_THROWS_AS(parse_name("X"), ParseError);
  CHECK_THROWS_AS(parse_name("l@"), ParseError);
}

TEST_CASE("printing round-trips") {
  Gen g(81);
  for (int i = 0; i < 2000; ++i) {
    Process p = g.term(5);
    std::string text = print(p);
    INFO(text);
    REQUIRE(oracle_alpha_eq(parse(text), p));
  }
  CHECK(print(P("a!(n) | (b!(n) | c!(n))")) == "a!(n) | (b!(n) | c!(n))");
  CHECK(print(P("(a!(n) ; b!(n)) ; c!(n)")) == "a!(n) ; b!(n) ; c!(n)");
}

TEST_CASE("fuzzed inputs never crash the parser") {
  Gen g(82);
  const std::string alphabet = "abXY0l@12 |;.,(){}[]!?>*#-\nnewup";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    if (g.coin()) {
      text = print(g.term(3));
      for (std::size_t k = 0, n = 1 + g.below(4); k < n && !text.empty(); ++k) {
        text[g.below(text.size())] = alphabet[g.below(alphabet.size())];
      }
    } else {
      for (std::size_t k = 0, n = g.below(40); k < n; ++k) text += alphabet[g.below(alphabet.size())];
    }
    try {
      parse(text);
    } catch (const ParseError&) {
    }
  }
}
