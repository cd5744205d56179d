#include <doctest.h>

#include "support.hpp"
#include "updatepi/substitution.hpp"

using namespace updatepi;
using namespace testsupport;

TEST_CASE("name substitution replaces free occurrences only") {
  auto theta = Substitution::names({Name("x")}, {Name("n")});
  CHECK(alpha_eq(apply(theta, P("x!(x) | a?(x) > x!(b)")), P("n!(n) | a?(x) > x!(b)")));
  CHECK(theta(Name("x")) == Name("n"));
  CHECK(theta(Name("y")) == Name("y"));
}

TEST_CASE("binders are renamed instead of capturing") {
  auto theta = Substitution::names({Name("x")}, {Name("y")});
  Process out = apply(theta, P("new y. a!(x, y)"));
  // the free y must stay free and distinct from the bound one
  CHECK(oracle_free_names(out) == NameSet{Name("a"), Name("y")});
  CHECK(alpha_eq(out, P("new z. a!(y, z)")));

  Process q = apply(theta, P("a?(y) > b!(x, y)"));
  CHECK(alpha_eq(q, P("a?(w) > b!(y, w)")));
}

TEST_CASE("process substitution avoids capture by name binders") {
  ParseOptions open;
  open.closed = false;
  auto theta = Substitution::process(ProcessVar("X"), P("y!(n)"));
  Process out = apply(theta, parse("a?(y) > (X | y!(m))", open));
  CHECK(oracle_free_names(out).count(Name("y")));
  CHECK(alpha_eq(out, P("a?(z) > (y!(n) | z!(m))")));
}

TEST_CASE("process substitution respects variable binders") {
  ParseOptions open;
  open.closed = false;
  auto theta = Substitution::process(ProcessVar("X"), P("b!(n)"));
  CHECK(alpha_eq(apply(theta, parse("X | a?{X} > X", open)), P("b!(n) | a?{X} > X")));
  auto capture = Substitution::process(ProcessVar("X"), parse("Y", open));
  Process out = apply(capture, parse("a?{Y} > (X | Y)", open));
  CHECK(free_vars(out) == VarSet{ProcessVar("Y")});
}

TEST_CASE("free names after a renaming are the renamed free names") {
  Gen g(21);
  std::vector<Name> pool{Name("a"), Name("b"), Name("x"), Name("y"), Name("z")};
  for (int i = 0; i < 1000; ++i) {
    Process p = g.term(4);
    Substitution theta;
    for (const auto& n : pool) {
      if (g.coin()) theta.bind(n, pool[g.below(pool.size())]);
    }
    NameSet expect;
    for (const auto& n : oracle_free_names(p)) expect.insert(theta(n));
    REQUIRE(oracle_free_names(apply(theta, p)) == expect);
  }
}

TEST_CASE("composition matches sequential application") {
  Gen g(22);
  std::vector<Name> pool{Name("a"), Name("b"), Name("x"), Name("y")};
  for (int i = 0; i < 500; ++i) {
    Process p = g.term(4, {ProcessVar("X")});
    Substitution s1, s2;
    for (const auto& n : pool) {
      if (g.coin()) s1.bind(n, pool[g.below(pool.size())]);
      if (g.coin()) s2.bind(n, pool[g.below(pool.size())]);
    }
    s1.bind(ProcessVar("X"), g.term(2));
    REQUIRE(alpha_eq(apply(compose(s1, s2), p), apply(s2, apply(s1, p))));
  }
}

TEST_CASE("identity entries are not stored") {
  Substitution s;
  s.bind(Name("a"), Name("a"));
  s.bind(ProcessVar("X"), var("X"));
  CHECK(s.empty());
  CHECK_THROWS_AS(Substitution::names({Name("a")}, {}), std::invalid_argument);
}
