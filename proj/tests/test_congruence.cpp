#include <doctest.h>

#include "axioms.hpp"
#include "updatepi/congruence.hpp"

using namespace updatepi;
using namespace testsupport;

TEST_CASE("every congruence axiom holds on random instances") {
  Gen g(31);
  auto all = congruence_axioms();
  for (const auto& extra : congruence_extras()) all.push_back(extra);
  for (const auto& ax : all) {
    for (int i = 0; i < 100; ++i) {
      auto [lhs, rhs] = ax.instance(g);
      INFO(ax.name << ": " << print(lhs) << "  vs  " << print(rhs));
      REQUIRE(struct_eq(lhs, rhs));
    }
  }
}

TEST_CASE("locality is not extruded") {
  CHECK_FALSE(struct_eq(P("l[new x. x!(n)]"), P("new x. l[x!(n)]")));
  CHECK_FALSE(struct_eq(P("l[new x. (x!(n) | a?(y) > 0)]"), P("new x. l[x!(n) | a?(y) > 0]")));
}

TEST_CASE("0 is not a right unit of sequence") {
  CHECK_FALSE(struct_eq(P("a?(x) > 0 ; 0"), P("a?(x) > 0")));
  CHECK_FALSE(struct_eq(P("[[b?(x) > 0]] ; 0"), P("[[b?(x) > 0]]")));
  // outputs are extruded first, leaving 0 ; 0
  CHECK(struct_eq(P("a!(n) ; 0"), P("a!(n)")));
}

TEST_CASE("blocking is not erased by the congruence") {
  CHECK_FALSE(struct_eq(P("[[a!(n)]]"), P("a!(n)")));
  CHECK(struct_eq(P("[[new x. x!(n)]]"), P("new x. [[x!(n)]]")));
}

TEST_CASE("examples of canonical shapes") {
  CHECK(struct_eq(P("(a!{b!(n)} | c?(x) > 0) ; d!(m)"), P("a!{b!(n)} | (c?(x) > 0 ; d!(m))")));
  CHECK(struct_eq(P("[[new x. a?(y) > x!(y)]]"), P("new x. [[a?(y) > x!(y)]]")));
  CHECK(struct_eq(P("new x. new y. (x!(y) | y!(x))"), P("new y. new x. (x!(y) | y!(x))")));
  CHECK_FALSE(struct_eq(P("new x. (x!(a) | x?(y) > 0)"), P("new x. x!(a) | new x. x?(y) > 0")));
}

TEST_CASE("normalize is idempotent and respects alpha") {
  Gen g(32);
  for (int i = 0; i < 1000; ++i) {
    Process p = g.term(4);
    CanonicalForm a = normalize(p);
    CanonicalForm b = normalize(a.term);
    REQUIRE(a.key == b.key);
    REQUIRE(a.term == b.term);
    REQUIRE(oracle_free_names(a.term) == oracle_free_names(p));
  }
}

TEST_CASE("congruent inputs") {
  CHECK(congruent_inputs(NamePattern{Name("a"), {Name("x")}}, NamePattern{Name("a"), {Name("y")}}));
  CHECK_FALSE(congruent_inputs(NamePattern{Name("a"), {Name("x")}},
                               NamePattern{Name("b"), {Name("x")}}));
  CHECK_FALSE(congruent_inputs(ProcPattern{Name("a"), ProcessVar("X")},
                               NamePattern{Name("a"), {Name("x")}}));
  CHECK_FALSE(congruent_inputs(NamePattern{Name("a"), {Name("x")}},
                               NamePattern{Name("a"), {Name("x"), Name("y")}}));
}
