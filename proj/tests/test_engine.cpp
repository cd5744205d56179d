#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "updatepi/congruence.hpp"
#include "updatepi/engine.hpp"
#include "updatepi/state.hpp"

using namespace updatepi;
using namespace testsupport;

namespace {

bool has_tag(const StepRecord& s, const std::string& tag) {
  return std::find(s.derivation.begin(), s.derivation.end(), tag) != s.derivation.end();
}

std::vector<StepRecord> steps_of(const char* text, EngineFlags f = {}) {
  return enumerate_steps(Configuration::of(P(text)), f);
}

// The single step of a term, checked against its expected result and states.
StepRecord only_step(const char* text, const char* post, StateMultiset pre_state,
                     StateMultiset post_state, EngineFlags f = {}) {
  auto steps = steps_of(text, f);
  INFO(text);
  REQUIRE(steps.size() == 1);
  const auto& s = steps[0];
  CHECK(struct_eq(s.postTerm, P(post)));
  CHECK(s.preState == pre_state);
  CHECK(s.postState == post_state);
  CHECK(s.postState == state_of(s.postTerm));
  return s;
}

EngineFlags blocked_flag() {
  EngineFlags f;
  f.allowBlocked = true;
  return f;
}

}  // namespace

TEST_CASE("name communication consumes exactly the output's subject") {
  auto s = only_step("a!(n) | a?(x) > x!(m) | b!(k)", "n!(m) | b!(k)",
                     {Name("a"), Name("b")}, {Name("n"), Name("b")});
  CHECK(s.rule == "R.In.Name");
  CHECK(has_tag(s, "R.Out.Name"));
  CHECK(has_tag(s, "R.Comm"));
  REQUIRE(s.substitution.name_map().size() == 1);
  CHECK(s.substitution.name_map().begin()->second == Name("n"));
  only_step("a!(n) | a?(x) > 0", "0", {Name("a")}, {});
}

TEST_CASE("process communication consumes the subject and the payload") {
  auto s = only_step("a!{b!(n)} | a?{X} > 0", "0", {Name("a"), Name("b")}, {});
  CHECK(s.rule == "R.In.Proc");
  CHECK(has_tag(s, "R.Out.Proc"));
  only_step("a!{b!(n)} | a?{X} > (X | X)", "b!(n) | b!(n)", {Name("a"), Name("b")},
            {Name("b"), Name("b")});
}

TEST_CASE("passivation moves a located process") {
  auto s = only_step("l[b!(n)] | l?[X] > 0", "0", {Name("l"), Name("b")}, {});
  CHECK(s.rule == "R.In.Pass");
  CHECK(has_tag(s, "R.Out.Pass"));
  only_step("l[b!(n)] | l?[X] > k[X]", "k[b!(n)]", {Name("l"), Name("b")},
            {Name("k"), Name("b")});
  CHECK(steps_of("l@1[b!(n)] | l?[X] > 0").empty());
}

TEST_CASE("replicated triggers persist") {
  auto s = only_step("a!{b!(n)} | a?{X} * (X | c!(m))", "a?{X} * (X | c!(m)) | b!(n) | c!(m)",
                     {Name("a"), Name("b")}, {Name("b"), Name("c")});
  CHECK(s.rule == "R.In.Proc");
}

TEST_CASE("contexts are recorded") {
  auto s = only_step("d!(n) | (a!(n) | a?(x) > 0)", "d!(n)", {Name("d"), Name("a")}, {Name("d")});
  CHECK((has_tag(s, "R.Par.L") || has_tag(s, "R.Par.R")));
  auto r = only_step("l[new x. (x!(n) | x?(y) > 0)]", "l[0]", {Name("l")}, {Name("l")});
  CHECK(has_tag(r, "R.Res"));
  auto e = only_step("new x. (x!(n) | x?(y) > c!(y))", "c!(n)", {}, {Name("c")});
  CHECK(has_tag(e, "R.Exec"));
  CHECK(has_tag(e, "R.Eqv"));
  CHECK(has_tag(e, "R.Alpha"));
  auto seq = only_step("(a?(x) > 0 ; b?(y) > 0) | a!(n)", "b?(y) > 0", {Name("a")}, {});
  CHECK(has_tag(seq, "R.Seq.Fst"));
}

TEST_CASE("both parallel sides are tagged") {
  auto steps = steps_of("(a!(n) | b?(x) > 0) | (b!(m) | a?(y) > 0)");
  REQUIRE(steps.size() == 2);
  bool left = false, right = false;
  for (const auto& s : steps) {
    left |= has_tag(s, "R.Par.L");
    right |= has_tag(s, "R.Par.R");
  }
  CHECK(left);
  CHECK(right);
}

TEST_CASE("blocked processes only reduce with the flag") {
  CHECK(steps_of("[[a!(n) | a?(x) > 0]]").empty());
  auto s = only_step("[[a!(n) | a?(x) > 0]]", "0", {Name("a")}, {}, blocked_flag());
  CHECK(has_tag(s, "R.Blk"));
  only_step("[[a?(x) > 0]] | a!(n)", "0", {Name("a")}, {}, blocked_flag());
}

TEST_CASE("both sides of a sequence step together with the flag") {
  EngineFlags f = blocked_flag();
  const char* t = "[[a!(n) | a?(x) > 0]] ; (b!(m) | b?(y) > c!(y))";
  auto plain = steps_of(t, f);
  REQUIRE(plain.size() == 1);
  CHECK(plain[0].rule != "R.Seq.Both");
  f.seqBoth = true;
  auto both = steps_of(t, f);
  auto it = std::find_if(both.begin(), both.end(),
                         [](const StepRecord& s) { return s.rule == "R.Seq.Both"; });
  REQUIRE(it != both.end());
  CHECK(struct_eq(it->postTerm, P("c!(m)")));
  CHECK(it->preState == StateMultiset{Name("a"), Name("b")});
  CHECK(it->postState == StateMultiset{Name("c")});
}

TEST_CASE("update rules through the engine") {
  auto ok = only_step("up!(l@2){a!(n)} | up?(l@1, X)#{log!(n)} * l@1[X]",
                      "up?(l@1, X)#{log!(n)} * l@1[X] | [[log!(n)]] | l@1[a!(n)]",
                      {Name("l", 2), Name("a")}, {Name("log"), Name("l", 1), Name("a")});
  CHECK(ok.rule == "R.Update.Ok");
  CHECK(has_tag(ok, "R.Update.Prv"));
  REQUIRE(ok.update);
  CHECK(*ok.update == UpdateKind::Ok);

  auto unmat = only_step("up!(k@2){a!(n)} | up?(l@1, X)#{0} * l@1[X]",
                         "up!(k@2){a!(n)} | up?(l@1, X)#{0} * l@1[X]",
                         {Name("k", 2), Name("a")}, {Name("k", 2), Name("a")});
  CHECK(unmat.rule == "R.Update.UnMat");
  CHECK_FALSE(progresses(unmat));

  auto rest = only_step("up!(l@2){0} | up?(l@1, X)#{0} * l@1[a!(n)]",
                        "up?(l@1, X)#{0} * l@1[a!(n)]", {Name("l", 2)}, {});
  CHECK(rest.rule == "R.Update.Rest");

  auto fail = only_step("up!(l@2){a!(m)} | up?(l@1, X)#{log!(n)} * l@1[a!(n)]",
                        "up?(l@1, X)#{log!(n)} * l@1[a!(n)] | log!(n) | [[l@1[a!(n)]]]",
                        {Name("l", 2), Name("a")}, {Name("log"), Name("l", 1), Name("a")});
  CHECK(fail.rule == "R.Update.Fail");
}

TEST_CASE("an update waits for the predecessor of its sequence") {
  Engine e(load_fixture("timing.upi"));
  auto has_update = [](const std::vector<StepRecord>& steps) {
    return std::any_of(steps.begin(), steps.end(), [](const StepRecord& s) {
      return s.rule.rfind("R.Update.", 0) == 0;
    });
  };
  auto before = e.steps();
  CHECK_FALSE(has_update(before));
  REQUIRE(before.size() == 1);
  CHECK(before[0].rule == "R.In.Name");
  e.fire(0);
  auto after = e.steps();
  CHECK(has_update(after));
}

TEST_CASE("recover rolls back a failed update") {
  Engine e(P("up!(l@2){a!(m)} | up?(l@1, X)#{log!(n)} * l@1[a!(n)]"));
  e.fire(0);
  REQUIRE(e.trace().back().rule == "R.Update.Fail");
  auto blocks = blocked_positions(e.current().term);
  REQUIRE(blocks.size() == 1);
  const auto& r = e.recover(0);
  CHECK(r.rule == "Recover");
  REQUIRE(r.restored);
  CHECK(struct_eq(*r.restored, P("l@1[a!(n)]")));
  CHECK(struct_eq(e.current().term, P("up?(l@1, X)#{log!(n)} * l@1[a!(n)]")));
  CHECK(e.current().state == state_of(e.current().term));
  CHECK_THROWS_WITH_AS(e.recover(0), doctest::Contains("nothing to recover"), RecoveryError);
}

TEST_CASE("recover refuses blocks that are not failures") {
  Engine e(P("up!(l@2){a!(n)} | up?(l@1, X)#{log!(n)} * l@1[X]"));
  e.fire(0);
  REQUIRE(blocked_positions(e.current().term).size() == 1);
  CHECK_THROWS_WITH_AS(e.recover(0), doctest::Contains("nothing to recover"), RecoveryError);
  Engine plain(P("[[a!(n)]]"));
  CHECK_THROWS_AS(plain.recover(0), RecoveryError);
  CHECK_THROWS_AS(plain.recover(3), RecoveryError);
  const auto& u = plain.unblock(0);
  CHECK(u.rule == "Unblock");
  CHECK(struct_eq(plain.current().term, P("a!(n)")));
}

TEST_CASE("stale steps are rejected") {
  auto steps = steps_of("a!(n) | a?(x) > 0");
  CHECK_THROWS_AS(apply_step(Configuration::of(P("b!(n)")), steps[0]), std::invalid_argument);
  CHECK_NOTHROW(apply_step(Configuration::of(P("a?(x) > 0 | a!(n)")), steps[0]));
}

TEST_CASE("runs stop when only stuttering steps remain") {
  Engine e(P("up!(k@2){0} | up?(l@1, X)#{0} * l@1[X] | a!(n) | a?(x) * 0"));
  std::size_t n = e.run(10, Policy::first());
  CHECK(n == 1);
  CHECK(struct_eq(e.current().term, P("up!(k@2){0} | up?(l@1, X)#{0} * l@1[X] | a?(x) * 0")));
  Engine loop(P("a!(n) | a?(x) * a!(x)"));
  CHECK(loop.run(7, Policy::first()) == 7);
}

TEST_CASE("random policy is reproducible") {
  auto go = [](std::uint64_t seed) {
    Engine e(P("a!(n) | a!(m) | a?(x) * b!(x) | b?(y) * a!(y)"));
    e.run(20, Policy::random(seed));
    return normalize(e.current().term).key;
  };
  CHECK(go(5) == go(5));
}

TEST_CASE("step invariants on random terms") {
  Gen g(61);
  for (int i = 0; i < 400; ++i) {
    Process p = g.term(4);
    for (EngineFlags f : {EngineFlags{}, EngineFlags{true, true}}) {
      for (const auto& s : enumerate_steps(Configuration::of(p), f)) {
        REQUIRE(s.postState == state_of(s.postTerm));
        REQUIRE(s.preState == state_of(p));
        REQUIRE(normalize(s.postTerm).term == s.postTerm);
      }
    }
  }
}

TEST_CASE("reachability") {
  auto r = reachable(P("a!(n) | a?(x) > b!(x) | b?(y) > 0"), 5, 100);
  CHECK(r.states.size() == 3);
  CHECK_FALSE(r.truncated);
  auto t = reachable(P("a!(n) | a?(x) * a!(x)"), 3, 100);
  CHECK(t.states.size() == 1);
}
