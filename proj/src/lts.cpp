#include "updatepi/lts.hpp"

#include <algorithm>
#include <deque>
#include <chrono>
#include <set>
#include <unordered_set>

#include "updatepi/congruence.hpp"
#include "updatepi/state.hpp"
#include "updatepi/syntax.hpp"

namespace updatepi {

// ---------------------------------------------------------------------------
// Actions

Action Action::eps() { return Action{}; }

Action Action::tau() {
  Action a;
  a.kind_ = Kind::Tau;
  return a;
}

Action Action::in(Name channel, Sort sort, std::size_t arity) {
  Action a;
  a.kind_ = Kind::In;
  a.channel_ = std::move(channel);
  a.sort_ = sort;
  a.arity_ = arity;
  return a;
}

Action Action::out(Name channel, Sort sort, std::size_t arity) {
  Action a = in(std::move(channel), sort, arity);
  a.kind_ = Kind::Out;
  return a;
}

bool operator<(const Action& x, const Action& y) {
  auto head = [](const Action& a) {
    return std::tie(a.kind_, a.channel_, a.sort_, a.arity_);
  };
  if (head(x) != head(y)) return head(x) < head(y);
  return std::lexicographical_compare(x.parts_.begin(), x.parts_.end(),
                                      y.parts_.begin(), y.parts_.end());
}

bool complementary(const Action& x, const Action& y) {
  if (!x.atomic() || !y.atomic() || x.kind() == y.kind()) return false;
  return x.channel() == y.channel() && x.sort() == y.sort() &&
         x.arity() == y.arity();
}

Action Action::par_comp(std::vector<Action> parts) {
  std::vector<Action> flat;
  std::vector<Action> work = std::move(parts);
  while (!work.empty()) {
    Action a = std::move(work.back());
    work.pop_back();
    if (a.kind_ == Kind::ParComp) {
      work.insert(work.end(), a.parts_.begin(), a.parts_.end());
    } else if (a.kind_ != Kind::Eps) {
      flat.push_back(std::move(a));
    }
  }
  std::sort(flat.begin(), flat.end());
  std::vector<Action> kept;
  std::vector<bool> used(flat.size(), false);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (used[i]) continue;
    bool cancelled = false;
    for (std::size_t j = i + 1; j < flat.size(); ++j) {
      if (!used[j] && complementary(flat[i], flat[j])) {
        used[j] = true;
        cancelled = true;
        break;
      }
    }
    if (!cancelled) kept.push_back(flat[i]);
  }
  if (kept.empty()) return eps();
  if (kept.size() == 1) return kept.front();
  Action a;
  a.kind_ = Kind::ParComp;
  a.parts_ = std::move(kept);
  return a;
}

Action Action::seq_comp(Action first, Action then) {
  if (first.kind_ == Kind::Tau && then.kind_ == Kind::Tau) return tau();
  Action a;
  a.kind_ = Kind::SeqComp;
  a.parts_ = {std::move(first), std::move(then)};
  return a;
}

bool Action::mentions(const Name& n) const {
  if (atomic()) return channel_ == n;
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Action& p) { return p.mentions(n); });
}

std::string to_string(const Action& a) {
  switch (a.kind()) {
    case Action::Kind::Eps: return "eps";
    case Action::Kind::Tau: return "tau";
    case Action::Kind::In:
    case Action::Kind::Out: {
      std::string s = to_string(a.channel());
      s += a.kind() == Action::Kind::In ? "?" : "!";
      switch (a.sort()) {
        case Sort::NameSort: s += "(" + std::to_string(a.arity()) + ")"; break;
        case Sort::ProcSort: s += a.arity() == 2 ? "<l,P>" : "{P}"; break;
        case Sort::LocSort: s += "[P]"; break;
      }
      return s;
    }
    case Action::Kind::ParComp:
    case Action::Kind::SeqComp: {
      const char* sep = a.kind() == Action::Kind::ParComp ? " | " : " + ";
      std::string s = "(";
      for (std::size_t i = 0; i < a.parts().size(); ++i) {
        if (i) s += sep;
        s += to_string(a.parts()[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Transitions

namespace {

const Name& up_channel() {
  static const Name n{"up"};
  return n;
}

using Rebuild = std::function<Process(const Process&)>;

// Atomic moves keep the acting prefix and a way to put its residual back;
// other moves carry the whole node after the move.
struct Move {
  Action label;
  std::string rule;
  Process leaf;
  Rebuild rebuild;
  Process result;
  Substitution inst;
};

Process placeholder_residual(const Process& leaf, Substitution& inst) {
  if (leaf.is<node::Input>()) {
    const auto& n = leaf.as<node::Input>();
    std::visit(
        [&](const auto& pat) {
          using T = std::decay_t<decltype(pat)>;
          if constexpr (std::is_same_v<T, NamePattern>) {
            for (const auto& b : pat.binders) inst.bind(b, Name("p_" + b.base));
          } else {
            inst.bind(pat.binder, var(ProcessVar("P_" + pat.binder.ident)));
          }
        },
        n.pattern);
    Process body = apply(inst, n.body);
    return n.mode == InputMode::Once ? body : par(leaf, body);
  }
  if (leaf.is<node::UpdRecv>()) {
    const auto& n = leaf.as<node::UpdRecv>();
    inst.bind(n.binder, var(ProcessVar("P_" + n.binder.ident)));
    return par(par(leaf, blocked(apply(inst, n.log))), apply(inst, n.body));
  }
  return nil();
}

class Generator {
 public:
  Generator(const Process& root, const LtsOptions& opts)
      : opts_(opts), ambient_(state_of(root)) {}

  std::vector<Move> moves(const Process& p) {
    switch (p.kind()) {
      case Kind::Nil:
      case Kind::Var:
        return {};
      case Kind::OutName: {
        const auto& n = p.as<node::OutName>();
        return {atomic(Action::out(n.subject, Sort::NameSort, n.payloads.size()),
                       "T.Out.Name", p)};
      }
      case Kind::OutProc:
        return {atomic(Action::out(p.as<node::OutProc>().subject,
                                   Sort::ProcSort, 1),
                       "T.Out.Proc", p)};
      case Kind::UpdProv:
        return {atomic(Action::out(up_channel(), Sort::ProcSort, 2),
                       "T.Update.Prv", p)};
      case Kind::UpdRecv:
        return {atomic(Action::in(up_channel(), Sort::ProcSort, 2),
                       "T.Update.Ok", p)};
      case Kind::Input: {
        const auto& n = p.as<node::Input>();
        if (const auto* np = std::get_if<NamePattern>(&n.pattern)) {
          return {atomic(Action::in(np->subject, Sort::NameSort,
                                    np->binders.size()),
                         "T.In.Name", p)};
        }
        if (const auto* pp = std::get_if<ProcPattern>(&n.pattern)) {
          return {atomic(Action::in(pp->subject, Sort::ProcSort, 1),
                         "T.In.Proc", p)};
        }
        return {atomic(Action::in(std::get<LocPattern>(n.pattern).subject,
                                  Sort::LocSort, 1),
                       "T.In.Pass", p)};
      }
      case Kind::Loc: {
        const auto& n = p.as<node::Loc>();
        std::vector<Move> out{
            atomic(Action::out(n.loc, Sort::LocSort, 1), "T.Out.Pass", p)};
        Name l = n.loc;
        for (auto& m : moves(n.body)) {
          if (m.label.kind() != Action::Kind::Tau) continue;
          m.result = loc(l, m.result);
          m.rule = "T.Pass";
          out.push_back(std::move(m));
        }
        return out;
      }
      case Kind::Restrict: {
        const auto& n = p.as<node::Restrict>();
        Name x = n.binder;
        std::vector<Move> out;
        for (auto& m : moves(n.body)) {
          if (m.label.mentions(x)) continue;
          lift(m, [x](const Process& q) { return restrict(x, q); });
          out.push_back(std::move(m));
        }
        return out;
      }
      case Kind::Blocked: {
        if (!opts_.flags.allowBlocked) return {};
        std::vector<Move> out = moves(p.as<node::Blocked>().body);
        for (auto& m : out) lift(m, [](const Process& q) { return blocked(q); });
        return out;
      }
      case Kind::Seq:
        return seq_moves(p.as<node::Seq>());
      case Kind::Par:
        return par_moves(p.as<node::Par>());
    }
    return {};
  }

  // The node a move leads to, with symbolic residuals for open inputs.
  static Process target(const Move& m, Substitution& inst) {
    if (!m.rebuild) return m.result;
    return m.rebuild(placeholder_residual(m.leaf, inst));
  }

 private:
  LtsOptions opts_;
  StateMultiset ambient_;

  static Move atomic(Action a, const char* rule, const Process& leaf) {
    Move m;
    m.label = std::move(a);
    m.rule = rule;
    m.leaf = leaf;
    m.rebuild = [](const Process& q) { return q; };
    return m;
  }

  static void lift(Move& m, Rebuild ctx) {
    if (m.rebuild) {
      m.rebuild = [inner = std::move(m.rebuild), ctx = std::move(ctx)](
                      const Process& q) { return ctx(inner(q)); };
    } else {
      m.result = ctx(m.result);
    }
  }

  std::vector<Move> seq_moves(const node::Seq& n) {
    Process then = n.then;
    std::vector<Move> firsts = moves(n.first);
    std::vector<Move> out;
    for (const auto& m : firsts) {
      Move c = m;
      lift(c, [then](const Process& q) { return seq(q, then); });
      if (c.rule.rfind("T.Seq", 0) != 0 && !c.rebuild) c.rule = "T.Seq.Fst";
      out.push_back(std::move(c));
    }
    if (!opts_.flags.seqBoth || firsts.empty()) return out;
    std::vector<Move> thens = moves(n.then);
    for (const auto& f : firsts) {
      for (const auto& t : thens) {
        Action label = Action::seq_comp(f.label, t.label);
        if (opts_.tauOnly && label.kind() != Action::Kind::Tau) continue;
        Move c;
        c.label = std::move(label);
        c.rule = "T.Seq.Both";
        Substitution inst;
        Process l = target(f, inst);
        Process r = target(t, inst);
        c.result = seq(l, r);
        c.inst = inst;
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  std::vector<Move> par_moves(const node::Par& n) {
    Process left = n.left;
    Process right = n.right;
    std::vector<Move> ls = moves(left);
    std::vector<Move> rs = moves(right);
    std::vector<Move> out;
    for (const auto& l : ls) {
      if (!l.rebuild) continue;
      for (const auto& r : rs) {
        if (!r.rebuild) continue;
        if (complementary(l.label, r.label)) {
          out.push_back(communicate(l, r));
        } else if (!opts_.tauOnly) {
          Move c;
          c.label = Action::par_comp({l.label, r.label});
          c.rule = "T.Comm";
          Substitution inst;
          Process lt = target(l, inst);
          Process rt = target(r, inst);
          c.result = par(lt, rt);
          c.inst = inst;
          out.push_back(std::move(c));
        }
      }
    }
    for (auto& m : ls) {
      lift(m, [right](const Process& q) { return par(q, right); });
      out.push_back(std::move(m));
    }
    for (auto& m : rs) {
      lift(m, [left](const Process& q) { return par(left, q); });
      out.push_back(std::move(m));
    }
    return out;
  }

  static Process fire(const Process& in, const Substitution& theta) {
    const auto& n = in.as<node::Input>();
    Process body = apply(theta, n.body);
    return n.mode == InputMode::Once ? body : par(in, body);
  }

  // T.Comm with complementary labels gives eps, re-emitted as tau.
  Move communicate(const Move& l, const Move& r) {
    bool left_out = l.label.kind() == Action::Kind::Out;
    const Move& o = left_out ? l : r;
    const Move& i = left_out ? r : l;
    Process o_res;
    Process i_res;
    Substitution theta;
    std::string rule = "T.Red";
    const Process& op = o.leaf;
    const Process& ip = i.leaf;
    if (op.is<node::UpdProv>()) {
      UpdateOutcome u = try_update(op, ip, ambient_);
      o_res = u.provResidual;
      i_res = u.recvResidual;
      theta = u.substitution;
      rule += "/" + u.firedRule;
    } else {
      const auto& pat = ip.as<node::Input>().pattern;
      if (const auto* np = std::get_if<NamePattern>(&pat)) {
        theta = Substitution::names(np->binders, op.as<node::OutName>().payloads);
      } else if (const auto* pp = std::get_if<ProcPattern>(&pat)) {
        theta = Substitution::process(pp->binder, op.as<node::OutProc>().payload);
      } else {
        theta = Substitution::process(std::get<LocPattern>(pat).binder,
                                      op.as<node::Loc>().body);
      }
      o_res = nil();
      i_res = fire(ip, theta);
    }
    Move m;
    m.label = Action::tau();
    m.rule = rule;
    m.inst = theta;
    Process lp = left_out ? l.rebuild(o_res) : l.rebuild(i_res);
    Process rp = left_out ? r.rebuild(i_res) : r.rebuild(o_res);
    m.result = par(lp, rp);
    return m;
  }
};

}  // namespace

std::vector<Transition> transitions(const Process& p, const LtsOptions& opts) {
  Process root = normalize(p).term;
  Generator g(root, opts);
  std::vector<Transition> out;
  for (const auto& m : g.moves(root)) {
    if (opts.tauOnly && m.label.kind() != Action::Kind::Tau) continue;
    Transition t;
    t.source = root;
    t.label = m.label;
    Substitution inst = m.inst;
    t.target = normalize(Generator::target(m, inst)).term;
    t.instantiation = inst;
    t.rule = m.rule;
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, Process> tau_closure(const Process& p, std::size_t depth,
                                           const EngineFlags& flags) {
  LtsOptions opts{flags, true};
  std::map<std::string, Process> seen;
  CanonicalForm start = normalize(p);
  seen.emplace(start.key, start.term);
  std::deque<std::pair<Process, std::size_t>> queue{{start.term, 0}};
  while (!queue.empty()) {
    auto [term, d] = queue.front();
    queue.pop_front();
    if (d >= depth) continue;
    for (const auto& t : transitions(term, opts)) {
      CanonicalForm cf = normalize(t.target);
      if (seen.emplace(cf.key, cf.term).second) queue.emplace_back(cf.term, d + 1);
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Term enumeration

namespace {

// Names come from {a, b} in every position, binders included, so inner
// binders shadow. Size is the node count, 0 included.
class TermSpace {
 public:
  const std::vector<Process>& get(std::size_t size, bool has_var) {
    auto key = std::make_pair(size, has_var);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Process> uniq;
    std::unordered_set<std::string> keys;
    build(size, has_var, [&](const Process& p) {
      CanonicalForm cf = normalize(p);
      if (keys.insert(cf.key).second) uniq.push_back(std::move(cf.term));
      return true;
    });
    return memo_.emplace(key, std::move(uniq)).first->second;
  }

  // Closed terms of exactly this size, without memoizing the level.
  bool stream(std::size_t size, const std::function<bool(const Process&)>& visit) {
    return build(size, false, [&](const Process& p) {
      CanonicalForm cf = normalize(p);
      if (!visited_.insert(cf.key).second) return true;
      return visit(cf.term);
    });
  }

 private:
  std::map<std::pair<std::size_t, bool>, std::vector<Process>> memo_;
  std::unordered_set<std::string> visited_;  // across sizes
  const std::vector<Name> names_{Name("a"), Name("b")};
  const Name l_{"l"};
  const ProcessVar x_{"X"};

  template <class Sink>
  bool build(std::size_t size, bool has_var, Sink&& emit) {
    if (size == 0) return true;
    if (size == 1) {
      if (!emit(nil())) return false;
      if (has_var && !emit(var(x_))) return false;
      for (const auto& s : names_) {
        for (const auto& n : names_) {
          if (!emit(out_name(s, {n}))) return false;
        }
      }
      return true;
    }
    const std::size_t rest = size - 1;
    for (std::size_t i = 1; i < rest; ++i) {
      const auto& ls = get(i, has_var);
      const auto& rs = get(rest - i, has_var);
      for (const auto& l : ls) {
        for (const auto& r : rs) {
          if (!emit(par(l, r)) || !emit(seq(l, r))) return false;
        }
      }
    }
    const auto& bodies = get(rest, has_var);
    for (const auto& body : bodies) {
      for (const auto& n : names_) {
        if (!emit(restrict(n, body)) || !emit(out_proc(n, body))) return false;
        for (auto m : {InputMode::Once, InputMode::Replicated}) {
          for (const auto& s : names_) {
            if (!emit(input(NamePattern{s, {n}}, m, body))) return false;
          }
        }
      }
      if (!emit(loc(l_, body)) || !emit(blocked(body)) ||
          !emit(upd_prov(Name("l", 1), body)) || !emit(upd_prov(Name("l", 2), body))) {
        return false;
      }
    }
    const auto& open = get(rest, true);
    for (const auto& body : open) {
      for (auto m : {InputMode::Once, InputMode::Replicated}) {
        for (const auto& s : names_) {
          if (!emit(input(ProcPattern{s, x_}, m, body))) return false;
        }
        if (!emit(input(LocPattern{l_, x_}, m, body))) return false;
      }
    }
    // up?(l@1, X)#{R} * l@1[Q]
    for (std::size_t i = 1; i + 3 < size; ++i) {
      const auto& rs = get(i, true);
      const auto& qs = get(size - 3 - i, true);
      for (const auto& r : rs) {
        for (const auto& q : qs) {
          if (!emit(upd_recv(Name("l", 1), x_, r, loc(Name("l", 1), q)))) return false;
        }
      }
    }
    return true;
  }
};

std::vector<std::string> keys_of(const std::map<std::string, Process>& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

}  // namespace

bool enumerate_terms(std::size_t max_size,
                     const std::function<bool(const Process&)>& visit) {
  TermSpace space;
  for (std::size_t s = 1; s <= max_size; ++s) {
    if (!space.stream(s, visit)) return false;
  }
  return true;
}

namespace {

class Checker {
 public:
  explicit Checker(const CorrespondenceOptions& opts) : opts_(opts) {
    if (!(opts.engineFlags == opts.ltsFlags)) {
      throw FlagMismatch("reduction engine (" + to_string(opts.engineFlags) +
                         ") and transition system (" + to_string(opts.ltsFlags) +
                         ") must use the same flags");
    }
  }

  void check(const Process& p) {
    ++report_.termsChecked;
    std::map<std::string, Process> red;
    for (const auto& s : enumerate_steps(Configuration::of(p), opts_.engineFlags)) {
      CanonicalForm cf = normalize(s.postTerm);
      red.emplace(cf.key, cf.term);
    }
    std::map<std::string, Process> lts;
    for (const auto& t : transitions(p, LtsOptions{opts_.ltsFlags, true})) {
      CanonicalForm cf = normalize(t.target);
      lts.emplace(cf.key, cf.term);
    }
    if (keys_of(red) != keys_of(lts)) {
      record(p, red, lts);
      return;
    }
    if (opts_.closureDepth > 1 && !red.empty()) {
      auto r = reachable(p, opts_.closureDepth, std::size_t(-1), opts_.engineFlags);
      auto t = tau_closure(p, opts_.closureDepth, opts_.ltsFlags);
      record(p, r.states, t);
    }
  }

  CorrespondenceReport& report() { return report_; }

 private:
  const CorrespondenceOptions& opts_;
  CorrespondenceReport report_;

  void record(const Process& p, const std::map<std::string, Process>& red,
              const std::map<std::string, Process>& lts) {
    if (keys_of(red) == keys_of(lts)) return;
    ++report_.counterexampleCount;
    if (report_.counterexamples.size() >= opts_.maxCounterexamples) return;
    Counterexample c;
    c.term = p;
    for (const auto& [k, v] : red) {
      if (!lts.count(k)) c.onlyReduction.push_back(print(v));
    }
    for (const auto& [k, v] : lts) {
      if (!red.count(k)) c.onlyLts.push_back(print(v));
    }
    report_.counterexamples.push_back(std::move(c));
  }
};

}  // namespace

CorrespondenceReport correspondence_check(const CorrespondenceOptions& opts) {
  Checker checker(opts);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  bool done = enumerate_terms(opts.bound, [&](const Process& p) {
    checker.check(p);
    return !opts.budget || Clock::now() - start < *opts.budget;
  });
  checker.report().complete = done;
  return checker.report();
}

CorrespondenceReport correspondence_check(const std::vector<Process>& terms,
                                          const CorrespondenceOptions& opts) {
  Checker checker(opts);
  for (const auto& p : terms) checker.check(p);
  checker.report().complete = true;
  return checker.report();
}

}  // namespace updatepi
