// Test-only helpers: a random term generator and oracles that do not share
// code with the library.
#pragma once

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "updatepi/syntax.hpp"
#include "updatepi/term.hpp"

namespace testsupport {

using namespace updatepi;

inline std::string fixture_path(const std::string& name) {
  return std::string(UPDATEPI_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Process load_fixture(const std::string& name) {
  ParseOptions o;
  o.file = name;
  return parse(read_fixture(name), o);
}

inline Process P(std::string_view text) { return parse(text); }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return below(2) == 0; }

  Name channel() { return Name(channels_[below(channels_.size())]); }
  Name location() {
    std::optional<std::uint32_t> v;
    if (below(3) > 0) v = static_cast<std::uint32_t>(1 + below(3));
    return Name(locations_[below(locations_.size())], v);
  }
  Name binder() { return Name(binders_[below(binders_.size())]); }
  ProcessVar pvar() { return ProcessVar(vars_[below(vars_.size())]); }

  // Closed unless vars lists variables in scope.
  Process term(int depth, std::vector<ProcessVar> vars = {}) {
    if (depth <= 0) return leaf(vars);
    switch (below(14)) {
      case 0:
      case 1:
        return par(term(depth - 1, vars), term(depth - 1, vars));
      case 2:
        return seq(term(depth - 1, vars), term(depth - 1, vars));
      case 3:
        return restrict(binder(), term(depth - 1, vars));
      case 4:
        return loc(location(), term(depth - 1, vars));
      case 5:
        return out_proc(channel(), term(depth - 1, vars));
      case 6: {
        std::vector<Name> bs{binder()};
        if (coin()) {
          Name second = binder();
          if (!(second == bs[0])) bs.push_back(second);
        }
        return input(NamePattern{channel(), bs}, mode(), term(depth - 1, vars));
      }
      case 7: {
        ProcessVar x = pvar();
        auto inner = vars;
        inner.push_back(x);
        return input(ProcPattern{channel(), x}, mode(), term(depth - 1, inner));
      }
      case 8: {
        ProcessVar x = pvar();
        auto inner = vars;
        inner.push_back(x);
        return input(LocPattern{Name(locations_[below(locations_.size())]), x}, mode(),
                     term(depth - 1, inner));
      }
      case 9:
        return upd_prov(location(), term(depth - 1, vars));
      case 10: {
        Name l = location();
        ProcessVar x = pvar();
        auto inner = vars;
        inner.push_back(x);
        Name k(l.base, coin() ? l.version : std::nullopt);
        return upd_recv(l, x, term(depth - 1, inner), loc(k, term(depth - 1, inner)));
      }
      case 11:
        return blocked(term(depth - 1, vars));
      default:
        return leaf(vars);
    }
  }

  Process leaf(const std::vector<ProcessVar>& vars) {
    switch (below(4)) {
      case 0:
        return nil();
      case 1:
        if (!vars.empty()) return var(vars[below(vars.size())]);
        [[fallthrough]];
      default: {
        std::vector<Name> ps{pick_name()};
        if (coin()) ps.push_back(pick_name());
        return out_name(channel(), ps);
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> channels_{"a", "b", "c", "x", "y"};
  std::vector<std::string> binders_{"x", "y", "z", "a"};
  std::vector<std::string> locations_{"l", "k"};
  std::vector<std::string> vars_{"X", "Y"};

  Name pick_name() { return coin() ? channel() : binder(); }
  InputMode mode() { return coin() ? InputMode::Once : InputMode::Replicated; }
};

// ---------------------------------------------------------------------------
// Oracles

inline void naive_fn(const Process& p, std::vector<Name> bound, NameSet& out);

inline void naive_fn_pattern(const Pattern& pat, std::vector<Name>& bound, NameSet& out) {
  auto use = [&](const Name& n) {
    for (const auto& b : bound) if (b == n) return;
    out.insert(n);
  };
  use(pattern_subject(pat));
  if (auto* np = std::get_if<NamePattern>(&pat)) {
    for (const auto& b : np->binders) bound.push_back(b);
  }
}

// Free names, written as a plain walk carrying the list of bound names.
inline void naive_fn(const Process& p, std::vector<Name> bound, NameSet& out) {
  auto use = [&](const Name& n) {
    for (const auto& b : bound) if (b == n) return;
    out.insert(n);
  };
  switch (p.kind()) {
    case Kind::Nil:
    case Kind::Var:
      return;
    case Kind::Restrict: {
      auto& r = p.as<node::Restrict>();
      bound.push_back(r.binder);
      naive_fn(r.body, bound, out);
      return;
    }
    case Kind::Par:
      naive_fn(p.as<node::Par>().left, bound, out);
      naive_fn(p.as<node::Par>().right, bound, out);
      return;
    case Kind::Seq:
      naive_fn(p.as<node::Seq>().first, bound, out);
      naive_fn(p.as<node::Seq>().then, bound, out);
      return;
    case Kind::Loc:
      use(p.as<node::Loc>().loc);
      naive_fn(p.as<node::Loc>().body, bound, out);
      return;
    case Kind::OutName:
      use(p.as<node::OutName>().subject);
      for (const auto& n : p.as<node::OutName>().payloads) use(n);
      return;
    case Kind::OutProc:
      use(p.as<node::OutProc>().subject);
      naive_fn(p.as<node::OutProc>().payload, bound, out);
      return;
    case Kind::Input: {
      auto& in = p.as<node::Input>();
      naive_fn_pattern(in.pattern, bound, out);
      naive_fn(in.body, bound, out);
      return;
    }
    case Kind::UpdProv:
      use(p.as<node::UpdProv>().loc);
      naive_fn(p.as<node::UpdProv>().payload, bound, out);
      return;
    case Kind::UpdRecv:
      use(p.as<node::UpdRecv>().pattern);
      naive_fn(p.as<node::UpdRecv>().log, bound, out);
      naive_fn(p.as<node::UpdRecv>().body, bound, out);
      return;
    case Kind::Blocked:
      naive_fn(p.as<node::Blocked>().body, bound, out);
      return;
  }
}

inline NameSet oracle_free_names(const Process& p) {
  NameSet out;
  naive_fn(p, {}, out);
  return out;
}

// Alpha-equivalence by simultaneous descent, pairing binders in two stacks.
class AlphaOracle {
 public:
  bool eq(const Process& p, const Process& q) { return go(p, q); }

 private:
  std::vector<std::pair<Name, Name>> names_;
  std::vector<std::pair<ProcessVar, ProcessVar>> vars_;

  bool same(const Name& a, const Name& b) const {
    for (auto it = names_.rbegin(); it != names_.rend(); ++it) {
      bool la = it->first == a, lb = it->second == b;
      if (la || lb) return la && lb;
    }
    return a == b;
  }
  bool same(const ProcessVar& a, const ProcessVar& b) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
      bool la = it->first == a, lb = it->second == b;
      if (la || lb) return la && lb;
    }
    return a == b;
  }

  template <class F>
  bool with_names(const std::vector<Name>& a, const std::vector<Name>& b, F&& f) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) names_.emplace_back(a[i], b[i]);
    bool r = f();
    names_.resize(names_.size() - a.size());
    return r;
  }
  template <class F>
  bool with_var(const ProcessVar& a, const ProcessVar& b, F&& f) {
    vars_.emplace_back(a, b);
    bool r = f();
    vars_.pop_back();
    return r;
  }

  bool go(const Process& p, const Process& q) {
    if (p.kind() != q.kind()) return false;
    switch (p.kind()) {
      case Kind::Nil:
        return true;
      case Kind::Var:
        return same(p.as<node::Var>().var, q.as<node::Var>().var);
      case Kind::Restrict: {
        auto &a = p.as<node::Restrict>(), &b = q.as<node::Restrict>();
        return with_names({a.binder}, {b.binder}, [&] { return go(a.body, b.body); });
      }
      case Kind::Par:
        return go(p.as<node::Par>().left, q.as<node::Par>().left) &&
               go(p.as<node::Par>().right, q.as<node::Par>().right);
      case Kind::Seq:
        return go(p.as<node::Seq>().first, q.as<node::Seq>().first) &&
               go(p.as<node::Seq>().then, q.as<node::Seq>().then);
      case Kind::Loc:
        return same(p.as<node::Loc>().loc, q.as<node::Loc>().loc) &&
               go(p.as<node::Loc>().body, q.as<node::Loc>().body);
      case Kind::OutName: {
        auto &a = p.as<node::OutName>(), &b = q.as<node::OutName>();
        if (!same(a.subject, b.subject) || a.payloads.size() != b.payloads.size()) return false;
        for (std::size_t i = 0; i < a.payloads.size(); ++i) {
          if (!same(a.payloads[i], b.payloads[i])) return false;
        }
        return true;
      }
      case Kind::OutProc:
        return same(p.as<node::OutProc>().subject, q.as<node::OutProc>().subject) &&
               go(p.as<node::OutProc>().payload, q.as<node::OutProc>().payload);
      case Kind::Input: {
        auto &a = p.as<node::Input>(), &b = q.as<node::Input>();
        if (a.mode != b.mode || a.pattern.index() != b.pattern.index()) return false;
        if (!same(pattern_subject(a.pattern), pattern_subject(b.pattern))) return false;
        if (auto* na = std::get_if<NamePattern>(&a.pattern)) {
          auto& nb = std::get<NamePattern>(b.pattern);
          return with_names(na->binders, nb.binders, [&] { return go(a.body, b.body); });
        }
        const ProcessVar& xa = std::holds_alternative<ProcPattern>(a.pattern)
                                   ? std::get<ProcPattern>(a.pattern).binder
                                   : std::get<LocPattern>(a.pattern).binder;
        const ProcessVar& xb = std::holds_alternative<ProcPattern>(b.pattern)
                                   ? std::get<ProcPattern>(b.pattern).binder
                                   : std::get<LocPattern>(b.pattern).binder;
        return with_var(xa, xb, [&] { return go(a.body, b.body); });
      }
      case Kind::UpdProv:
        return same(p.as<node::UpdProv>().loc, q.as<node::UpdProv>().loc) &&
               go(p.as<node::UpdProv>().payload, q.as<node::UpdProv>().payload);
      case Kind::UpdRecv: {
        auto &a = p.as<node::UpdRecv>(), &b = q.as<node::UpdRecv>();
        if (!same(a.pattern, b.pattern)) return false;
        return with_var(a.binder, b.binder,
                        [&] { return go(a.log, b.log) && go(a.body, b.body); });
      }
      case Kind::Blocked:
        return go(p.as<node::Blocked>().body, q.as<node::Blocked>().body);
    }
    return false;
  }
};

inline bool oracle_alpha_eq(const Process& p, const Process& q) {
  return AlphaOracle().eq(p, q);
}

// Visible resources counted by a separate walk: a restricted name hides
// every resource whose subject is that name.
inline std::map<std::string, int> oracle_state(const Process& p,
                                               std::vector<Name> hidden = {}) {
  std::map<std::string, int> out;
  auto add = [&](const Name& n) {
    for (const auto& h : hidden) if (h == n) return;
    ++out[to_string(n)];
  };
  auto merge = [&](const std::map<std::string, int>& m) {
    for (auto& [k, v] : m) out[k] += v;
  };
  switch (p.kind()) {
    case Kind::Restrict: {
      auto inner = hidden;
      inner.push_back(p.as<node::Restrict>().binder);
      merge(oracle_state(p.as<node::Restrict>().body, inner));
      break;
    }
    case Kind::Par:
      merge(oracle_state(p.as<node::Par>().left, hidden));
      merge(oracle_state(p.as<node::Par>().right, hidden));
      break;
    case Kind::Seq:
      merge(oracle_state(p.as<node::Seq>().first, hidden));
      merge(oracle_state(p.as<node::Seq>().then, hidden));
      break;
    case Kind::Blocked:
      merge(oracle_state(p.as<node::Blocked>().body, hidden));
      break;
    case Kind::Loc:
      add(p.as<node::Loc>().loc);
      merge(oracle_state(p.as<node::Loc>().body, hidden));
      break;
    case Kind::OutName:
      add(p.as<node::OutName>().subject);
      break;
    case Kind::OutProc:
      add(p.as<node::OutProc>().subject);
      merge(oracle_state(p.as<node::OutProc>().payload, hidden));
      break;
    case Kind::UpdProv:
      add(p.as<node::UpdProv>().loc);
      merge(oracle_state(p.as<node::UpdProv>().payload, hidden));
      break;
    default:
      break;
  }
  for (auto it = out.begin(); it != out.end();) {
    it = it->second == 0 ? out.erase(it) : std::next(it);
  }
  return out;
}

inline std::map<std::string, int> as_counts(const StateMultiset& s) {
  std::map<std::string, int> out;
  for (const auto& [n, c] : s.entries()) out[to_string(n)] += static_cast<int>(c);
  return out;
}

}  // namespace testsupport
