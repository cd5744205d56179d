#include "updatepi/substitution.hpp"

#include <stdexcept>

namespace updatepi {

Substitution Substitution::names(const std::vector<Name>& from,
                                 const std::vector<Name>& to) {
  if (from.size() != to.size()) {
    throw std::invalid_argument("substitution arity mismatch");
  }
  Substitution s;
  for (std::size_t i = 0; i < from.size(); ++i) s.bind(from[i], to[i]);
  return s;
}

Substitution Substitution::process(const ProcessVar& x, Process p) {
  Substitution s;
  s.bind(x, std::move(p));
  return s;
}

void Substitution::bind(const Name& from, const Name& to) {
  if (from == to) {
    names_.erase(from);
  } else {
    names_[from] = to;
  }
}

void Substitution::bind(const ProcessVar& x, Process p) {
  if (p.is<node::Var>() && p.as<node::Var>().var == x) {
    procs_.erase(x);
  } else {
    procs_.insert_or_assign(x, std::move(p));
  }
}

Name Substitution::operator()(const Name& n) const {
  auto it = names_.find(n);
  return it == names_.end() ? n : it->second;
}

NameSet Substitution::range_names() const {
  NameSet out;
  for (const auto& [k, v] : names_) out.insert(v);
  for (const auto& [k, p] : procs_) {
    NameSet fn = free_names(p);
    out.insert(fn.begin(), fn.end());
  }
  return out;
}

VarSet Substitution::range_vars() const {
  VarSet out;
  for (const auto& [k, p] : procs_) {
    VarSet fv = free_vars(p);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

namespace {

struct Applier {
  Substitution theta;
  NameSet range_names;
  VarSet range_vars;

  explicit Applier(Substitution t)
      : theta(std::move(t)),
        range_names(theta.range_names()),
        range_vars(theta.range_vars()) {}

  // Prepares the substitution for descending under name binders. Returns the
  // renamed binders (same order) and the adjusted substitution.
  static std::pair<std::vector<Name>, Applier> under_names(
      const Applier& outer, const std::vector<Name>& binders,
      const std::vector<Process>& scope) {
    Substitution inner = outer.theta;
    for (const auto& b : binders) inner.bind(b, b);  // shadowing drops entries
    Applier probe(inner);
    std::vector<Name> renamed = binders;
    bool any = false;
    for (auto& b : renamed) {
      if (probe.range_names.count(b)) {
        NameSet avoid = probe.range_names;
        for (const auto& p : scope) {
          NameSet fn = free_names(p);
          avoid.insert(fn.begin(), fn.end());
        }
        for (const auto& [k, v] : probe.theta.name_map()) avoid.insert(k);
        for (const auto& x : renamed) avoid.insert(x);
        Name fresh = fresh_name(avoid, b.base);
        inner.bind(b, fresh);
        b = fresh;
        any = true;
      }
    }
    if (!any) return {renamed, std::move(probe)};
    return {renamed, Applier(inner)};
  }

  static std::pair<ProcessVar, Applier> under_var(
      const Applier& outer, const ProcessVar& binder,
      const std::vector<Process>& scope) {
    Substitution inner = outer.theta;
    inner.bind(binder, var(binder));
    Applier probe(inner);
    if (!probe.range_vars.count(binder)) return {binder, std::move(probe)};
    VarSet avoid = probe.range_vars;
    for (const auto& p : scope) {
      VarSet fv = free_vars(p);
      avoid.insert(fv.begin(), fv.end());
    }
    for (const auto& [k, v] : probe.theta.proc_map()) avoid.insert(k);
    ProcessVar fresh = fresh_var(avoid, binder.ident);
    inner.bind(binder, var(fresh));
    return {fresh, Applier(inner)};
  }

  Process walk(const Process& p) const {
    if (theta.empty()) return p;
    return std::visit([this, &p](const auto& n) { return visit(p, n); },
                      p.node().v);
  }

  Process visit(const Process& p, const node::Nil&) const { return p; }
  Process visit(const Process& p, const node::Var& n) const {
    auto it = theta.proc_map().find(n.var);
    return it == theta.proc_map().end() ? p : it->second;
  }
  Process visit(const Process&, const node::Restrict& n) const {
    auto [bs, inner] = under_names(*this, {n.binder}, {n.body});
    return restrict(bs[0], inner.walk(n.body));
  }
  Process visit(const Process&, const node::Par& n) const {
    return par(walk(n.left), walk(n.right));
  }
  Process visit(const Process&, const node::Seq& n) const {
    return seq(walk(n.first), walk(n.then));
  }
  Process visit(const Process&, const node::Loc& n) const {
    return loc(theta(n.loc), walk(n.body));
  }
  Process visit(const Process&, const node::OutName& n) const {
    std::vector<Name> ps;
    ps.reserve(n.payloads.size());
    for (const auto& x : n.payloads) ps.push_back(theta(x));
    return out_name(theta(n.subject), std::move(ps));
  }
  Process visit(const Process&, const node::OutProc& n) const {
    return out_proc(theta(n.subject), walk(n.payload));
  }
  Process visit(const Process&, const node::Input& n) const {
    return std::visit(
        [this, &n](const auto& pat) -> Process {
          using T = std::decay_t<decltype(pat)>;
          Name subject = theta(pat.subject);
          if constexpr (std::is_same_v<T, NamePattern>) {
            auto [bs, inner] = under_names(*this, pat.binders, {n.body});
            return input(NamePattern{subject, bs}, n.mode, inner.walk(n.body));
          } else {
            auto [x, inner] = under_var(*this, pat.binder, {n.body});
            return input(T{subject, x}, n.mode, inner.walk(n.body));
          }
        },
        n.pattern);
  }
  Process visit(const Process&, const node::UpdProv& n) const {
    return upd_prov(theta(n.loc), walk(n.payload));
  }
  Process visit(const Process&, const node::UpdRecv& n) const {
    auto [x, inner] = under_var(*this, n.binder, {n.log, n.body});
    return upd_recv(theta(n.pattern), x, inner.walk(n.log),
                    inner.walk(n.body));
  }
  Process visit(const Process&, const node::Blocked& n) const {
    return blocked(walk(n.body));
  }
};

}  // namespace

Process apply(const Substitution& theta, const Process& p) {
  if (theta.empty()) return p;
  return Applier(theta).walk(p);
}

Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [k, v] : first.name_map()) out.bind(k, second(v));
  for (const auto& [k, p] : first.proc_map()) out.bind(k, apply(second, p));
  for (const auto& [k, v] : second.name_map()) {
    if (!first.name_map().count(k)) out.bind(k, v);
  }
  for (const auto& [k, p] : second.proc_map()) {
    if (!first.proc_map().count(k)) out.bind(k, p);
  }
  return out;
}

}  // namespace updatepi
