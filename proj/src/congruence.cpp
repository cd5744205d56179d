#include "updatepi/congruence.hpp"

#include <algorithm>
#include <numeric>

namespace updatepi {

namespace {

// ---------------------------------------------------------------------------
// Every binder gets a distinct name that clashes with nothing else in the
// term, so later hoisting never captures.

class Freshener {
 public:
  explicit Freshener(const Process& p)
      : avoid_names_(all_names(p)), avoid_vars_(all_vars(p)) {}

  Process walk(const Process& p) {
    return std::visit([this, &p](const auto& n) { return visit(p, n); },
                      p.node().v);
  }

 private:
  NameSet avoid_names_;
  VarSet avoid_vars_;
  std::uint64_t next_name_ = 0;
  std::uint64_t next_var_ = 0;
  std::map<Name, std::vector<Name>> names_;
  std::map<ProcessVar, std::vector<ProcessVar>> vars_;

  Name fresh() {
    for (;;) {
      Name c{"z" + std::to_string(next_name_++)};
      if (!avoid_names_.count(c)) return c;
    }
  }
  ProcessVar fresh_pvar() {
    for (;;) {
      ProcessVar c{"Z" + std::to_string(next_var_++)};
      if (!avoid_vars_.count(c)) return c;
    }
  }
  Name ren(const Name& n) const {
    auto it = names_.find(n);
    return (it == names_.end() || it->second.empty()) ? n : it->second.back();
  }
  ProcessVar ren(const ProcessVar& x) const {
    auto it = vars_.find(x);
    return (it == vars_.end() || it->second.empty()) ? x : it->second.back();
  }
  Name push(const Name& n) {
    Name f = fresh();
    names_[n].push_back(f);
    return f;
  }
  void pop(const Name& n) { names_[n].pop_back(); }
  ProcessVar push(const ProcessVar& x) {
    ProcessVar f = fresh_pvar();
    vars_[x].push_back(f);
    return f;
  }
  void pop(const ProcessVar& x) { vars_[x].pop_back(); }

  Process visit(const Process& p, const node::Nil&) { return p; }
  Process visit(const Process&, const node::Var& n) { return var(ren(n.var)); }
  Process visit(const Process&, const node::Restrict& n) {
    Name b = push(n.binder);
    Process body = walk(n.body);
    pop(n.binder);
    return restrict(b, body);
  }
  Process visit(const Process&, const node::Par& n) {
    Process l = walk(n.left);
    return par(l, walk(n.right));
  }
  Process visit(const Process&, const node::Seq& n) {
    Process f = walk(n.first);
    return seq(f, walk(n.then));
  }
  Process visit(const Process&, const node::Loc& n) {
    return loc(ren(n.loc), walk(n.body));
  }
  Process visit(const Process&, const node::OutName& n) {
    std::vector<Name> ps;
    for (const auto& x : n.payloads) ps.push_back(ren(x));
    return out_name(ren(n.subject), std::move(ps));
  }
  Process visit(const Process&, const node::OutProc& n) {
    return out_proc(ren(n.subject), walk(n.payload));
  }
  Process visit(const Process&, const node::Input& n) {
    return std::visit(
        [this, &n](const auto& pat) -> Process {
          using T = std::decay_t<decltype(pat)>;
          Name subject = ren(pat.subject);
          if constexpr (std::is_same_v<T, NamePattern>) {
            std::vector<Name> bs;
            for (const auto& b : pat.binders) bs.push_back(push(b));
            Process body = walk(n.body);
            for (const auto& b : pat.binders) pop(b);
            return input(NamePattern{subject, bs}, n.mode, body);
          } else {
            ProcessVar x = push(pat.binder);
            Process body = walk(n.body);
            pop(pat.binder);
            return input(T{subject, x}, n.mode, body);
          }
        },
        n.pattern);
  }
  Process visit(const Process&, const node::UpdProv& n) {
    return upd_prov(ren(n.loc), walk(n.payload));
  }
  Process visit(const Process&, const node::UpdRecv& n) {
    Name pattern = ren(n.pattern);
    ProcessVar x = push(n.binder);
    Process log = walk(n.log);
    Process body = walk(n.body);
    pop(n.binder);
    return upd_recv(pattern, x, log, body);
  }
  Process visit(const Process&, const node::Blocked& n) {
    return blocked(walk(n.body));
  }
};

// ---------------------------------------------------------------------------
// Structural pass: a scope is a block of hoisted binders over a flat list of
// parallel items. Items are never Nil, Par or Restrict.

struct Scoped {
  std::vector<Name> binders;
  std::vector<Process> items;
};

bool output_like(const Process& p) {
  switch (p.kind()) {
    case Kind::OutName:
    case Kind::OutProc:
    case Kind::Loc:
    case Kind::UpdProv:
      return true;
    default:
      return false;
  }
}

Scoped structure(const Process& p);

Process assemble(const Scoped& s) {
  if (s.items.empty()) return nil();
  Process body = par_all(s.items);
  if (s.binders.empty()) return body;
  NameSet used = free_names(body);
  for (auto it = s.binders.rbegin(); it != s.binders.rend(); ++it) {
    if (used.count(*it)) body = restrict(*it, body);
  }
  return body;
}

Process assemble_closed(const Process& p) { return assemble(structure(p)); }

void append(Scoped& into, Scoped&& from) {
  into.binders.insert(into.binders.end(), from.binders.begin(),
                      from.binders.end());
  into.items.insert(into.items.end(), std::make_move_iterator(from.items.begin()),
                    std::make_move_iterator(from.items.end()));
}

Scoped seq_combine(Scoped first, Scoped then) {
  Scoped out;
  out.binders = std::move(first.binders);
  out.binders.insert(out.binders.end(), then.binders.begin(),
                     then.binders.end());
  std::vector<Process> rest;
  for (auto& item : first.items) {
    if (output_like(item)) {
      out.items.push_back(std::move(item));
    } else {
      rest.push_back(std::move(item));
    }
  }
  if (rest.empty()) {
    out.items.insert(out.items.end(), then.items.begin(), then.items.end());
    return out;
  }
  if (rest.size() == 1 && rest[0].is<node::Seq>()) {
    // (A;B);Q  becomes  A;(B;Q)
    const auto& inner = rest[0].as<node::Seq>();
    Scoped tail = seq_combine(structure(inner.then),
                              Scoped{{}, std::move(then.items)});
    out.binders.insert(out.binders.end(), tail.binders.begin(),
                       tail.binders.end());
    out.items.push_back(seq(inner.first, par_all(tail.items)));
    return out;
  }
  out.items.push_back(seq(par_all(rest), par_all(then.items)));
  return out;
}

Scoped structure(const Process& p) {
  switch (p.kind()) {
    case Kind::Nil:
      return {};
    case Kind::Var:
    case Kind::OutName:
      return {{}, {p}};
    case Kind::Restrict: {
      const auto& n = p.as<node::Restrict>();
      Scoped s = structure(n.body);
      s.binders.insert(s.binders.begin(), n.binder);
      return s;
    }
    case Kind::Par: {
      const auto& n = p.as<node::Par>();
      Scoped s = structure(n.left);
      append(s, structure(n.right));
      return s;
    }
    case Kind::Seq: {
      const auto& n = p.as<node::Seq>();
      return seq_combine(structure(n.first), structure(n.then));
    }
    case Kind::Loc: {
      const auto& n = p.as<node::Loc>();
      return {{}, {loc(n.loc, assemble_closed(n.body))}};
    }
    case Kind::OutProc: {
      const auto& n = p.as<node::OutProc>();
      return {{}, {out_proc(n.subject, assemble_closed(n.payload))}};
    }
    case Kind::Input: {
      const auto& n = p.as<node::Input>();
      return {{}, {input(n.pattern, n.mode, assemble_closed(n.body))}};
    }
    case Kind::UpdProv: {
      const auto& n = p.as<node::UpdProv>();
      return {{}, {upd_prov(n.loc, assemble_closed(n.payload))}};
    }
    case Kind::UpdRecv: {
      const auto& n = p.as<node::UpdRecv>();
      const auto& body = n.body.as<node::Loc>();
      return {{},
              {upd_recv(n.pattern, n.binder, assemble_closed(n.log),
                        loc(body.loc, assemble_closed(body.body)))}};
    }
    case Kind::Blocked: {
      Scoped s = structure(p.as<node::Blocked>().body);
      if (s.items.empty()) return {std::move(s.binders), {}};
      Process inner = par_all(s.items);
      return {std::move(s.binders), {blocked(inner)}};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Canonical naming and ordering.

struct Canon {
  Process term;
  std::string key;
};

class Canonicalizer {
 public:
  explicit Canonicalizer(const Process& p)
      : free_names_(free_names(p)), free_vars_(free_vars(p)) {}

  Canon scope(const Process& p) {
    std::vector<Name> binders;
    Process core = p;
    while (core.is<node::Restrict>()) {
      binders.push_back(core.as<node::Restrict>().binder);
      core = core.as<node::Restrict>().body;
    }
    if (binders.empty()) return group(core);

    const std::size_t k = binders.size();
    const int base = name_level_;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);

    std::optional<Canon> best;
    auto attempt = [&](const std::vector<std::size_t>& ord) {
      for (std::size_t i = 0; i < k; ++i) {
        names_[binders[ord[i]]] = name_at(base + static_cast<int>(i));
      }
      name_level_ = base + static_cast<int>(k);
      Canon c = group(core);
      name_level_ = base;
      for (const auto& b : binders) names_.erase(b);
      if (!best || c.key < best->key) best = std::move(c);
    };

    if (k <= kMaxPermutedBinders) {
      do {
        attempt(order);
      } while (std::next_permutation(order.begin(), order.end()));
    } else {
      attempt(order);
    }

    Process term = best->term;
    for (std::size_t i = k; i-- > 0;) {
      term = restrict(name_at(base + static_cast<int>(i)), term);
    }
    return {term, "n" + std::to_string(k) + "(" + best->key + ")"};
  }

 private:
  NameSet free_names_;
  VarSet free_vars_;
  std::map<Name, Name> names_;
  std::map<ProcessVar, ProcessVar> vars_;
  std::vector<Name> name_table_;
  std::vector<ProcessVar> var_table_;
  int name_level_ = 0;
  int var_level_ = 0;

  const Name& name_at(int level) {
    while (name_table_.size() <= static_cast<std::size_t>(level)) {
      std::size_t i = name_table_.size();
      for (;; ++i) {
        Name c{"x" + std::to_string(i)};
        bool taken = free_names_.count(c) > 0 ||
                     std::find(name_table_.begin(), name_table_.end(), c) !=
                         name_table_.end();
        if (!taken) {
          name_table_.push_back(c);
          break;
        }
      }
    }
    return name_table_[level];
  }

  const ProcessVar& var_at(int level) {
    while (var_table_.size() <= static_cast<std::size_t>(level)) {
      std::size_t i = var_table_.size();
      for (;; ++i) {
        ProcessVar c{"X" + std::to_string(i)};
        bool taken = free_vars_.count(c) > 0 ||
                     std::find(var_table_.begin(), var_table_.end(), c) !=
                         var_table_.end();
        if (!taken) {
          var_table_.push_back(c);
          break;
        }
      }
    }
    return var_table_[level];
  }

  Name map(const Name& n) const {
    auto it = names_.find(n);
    return it == names_.end() ? n : it->second;
  }
  ProcessVar map(const ProcessVar& x) const {
    auto it = vars_.find(x);
    return it == vars_.end() ? x : it->second;
  }

  static void key_name(std::string& k, const Name& n) {
    k += to_string(n);
    k += ',';
  }

  Canon group(const Process& p) {
    if (p.is<node::Restrict>()) return scope(p);
    std::vector<Process> members = par_members(p);
    std::vector<Canon> parts;
    parts.reserve(members.size());
    for (const auto& m : members) {
      if (m.is<node::Nil>()) continue;
      parts.push_back(item(m));
    }
    if (parts.empty()) return {nil(), "0"};
    if (parts.size() == 1) return std::move(parts.front());
    std::sort(parts.begin(), parts.end(),
              [](const Canon& a, const Canon& b) { return a.key < b.key; });
    std::vector<Process> terms;
    std::string key = "p(";
    for (auto& c : parts) {
      terms.push_back(std::move(c.term));
      key += c.key;
      key += '|';
    }
    key += ')';
    return {par_all(terms), std::move(key)};
  }

  Canon item(const Process& p) {
    std::string k(1, static_cast<char>('a' + static_cast<int>(p.kind())));
    switch (p.kind()) {
      case Kind::Nil:
        return {p, "0"};
      case Kind::Var: {
        ProcessVar x = map(p.as<node::Var>().var);
        k += x.ident;
        return {var(x), k};
      }
      case Kind::Restrict:
      case Kind::Par:
        return group(p);
      case Kind::Seq: {
        const auto& n = p.as<node::Seq>();
        Canon f = group(n.first);
        Canon t = group(n.then);
        k += '(' + f.key + ';' + t.key + ')';
        return {seq(f.term, t.term), k};
      }
      case Kind::Loc: {
        const auto& n = p.as<node::Loc>();
        Name l = map(n.loc);
        key_name(k, l);
        Canon b = scope(n.body);
        k += '[' + b.key + ']';
        return {loc(l, b.term), k};
      }
      case Kind::OutName: {
        const auto& n = p.as<node::OutName>();
        Name s = map(n.subject);
        key_name(k, s);
        std::vector<Name> ps;
        k += '(';
        for (const auto& x : n.payloads) {
          ps.push_back(map(x));
          key_name(k, ps.back());
        }
        k += ')';
        return {out_name(s, std::move(ps)), k};
      }
      case Kind::OutProc: {
        const auto& n = p.as<node::OutProc>();
        Name s = map(n.subject);
        key_name(k, s);
        Canon b = scope(n.payload);
        k += '{' + b.key + '}';
        return {out_proc(s, b.term), k};
      }
      case Kind::Input:
        return input_item(p.as<node::Input>(), std::move(k));
      case Kind::UpdProv: {
        const auto& n = p.as<node::UpdProv>();
        Name l = map(n.loc);
        key_name(k, l);
        Canon b = scope(n.payload);
        k += '{' + b.key + '}';
        return {upd_prov(l, b.term), k};
      }
      case Kind::UpdRecv: {
        const auto& n = p.as<node::UpdRecv>();
        Name l = map(n.pattern);
        key_name(k, l);
        ProcessVar x = bind(n.binder);
        Canon log = scope(n.log);
        const auto& body = n.body.as<node::Loc>();
        Name kl = map(body.loc);
        Canon q = scope(body.body);
        unbind(n.binder);
        k += x.ident + "#{" + log.key + "}";
        key_name(k, kl);
        k += '[' + q.key + ']';
        return {upd_recv(l, x, log.term, loc(kl, q.term)), k};
      }
      case Kind::Blocked: {
        Canon b = scope(p.as<node::Blocked>().body);
        k += '[' + b.key + ']';
        return {blocked(b.term), k};
      }
    }
    return {p, "?"};
  }

  ProcessVar bind(const ProcessVar& x) {
    ProcessVar c = var_at(var_level_++);
    vars_[x] = c;
    return c;
  }
  void unbind(const ProcessVar& x) {
    vars_.erase(x);
    --var_level_;
  }

  Canon input_item(const node::Input& n, std::string k) {
    k += n.mode == InputMode::Once ? '>' : '*';
    return std::visit(
        [&](const auto& pat) -> Canon {
          using T = std::decay_t<decltype(pat)>;
          Name s = map(pat.subject);
          if constexpr (std::is_same_v<T, NamePattern>) {
            k += 'n';
            key_name(k, s);
            k += std::to_string(pat.binders.size());
            std::vector<Name> bs;
            const int base = name_level_;
            for (const auto& b : pat.binders) {
              bs.push_back(name_at(name_level_++));
              names_[b] = bs.back();
            }
            Canon body = scope(n.body);
            for (const auto& b : pat.binders) names_.erase(b);
            name_level_ = base;
            k += '(' + body.key + ')';
            return {input(NamePattern{s, bs}, n.mode, body.term), k};
          } else {
            k += std::is_same_v<T, ProcPattern> ? 'p' : 'l';
            key_name(k, s);
            ProcessVar x = bind(pat.binder);
            Canon body = scope(n.body);
            unbind(pat.binder);
            k += '(' + body.key + ')';
            return {input(T{s, x}, n.mode, body.term), k};
          }
        },
        n.pattern);
  }
};

}  // namespace

CanonicalForm normalize(const Process& p) {
  Process fresh = Freshener(p).walk(p);
  Process shaped = assemble(structure(fresh));
  Canon c = Canonicalizer(shaped).scope(shaped);
  return {std::move(c.term), std::move(c.key)};
}

bool struct_eq(const Process& p, const Process& q) {
  return normalize(p).key == normalize(q).key;
}

bool congruent_inputs(const Pattern& xi, const Pattern& zeta) {
  if (xi.index() != zeta.index()) return false;
  if (!(pattern_subject(xi) == pattern_subject(zeta))) return false;
  if (const auto* a = std::get_if<NamePattern>(&xi)) {
    return a->binders.size() == std::get<NamePattern>(zeta).binders.size();
  }
  return true;
}

}  // namespace updatepi
