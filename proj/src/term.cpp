#include "updatepi/term.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace updatepi {

namespace {

bool ident_tail_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool valid_tail(std::string_view s) {
  return std::all_of(s.begin() + 1, s.end(), ident_tail_char);
}

}  // namespace

Name::Name(std::string b, std::optional<std::uint32_t> v)
    : base(std::move(b)), version(v) {
  if (base.empty() || !std::islower(static_cast<unsigned char>(base[0])) ||
      !valid_tail(base)) {
    throw std::invalid_argument("invalid name identifier '" + base + "'");
  }
}

std::string to_string(const Name& n) {
  if (!n.version) return n.base;
  return n.base + "@" + std::to_string(*n.version);
}

ProcessVar::ProcessVar(std::string id) : ident(std::move(id)) {
  if (ident.empty() || !std::isupper(static_cast<unsigned char>(ident[0])) ||
      !valid_tail(ident)) {
    throw std::invalid_argument("invalid process variable '" + ident + "'");
  }
}

const Name& pattern_subject(const Pattern& p) {
  return std::visit([](const auto& pat) -> const Name& { return pat.subject; },
                    p);
}

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Nil: return "Nil";
    case Kind::Var: return "Var";
    case Kind::Restrict: return "Restrict";
    case Kind::Par: return "Par";
    case Kind::Seq: return "Seq";
    case Kind::Loc: return "Loc";
    case Kind::OutName: return "OutName";
    case Kind::OutProc: return "OutProc";
    case Kind::Input: return "Input";
    case Kind::UpdProv: return "UpdProv";
    case Kind::UpdRecv: return "UpdRecv";
    case Kind::Blocked: return "Blocked";
  }
  return "?";
}

Process make_node(Node n) {
  return Process(std::make_shared<const Node>(std::move(n)));
}

namespace {
const Process& shared_nil() {
  static const Process p = make_node(Node{node::Nil{}, 1});
  return p;
}
}  // namespace

Process::Process() : Process(shared_nil()) {}

Kind Process::kind() const { return static_cast<Kind>(node_->v.index()); }

std::size_t Process::size() const { return node_->size; }

bool operator==(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->size != b.node_->size) return false;
  return a.node_->v == b.node_->v;
}

Process nil() { return Process(); }

Process var(ProcessVar x) { return make_node(Node{node::Var{std::move(x)}, 1}); }

Process restrict(Name binder, Process body) {
  if (binder.version) {
    throw std::invalid_argument("restriction binder cannot carry a version");
  }
  std::size_t sz = 1 + body.size();
  return make_node(Node{node::Restrict{std::move(binder), std::move(body)}, sz});
}

Process par(Process left, Process right) {
  std::size_t sz = 1 + left.size() + right.size();
  return make_node(Node{node::Par{std::move(left), std::move(right)}, sz});
}

Process seq(Process first, Process then) {
  std::size_t sz = 1 + first.size() + then.size();
  return make_node(Node{node::Seq{std::move(first), std::move(then)}, sz});
}

Process loc(Name l, Process body) {
  std::size_t sz = 1 + body.size();
  return make_node(Node{node::Loc{std::move(l), std::move(body)}, sz});
}

Process out_name(Name subject, std::vector<Name> payloads) {
  if (payloads.empty()) {
    throw std::invalid_argument("name output needs at least one payload");
  }
  return make_node(
      Node{node::OutName{std::move(subject), std::move(payloads)}, 1});
}

Process out_proc(Name subject, Process payload) {
  std::size_t sz = 1 + payload.size();
  return make_node(
      Node{node::OutProc{std::move(subject), std::move(payload)}, sz});
}

Process input(Pattern pattern, InputMode mode, Process body) {
  if (const auto* np = std::get_if<NamePattern>(&pattern)) {
    if (np->binders.empty()) {
      throw std::invalid_argument("input pattern needs at least one binder");
    }
    std::set<Name> seen;
    for (const auto& b : np->binders) {
      if (b.version) {
        throw std::invalid_argument("pattern binder cannot carry a version");
      }
      if (!seen.insert(b).second) {
        throw std::invalid_argument("duplicate binder '" + to_string(b) +
                                    "' in input pattern");
      }
    }
  }
  std::size_t sz = 1 + body.size();
  return make_node(
      Node{node::Input{std::move(pattern), mode, std::move(body)}, sz});
}

Process upd_prov(Name l, Process payload) {
  std::size_t sz = 1 + payload.size();
  return make_node(Node{node::UpdProv{std::move(l), std::move(payload)}, sz});
}

Process upd_recv(Name pattern, ProcessVar binder, Process log, Process body) {
  if (!body.is<node::Loc>()) {
    throw std::invalid_argument(
        "update reception must guard a located process");
  }
  if (body.as<node::Loc>().loc.base != pattern.base) {
    throw std::invalid_argument("update reception for '" + to_string(pattern) +
                                "' guards location '" +
                                to_string(body.as<node::Loc>().loc) + "'");
  }
  std::size_t sz = 1 + log.size() + body.size();
  return make_node(Node{node::UpdRecv{std::move(pattern), std::move(binder),
                                      std::move(log), std::move(body)},
                        sz});
}

Process blocked(Process body) {
  std::size_t sz = 1 + body.size();
  return make_node(Node{node::Blocked{std::move(body)}, sz});
}

Process par_all(const std::vector<Process>& items) {
  if (items.empty()) return nil();
  Process acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = par(acc, items[i]);
  return acc;
}

namespace {
void collect_members(const Process& p, std::vector<Process>& out) {
  if (p.is<node::Par>()) {
    const auto& n = p.as<node::Par>();
    collect_members(n.left, out);
    collect_members(n.right, out);
  } else {
    out.push_back(p);
  }
}
}  // namespace

std::vector<Process> par_members(const Process& p) {
  std::vector<Process> out;
  collect_members(p, out);
  return out;
}

// ---------------------------------------------------------------------------
// StateMultiset

StateMultiset::StateMultiset(std::initializer_list<Name> names) {
  for (const auto& n : names) add(n);
}

void StateMultiset::add(const Name& n, std::size_t times) {
  if (times == 0) return;
  counts_[n] += times;
}

std::size_t StateMultiset::count(const Name& n) const {
  auto it = counts_.find(n);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t StateMultiset::total() const {
  std::size_t t = 0;
  for (const auto& [n, c] : counts_) t += c;
  return t;
}

StateMultiset StateMultiset::operator+(const StateMultiset& other) const {
  StateMultiset r = *this;
  for (const auto& [n, c] : other.counts_) r.add(n, c);
  return r;
}

StateMultiset StateMultiset::operator-(const StateMultiset& other) const {
  StateMultiset r;
  for (const auto& [n, c] : counts_) {
    std::size_t o = other.count(n);
    if (c > o) r.add(n, c - o);
  }
  return r;
}

bool StateMultiset::included_in(const StateMultiset& other) const {
  for (const auto& [n, c] : counts_) {
    if (other.count(n) < c) return false;
  }
  return true;
}

StateMultiset StateMultiset::without(const Name& n) const {
  StateMultiset r = *this;
  r.counts_.erase(n);
  return r;
}

std::string to_string(const StateMultiset& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [n, c] : s.entries()) {
    for (std::size_t i = 0; i < c; ++i) {
      if (!first) out += ", ";
      out += to_string(n);
      first = false;
    }
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Binding-aware queries

namespace {

struct FreeCollector {
  std::map<Name, int> bound_names;
  std::map<ProcessVar, int> bound_vars;
  NameSet names;
  VarSet vars;

  void name(const Name& n) {
    auto it = bound_names.find(n);
    if (it == bound_names.end() || it->second == 0) names.insert(n);
  }

  void walk(const Process& p) {
    std::visit([this](const auto& n) { visit(n); }, p.node().v);
  }

  void visit(const node::Nil&) {}
  void visit(const node::Var& n) {
    auto it = bound_vars.find(n.var);
    if (it == bound_vars.end() || it->second == 0) vars.insert(n.var);
  }
  void visit(const node::Restrict& n) {
    ++bound_names[n.binder];
    walk(n.body);
    --bound_names[n.binder];
  }
  void visit(const node::Par& n) {
    walk(n.left);
    walk(n.right);
  }
  void visit(const node::Seq& n) {
    walk(n.first);
    walk(n.then);
  }
  void visit(const node::Loc& n) {
    name(n.loc);
    walk(n.body);
  }
  void visit(const node::OutName& n) {
    name(n.subject);
    for (const auto& x : n.payloads) name(x);
  }
  void visit(const node::OutProc& n) {
    name(n.subject);
    walk(n.payload);
  }
  void visit(const node::Input& n) {
    name(pattern_subject(n.pattern));
    if (const auto* np = std::get_if<NamePattern>(&n.pattern)) {
      for (const auto& b : np->binders) ++bound_names[b];
      walk(n.body);
      for (const auto& b : np->binders) --bound_names[b];
    } else {
      const ProcessVar& x = std::holds_alternative<ProcPattern>(n.pattern)
                                ? std::get<ProcPattern>(n.pattern).binder
                                : std::get<LocPattern>(n.pattern).binder;
      ++bound_vars[x];
      walk(n.body);
      --bound_vars[x];
    }
  }
  void visit(const node::UpdProv& n) {
    name(n.loc);
    walk(n.payload);
  }
  void visit(const node::UpdRecv& n) {
    name(n.pattern);
    ++bound_vars[n.binder];
    walk(n.log);
    walk(n.body);
    --bound_vars[n.binder];
  }
  void visit(const node::Blocked& n) { walk(n.body); }
};

struct AllCollector {
  NameSet names;
  VarSet vars;

  void walk(const Process& p) {
    std::visit([this](const auto& n) { visit(n); }, p.node().v);
  }
  void visit(const node::Nil&) {}
  void visit(const node::Var& n) { vars.insert(n.var); }
  void visit(const node::Restrict& n) {
    names.insert(n.binder);
    walk(n.body);
  }
  void visit(const node::Par& n) {
    walk(n.left);
    walk(n.right);
  }
  void visit(const node::Seq& n) {
    walk(n.first);
    walk(n.then);
  }
  void visit(const node::Loc& n) {
    names.insert(n.loc);
    walk(n.body);
  }
  void visit(const node::OutName& n) {
    names.insert(n.subject);
    names.insert(n.payloads.begin(), n.payloads.end());
  }
  void visit(const node::OutProc& n) {
    names.insert(n.subject);
    walk(n.payload);
  }
  void visit(const node::Input& n) {
    std::visit(
        [this](const auto& pat) {
          names.insert(pat.subject);
          using T = std::decay_t<decltype(pat)>;
          if constexpr (std::is_same_v<T, NamePattern>) {
            names.insert(pat.binders.begin(), pat.binders.end());
          } else {
            vars.insert(pat.binder);
          }
        },
        n.pattern);
    walk(n.body);
  }
  void visit(const node::UpdProv& n) {
    names.insert(n.loc);
    walk(n.payload);
  }
  void visit(const node::UpdRecv& n) {
    names.insert(n.pattern);
    vars.insert(n.binder);
    walk(n.log);
    walk(n.body);
  }
  void visit(const node::Blocked& n) { walk(n.body); }
};

// Alpha key: bound occurrences rendered as #level, free ones verbatim.
struct KeyWriter {
  std::map<Name, std::vector<int>> names;
  std::map<ProcessVar, std::vector<int>> vars;
  int level = 0;
  std::string out;

  void name(const Name& n) {
    auto it = names.find(n);
    if (it != names.end() && !it->second.empty()) {
      out += '#';
      out += std::to_string(it->second.back());
    } else {
      out += to_string(n);
    }
    out += ' ';
  }
  void pvar(const ProcessVar& x) {
    auto it = vars.find(x);
    if (it != vars.end() && !it->second.empty()) {
      out += '%';
      out += std::to_string(it->second.back());
    } else {
      out += x.ident;
    }
    out += ' ';
  }
  void bind(const Name& n) { names[n].push_back(level++); }
  void unbind(const Name& n) {
    names[n].pop_back();
    --level;
  }
  void bind(const ProcessVar& x) { vars[x].push_back(level++); }
  void unbind(const ProcessVar& x) {
    vars[x].pop_back();
    --level;
  }

  void walk(const Process& p) {
    out += static_cast<char>('A' + static_cast<int>(p.kind()));
    std::visit([this](const auto& n) { visit(n); }, p.node().v);
    out += ')';
  }
  void visit(const node::Nil&) {}
  void visit(const node::Var& n) { pvar(n.var); }
  void visit(const node::Restrict& n) {
    bind(n.binder);
    walk(n.body);
    unbind(n.binder);
  }
  void visit(const node::Par& n) {
    walk(n.left);
    walk(n.right);
  }
  void visit(const node::Seq& n) {
    walk(n.first);
    walk(n.then);
  }
  void visit(const node::Loc& n) {
    name(n.loc);
    walk(n.body);
  }
  void visit(const node::OutName& n) {
    name(n.subject);
    out += std::to_string(n.payloads.size());
    out += ':';
    for (const auto& x : n.payloads) name(x);
  }
  void visit(const node::OutProc& n) {
    name(n.subject);
    walk(n.payload);
  }
  void visit(const node::Input& n) {
    out += n.mode == InputMode::Once ? '>' : '*';
    std::visit(
        [this, &n](const auto& pat) {
          using T = std::decay_t<decltype(pat)>;
          name(pat.subject);
          if constexpr (std::is_same_v<T, NamePattern>) {
            out += 'n';
            out += std::to_string(pat.binders.size());
            for (const auto& b : pat.binders) bind(b);
            walk(n.body);
            for (auto it = pat.binders.rbegin(); it != pat.binders.rend(); ++it)
              unbind(*it);
          } else {
            out += std::is_same_v<T, ProcPattern> ? 'p' : 'l';
            bind(pat.binder);
            walk(n.body);
            unbind(pat.binder);
          }
        },
        n.pattern);
  }
  void visit(const node::UpdProv& n) {
    name(n.loc);
    walk(n.payload);
  }
  void visit(const node::UpdRecv& n) {
    name(n.pattern);
    bind(n.binder);
    walk(n.log);
    walk(n.body);
    unbind(n.binder);
  }
  void visit(const node::Blocked& n) { walk(n.body); }
};

}  // namespace

NameSet free_names(const Process& p) {
  FreeCollector c;
  c.walk(p);
  return std::move(c.names);
}

VarSet free_vars(const Process& p) {
  FreeCollector c;
  c.walk(p);
  return std::move(c.vars);
}

NameSet all_names(const Process& p) {
  AllCollector c;
  c.walk(p);
  return std::move(c.names);
}

VarSet all_vars(const Process& p) {
  AllCollector c;
  c.walk(p);
  return std::move(c.vars);
}

std::string alpha_key(const Process& p) {
  KeyWriter w;
  w.walk(p);
  return std::move(w.out);
}

bool alpha_eq(const Process& p, const Process& q) {
  if (p == q) return true;
  if (p.size() != q.size()) return false;
  return alpha_key(p) == alpha_key(q);
}

Name fresh_name(const NameSet& avoid, std::string_view hint) {
  Name candidate{std::string(hint)};
  for (std::uint64_t i = 1; avoid.count(candidate); ++i) {
    candidate = Name{std::string(hint) + std::to_string(i)};
  }
  return candidate;
}

ProcessVar fresh_var(const VarSet& avoid, std::string_view hint) {
  ProcessVar candidate{std::string(hint)};
  for (std::uint64_t i = 1; avoid.count(candidate); ++i) {
    candidate = ProcessVar{std::string(hint) + std::to_string(i)};
  }
  return candidate;
}

}  // namespace updatepi
