#include "updatepi/engine.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "updatepi/congruence.hpp"
#include "updatepi/state.hpp"

namespace updatepi {

std::string to_string(const EngineFlags& f) {
  std::string s = "allow-blocked-steps=";
  s += f.allowBlocked ? "on" : "off";
  s += " seq-both=";
  s += f.seqBoth ? "on" : "off";
  return s;
}

Configuration Configuration::of(Process p) {
  StateMultiset s = state_of(p);
  return {std::move(p), std::move(s)};
}

std::string to_string(const Path& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s + "]";
}

namespace {

Process child(const Process& p, std::uint32_t i) {
  switch (p.kind()) {
    case Kind::Restrict: return p.as<node::Restrict>().body;
    case Kind::Par:
      return i == 0 ? p.as<node::Par>().left : p.as<node::Par>().right;
    case Kind::Seq:
      return i == 0 ? p.as<node::Seq>().first : p.as<node::Seq>().then;
    case Kind::Loc: return p.as<node::Loc>().body;
    case Kind::OutProc: return p.as<node::OutProc>().payload;
    case Kind::Input: return p.as<node::Input>().body;
    case Kind::UpdProv: return p.as<node::UpdProv>().payload;
    case Kind::UpdRecv:
      return i == 0 ? p.as<node::UpdRecv>().log : p.as<node::UpdRecv>().body;
    case Kind::Blocked: return p.as<node::Blocked>().body;
    default:
      throw std::out_of_range("path leaves the term");
  }
}

Process with_child(const Process& p, std::uint32_t i, Process c) {
  switch (p.kind()) {
    case Kind::Restrict:
      return restrict(p.as<node::Restrict>().binder, std::move(c));
    case Kind::Par: {
      const auto& n = p.as<node::Par>();
      return i == 0 ? par(std::move(c), n.right) : par(n.left, std::move(c));
    }
    case Kind::Seq: {
      const auto& n = p.as<node::Seq>();
      return i == 0 ? seq(std::move(c), n.then) : seq(n.first, std::move(c));
    }
    case Kind::Loc: return loc(p.as<node::Loc>().loc, std::move(c));
    case Kind::OutProc:
      return out_proc(p.as<node::OutProc>().subject, std::move(c));
    case Kind::Input: {
      const auto& n = p.as<node::Input>();
      return input(n.pattern, n.mode, std::move(c));
    }
    case Kind::UpdProv:
      return upd_prov(p.as<node::UpdProv>().loc, std::move(c));
    case Kind::UpdRecv: {
      const auto& n = p.as<node::UpdRecv>();
      return i == 0 ? upd_recv(n.pattern, n.binder, std::move(c), n.body)
                    : upd_recv(n.pattern, n.binder, n.log, std::move(c));
    }
    case Kind::Blocked: return blocked(std::move(c));
    default:
      throw std::out_of_range("path leaves the term");
  }
}

Process replace_from(const Process& p, const Path& path, std::size_t at,
                     Process with) {
  if (at == path.size()) return with;
  return with_child(p, path[at],
                    replace_from(child(p, path[at]), path, at + 1,
                                 std::move(with)));
}

// Names bound by restrictions along path are replaced by one placeholder so
// that keys survive renumbering of bound names between steps.
const Name& context_placeholder() {
  static const Name n{"ctx", std::numeric_limits<std::uint32_t>::max()};
  return n;
}

std::string context_key(const Process& root, const Path& path,
                        const Process& sub) {
  Substitution theta;
  Process at = root;
  for (std::uint32_t i : path) {
    if (at.is<node::Restrict>()) {
      theta.bind(at.as<node::Restrict>().binder, context_placeholder());
    }
    at = child(at, i);
  }
  return normalize(apply(theta, sub)).key;
}

struct Edit {
  Path path;
  Process with;
};

struct Raw {
  std::string rule;
  Path position;
  std::optional<Path> partner;
  std::vector<Edit> edits;
  Substitution substitution;
  std::vector<std::string> derivation;
  std::optional<UpdateKind> update;
};

struct Leaf {
  Path path;
  Process node;
};

void add_tag(std::vector<std::string>& tags, std::string t) {
  if (std::find(tags.begin(), tags.end(), t) == tags.end()) {
    tags.push_back(std::move(t));
  }
}

class Scanner {
 public:
  Scanner(const Process& root, const EngineFlags& flags)
      : root_(root), flags_(flags), ambient_(state_of(root)) {}

  std::vector<Raw> region(const Process& p, const Path& base) {
    std::vector<Leaf> leaves;
    std::vector<Path> locs;
    std::vector<Path> seqs;
    Path path = base;
    collect(p, path, leaves, locs, seqs);

    std::vector<Raw> out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      for (std::size_t j = 0; j < leaves.size(); ++j) {
        if (i != j) pair(leaves[i], leaves[j], out);
      }
    }
    for (const auto& l : locs) {
      Path body = l;
      body.push_back(0);
      auto inner = region(subterm_at(root_, body), body);
      std::move(inner.begin(), inner.end(), std::back_inserter(out));
    }
    if (flags_.seqBoth) {
      for (const auto& s : seqs) seq_both(s, out);
    }
    return out;
  }

 private:
  const Process& root_;
  EngineFlags flags_;
  StateMultiset ambient_;

  void collect(const Process& p, Path& path, std::vector<Leaf>& leaves,
               std::vector<Path>& locs, std::vector<Path>& seqs) {
    auto down = [&](std::uint32_t i, const Process& c) {
      path.push_back(i);
      collect(c, path, leaves, locs, seqs);
      path.pop_back();
    };
    switch (p.kind()) {
      case Kind::Nil:
      case Kind::Var:
        return;
      case Kind::Restrict:
        down(0, p.as<node::Restrict>().body);
        return;
      case Kind::Par:
        down(0, p.as<node::Par>().left);
        down(1, p.as<node::Par>().right);
        return;
      case Kind::Seq:
        seqs.push_back(path);
        down(0, p.as<node::Seq>().first);
        return;
      case Kind::Blocked:
        if (flags_.allowBlocked) down(0, p.as<node::Blocked>().body);
        return;
      case Kind::Loc:
        locs.push_back(path);
        leaves.push_back({path, p});
        return;
      default:
        leaves.push_back({path, p});
        return;
    }
  }

  std::vector<std::string> context_tags(const Path& prefix) const {
    std::vector<std::string> tags;
    Process at = root_;
    bool in_loc = false;
    for (std::uint32_t i : prefix) {
      switch (at.kind()) {
        case Kind::Restrict:
          add_tag(tags, in_loc ? "R.Res" : "R.Exec");
          break;
        case Kind::Par:
          add_tag(tags, i == 0 ? "R.Par.L" : "R.Par.R");
          break;
        case Kind::Seq:
          add_tag(tags, i == 0 ? "R.Seq.Fst" : "R.Seq.Both");
          break;
        case Kind::Loc:
          add_tag(tags, "R.Exec");
          in_loc = true;
          break;
        case Kind::Blocked:
          add_tag(tags, "R.Blk");
          break;
        default:
          break;
      }
      at = child(at, i);
    }
    return tags;
  }

  std::vector<std::string> pair_tags(const Path& a, const Path& b) const {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
    Path common(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
    auto tags = context_tags(common);
    for (const Path* side : {&a, &b}) {
      Path rel = common;
      Process at = subterm_at(root_, common);
      for (std::size_t k = n; k < side->size(); ++k) {
        if (at.is<node::Par>()) {
          add_tag(tags, (*side)[k] == 0 ? "R.Par.L" : "R.Par.R");
        } else if (at.is<node::Seq>()) {
          add_tag(tags, "R.Seq.Fst");
        } else if (at.is<node::Blocked>()) {
          add_tag(tags, "R.Blk");
        }
        at = child(at, (*side)[k]);
      }
    }
    add_tag(tags, "R.Comm");
    return tags;
  }

  static Process fire_input(const Process& in, const Substitution& theta) {
    const auto& n = in.as<node::Input>();
    Process body = apply(theta, n.body);
    return n.mode == InputMode::Once ? body : par(in, body);
  }

  void pair(const Leaf& o, const Leaf& i, std::vector<Raw>& out) {
    const Process& op = o.node;
    const Process& ip = i.node;
    if (op.is<node::UpdProv>() && ip.is<node::UpdRecv>()) {
      UpdateOutcome u = try_update(op, ip, ambient_);
      Raw r;
      r.rule = u.firedRule;
      r.position = i.path;
      r.partner = o.path;
      r.edits = {{o.path, u.provResidual}, {i.path, u.recvResidual}};
      r.substitution = u.substitution;
      r.update = u.kind;
      r.derivation = pair_tags(o.path, i.path);
      add_tag(r.derivation, "R.Update.Prv");
      add_tag(r.derivation, r.rule);
      out.push_back(std::move(r));
      return;
    }
    if (!ip.is<node::Input>()) return;
    const auto& pat = ip.as<node::Input>().pattern;

    Substitution theta;
    const char* rule = nullptr;
    const char* half = nullptr;
    if (const auto* np = std::get_if<NamePattern>(&pat)) {
      if (!op.is<node::OutName>()) return;
      const auto& on = op.as<node::OutName>();
      if (!(on.subject == np->subject) ||
          on.payloads.size() != np->binders.size()) {
        return;
      }
      theta = Substitution::names(np->binders, on.payloads);
      rule = "R.In.Name";
      half = "R.Out.Name";
    } else if (const auto* pp = std::get_if<ProcPattern>(&pat)) {
      if (!op.is<node::OutProc>()) return;
      const auto& on = op.as<node::OutProc>();
      if (!(on.subject == pp->subject)) return;
      theta = Substitution::process(pp->binder, on.payload);
      rule = "R.In.Proc";
      half = "R.Out.Proc";
    } else {
      const auto& lp = std::get<LocPattern>(pat);
      if (!op.is<node::Loc>()) return;
      const auto& on = op.as<node::Loc>();
      if (!(on.loc == lp.subject)) return;
      theta = Substitution::process(lp.binder, on.body);
      rule = "R.In.Pass";
      half = "R.Out.Pass";
    }
    Raw r;
    r.rule = rule;
    r.position = i.path;
    r.partner = o.path;
    r.edits = {{o.path, nil()}, {i.path, fire_input(ip, theta)}};
    r.substitution = theta;
    r.derivation = pair_tags(o.path, i.path);
    add_tag(r.derivation, half);
    add_tag(r.derivation, rule);
    out.push_back(std::move(r));
  }

  void seq_both(const Path& at, std::vector<Raw>& out) {
    Path fp = at;
    fp.push_back(0);
    Path tp = at;
    tp.push_back(1);
    auto firsts = region(subterm_at(root_, fp), fp);
    if (firsts.empty()) return;
    auto thens = region(subterm_at(root_, tp), tp);
    for (const auto& f : firsts) {
      for (const auto& t : thens) {
        Raw r;
        r.rule = "R.Seq.Both";
        r.position = at;
        r.edits = f.edits;
        r.edits.insert(r.edits.end(), t.edits.begin(), t.edits.end());
        r.substitution = f.substitution;
        r.derivation = context_tags(at);
        add_tag(r.derivation, "R.Seq.Both");
        for (const auto& tag : f.derivation) add_tag(r.derivation, tag);
        for (const auto& tag : t.derivation) add_tag(r.derivation, tag);
        out.push_back(std::move(r));
      }
    }
  }
};

void collect_blocked(const Process& p, Path& path, std::vector<Path>& out) {
  auto down = [&](std::uint32_t i, const Process& c) {
    path.push_back(i);
    collect_blocked(c, path, out);
    path.pop_back();
  };
  switch (p.kind()) {
    case Kind::Restrict: down(0, p.as<node::Restrict>().body); return;
    case Kind::Par:
      down(0, p.as<node::Par>().left);
      down(1, p.as<node::Par>().right);
      return;
    case Kind::Seq: down(0, p.as<node::Seq>().first); return;
    case Kind::Loc: down(0, p.as<node::Loc>().body); return;
    case Kind::Blocked: out.push_back(path); return;
    default: return;
  }
}

}  // namespace

Process subterm_at(const Process& p, const Path& path) {
  Process at = p;
  for (std::uint32_t i : path) at = child(at, i);
  return at;
}

Process replace_at(const Process& p, const Path& path, Process with) {
  return replace_from(p, path, 0, std::move(with));
}

std::vector<StepRecord> enumerate_steps(const Configuration& c,
                                        const EngineFlags& flags) {
  CanonicalForm cf = normalize(c.term);
  const Process& root = cf.term;
  StateMultiset pre_state = state_of(root);
  Scanner scanner(root, flags);
  std::vector<Raw> raws = scanner.region(root, {});

  std::vector<StepRecord> out;
  out.reserve(raws.size());
  for (auto& r : raws) {
    Process post = root;
    for (auto& e : r.edits) post = replace_at(post, e.path, std::move(e.with));
    StepRecord s;
    s.rule = std::move(r.rule);
    s.position = std::move(r.position);
    s.partner = std::move(r.partner);
    s.preTerm = root;
    s.postTerm = normalize(post).term;
    s.preState = pre_state;
    s.postState = state_of(s.postTerm);
    s.substitution = std::move(r.substitution);
    s.derivation = std::move(r.derivation);
    add_tag(s.derivation, "R.Eqv");
    add_tag(s.derivation, "R.Alpha");
    s.update = r.update;
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const StepRecord& a, const StepRecord& b) {
                     if (a.position != b.position) return a.position < b.position;
                     return a.partner < b.partner;
                   });
  return out;
}

Configuration apply_step(const Configuration& c, const StepRecord& s) {
  if (!(normalize(c.term).term == s.preTerm)) {
    throw std::invalid_argument("stale step: the term changed since enumeration");
  }
  return {s.postTerm, s.postState};
}

std::vector<Path> blocked_positions(const Process& canonical) {
  std::vector<Path> out;
  Path path;
  collect_blocked(canonical, path, out);
  return out;
}

bool progresses(const StepRecord& s) { return s.update != UpdateKind::UnMat; }

Policy Policy::first() { return Policy{}; }

Policy Policy::random(std::uint64_t seed) {
  Policy p;
  p.kind_ = Kind::Random;
  p.rng_ = std::make_shared<std::mt19937_64>(seed);
  return p;
}

Policy Policy::callback(Chooser choose) {
  Policy p;
  p.kind_ = Kind::Callback;
  p.choose_ = std::move(choose);
  return p;
}

std::optional<std::size_t> Policy::pick(const std::vector<StepRecord>& steps) {
  if (steps.empty()) return std::nullopt;
  switch (kind_) {
    case Kind::First:
      return 0;
    case Kind::Random: {
      std::uniform_int_distribution<std::size_t> d(0, steps.size() - 1);
      return d(*rng_);
    }
    case Kind::Callback: {
      auto i = choose_(steps);
      if (i && *i >= steps.size()) return std::nullopt;
      return i;
    }
  }
  return std::nullopt;
}

Engine::Engine(Process initial, EngineFlags flags)
    : initial_(std::move(initial)),
      flags_(flags),
      current_(Configuration::of(normalize(initial_).term)) {}

std::vector<StepRecord> Engine::steps() const {
  return enumerate_steps(current_, flags_);
}

const StepRecord& Engine::fire(std::size_t index) {
  auto all = steps();
  if (index >= all.size()) {
    throw std::out_of_range("no step with index " + std::to_string(index));
  }
  return apply(all[index]);
}

const StepRecord& Engine::apply(const StepRecord& s) {
  current_ = apply_step(current_, s);
  if (s.update == UpdateKind::Fail && s.partner) {
    Process prov = subterm_at(s.preTerm, *s.partner);
    Process recv = subterm_at(s.preTerm, s.position);
    UpdateOutcome u = try_update(prov, recv, s.preState);
    FailRecord f;
    f.blockedKey = context_key(s.preTerm, s.position, blocked(*u.newComponent));
    for (const auto& m : par_members(normalize(*u.storedLog).term)) {
      if (!m.is<node::Nil>()) {
        f.logKeys.push_back(context_key(s.preTerm, s.position, m));
      }
    }
    f.restored = *u.oldComponent;
    failures_.push_back(std::move(f));
  }
  return push(s);
}

const StepRecord& Engine::push(StepRecord s) {
  trace_.push_back(std::move(s));
  return trace_.back();
}

const StepRecord& Engine::recover(std::size_t block_index) {
  const Process& term = current_.term;
  auto blocks = blocked_positions(term);
  if (block_index >= blocks.size()) throw RecoveryError("nothing to recover");
  const Path& at = blocks[block_index];
  std::string key = context_key(term, at, subterm_at(term, at));
  auto rec = std::find_if(failures_.begin(), failures_.end(),
                          [&](const FailRecord& f) {
                            return !f.consumed && f.blockedKey == key;
                          });
  if (rec == failures_.end()) throw RecoveryError("nothing to recover");

  // the parallel group around the block
  Path group = at;
  while (!group.empty()) {
    Path up(group.begin(), group.end() - 1);
    if (!subterm_at(term, up).is<node::Par>()) break;
    group = std::move(up);
  }
  std::vector<Path> members;
  std::vector<Path> stack{group};
  while (!stack.empty()) {
    Path p = std::move(stack.back());
    stack.pop_back();
    if (subterm_at(term, p).is<node::Par>()) {
      Path r = p;
      r.push_back(1);
      stack.push_back(std::move(r));
      p.push_back(0);
      stack.push_back(std::move(p));
    } else {
      members.push_back(std::move(p));
    }
  }
  std::vector<bool> drop(members.size(), false);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] == at) drop[i] = true;
  }
  for (const auto& lk : rec->logKeys) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (drop[i]) continue;
      if (context_key(term, members[i], subterm_at(term, members[i])) == lk) {
        drop[i] = true;
        break;
      }
    }
  }
  std::vector<Process> keep;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!drop[i]) keep.push_back(subterm_at(term, members[i]));
  }
  Process post = normalize(replace_at(term, group, par_all(keep))).term;
  rec->consumed = true;

  StepRecord s;
  s.rule = "Recover";
  s.position = at;
  s.preTerm = term;
  s.postTerm = post;
  s.preState = current_.state;
  s.postState = state_of(post);
  s.derivation = {"Recover"};
  s.restored = rec->restored;
  current_ = Configuration::of(post);
  return push(std::move(s));
}

const StepRecord& Engine::unblock(std::size_t block_index) {
  const Process& term = current_.term;
  auto blocks = blocked_positions(term);
  if (block_index >= blocks.size()) {
    throw std::out_of_range("no blocked process with index " +
                            std::to_string(block_index));
  }
  const Path& at = blocks[block_index];
  Process body = subterm_at(term, at).as<node::Blocked>().body;
  Process post = normalize(replace_at(term, at, body)).term;
  StepRecord s;
  s.rule = "Unblock";
  s.position = at;
  s.preTerm = term;
  s.postTerm = post;
  s.preState = current_.state;
  s.postState = state_of(post);
  s.derivation = {"Unblock"};
  current_ = Configuration::of(post);
  return push(std::move(s));
}

std::size_t Engine::run(std::size_t fuel, Policy policy) {
  std::size_t taken = 0;
  while (taken < fuel) {
    std::vector<StepRecord> moving;
    for (auto& s : steps()) {
      if (progresses(s)) moving.push_back(std::move(s));
    }
    auto i = policy.pick(moving);
    if (!i) break;
    apply(moving[*i]);
    ++taken;
  }
  return taken;
}

ReachResult reachable(const Process& p, std::size_t depth_bound,
                      std::size_t size_bound, const EngineFlags& flags) {
  ReachResult out;
  CanonicalForm start = normalize(p);
  out.states.emplace(start.key, start.term);
  std::deque<std::pair<Process, std::size_t>> queue{{start.term, 0}};
  while (!queue.empty()) {
    auto [term, depth] = queue.front();
    queue.pop_front();
    if (term.size() > size_bound) {
      out.truncated = true;
      continue;
    }
    auto steps = enumerate_steps(Configuration::of(term), flags);
    if (depth >= depth_bound) {
      for (const auto& s : steps) {
        if (!out.states.count(normalize(s.postTerm).key)) out.truncated = true;
      }
      continue;
    }
    for (const auto& s : steps) {
      CanonicalForm cf = normalize(s.postTerm);
      if (out.states.emplace(cf.key, cf.term).second) {
        queue.emplace_back(cf.term, depth + 1);
      }
    }
  }
  return out;
}

}  // namespace updatepi
