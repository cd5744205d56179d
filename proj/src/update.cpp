#include "updatepi/update.hpp"

#include <stdexcept>

#include "updatepi/state.hpp"

namespace updatepi {

namespace {

const char* const kUpChannel = "up";

struct SignatureCollector {
  InterfaceSignature out;
  std::vector<Name> bound;

  bool is_bound(const Name& n) const {
    for (const auto& b : bound) {
      if (b == n) return true;
    }
    return false;
  }

  void add(const Name& subject, Polarity pol, std::size_t arity, Sort sort) {
    if (!is_bound(subject)) out.insert({subject.base, pol, arity, sort});
  }

  void walk(const Process& p) {
    switch (p.kind()) {
      case Kind::Nil:
      case Kind::Var:
        return;
      case Kind::Restrict: {
        const auto& n = p.as<node::Restrict>();
        bound.push_back(n.binder);
        walk(n.body);
        bound.pop_back();
        return;
      }
      case Kind::Par:
        walk(p.as<node::Par>().left);
        walk(p.as<node::Par>().right);
        return;
      case Kind::Seq:
        walk(p.as<node::Seq>().first);
        walk(p.as<node::Seq>().then);
        return;
      case Kind::Loc: {
        const auto& n = p.as<node::Loc>();
        add(n.loc, Polarity::Out, 1, Sort::LocSort);
        walk(n.body);
        return;
      }
      case Kind::OutName: {
        const auto& n = p.as<node::OutName>();
        add(n.subject, Polarity::Out, n.payloads.size(), Sort::NameSort);
        return;
      }
      case Kind::OutProc: {
        const auto& n = p.as<node::OutProc>();
        add(n.subject, Polarity::Out, 1, Sort::ProcSort);
        walk(n.payload);
        return;
      }
      case Kind::Input: {
        const auto& n = p.as<node::Input>();
        if (const auto* np = std::get_if<NamePattern>(&n.pattern)) {
          add(np->subject, Polarity::In, np->binders.size(), Sort::NameSort);
          for (const auto& b : np->binders) bound.push_back(b);
          walk(n.body);
          bound.resize(bound.size() - np->binders.size());
        } else if (const auto* pp = std::get_if<ProcPattern>(&n.pattern)) {
          add(pp->subject, Polarity::In, 1, Sort::ProcSort);
          walk(n.body);
        } else {
          add(std::get<LocPattern>(n.pattern).subject, Polarity::In, 1,
              Sort::LocSort);
          walk(n.body);
        }
        return;
      }
      case Kind::UpdProv:
        out.insert({kUpChannel, Polarity::Out, 2, Sort::ProcSort});
        walk(p.as<node::UpdProv>().payload);
        return;
      case Kind::UpdRecv: {
        const auto& n = p.as<node::UpdRecv>();
        out.insert({kUpChannel, Polarity::In, 2, Sort::ProcSort});
        walk(n.log);
        walk(n.body);
        return;
      }
      case Kind::Blocked:
        walk(p.as<node::Blocked>().body);
        return;
    }
  }
};

}  // namespace

InterfaceSignature interface_signature(const Process& p) {
  SignatureCollector c;
  c.walk(p);
  return std::move(c.out);
}

std::string to_string(const InterfaceEntry& e) {
  std::string s = e.channel;
  s += e.polarity == Polarity::In ? "?" : "!";
  s += std::to_string(e.arity);
  switch (e.sort) {
    case Sort::NameSort: s += "n"; break;
    case Sort::ProcSort: s += "p"; break;
    case Sort::LocSort: s += "l"; break;
  }
  return s;
}

bool comp(const Process& p, const Process& q) {
  InterfaceSignature sp = interface_signature(p);
  for (const auto& e : interface_signature(q)) {
    if (!sp.count(e)) return false;
  }
  return true;
}

bool version_gate(const Name& prov_loc, const Name& recv_loc) {
  if (prov_loc.base != recv_loc.base) return false;
  if (prov_loc.version && recv_loc.version) {
    return *prov_loc.version > *recv_loc.version;
  }
  if (!prov_loc.version) return !recv_loc.version;
  return true;
}

std::string_view to_string(UpdateKind k) {
  switch (k) {
    case UpdateKind::Ok: return "Ok";
    case UpdateKind::UnMat: return "UnMat";
    case UpdateKind::Rest: return "Rest";
    case UpdateKind::Fail: return "Fail";
  }
  return "?";
}

UpdateOutcome try_update(const Process& prov, const Process& recv,
                         const StateMultiset& ambient) {
  if (!prov.is<node::UpdProv>() || !recv.is<node::UpdRecv>()) {
    throw std::invalid_argument("try_update needs a provision and a reception");
  }
  const auto& pv = prov.as<node::UpdProv>();
  const auto& rc = recv.as<node::UpdRecv>();
  const auto& component = rc.body.as<node::Loc>();

  UpdateOutcome o;
  StateMultiset base = ambient - state_of(prov);
  auto finish = [&](UpdateKind kind, const char* rule, Process provRes,
                    Process recvRes) {
    o.kind = kind;
    o.firedRule = rule;
    o.provResidual = std::move(provRes);
    o.recvResidual = std::move(recvRes);
    o.resultTerm = par(o.provResidual, o.recvResidual);
    o.resultState = base + state_of(o.resultTerm);
    return o;
  };

  if (!version_gate(pv.loc, rc.pattern)) {
    return finish(UpdateKind::UnMat, "R.Update.UnMat", prov, recv);
  }
  if (!comp(pv.payload, component.body)) {
    return finish(UpdateKind::Rest, "R.Update.Rest", nil(), recv);
  }

  o.substitution = Substitution::process(rc.binder, pv.payload);
  Process log = apply(o.substitution, rc.log);
  Process updated = apply(o.substitution, rc.body);
  o.oldComponent = rc.body;
  o.newComponent = updated;
  o.storedLog = log;

  StateMultiset before = state_of(rc.body) + state_of(pv.payload);
  if (match(before, state_of(updated))) {
    return finish(UpdateKind::Ok, "R.Update.Ok", nil(),
                  par(par(recv, blocked(log)), updated));
  }
  return finish(UpdateKind::Fail, "R.Update.Fail", nil(),
                par(par(recv, log), blocked(updated)));
}

}  // namespace updatepi
