#include "updatepi/state.hpp"

namespace updatepi {

StateMultiset state_of(const Process& p) {
  switch (p.kind()) {
    case Kind::Nil:
    case Kind::Var:
    case Kind::Input:
    case Kind::UpdRecv:
      return {};
    case Kind::OutName:
      return {p.as<node::OutName>().subject};
    case Kind::OutProc: {
      const auto& n = p.as<node::OutProc>();
      return StateMultiset{n.subject} + state_of(n.payload);
    }
    case Kind::Loc: {
      const auto& n = p.as<node::Loc>();
      return StateMultiset{n.loc} + state_of(n.body);
    }
    case Kind::UpdProv: {
      const auto& n = p.as<node::UpdProv>();
      return StateMultiset{n.loc} + state_of(n.payload);
    }
    case Kind::Par: {
      const auto& n = p.as<node::Par>();
      return state_of(n.left) + state_of(n.right);
    }
    case Kind::Seq: {
      const auto& n = p.as<node::Seq>();
      return state_of(n.first) + state_of(n.then);
    }
    case Kind::Restrict: {
      const auto& n = p.as<node::Restrict>();
      return state_of(n.body).without(n.binder);
    }
    case Kind::Blocked:
      return state_of(p.as<node::Blocked>().body);
  }
  return {};
}

bool match(const StateMultiset& delta, const StateMultiset& delta2) {
  return delta.included_in(delta2);
}

}  // namespace updatepi
