#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "updatepi/substitution.hpp"
#include "updatepi/term.hpp"

namespace updatepi {

enum class Polarity : std::uint8_t { In, Out };
enum class Sort : std::uint8_t { NameSort, ProcSort, LocSort };

struct InterfaceEntry {
  std::string channel;
  Polarity polarity;
  std::size_t arity;
  Sort sort;
  friend auto operator<=>(const InterfaceEntry&, const InterfaceEntry&) = default;
};

using InterfaceSignature = std::set<InterfaceEntry>;

/// Channel base names are used, so l@1 and l@2 expose the same interface.
/// Update channels appear under the reserved channel "up".
InterfaceSignature interface_signature(const Process& p);

std::string to_string(const InterfaceEntry& e);

/// The replacement p keeps every interface of q.
bool comp(const Process& p, const Process& q);

/// Bases agree and the provision is strictly newer. An unversioned
/// provision only matches an unversioned receiver; a versioned provision
/// also matches an unversioned receiver.
bool version_gate(const Name& prov_loc, const Name& recv_loc);

enum class UpdateKind : std::uint8_t { Ok, UnMat, Rest, Fail };

std::string_view to_string(UpdateKind k);

struct UpdateOutcome {
  UpdateKind kind;
  // what the provision and the reception become
  Process provResidual;
  Process recvResidual;
  Process resultTerm;  // provResidual | recvResidual
  StateMultiset resultState;
  std::optional<Process> storedLog;
  std::string firedRule;
  Substitution substitution;
  // Ok and Fail: the located component before and after substitution
  std::optional<Process> oldComponent;
  std::optional<Process> newComponent;
};

/// Decides which update rule fires for a provision/reception pair.
/// ambient is the state of the configuration holding both.
///
/// With P the package, k[Q] the component and Q' = Q{P/X}, the update is
/// accepted when st(k[Q]) ⊎ st(P) ⊆ st(k[Q']): the new component keeps the
/// old resources and those brought by the package.
UpdateOutcome try_update(const Process& prov, const Process& recv,
                         const StateMultiset& ambient);

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace updatepi
