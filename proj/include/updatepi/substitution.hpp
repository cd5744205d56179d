#pragma once

#include <map>

#include "updatepi/term.hpp"

namespace updatepi {

/// Simultaneous substitution of names for names and processes for process
/// variables. Identity entries are never stored.
class Substitution {
 public:
  Substitution() = default;

  static Substitution names(const std::vector<Name>& from,
                            const std::vector<Name>& to);
  static Substitution process(const ProcessVar& x, Process p);

  void bind(const Name& from, const Name& to);
  void bind(const ProcessVar& x, Process p);

  bool empty() const { return names_.empty() && procs_.empty(); }
  const std::map<Name, Name>& name_map() const { return names_; }
  const std::map<ProcessVar, Process>& proc_map() const { return procs_; }

  Name operator()(const Name& n) const;

  /// Free names and variables of everything in the range.
  NameSet range_names() const;
  VarSet range_vars() const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<Name, Name> names_;
  std::map<ProcessVar, Process> procs_;
};

/// Capture-avoiding application. Binders that would capture a free name or
/// variable of the range are renamed with fresh_name, keeping their base as
/// the hint.
Process apply(const Substitution& theta, const Process& p);

/// The substitution equivalent to applying `first` and then `second`.
Substitution compose(const Substitution& first, const Substitution& second);

}  // namespace updatepi
