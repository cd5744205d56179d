#pragma once

#include "updatepi/term.hpp"

namespace updatepi {

/// Visible resources of a process: one entry per output, located process and
/// update provision, including what they carry. Restricted names are hidden
/// and blocked processes still count.
StateMultiset state_of(const Process& p);

/// Multiset inclusion delta ⊆ delta2.
bool match(const StateMultiset& delta, const StateMultiset& delta2);

}  // namespace updatepi
