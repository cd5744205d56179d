#pragma once

#include <string>

#include "updatepi/term.hpp"

namespace updatepi {

/// Canonical representative of a structural congruence class.
///
/// Shape of `term`:
///  - restrictions hoisted out of parallel, sequential and blocked positions
///    to the top of their scope (root, located body, prefix continuation,
///    carried process); never across a location boundary;
///  - restrictions whose binder does not occur in their body are dropped;
///  - parallel compositions flattened, Nil members removed, members sorted
///    by `key` order and folded left;
///  - sequences right-nested, with output-like processes (outputs, located
///    processes, update provisions) extruded from the predecessor and a Nil
///    predecessor removed;
///  - Nil blocks removed;
///  - bound names and variables renamed by binding depth.
///
/// `key` is a compact serialization of `term`; equal keys mean equal terms.
struct CanonicalForm {
  Process term;
  std::string key;
};

CanonicalForm normalize(const Process& p);

/// Structural congruence, decided by comparing canonical forms. Unblocking
/// inside execution contexts is not part of this relation.
bool struct_eq(const Process& p, const Process& q);

/// Input patterns that only differ by a renaming of their binders.
bool congruent_inputs(const Pattern& xi, const Pattern& zeta);

/// Restriction blocks larger than this are ordered by first occurrence
/// instead of by exhaustive search, which can separate congruent terms.
inline constexpr std::size_t kMaxPermutedBinders = 6;

}  // namespace updatepi
