#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "updatepi/substitution.hpp"
#include "updatepi/term.hpp"
#include "updatepi/update.hpp"

namespace updatepi {

struct EngineFlags {
  bool allowBlocked = false;  // reduce inside blocked processes
  bool seqBoth = false;       // step both sides of a sequence at once
  friend bool operator==(const EngineFlags&, const EngineFlags&) = default;
};

std::string to_string(const EngineFlags& f);

struct Configuration {
  Process term;
  StateMultiset state;

  static Configuration of(Process p);
};

/// Child indices from the root. Restrict, Loc, Blocked, OutProc, Input and
/// UpdProv have child 0; Par and Seq have 0 and 1; UpdRecv has log 0 and
/// body 1.
using Path = std::vector<std::uint32_t>;

std::string to_string(const Path& p);

Process subterm_at(const Process& p, const Path& path);
Process replace_at(const Process& p, const Path& path, Process with);

struct StepRecord {
  std::string rule;
  Path position;  // input, reception or the node acted on
  std::optional<Path> partner;  // output or provision
  Process preTerm;
  Process postTerm;
  StateMultiset preState;
  StateMultiset postState;
  Substitution substitution;
  std::vector<std::string> derivation;
  std::optional<UpdateKind> update;
  std::optional<Process> restored;  // Recover only
};

/// All reductions of the canonical form of c.term. Positions refer to that
/// canonical form, which is also each record's preTerm; postTerm is
/// canonical too. Update pairs whose gate fails are listed as stuttering
/// R.Update.UnMat steps.
std::vector<StepRecord> enumerate_steps(const Configuration& c,
                                        const EngineFlags& flags = {});

/// Throws std::invalid_argument when s was not enumerated from c.
Configuration apply_step(const Configuration& c, const StepRecord& s);

/// Blocked processes at execution positions, in path order.
std::vector<Path> blocked_positions(const Process& canonical);

class Policy {
 public:
  using Chooser =
      std::function<std::optional<std::size_t>(const std::vector<StepRecord>&)>;

  static Policy first();
  static Policy random(std::uint64_t seed);
  static Policy callback(Chooser choose);

  /// nullopt stops the run.
  std::optional<std::size_t> pick(const std::vector<StepRecord>& steps);

 private:
  enum class Kind { First, Random, Callback } kind_ = Kind::First;
  std::shared_ptr<std::mt19937_64> rng_;
  Chooser choose_;
};

class Engine {
 public:
  explicit Engine(Process initial, EngineFlags flags = {});

  const Process& initial() const { return initial_; }
  const Configuration& current() const { return current_; }
  const std::vector<StepRecord>& trace() const { return trace_; }
  const EngineFlags& flags() const { return flags_; }

  std::vector<StepRecord> steps() const;
  const StepRecord& fire(std::size_t index);
  const StepRecord& apply(const StepRecord& s);

  /// Rolls back a failed update: removes the blocked component with index
  /// block_index (see blocked_positions) together with its activated log.
  /// The record's restored field holds the component as it was before the
  /// update. Throws RecoveryError("nothing to recover") when the block did
  /// not come from a failed update or was already recovered.
  const StepRecord& recover(std::size_t block_index);

  /// Replaces the block_index-th blocked process by its body.
  const StepRecord& unblock(std::size_t block_index);

  /// Applies steps chosen by policy until fuel runs out or only
  /// stuttering steps remain. Returns the number of steps taken.
  std::size_t run(std::size_t fuel, Policy policy);

 private:
  struct FailRecord {
    std::string blockedKey;
    std::vector<std::string> logKeys;
    Process restored;
    bool consumed = false;
  };

  const StepRecord& push(StepRecord s);

  Process initial_;
  EngineFlags flags_;
  Configuration current_;
  std::vector<StepRecord> trace_;
  std::vector<FailRecord> failures_;
};

/// Everything except an update pair whose version gate failed.
bool progresses(const StepRecord& s);

struct ReachResult {
  std::map<std::string, Process> states;  // canonical key to canonical term
  bool truncated = false;
};

/// Breadth-first closure of the reduction relation. Terms larger than
/// size_bound are not expanded and set truncated, as does a nonempty
/// frontier at depth_bound.
ReachResult reachable(const Process& p, std::size_t depth_bound,
                      std::size_t size_bound, const EngineFlags& flags = {});

}  // namespace updatepi
