#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "updatepi/engine.hpp"
#include "updatepi/substitution.hpp"
#include "updatepi/term.hpp"
#include "updatepi/update.hpp"

namespace updatepi {

/// Transition labels. Atomic labels record the channel and the shape of
/// what is exchanged, never the payload itself.
class Action {
 public:
  enum class Kind : std::uint8_t { Eps, Tau, In, Out, ParComp, SeqComp };

  static Action eps();
  static Action tau();
  static Action in(Name channel, Sort sort, std::size_t arity);
  static Action out(Name channel, Sort sort, std::size_t arity);
  /// Flattens nested compositions, drops Eps, cancels complementary
  /// pairs; an empty result is Eps and a single survivor stands alone.
  static Action par_comp(std::vector<Action> parts);
  /// Sequential composite; two taus give tau.
  static Action seq_comp(Action first, Action then);

  Kind kind() const { return kind_; }
  bool atomic() const { return kind_ == Kind::In || kind_ == Kind::Out; }
  const Name& channel() const { return channel_; }
  Sort sort() const { return sort_; }
  std::size_t arity() const { return arity_; }
  const std::vector<Action>& parts() const { return parts_; }

  /// Does any atomic part use channel n?
  bool mentions(const Name& n) const;

  friend bool operator==(const Action&, const Action&) = default;
  friend bool operator<(const Action& x, const Action& y);

 private:
  Kind kind_ = Kind::Eps;
  Name channel_;
  Sort sort_ = Sort::NameSort;
  std::size_t arity_ = 0;
  std::vector<Action> parts_;
};

/// Same channel, sort and arity, opposite polarity.
bool complementary(const Action& x, const Action& y);

std::string to_string(const Action& a);

struct Transition {
  Process source;
  Action label;
  Process target;
  Substitution instantiation;  // placeholders of a symbolic input
  std::string rule;
};

struct LtsOptions {
  EngineFlags flags;
  bool tauOnly = false;  // skip composite labels
};

/// One-step transitions of the canonical form of p. Targets are canonical.
std::vector<Transition> transitions(const Process& p,
                                    const LtsOptions& opts = {});

/// Breadth-first closure over tau transitions, keyed by canonical key.
std::map<std::string, Process> tau_closure(const Process& p, std::size_t depth,
                                           const EngineFlags& flags = {});

/// Closed terms over names a and b (binders too), location l (l@1 and l@2
/// in update forms) and the process variable X, by increasing node count,
/// 0 included. Each congruence class is visited once, by its canonical form. Stops early, returning false, when visit returns false.
bool enumerate_terms(std::size_t max_size,
                     const std::function<bool(const Process&)>& visit);

struct CorrespondenceOptions {
  std::size_t bound = 4;
  EngineFlags engineFlags;
  EngineFlags ltsFlags;
  std::size_t closureDepth = 2;
  std::size_t maxCounterexamples = 20;
  std::optional<std::chrono::milliseconds> budget;  // wall clock, enumeration only
};

struct Counterexample {
  Process term;
  std::vector<std::string> onlyReduction;  // printed successors
  std::vector<std::string> onlyLts;
};

struct CorrespondenceReport {
  std::size_t termsChecked = 0;
  std::size_t counterexampleCount = 0;
  std::vector<Counterexample> counterexamples;  // first few
  bool complete = false;  // false when the budget ran out first
  bool ok() const { return complete && counterexampleCount == 0; }
};

class FlagMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// For every enumerated term, compares the one-step reduction successors
/// with the tau successors, and the reduction closure with the tau closure
/// up to closureDepth, all modulo congruence. Throws FlagMismatch when the
/// two sides are configured differently.
CorrespondenceReport correspondence_check(const CorrespondenceOptions& opts);

/// Same comparison over an explicit list of closed terms.
CorrespondenceReport correspondence_check(const std::vector<Process>& terms,
                                          const CorrespondenceOptions& opts);

}  // namespace updatepi
