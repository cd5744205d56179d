#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace updatepi {

/// A channel or location name. Locations may carry a version used to gate
/// updates; two names are equal only if base and version both agree.
struct Name {
  std::string base;
  std::optional<std::uint32_t> version;

  Name() = default;
  Name(std::string b, std::optional<std::uint32_t> v = std::nullopt);
  Name(const char* b) : Name(std::string(b)) {}

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name&, const Name&) = default;
};

std::string to_string(const Name& n);

struct ProcessVar {
  std::string ident;

  ProcessVar() = default;
  ProcessVar(std::string id);
  ProcessVar(const char* id) : ProcessVar(std::string(id)) {}

  friend bool operator==(const ProcessVar&, const ProcessVar&) = default;
  friend auto operator<=>(const ProcessVar&, const ProcessVar&) = default;
};

using NameSet = std::set<Name>;
using VarSet = std::set<ProcessVar>;

enum class InputMode : std::uint8_t { Once, Replicated };

// a(x1,...,xk)
struct NamePattern {
  Name subject;
  std::vector<Name> binders;
  friend bool operator==(const NamePattern&, const NamePattern&) = default;
};

// a(X)
struct ProcPattern {
  Name subject;
  ProcessVar binder;
  friend bool operator==(const ProcPattern&, const ProcPattern&) = default;
};

// l[X], passivation of a located process
struct LocPattern {
  Name subject;
  ProcessVar binder;
  friend bool operator==(const LocPattern&, const LocPattern&) = default;
};

using Pattern = std::variant<NamePattern, ProcPattern, LocPattern>;

const Name& pattern_subject(const Pattern& p);

enum class Kind : std::uint8_t {
  Nil,
  Var,
  Restrict,
  Par,
  Seq,
  Loc,
  OutName,
  OutProc,
  Input,
  UpdProv,
  UpdRecv,
  Blocked,
};

std::string_view kind_name(Kind k);

struct Node;

/// Immutable process term. Copies share structure; equality is structural.
class Process {
 public:
  Process();

  Kind kind() const;
  const Node& node() const { return *node_; }

  template <class T>
  const T& as() const;
  template <class T>
  bool is() const;

  /// Number of constructor nodes in the term.
  std::size_t size() const;

  bool same_node(const Process& other) const { return node_ == other.node_; }

  friend bool operator==(const Process& a, const Process& b);

 private:
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Process make_node(Node n);
};

namespace node {
struct Nil {
  friend bool operator==(const Nil&, const Nil&) = default;
};
struct Var {
  ProcessVar var;
  friend bool operator==(const Var&, const Var&) = default;
};
struct Restrict {
  Name binder;
  Process body;
  friend bool operator==(const Restrict&, const Restrict&) = default;
};
struct Par {
  Process left;
  Process right;
  friend bool operator==(const Par&, const Par&) = default;
};
struct Seq {
  Process first;
  Process then;
  friend bool operator==(const Seq&, const Seq&) = default;
};
struct Loc {
  Name loc;
  Process body;
  friend bool operator==(const Loc&, const Loc&) = default;
};
struct OutName {
  Name subject;
  std::vector<Name> payloads;
  friend bool operator==(const OutName&, const OutName&) = default;
};
struct OutProc {
  Name subject;
  Process payload;
  friend bool operator==(const OutProc&, const OutProc&) = default;
};
struct Input {
  Pattern pattern;
  InputMode mode;
  Process body;
  friend bool operator==(const Input&, const Input&) = default;
};
struct UpdProv {
  Name loc;
  Process payload;
  friend bool operator==(const UpdProv&, const UpdProv&) = default;
};
// up(l, X) # log * body, with body = k[Q] and k.base == pattern.base
struct UpdRecv {
  Name pattern;
  ProcessVar binder;
  Process log;
  Process body;
  friend bool operator==(const UpdRecv&, const UpdRecv&) = default;
};
struct Blocked {
  Process body;
  friend bool operator==(const Blocked&, const Blocked&) = default;
};
}  // namespace node

struct Node {
  std::variant<node::Nil, node::Var, node::Restrict, node::Par, node::Seq,
               node::Loc, node::OutName, node::OutProc, node::Input,
               node::UpdProv, node::UpdRecv, node::Blocked>
      v;
  std::size_t size = 1;
};

template <class T>
const T& Process::as() const {
  return std::get<T>(node_->v);
}

template <class T>
bool Process::is() const {
  return std::holds_alternative<T>(node_->v);
}

// Constructors. Each validates the local well-formedness conditions and
// throws std::invalid_argument on violation.
Process nil();
Process var(ProcessVar x);
Process restrict(Name binder, Process body);
Process par(Process left, Process right);
Process seq(Process first, Process then);
Process loc(Name l, Process body);
Process out_name(Name subject, std::vector<Name> payloads);
Process out_proc(Name subject, Process payload);
Process input(Pattern pattern, InputMode mode, Process body);
Process upd_prov(Name l, Process payload);
Process upd_recv(Name pattern, ProcessVar binder, Process log, Process body);
Process blocked(Process body);

/// Folds a list into a left-nested parallel composition; empty gives Nil.
Process par_all(const std::vector<Process>& items);

/// Splits nested Par nodes into their non-Par leaves, left to right.
std::vector<Process> par_members(const Process& p);

/// Multiset of names. Absent names have multiplicity zero.
class StateMultiset {
 public:
  StateMultiset() = default;
  StateMultiset(std::initializer_list<Name> names);

  void add(const Name& n, std::size_t times = 1);
  std::size_t count(const Name& n) const;
  bool empty() const { return counts_.empty(); }
  std::size_t total() const;

  /// Multiset union.
  StateMultiset operator+(const StateMultiset& other) const;
  /// Smallest d'' with *this ⊆ other ⊎ d''.
  StateMultiset operator-(const StateMultiset& other) const;
  /// Multiset inclusion.
  bool included_in(const StateMultiset& other) const;
  /// Drops every occurrence of n.
  StateMultiset without(const Name& n) const;

  const std::map<Name, std::size_t>& entries() const { return counts_; }

  friend bool operator==(const StateMultiset&, const StateMultiset&) = default;

 private:
  std::map<Name, std::size_t> counts_;
};

std::string to_string(const StateMultiset& s);

NameSet free_names(const Process& p);
VarSet free_vars(const Process& p);
/// Every name occurring in p, bound or free, including binder positions.
NameSet all_names(const Process& p);
VarSet all_vars(const Process& p);

/// Binder-indexed rendering: bound names and variables replaced by their
/// binding depth, free ones kept verbatim. Two terms are alpha-equivalent
/// exactly when their keys coincide.
std::string alpha_key(const Process& p);
bool alpha_eq(const Process& p, const Process& q);

Name fresh_name(const NameSet& avoid, std::string_view hint);
ProcessVar fresh_var(const VarSet& avoid, std::string_view hint);

}  // namespace updatepi
