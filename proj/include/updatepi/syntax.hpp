#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "updatepi/term.hpp"

namespace updatepi {

struct SourceSpan {
  std::string file;
  std::size_t startLine = 1;
  std::size_t startCol = 1;
  std::size_t endLine = 1;
  std::size_t endCol = 1;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Scope };

  ParseError(Kind kind, SourceSpan span, std::string message,
             std::set<std::string> expected = {});

  Kind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  SourceSpan span_;
  std::set<std::string> expected_;
};

struct ParseOptions {
  std::string file = "<input>";
  bool closed = true;  // reject free process variables
  std::size_t maxDepth = 2000;
};

/// Concrete syntax, loosest first:
///   P | Q      parallel, left associative
///   P ; Q      sequence, left associative
///   new n. P   a?(x,y) > P   a?{X} * P   l?[X] > P   up?(l@1, X)#{R} * l@1[Q]
///   0  X  l[P]  a!(n,m)  a!{P}  up!(l@2){P}  [[P]]  (P)
/// `>` marks a once input and `*` a replicated one; `--` starts a comment.
Process parse(std::string_view text, const ParseOptions& opts = {});

/// A single name such as `l` or `l@2`.
Name parse_name(std::string_view text);

/// Minimal parentheses; parse(print(p)) is alpha-equivalent to p.
std::string print(const Process& p);

}  // namespace updatepi
