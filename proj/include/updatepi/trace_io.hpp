#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "updatepi/engine.hpp"

namespace updatepi {

inline constexpr int kTraceSchemaVersion = 1;

struct TraceDocument {
  int schemaVersion = kTraceSchemaVersion;
  Process initialTerm;
  EngineFlags flags;
  std::vector<StepRecord> steps;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON with sorted keys, terminated by a newline.
std::string export_trace(const TraceDocument& doc);
std::string export_trace(const Engine& engine);

TraceDocument import_trace(std::string_view text);

/// Re-runs the recorded steps from the initial term. Each step is matched
/// against the steps enumerated at that point by rule, positions and post
/// term; Recover and Unblock are replayed through the engine. Throws
/// TraceError if a step cannot be matched.
Configuration replay(const TraceDocument& doc);

}  // namespace updatepi
