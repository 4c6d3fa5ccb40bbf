#pragma once

// Suite orchestration and report output.

#include <string>
#include <vector>

#include "lcsgeom/definition.hpp"

namespace lcsgeom {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Selection {
  validate,     // structure
  identities,   // structure, quarter-symmetric identities
  submanifold,  // structure, immersion suites (needs an immersion)
  all,          // everything the document supports
};

struct RunReport {
  std::string version;
  std::string input_digest;  // FNV-1a of canonical_json(doc)
  Sampling sampling;
  std::vector<CheckReport> suites;
  std::vector<std::string> notes;
  bool passed = true;

  int exit_code() const { return passed ? 0 : 1; }
};

/// Metric compatibility and torsion of a user-supplied connection.
CheckReport connection_suite(const Connection& c, const Metric& g, const CheckRunner& runner);

/// Runs the selected suites in order. A failed structure gate stops the run,
/// as does a failed invariance check for the invariant suites. Throws
/// InputError or ImmersionError for unusable input.
RunReport run(const DefinitionDocument& doc, Selection selection);

/// "text": one line per check; "json": sorted keys. Throws InputError for any
/// other format.
std::string format_report(const RunReport& report, std::string_view format);

}  // namespace lcsgeom
