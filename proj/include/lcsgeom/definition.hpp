#pragma once

// Manifold definition documents (JSON):
//
//   {
//     "coordinates": ["x", "y", ...],
//     "box": [[lo, hi], ...],                    optional, [-1, 1] each
//     "metric": [["exp(2*z)", "0", ...], ...],   n x n expression strings
//     "xi": ["0", "0", "exp(-2*z)", ...],
//     "connection": [[[...]]],                   optional, Γ[k][i][j]
//     "immersion": {"coordinates": [...], "box": [...], "map": [...]},
//     "sampling": {"points": 100, "seed": 42, "atol": 1e-9, "rtol": 1e-9}
//   }
//
// An immersion coordinate without a box takes the target interval of the
// coordinate with the same name, else [-1, 1]. "connection" is checked
// against the metric but never replaces the Levi-Civita connection.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lcsgeom/check.hpp"
#include "lcsgeom/connection.hpp"
#include "lcsgeom/submanifold.hpp"

namespace lcsgeom {

/// Malformed or inconsistent input (exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

struct Sampling {
  int points = 100;
  std::uint64_t seed = 42;
  Tolerance tol;
};

struct DefinitionDocument {
  ChartPtr chart;
  Metric metric;
  TensorField xi;
  std::optional<Connection> connection;
  std::optional<Immersion> immersion;
  Sampling sampling;
};

DefinitionDocument load_definition(std::string_view text);
DefinitionDocument load_definition_file(const std::filesystem::path& path);

/// The built-in example with f(x, y, z) = (x, y, z, 0, 0).
DefinitionDocument paper_example_document();

/// Canonical JSON text of a document (sorted keys, expressions re-printed).
std::string canonical_json(const DefinitionDocument& doc);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace lcsgeom
