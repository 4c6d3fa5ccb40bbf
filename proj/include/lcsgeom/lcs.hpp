#pragma once

// Lorentzian concircular structures: (g, ξ) with ∇ξ = α(I + η⊗ξ), the
// quarter-symmetric metric connection built from them, and the identity
// suites that certify both.

#include "lcsgeom/check.hpp"
#include "lcsgeom/connection.hpp"

namespace lcsgeom {

struct LcsStructure {
  Metric metric;
  Connection levi_civita;
  TensorField xi;         // (1,0)
  TensorField eta;        // (0,1), ξ lowered
  TensorField nabla_xi;   // (1,1): nabla_xi(k, i) = (∇_{∂i} ξ)^k
  TensorField phi;        // (1,1): φ(∂i) = phi(k, i) ∂k, φ = (1/α) ∇ξ
  Expr alpha;             // trace(∇ξ) / (n − 1)
  Expr rho;               // −ξ(α)
  Expr beta;              // −ξ(ρ)
  Expr trace_phi;

  const ChartPtr& chart() const { return metric.chart(); }
  std::size_t dim() const { return metric.dim(); }
};

/// Raised when (g, ξ) does not pass the structure gate; report() holds the
/// failing checks.
class StructureError : public Error {
 public:
  StructureError(const std::string& what, CheckReport report) : Error(what), report_(std::move(report)) {}
  const CheckReport& report() const { return report_; }

 private:
  CheckReport report_;
};

/// Recovers η, α, φ, ρ, β from (g, ξ) without verifying anything. Throws
/// Error when ∇ξ vanishes identically (α ≡ 0).
LcsStructure derive_structure(const Metric& g, const TensorField& xi);

/// derive_structure followed by the gate: ξ unit timelike, α nonzero at every
/// usable point, and ∇ξ = α(I + η⊗ξ). Throws StructureError.
LcsStructure build_structure(const Metric& g, const TensorField& xi, const CheckRunner& runner);

/// Both connections and their curvature, computed once and shared by suites.
struct AmbientGeometry {
  LcsStructure structure;
  Connection qsmc;
  CurvatureBundle curvature;      // Levi-Civita
  CurvatureBundle curvature_bar;  // quarter-symmetric
};

AmbientGeometry make_ambient(LcsStructure structure);

/// One check per structure identity, slots filled with coordinate fields.
CheckReport validate_structure(const AmbientGeometry& ambient, const CheckRunner& runner);

/// Connection, torsion, curvature, Ricci and symmetry identities of ∇̄.
CheckReport qsmc_identity_suite(const AmbientGeometry& ambient, const CheckRunner& runner);

// The five-dimensional example: chart (x, y, z, u, v), orthonormal frame
// e_a = e^{-z} d_a (a ≠ z), e_3 = e^{-2z} d_z with g(e_3, e_3) = −1, ξ = e_3.
ChartPtr paper_example_chart();
Metric paper_example_metric(const ChartPtr& chart);
TensorField paper_example_xi(const ChartPtr& chart);
FrameField paper_example_frame(const ChartPtr& chart);
LcsStructure paper_example();

}  // namespace lcsgeom
