#pragma once

#include <string>
#include <vector>

#include "freehull/types.hpp"

namespace freehull {

// <A, C> = Re tr(A* C) = target, for Hermitian A.
struct LinearConstraint {
  Matrix a;
  double target = 0.0;
};

// Find Hermitian C >= 0 of side `dim` satisfying every constraint.
class FeasibilityProblem {
 public:
  static constexpr double kHermitianTol = 1e-12;

  FeasibilityProblem(Index dim, std::vector<LinearConstraint> constraints);

  Index dim() const noexcept { return dim_; }
  const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }
  std::size_t size() const noexcept { return constraints_.size(); }

 private:
  Index dim_;
  std::vector<LinearConstraint> constraints_;
};

struct SolverOptions {
  // Feasible when max_k |<A_k, C> - b_k| / (1 + |b_k|) <= primal_tol.
  double primal_tol = 1e-7;
  // Witness eigenvalues must be >= -psd_floor.
  double psd_floor = 1e-9;
  // Certificates need lambda_max(sum y_k A_k) <= -dual_margin after scaling
  // sum y_k A_k to unit spectral norm.
  double dual_margin = 1e-9;
  int max_iterations = 50000;
  // Iterations between attempts to extract an infeasibility certificate.
  int certificate_interval = 25;
  // Relative singular value cutoff for the constraint operator.
  double rank_tol = 1e-10;
};

enum class FeasibilityStatus { kFeasible, kInfeasible, kUndetermined };

std::string to_string(FeasibilityStatus s);

struct SolverDiagnostics {
  int iterations = 0;
  // Scaled constraint residual of the returned (or last) primal iterate.
  double primal_residual = 0.0;
  // Smallest eigenvalue of the witness, when feasible.
  double min_eigenvalue = 0.0;
  // Frobenius distance between the last affine iterate and the PSD cone.
  double gap = 0.0;
  // lambda_max(sum y_k A_k) and sum y_k b_k of the certificate, when infeasible.
  double dual_max_eigenvalue = 0.0;
  double dual_objective = 0.0;
  int constraint_rank = 0;
  bool affine_inconsistent = false;
};

struct FeasibilityOutcome {
  FeasibilityStatus status = FeasibilityStatus::kUndetermined;
  Matrix witness;     // feasible only
  RealVector dual;    // infeasible only; one entry per constraint
  SolverDiagnostics diagnostics;
};

// Dykstra alternating projections between the constraint affine subspace and
// the PSD cone. Feasible and infeasible answers are re-verified with
// check_witness / check_dual before they are returned.
FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem, const SolverOptions& opts = {});

struct WitnessCheck {
  double min_eigenvalue = 0.0;
  double max_scaled_residual = 0.0;
  bool ok = false;
};

// Independent checks that use only the problem data.
WitnessCheck check_witness(const FeasibilityProblem& problem, const Matrix& c, const SolverOptions& opts = {});

struct DualCheck {
  // Of sum y_k A_k scaled to unit spectral norm.
  double max_eigenvalue = 0.0;
  double objective = 0.0;  // sum y_k b_k, same scaling
  bool ok = false;
};

// A valid certificate has sum y_k A_k negative definite, sum y_k b_k >= 0 and
// b != 0; together these rule out any PSD solution.
DualCheck check_dual(const FeasibilityProblem& problem, const RealVector& y, const SolverOptions& opts = {});

}  // namespace freehull
