#include "freehull/sdpcore.hpp"

#include <gtest/gtest.h>

#include "freehull/error.hpp"

namespace freehull {
namespace {

Matrix unit(Index d, Index i, Index j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

// Pins C = target entrywise through its Hermitian coordinates.
std::vector<LinearConstraint> pin(const Matrix& target) {
  const Index d = target.rows();
  std::vector<LinearConstraint> out;
  for (Index i = 0; i < d; ++i) {
    out.push_back({unit(d, i, i), target(i, i).real()});
    for (Index j = i + 1; j < d; ++j) {
      out.push_back({0.5 * (unit(d, i, j) + unit(d, j, i)), target(i, j).real()});
      out.push_back({Complex(0, 0.5) * (unit(d, j, i) - unit(d, i, j)), target(i, j).imag()});
    }
  }
  return out;
}

TEST(FeasibilityProblemTest, Validation) {
  EXPECT_THROW(FeasibilityProblem(2, {}), ShapeError);
  EXPECT_THROW(FeasibilityProblem(2, {{unit(2, 0, 1), 1.0}}), ShapeError);
  EXPECT_THROW(FeasibilityProblem(2, {{unit(3, 0, 0), 1.0}}), ShapeError);
  EXPECT_THROW(FeasibilityProblem(1, {{unit(1, 0, 0), std::nan("")}}), ShapeError);
}

TEST(SolverTest, FeasibleScalar) {
  const FeasibilityProblem p(1, {{unit(1, 0, 0), 5.0}});
  const auto out = solve_feasibility(p);
  ASSERT_EQ(out.status, FeasibilityStatus::kFeasible);
  EXPECT_NEAR(out.witness(0, 0).real(), 5.0, 1e-9);
  EXPECT_TRUE(check_witness(p, out.witness).ok);
}

TEST(SolverTest, InfeasibleScalar) {
  const FeasibilityProblem p(1, {{unit(1, 0, 0), -1.0}});
  const auto out = solve_feasibility(p);
  ASSERT_EQ(out.status, FeasibilityStatus::kInfeasible);
  ASSERT_EQ(out.dual.size(), 1);
  EXPECT_LT(out.dual(0), 0.0);
  EXPECT_TRUE(check_dual(p, out.dual).ok);
}

TEST(SolverTest, Infeasible2x2WithEigenvalueMinusOne) {
  Matrix target(2, 2);
  target << 1, 2, 2, 1;
  const FeasibilityProblem p(2, pin(target));
  const auto out = solve_feasibility(p);
  ASSERT_EQ(out.status, FeasibilityStatus::kInfeasible);
  const DualCheck check = check_dual(p, out.dual);
  EXPECT_TRUE(check.ok);
  EXPECT_LE(check.max_eigenvalue, -1e-9);
  EXPECT_GE(check.objective, 0.0);
}

TEST(SolverTest, FeasibleRequiresIterating) {
  // Trace one and a fixed off-diagonal: the minimum-norm affine point is
  // indefinite, so alternating projections must do real work.
  std::vector<LinearConstraint> cons{{Matrix::Identity(3, 3), 1.0},
                                     {0.5 * (unit(3, 0, 2) + unit(3, 2, 0)), 0.3}};
  const FeasibilityProblem p(3, cons);
  const auto out = solve_feasibility(p);
  ASSERT_EQ(out.status, FeasibilityStatus::kFeasible);
  const WitnessCheck check = check_witness(p, out.witness);
  EXPECT_TRUE(check.ok);
  EXPECT_GE(check.min_eigenvalue, -1e-9);
}

TEST(SolverTest, InfeasibleThroughIterations) {
  // Trace one with an off-diagonal entry too large for any PSD matrix.
  std::vector<LinearConstraint> cons{{Matrix::Identity(2, 2), 1.0},
                                     {0.5 * (unit(2, 0, 1) + unit(2, 1, 0)), 0.8}};
  const FeasibilityProblem p(2, cons);
  const auto out = solve_feasibility(p);
  ASSERT_EQ(out.status, FeasibilityStatus::kInfeasible);
  EXPECT_TRUE(check_dual(p, out.dual).ok);
}

TEST(SolverTest, InconsistentAffineSystem) {
  const FeasibilityProblem p(1, {{unit(1, 0, 0), 1.0}, {unit(1, 0, 0), 2.0}});
  const auto out = solve_feasibility(p);
  EXPECT_TRUE(out.diagnostics.affine_inconsistent);
  EXPECT_NE(out.status, FeasibilityStatus::kFeasible);
  if (out.status == FeasibilityStatus::kInfeasible) {
    EXPECT_TRUE(check_dual(p, out.dual).ok);
  }
}

TEST(SolverTest, Deterministic) {
  std::vector<LinearConstraint> cons{{Matrix::Identity(3, 3), 1.0},
                                     {0.5 * (unit(3, 0, 1) + unit(3, 1, 0)), 0.2}};
  const FeasibilityProblem p(3, cons);
  const auto a = solve_feasibility(p);
  for (int k = 0; k < 3; ++k) {
    const auto b = solve_feasibility(p);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_EQ(a.diagnostics.iterations, b.diagnostics.iterations);
  }
}

TEST(CheckTest, RejectsBadCandidates) {
  const FeasibilityProblem p(1, {{unit(1, 0, 0), 5.0}});
  EXPECT_FALSE(check_witness(p, Matrix::Constant(1, 1, 4.0)).ok);
  EXPECT_FALSE(check_witness(p, Matrix::Constant(2, 2, 1.0)).ok);
  EXPECT_FALSE(check_dual(p, RealVector::Constant(1, -1.0)).ok);  // objective negative
  EXPECT_FALSE(check_dual(p, RealVector::Constant(2, -1.0)).ok);  // wrong length
}

}  // namespace
}  // namespace freehull
