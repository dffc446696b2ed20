#include "freehull/sdpcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "freehull/error.hpp"

namespace freehull {

FeasibilityProblem::FeasibilityProblem(Index dim, std::vector<LinearConstraint> constraints)
    : dim_(dim), constraints_(std::move(constraints)) {
  if (dim_ < 1) throw ShapeError("feasibility problem dimension must be positive");
  if (constraints_.empty()) throw ShapeError("feasibility problem needs at least one constraint");
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    const Matrix& a = constraints_[k].a;
    if (a.rows() != dim_ || a.cols() != dim_) {
      throw ShapeError("constraint " + std::to_string(k) + " has the wrong shape");
    }
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
      throw ShapeError("constraint " + std::to_string(k) + " is not Hermitian");
    }
    if (!std::isfinite(constraints_[k].target)) {
      throw ShapeError("constraint " + std::to_string(k) + " has a non-finite target");
    }
  }
}

std::string to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::kFeasible:
      return "feasible";
    case FeasibilityStatus::kInfeasible:
      return "infeasible";
    case FeasibilityStatus::kUndetermined:
      return "undetermined";
  }
  return "undetermined";
}

namespace {

// Orthonormal real coordinates on Hermitian matrices: the diagonal, then
// sqrt(2) Re and sqrt(2) Im of each strict upper entry. The Euclidean inner
// product of coordinates equals Re tr(A* C).
RealVector to_coords(const Matrix& h) {
  const Index d = h.rows();
  RealVector x(d * d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) x(k++) = h(i, i).real();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      x(k++) = std::sqrt(2.0) * h(i, j).real();
      x(k++) = std::sqrt(2.0) * h(i, j).imag();
    }
  }
  return x;
}

Matrix from_coords(const RealVector& x, Index d) {
  Matrix h(d, d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) h(i, i) = x(k++);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const double re = x(k++) / std::sqrt(2.0);
      const double im = x(k++) / std::sqrt(2.0);
      h(i, j) = Complex{re, im};
      h(j, i) = Complex{re, -im};
    }
  }
  return h;
}

Eigen::SelfAdjointEigenSolver<Matrix> eigen(const Matrix& h, bool vectors) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

Matrix psd_part(const Matrix& h) {
  auto es = eigen(h, true);
  const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

double scaled_residual(const RealVector& ax, const RealVector& b) {
  double worst = 0.0;
  for (Index k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(ax(k) - b(k)) / (1.0 + std::abs(b(k))));
  return worst;
}

// Factorization of the constraint operator A: coords -> R^K and the pieces of
// it the projections and certificates reuse.
class ConstraintOperator {
 public:
  ConstraintOperator(const FeasibilityProblem& problem, double rank_tol) : dim_(problem.dim()) {
    const Index K = static_cast<Index>(problem.size());
    a_.resize(K, dim_ * dim_);
    b_.resize(K);
    for (Index k = 0; k < K; ++k) {
      a_.row(k) = to_coords(problem.constraints()[static_cast<std::size_t>(k)].a).transpose();
      b_(k) = problem.constraints()[static_cast<std::size_t>(k)].target;
    }
    Eigen::JacobiSVD<RealMatrix> svd(a_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rank_tol * s(0)) ++r;
    u_ = svd.matrixU().leftCols(r);
    v_ = svd.matrixV().leftCols(r);
    sigma_ = s.head(r);
    particular_ = apply_pinv(b_);

    // Projection of the identity onto the span of the A_k; when positive
    // definite it turns a near-certificate into a strict one.
    const RealVector id = to_coords(Matrix::Identity(dim_, dim_));
    const RealVector p = v_ * (v_.transpose() * id);
    pd_dir_ = from_coords(p, dim_);
    pd_min_eig_ = r > 0 ? eigen(pd_dir_, false).eigenvalues()(0) : 0.0;
    pd_y_ = u_ * (sigma_.cwiseInverse().asDiagonal() * (v_.transpose() * id));
  }

  Index rank() const { return sigma_.size(); }
  const RealMatrix& matrix() const { return a_; }
  const RealVector& targets() const { return b_; }
  const RealVector& particular() const { return particular_; }

  // Minimum-norm x with A x = b (least squares when inconsistent).
  RealVector apply_pinv(const RealVector& b) const {
    return v_ * (sigma_.cwiseInverse().asDiagonal() * (u_.transpose() * b));
  }

  RealVector project_affine(const RealVector& x) const {
    return x - v_ * (v_.transpose() * x) + particular_;
  }

  // Minimum-norm y with A^T y = projection of h onto span{A_k}.
  RealVector dual_coefficients(const RealVector& h) const {
    return u_ * (sigma_.cwiseInverse().asDiagonal() * (v_.transpose() * h));
  }

  bool has_pd_direction() const { return pd_min_eig_ > 1e-8 * std::max(1.0, pd_dir_.norm()); }
  double pd_min_eig() const { return pd_min_eig_; }
  const RealVector& pd_y() const { return pd_y_; }

 private:
  Index dim_;
  RealMatrix a_;
  RealVector b_;
  RealMatrix u_;
  RealMatrix v_;
  RealVector sigma_;
  RealVector particular_;
  Matrix pd_dir_;
  double pd_min_eig_ = 0.0;
  RealVector pd_y_;
};

// Turns y with sum y_k A_k approximately negative semidefinite and
// sum y_k b_k > 0 into a strict certificate by subtracting a multiple of the
// positive definite direction. Returns nothing when no admissible multiple
// exists.
std::optional<RealVector> polish_certificate(const ConstraintOperator& op, const FeasibilityProblem& problem,
                                             RealVector y, const SolverOptions& opts) {
  constexpr double kTarget = 1e-6;
  const Index d = problem.dim();
  Matrix u = from_coords(op.matrix().transpose() * y, d);
  double beta = y.dot(op.targets());
  double spectral = u.size() ? eigen(u, false).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  if (spectral > 1e-12) {
    y /= spectral;
    u /= spectral;
    beta /= spectral;
  } else if (beta > 0.0) {
    y /= beta;
    u /= beta;
    beta = 1.0;
  } else {
    return std::nullopt;
  }
  const double lam_max = eigen(u, false).eigenvalues().maxCoeff();

  RealVector candidate = y;
  if (!(lam_max <= -kTarget && beta >= 0.0)) {
    if (!op.has_pd_direction()) return std::nullopt;
    const double gamma = op.pd_y().dot(op.targets());
    double lo = (std::max(lam_max, 0.0) + kTarget) / op.pd_min_eig();
    double hi = std::numeric_limits<double>::infinity();
    if (gamma > 0.0) {
      hi = beta / gamma;
    } else if (gamma < 0.0) {
      lo = std::max(lo, beta / gamma);
    } else if (beta < 0.0) {
      return std::nullopt;
    }
    if (!(lo < hi)) return std::nullopt;
    const double s = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * lo;
    candidate = y - s * op.pd_y();
  }
  if (!check_dual(problem, candidate, opts).ok) return std::nullopt;
  const Matrix sum = from_coords(op.matrix().transpose() * candidate, d);
  return RealVector(candidate / eigen(sum, false).eigenvalues().cwiseAbs().maxCoeff());
}

// Low-rank solutions sit on a face of the cone that the affine set may only
// touch tangentially, where alternating projections crawl. For each rank r
// this writes C = W W* with W (d x r) seeded from the top eigenpairs of the
// current iterate and runs damped Gauss-Newton on <A_k, W W*> = b_k with
// minimum-norm steps. The result is PSD by construction and is kept only if
// check_witness accepts it.
std::optional<Matrix> lowrank_polish(const FeasibilityProblem& problem, const Matrix& c, const SolverOptions& opts) {
  const auto es = eigen(c, true);
  const RealVector& lam = es.eigenvalues();
  const double top = lam.maxCoeff();
  if (!(top > 0.0)) return std::nullopt;
  const Index d = c.rows();
  const auto k_count = static_cast<Index>(problem.size());
  RealVector target(k_count);
  for (Index k = 0; k < k_count; ++k) target(k) = problem.constraints()[static_cast<std::size_t>(k)].target;

  const auto residual_of = [&](const Matrix& f) {
    const Matrix ff = f * f.adjoint();
    RealVector res(k_count);
    for (Index k = 0; k < k_count; ++k) {
      res(k) = target(k) - (problem.constraints()[static_cast<std::size_t>(k)].a.adjoint() * ff).trace().real();
    }
    return res;
  };

  for (Index r = 1; r <= d; ++r) {
    const RealVector floored = lam.tail(r).cwiseMax(1e-3 * top);
    Matrix w = es.eigenvectors().rightCols(r) * floored.cwiseSqrt().asDiagonal();
    RealVector res = residual_of(w);
    const double start = res.norm();
    for (int step = 0; step < 40; ++step) {
      const double scaled = (res.array().abs() / (1.0 + target.array().abs())).maxCoeff();
      // Near a solution of this rank the iteration converges quadratically;
      // anything slower means the rank is wrong.
      if (step == 6 && res.norm() > 1e-3 * start) break;
      if (scaled <= 0.1 * opts.primal_tol) break;
      RealMatrix jac(k_count, 2 * d * r);
      for (Index k = 0; k < k_count; ++k) {
        const Matrix aw = problem.constraints()[static_cast<std::size_t>(k)].a * w;
        jac.row(k).head(d * r) = 2.0 * Eigen::Map<const RealVector>(RealMatrix(aw.real()).data(), d * r);
        jac.row(k).tail(d * r) = 2.0 * Eigen::Map<const RealVector>(RealMatrix(aw.imag()).data(), d * r);
      }
      Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(jac.rows(), jac.cols());
      cod.setThreshold(1e-9);
      cod.compute(jac);
      const RealVector delta = cod.solve(res);
      Matrix dw(d, r);
      dw.real() = Eigen::Map<const RealMatrix>(delta.data(), d, r);
      dw.imag() = Eigen::Map<const RealMatrix>(delta.data() + d * r, d, r);
      // Backtrack until the residual norm drops; full steps overshoot when
      // the seed is still far from the solution set.
      bool moved = false;
      for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
        const Matrix trial = w + alpha * dw;
        RealVector trial_res = residual_of(trial);
        if (trial_res.norm() < res.norm()) {
          w = trial;
          res = std::move(trial_res);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    const Matrix candidate = w * w.adjoint();
    const Matrix herm = 0.5 * (candidate + candidate.adjoint());
    if (check_witness(problem, herm, opts).ok) return herm;
  }
  return std::nullopt;
}

}  // namespace

WitnessCheck check_witness(const FeasibilityProblem& problem, const Matrix& c, const SolverOptions& opts) {
  WitnessCheck out;
  if (c.rows() != problem.dim() || c.cols() != problem.dim()) return out;
  const Matrix herm = 0.5 * (c + c.adjoint());
  out.min_eigenvalue = eigen(herm, false).eigenvalues()(0);
  for (const auto& con : problem.constraints()) {
    const double value = (con.a.adjoint() * c).trace().real();
    out.max_scaled_residual =
        std::max(out.max_scaled_residual, std::abs(value - con.target) / (1.0 + std::abs(con.target)));
  }
  out.ok = out.min_eigenvalue >= -opts.psd_floor && out.max_scaled_residual <= opts.primal_tol &&
           (c - c.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff());
  return out;
}

DualCheck check_dual(const FeasibilityProblem& problem, const RealVector& y, const SolverOptions& opts) {
  DualCheck out;
  if (y.size() != static_cast<Index>(problem.size())) return out;
  Matrix sum = Matrix::Zero(problem.dim(), problem.dim());
  double objective = 0.0;
  bool nonzero_target = false;
  for (std::size_t k = 0; k < problem.size(); ++k) {
    const auto& con = problem.constraints()[k];
    sum += y(static_cast<Index>(k)) * con.a;
    objective += y(static_cast<Index>(k)) * con.target;
    nonzero_target = nonzero_target || con.target != 0.0;
  }
  sum = 0.5 * (sum + sum.adjoint());
  const RealVector eig = eigen(sum, false).eigenvalues();
  const double spectral = eig.cwiseAbs().maxCoeff();
  if (!(spectral > 0.0)) return out;
  out.max_eigenvalue = eig.maxCoeff() / spectral;
  out.objective = objective / spectral;
  out.ok = nonzero_target && out.max_eigenvalue <= -opts.dual_margin && out.objective >= 0.0;
  return out;
}

FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem, const SolverOptions& opts) {
  const Index d = problem.dim();
  const ConstraintOperator op(problem, opts.rank_tol);
  FeasibilityOutcome out;
  out.diagnostics.constraint_rank = static_cast<int>(op.rank());

  auto finish_infeasible = [&](const RealVector& y) {
    const DualCheck check = check_dual(problem, y, opts);
    out.status = FeasibilityStatus::kInfeasible;
    out.dual = y;
    out.diagnostics.dual_max_eigenvalue = check.max_eigenvalue;
    out.diagnostics.dual_objective = check.objective;
    return out;
  };

  // Empty affine set: the least-squares residual r satisfies A^T r = 0 and
  // r . b = |r|^2 > 0.
  const RealVector r = op.targets() - op.matrix() * op.particular();
  if (scaled_residual(op.matrix() * op.particular(), op.targets()) > opts.primal_tol) {
    out.diagnostics.affine_inconsistent = true;
    out.diagnostics.primal_residual = scaled_residual(op.matrix() * op.particular(), op.targets());
    if (auto y = polish_certificate(op, problem, r, opts)) return finish_infeasible(*y);
    return out;
  }

  const Index n = d * d;
  RealVector x = RealVector::Zero(n);  // PSD iterate
  RealVector y_aff(n);                 // affine iterate
  RealVector p = RealVector::Zero(n);  // Dykstra increments
  RealVector q = RealVector::Zero(n);

  int next_polish = opts.certificate_interval;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    y_aff = op.project_affine(x + p);
    p = x + p - y_aff;
    const RealVector x_next = to_coords(psd_part(from_coords(y_aff + q, d)));
    q = y_aff + q - x_next;
    x = x_next;
    out.diagnostics.iterations = it;

    const double residual = scaled_residual(op.matrix() * x, op.targets());
    out.diagnostics.primal_residual = residual;
    if (residual <= opts.primal_tol) {
      const Matrix c = from_coords(x, d);
      const WitnessCheck check = check_witness(problem, c, opts);
      if (check.ok) {
        out.status = FeasibilityStatus::kFeasible;
        out.witness = c;
        out.diagnostics.min_eigenvalue = check.min_eigenvalue;
        out.diagnostics.primal_residual = check.max_scaled_residual;
        return out;
      }
    }

    if (it % opts.certificate_interval == 0) {
      if (residual < 1e-2 && it >= next_polish) {
        next_polish = 2 * it;
        if (auto c = lowrank_polish(problem, from_coords(x, d), opts)) {
          const WitnessCheck check = check_witness(problem, *c, opts);
          out.status = FeasibilityStatus::kFeasible;
          out.witness = *c;
          out.diagnostics.min_eigenvalue = check.min_eigenvalue;
          out.diagnostics.primal_residual = check.max_scaled_residual;
          return out;
        }
      }
      // The negative part of the affine iterate is the normal direction of
      // the cone at the nearest PSD point; at a positive gap it separates.
      const Matrix ya = from_coords(y_aff, d);
      const Matrix neg = ya - psd_part(ya);
      out.diagnostics.gap = neg.norm();
      if (out.diagnostics.gap > opts.primal_tol) {
        if (auto y = polish_certificate(op, problem, op.dual_coefficients(to_coords(neg)), opts)) {
          return finish_infeasible(*y);
        }
      }
    }
  }
  return out;
}

}  // namespace freehull
