#include "freehull/cpmap.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "freehull/error.hpp"
#include "word_span.hpp"

namespace freehull {

ChoiMatrix choi_of_kraus(std::span<const Matrix> kraus, Index n, Index m) {
  ChoiMatrix out{n, m, Matrix::Zero(n * m, n * m)};
  for (const Matrix& w : kraus) {
    if (w.rows() != n || w.cols() != m) throw ShapeError("Kraus element has the wrong shape");
    // Column (i, r) of the stacked vector holds conj(W(i, r)).
    Vector u(n * m);
    for (Index i = 0; i < n; ++i) {
      for (Index r = 0; r < m; ++r) u(i * m + r) = std::conj(w(i, r));
    }
    out.c += u * u.adjoint();
  }
  return out;
}

Matrix apply_kraus(std::span<const Matrix> kraus, const Matrix& a) {
  if (kraus.empty()) throw ShapeError("empty Kraus family");
  Matrix out = Matrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const Matrix& w : kraus) out += w.adjoint() * a * w;
  return out;
}

Matrix apply_choi(const ChoiMatrix& choi, const Matrix& a) {
  const Index n = choi.n;
  const Index m = choi.m;
  if (a.rows() != n || a.cols() != n) throw ShapeError("apply_choi input has the wrong shape");
  Matrix out = Matrix::Zero(m, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (a(i, j) != Complex{}) out += a(i, j) * choi.c.block(i * m, j * m, m, m);
    }
  }
  return out;
}

void validate_choi_convention() {
  std::mt19937_64 rng(0x5eed);
  const Index n = 2;
  const Index m = 3;
  const std::vector<Matrix> kraus = {gaussian_matrix(n, m, 1.0, rng), gaussian_matrix(n, m, 1.0, rng)};
  const ChoiMatrix choi = choi_of_kraus(kraus, n, m);
  const Matrix a = gaussian_matrix(n, n, 1.0, rng);
  if ((apply_choi(choi, a) - apply_kraus(kraus, a)).norm() > 1e-12 * (1.0 + a.norm())) {
    throw Error("Choi convention self-test failed: Kraus and Choi actions disagree");
  }
  const Matrix id = Matrix::Identity(n, n);
  const std::vector<Matrix> identity_map = {id};
  Vector e = Vector::Zero(n * n);
  for (Index i = 0; i < n; ++i) e(i * n + i) = 1.0;
  if ((choi_of_kraus(identity_map, n, n).c - e * e.adjoint()).norm() > 1e-15) {
    throw Error("Choi convention self-test failed: identity map is not vec(I) vec(I)*");
  }
}

namespace {

using detail::WordSpan;

// Gram-Schmidt tracker for the relation search in check_well_defined.
class Orthogonalizer {
 public:
  Orthogonalizer(Index ambient, double tol) : q_(ambient, ambient), tol_(tol) {}

  bool add(const Vector& v) {
    max_norm_ = std::max(max_norm_, v.norm());
    Vector r = v;
    for (int pass = 0; pass < 2 && rank_ > 0; ++pass) r -= q_.leftCols(rank_) * (q_.leftCols(rank_).adjoint() * r);
    if (r.norm() <= tol_ * max_norm_ || rank_ == q_.cols()) return false;
    q_.col(rank_++) = r / r.norm();
    return true;
  }

 private:
  Matrix q_;
  double tol_;
  Index rank_ = 0;
  double max_norm_ = 0.0;
};

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

WellDefinedness check_well_defined(const MatrixTuple& X, const MatrixTuple& Y, double rank_tol) {
  if (X.num_vars() != Y.num_vars()) {
    throw ShapeError("check_well_defined: tuples have " + std::to_string(X.num_vars()) + " and " +
                     std::to_string(Y.num_vars()) + " variables");
  }
  const MatrixTuple single[] = {X};
  const MatrixTuple pair[] = {X, Y};
  const auto x_run = WordSpan(single, rank_tol).run(WordSpan::Stop::kStabilized);
  const auto joint = WordSpan(pair, rank_tol).run(WordSpan::Stop::kStabilized);
  if (joint.basis_words.size() == x_run.basis_words.size()) return WellDefined{};

  // The first joint basis word that is X-dependent on its predecessors gives
  // a relation of X that Y does not share.
  const Index n = X.size();
  Orthogonalizer ortho(n * n, rank_tol);
  for (std::size_t k = 0; k < joint.basis_words.size(); ++k) {
    const Vector v = vec(joint.basis_values[k][0]);
    if (ortho.add(v)) continue;
    Matrix basis(n * n, static_cast<Index>(k));
    for (std::size_t j = 0; j < k; ++j) basis.col(static_cast<Index>(j)) = vec(joint.basis_values[j][0]);
    const auto coeffs = WordSpan::solve_coefficients(basis, v);
    FreePolynomial::TermMap terms;
    terms.emplace(joint.basis_words[k], Matrix::Constant(1, 1, 1.0));
    for (std::size_t j = 0; j < k; ++j) {
      if (coeffs[j] != Complex{}) terms.emplace(joint.basis_words[j], Matrix::Constant(1, 1, -coeffs[j]));
    }
    FreePolynomial p = FreePolynomial::from_terms(X.num_vars(), 1, 1, std::move(terms));
    const double norm_y = operator_norm(evaluate(p, Y));
    return WellDefinednessViolation{std::move(p), norm_y};
  }
  // Numerically borderline: the joint span is larger but no single word
  // exposes it. Report the leading excess word against X's own relation.
  FreePolynomial p = annihilating_polynomial(X, rank_tol);
  const double norm_y = operator_norm(evaluate(p, Y));
  return WellDefinednessViolation{std::move(p), norm_y};
}

FeasibilityProblem choi_problem(const MatrixTuple& X, const MatrixTuple& Y, std::span<const Word> words) {
  if (X.num_vars() != Y.num_vars()) throw ShapeError("choi_problem: variable count mismatch");
  const Index n = X.size();
  const Index m = Y.size();
  std::vector<LinearConstraint> constraints;
  constraints.reserve(words.size() * static_cast<std::size_t>(2 * m * m));
  const Complex i_unit{0.0, 1.0};
  for (const Word& w : words) {
    const FreePolynomial mono = FreePolynomial::monomial(X.num_vars(), w);
    const Matrix bx = evaluate(mono, X);
    const Matrix by = evaluate(mono, Y);
    const Matrix bxt = bx.transpose();
    for (Index r = 0; r < m; ++r) {
      for (Index s = 0; s < m; ++s) {
        // tr(F C) = phi(B)(r, s) for F = B^T (x) E_sr.
        Matrix e = Matrix::Zero(m, m);
        e(s, r) = 1.0;
        const Matrix f = kron(bxt, e);
        constraints.push_back({0.5 * (f + f.adjoint()), by(r, s).real()});
        const Matrix g = -i_unit * f;
        constraints.push_back({0.5 * (g + g.adjoint()), by(r, s).imag()});
      }
    }
  }
  return FeasibilityProblem(n * m, std::move(constraints));
}

ChoiFeasibility choi_feasibility(const MatrixTuple& X, const MatrixTuple& Y, const ChoiOptions& opts) {
  if (X.num_vars() != Y.num_vars()) throw ShapeError("choi_feasibility: variable count mismatch");
  ChoiFeasibility out;
  const WellDefinedness wd = check_well_defined(X, Y, opts.rank_tol);
  if (const auto* v = std::get_if<WellDefinednessViolation>(&wd)) out.violation = *v;
  const MatrixTuple pair[] = {X, Y};
  out.constraint_words = WordSpan(pair, opts.rank_tol).run(WordSpan::Stop::kStabilized).basis_words;
  out.problem.emplace(choi_problem(X, Y, out.constraint_words));
  const FeasibilityOutcome result = solve_feasibility(*out.problem, opts.solver);
  out.status = result.status;
  out.diagnostics = result.diagnostics;
  if (result.status == FeasibilityStatus::kFeasible) {
    out.choi = ChoiMatrix{X.size(), Y.size(), result.witness};
  } else if (result.status == FeasibilityStatus::kInfeasible) {
    out.dual = result.dual;
  }
  return out;
}

std::vector<Matrix> kraus_from_choi(const ChoiMatrix& choi, double tol, double residual_tol) {
  static std::once_flag self_test;
  std::call_once(self_test, validate_choi_convention);

  const Index n = choi.n;
  const Index m = choi.m;
  if (choi.c.rows() != n * m || choi.c.cols() != n * m) throw ShapeError("Choi matrix has the wrong size");
  const Matrix herm = 0.5 * (choi.c + choi.c.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  const RealVector& lambda = es.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 0.0)) throw Error("Choi matrix has no positive eigenvalue");

  std::vector<Matrix> kraus;
  for (Index k = lambda.size() - 1; k >= 0; --k) {
    if (lambda(k) <= tol * lambda_max) break;
    const Vector u = std::sqrt(lambda(k)) * es.eigenvectors().col(k);
    Matrix w(n, m);
    for (Index i = 0; i < n; ++i) {
      for (Index r = 0; r < m; ++r) w(i, r) = std::conj(u(i * m + r));
    }
    kraus.push_back(std::move(w));
  }

  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      worst = std::max(worst, operator_norm(apply_choi(choi, e) - apply_kraus(kraus, e)));
    }
  }
  if (worst > residual_tol) {
    throw Error("Kraus reconstruction residual " + std::to_string(worst) + " exceeds tolerance");
  }
  const double defect = operator_norm(apply_kraus(kraus, Matrix::Identity(n, n)) - Matrix::Identity(m, m));
  if (defect > residual_tol) {
    throw Error("Kraus family is not unital: |sum W*W - I| = " + std::to_string(defect));
  }
  return kraus;
}

std::string to_string(DilationStage stage) {
  switch (stage) {
    case DilationStage::kWellDefined:
      return "well_defined";
    case DilationStage::kFeasibility:
      return "feasibility";
    case DilationStage::kKraus:
      return "kraus";
    case DilationStage::kIsometry:
      return "isometry";
    case DilationStage::kVerification:
      return "verification";
  }
  return "unknown";
}

std::vector<FreePolynomial> word_probes(int g, int max_degree) {
  std::vector<FreePolynomial> probes;
  for (const Word& w : words_up_to(g, max_degree)) probes.push_back(FreePolynomial::monomial(g, w));
  return probes;
}

VerifyReport verify_dilation(const MatrixTuple& X, const MatrixTuple& Y, const DilationCertificate& cert,
                             std::span<const FreePolynomial> probes, double tol) {
  const Index n = X.size();
  const Index m = Y.size();
  const Index M = cert.multiplicity;
  if (cert.n != n || cert.m != m || cert.v.codomain_dim() != M * n || cert.v.domain_dim() != m) {
    throw ShapeError("certificate shape does not match the tuples");
  }
  if (X.num_vars() != Y.num_vars()) throw ShapeError("verify_dilation: variable count mismatch");
  VerifyReport report;
  const Matrix& v = cert.v.matrix();
  for (const FreePolynomial& p : probes) {
    const Index d1 = p.rows();
    const Index d2 = p.cols();
    const Matrix lhs = evaluate(p, Y);
    const Matrix lifted = permute(kron(Matrix::Identity(M, M), evaluate(p, X)), swap_shuffle(M, d1, n),
                                  swap_shuffle(M, d2, n));
    const Matrix rhs = kron(Matrix::Identity(d1, d1), v).adjoint() * lifted * kron(Matrix::Identity(d2, d2), v);
    report.max_residual = std::max(report.max_residual, operator_norm(lhs - rhs));
  }
  report.accepted = report.max_residual <= tol;
  return report;
}

DilationResult assemble_dilation(const MatrixTuple& X, const MatrixTuple& Y, const DilationOptions& opts) {
  if (X.num_vars() != Y.num_vars()) throw ShapeError("assemble_dilation: variable count mismatch");
  const WellDefinedness wd = check_well_defined(X, Y, opts.choi.rank_tol);
  if (const auto* v = std::get_if<WellDefinednessViolation>(&wd)) {
    return DilationFailure{DilationStage::kWellDefined,
                           "p(X) = 0 but |p(Y)| = " + std::to_string(v->witness_norm_y) + " for p = " +
                               to_string(v->witness),
                           false, v->witness, {}};
  }

  ChoiFeasibility feas = choi_feasibility(X, Y, opts.choi);
  if (feas.status != FeasibilityStatus::kFeasible) {
    const bool undetermined = feas.status == FeasibilityStatus::kUndetermined;
    std::string reason = undetermined ? "solver stopped after " + std::to_string(feas.diagnostics.iterations) +
                                            " iterations without a witness or certificate"
                                      : "no unital completely positive extension exists (dual certificate)";
    return DilationFailure{DilationStage::kFeasibility, std::move(reason), undetermined, std::nullopt,
                           std::move(feas)};
  }

  std::vector<Matrix> kraus;
  try {
    kraus = kraus_from_choi(*feas.choi, opts.kraus_tol);
  } catch (const Error& e) {
    return DilationFailure{DilationStage::kKraus, e.what(), false, std::nullopt, std::move(feas)};
  }

  const Index n = X.size();
  const Index m = Y.size();
  const Index M = static_cast<Index>(kraus.size());
  Matrix stacked(M * n, m);
  for (Index j = 0; j < M; ++j) stacked.middleRows(j * n, n) = kraus[static_cast<std::size_t>(j)];
  const double defect = operator_norm(stacked.adjoint() * stacked - Matrix::Identity(m, m));

  std::optional<Isometry> v;
  try {
    v = Isometry::nearest(stacked);
  } catch (const Error& e) {
    return DilationFailure{DilationStage::kIsometry, e.what(), false, std::nullopt, std::move(feas)};
  }
  for (Index j = 0; j < M; ++j) kraus[static_cast<std::size_t>(j)] = v->matrix().middleRows(j * n, n);

  DilationCertificate cert{M, n, m, *v, std::move(kraus), 0.0, opts.probe_degree, defect};
  const auto probes = word_probes(X.num_vars(), opts.probe_degree);
  const VerifyReport report = verify_dilation(X, Y, cert, probes, opts.verify_tol);
  cert.residual = report.max_residual;
  if (!report.accepted) {
    return DilationFailure{DilationStage::kVerification,
                           "dilation residual " + std::to_string(report.max_residual) + " exceeds tolerance",
                           false, std::nullopt, std::move(feas)};
  }
  return cert;
}

Isometry combine_certificates(std::span<const DilationCertificate> certs) {
  if (certs.empty()) throw ShapeError("no certificates to combine");
  Index rows = 0;
  Index cols = 0;
  for (const auto& c : certs) {
    if (c.n != certs.front().n) throw ShapeError("certificates dilate to different tuples");
    rows += c.v.codomain_dim();
    cols += c.v.domain_dim();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0;
  Index col = 0;
  for (const auto& c : certs) {
    out.block(r, col, c.v.codomain_dim(), c.v.domain_dim()) = c.v.matrix();
    r += c.v.codomain_dim();
    col += c.v.domain_dim();
  }
  return Isometry(std::move(out), 1e-9);
}

}  // namespace freehull
