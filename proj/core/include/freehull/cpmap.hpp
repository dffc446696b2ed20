#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "freehull/annihilator.hpp"
#include "freehull/mattuple.hpp"
#include "freehull/ncpoly.hpp"
#include "freehull/sdpcore.hpp"

namespace freehull {

// Choi matrix of a linear map phi: M_n -> M_m,
//   C = sum_{ij} E_ij (x) phi(E_ij),   C((i, r), (j, s)) = phi(E_ij)(r, s),
// with composite index (i, r) -> i m + r. phi(A)(r, s) = sum_ij A_ij C((i, r), (j, s)).
struct ChoiMatrix {
  Index n = 0;
  Index m = 0;
  Matrix c;
};

ChoiMatrix choi_of_kraus(std::span<const Matrix> kraus, Index n, Index m);
// phi(A) = sum_j W_j* A W_j for W_j of shape n x m.
Matrix apply_kraus(std::span<const Matrix> kraus, const Matrix& a);
Matrix apply_choi(const ChoiMatrix& choi, const Matrix& a);

// Checks apply_choi(choi_of_kraus(...)) against apply_kraus on random inputs
// and that the identity map has the rank-one Choi matrix vec(I) vec(I)*.
// Runs once per process inside kraus_from_choi; throws Error on mismatch.
void validate_choi_convention();

struct WellDefined {};
struct WellDefinednessViolation {
  // Scalar p with p(X) = 0 and p(Y) != 0.
  FreePolynomial witness;
  double witness_norm_y = 0.0;
};
using WellDefinedness = std::variant<WellDefined, WellDefinednessViolation>;

// Whether p(X) -> p(Y) is a well-defined map S(X) -> S(Y): compares the span
// of w(X (+) Y) with the span of w(X).
WellDefinedness check_well_defined(const MatrixTuple& X, const MatrixTuple& Y,
                                   double rank_tol = kDefaultRankTol);

struct ChoiOptions {
  SolverOptions solver{.primal_tol = 1e-10};
  double rank_tol = kDefaultRankTol;
};

struct ChoiFeasibility {
  FeasibilityStatus status = FeasibilityStatus::kUndetermined;
  std::optional<ChoiMatrix> choi;        // feasible
  RealVector dual;                       // infeasible: one entry per real constraint
  std::optional<FeasibilityProblem> problem;
  std::vector<Word> constraint_words;
  SolverDiagnostics diagnostics;
  // Set when the relation check already rules out a dilation.
  std::optional<WellDefinednessViolation> violation;
};

// The SDP over Choi matrices of unital CP maps phi: M_n -> M_m with
// phi(b(X)) = b(Y) for the basis words b of the joint filtration of (X, Y).
// The empty word carries unitality. Feasible exactly when Y polynomially
// dilates to an ampliation of X.
ChoiFeasibility choi_feasibility(const MatrixTuple& X, const MatrixTuple& Y, const ChoiOptions& opts = {});

// Real constraint system of choi_feasibility: for each word b and entry (r, s),
// one constraint for the real part and one for the imaginary part.
FeasibilityProblem choi_problem(const MatrixTuple& X, const MatrixTuple& Y, std::span<const Word> words);

// W_j (n x m) from eigenpairs of C with eigenvalue > tol * lambda_max, in
// descending eigenvalue order. Throws Error when the family fails to
// reproduce phi on the matrix units or sum W_j* W_j is not within
// residual_tol of I.
std::vector<Matrix> kraus_from_choi(const ChoiMatrix& choi, double tol = 1e-9, double residual_tol = 1e-7);

struct DilationCertificate {
  Index multiplicity = 0;  // M
  Index n = 0;             // size of X
  Index m = 0;             // size of Y
  Isometry v;              // (M n) x m, block j is W_j
  std::vector<Matrix> kraus;
  double residual = 0.0;   // verify_dilation over words of degree <= probe_degree
  int probe_degree = 0;
  double kraus_defect = 0.0;  // |sum W_j* W_j - I| before the polar correction
};

enum class DilationStage { kWellDefined, kFeasibility, kKraus, kIsometry, kVerification };
std::string to_string(DilationStage stage);

struct DilationFailure {
  DilationStage stage;
  std::string reason;
  bool undetermined = false;
  std::optional<FreePolynomial> witness;
  ChoiFeasibility feasibility;
};

struct DilationOptions {
  ChoiOptions choi;
  double kraus_tol = 1e-9;
  int probe_degree = 2;
  double verify_tol = 1e-6;
};

using DilationResult = std::variant<DilationCertificate, DilationFailure>;

// check_well_defined, choi_feasibility, kraus_from_choi, then stacks the
// Kraus family into V = [W_1; ...; W_M], replaces it by its polar factor and
// verifies the dilation on all words of degree <= probe_degree.
DilationResult assemble_dilation(const MatrixTuple& X, const MatrixTuple& Y, const DilationOptions& opts = {});

// Isometry in the block form [V_1; ...; V_k] from C^{sum m_i} into
// C^{M n} with M = sum M_i, whose block for Y_i is that certificate's V: the
// dilation of Y_1 (+) ... (+) Y_k into I_M (x) X.
Isometry combine_certificates(std::span<const DilationCertificate> certs);

struct VerifyReport {
  double max_residual = 0.0;
  bool accepted = false;
};

// max over probes of |p(Y) - (I_{d1} (x) V)* S (I_M (x) p(X)) S* (I_{d2} (x) V)|
// where S is swap_shuffle reordering (M, d, n) blocks into (d, M, n).
VerifyReport verify_dilation(const MatrixTuple& X, const MatrixTuple& Y, const DilationCertificate& cert,
                             std::span<const FreePolynomial> probes, double tol);

// Scalar monomials of degree <= max_degree over g letters.
std::vector<FreePolynomial> word_probes(int g, int max_degree);

}  // namespace freehull
