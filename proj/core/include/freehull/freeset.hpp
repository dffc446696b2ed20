#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freehull/cpmap.hpp"
#include "freehull/mattuple.hpp"
#include "freehull/ncpoly.hpp"

namespace freehull {

// Finitely many tuples with a common g. The set they describe is the closure
// of the list under direct sums.
class GeneratorFamily {
 public:
  explicit GeneratorFamily(std::vector<MatrixTuple> generators);

  int num_vars() const noexcept { return generators_.front().num_vars(); }
  std::size_t size() const noexcept { return generators_.size(); }
  const MatrixTuple& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<MatrixTuple>& generators() const noexcept { return generators_; }

 private:
  std::vector<MatrixTuple> generators_;
};

// |delta(X)| < 1 - 1e-12.
bool in_basis_set(const MatrixTuple& X, const FreePolynomial& delta);
// |delta(X)| <= s + 1e-12, 0 <= s < 1.
bool in_sublevel(const MatrixTuple& X, const FreePolynomial& delta, double s);

struct FreesetOptions {
  // Strictness margin for separations and straddles.
  double margin = 1e-6;
  int degree_bound = 3;
  int trials = 200;
  std::uint64_t seed = 0;
  DilationOptions dilation;
};

struct PairOutcome {
  std::size_t target = 0;
  bool certified = false;
  bool undetermined = false;
  std::string stage;   // failing stage when not certified
  std::string reason;
};

struct CandidateReport {
  std::size_t candidate = 0;
  std::vector<PairOutcome> pairs;
};

struct DominatorSearch {
  std::optional<std::size_t> dominator;
  // One certificate per generator, indexed like the family, when dominated.
  std::vector<DilationCertificate> certificates;
  std::vector<CandidateReport> candidates;
  bool undetermined = false;
};

// Candidates in ascending tuple size, ties in input order. The first
// candidate X_i for which every generator Y_j admits a certified dilation to
// an ampliation of X_i is the dominator. Certificates for Y_1, ..., Y_k
// combine block-diagonally (combine_certificates) into a certificate for any
// direct sum of them, so the verdict extends to the whole closure.
DominatorSearch hull_dominator(const GeneratorFamily& family, const FreesetOptions& opts = {});

struct SeparatingWitness {
  std::size_t source = 0;   // generator index of X (set by callers that know it)
  std::size_t target = 0;   // generator index of Y
  FreePolynomial delta;     // rescaled so that |delta(X)| < 1 < |delta(Y)|
  double norm_x = 0.0;
  double norm_y = 0.0;
};

// Searches, in order: every word of degree <= D, then 1 - w and 1 + w for
// those words, then T sampled polynomials (scalar and 2x2, degree <= D). A
// candidate separates when |delta(Y)| - |delta(X)| > margin and the rescaled
// straddle clears 1 by at least margin on both sides.
std::optional<SeparatingWitness> separating_witness(const MatrixTuple& X, const GeneratorFamily& family,
                                                    const FreesetOptions& opts = {});

struct EscapeCheck {
  double norm_z = 0.0;
  double norm_y = 0.0;
  bool escapes = false;  // |delta(Z)| >= |delta(Y)| - 1e-9 > 1
};

struct Counterexample {
  MatrixTuple z;
  std::vector<EscapeCheck> checks;
  // Every reported basis set misses Z.
  bool no_finite_subcover = false;
};

// delta with |delta(x)| < 1 < |delta(y)|.
struct WitnessAssignment {
  MatrixTuple x;
  FreePolynomial delta;
  MatrixTuple y;
};

// Z = direct sum of the assignments' y in input order. Throws Error when an
// assignment does not straddle 1 strictly.
Counterexample cover_counterexample(std::span<const WitnessAssignment> assignments);

enum class CompactnessStatus { kDominated, kNotCompact, kUndetermined };
std::string to_string(CompactnessStatus s);

struct CompactnessVerdict {
  CompactnessStatus status = CompactnessStatus::kUndetermined;
  DominatorSearch search;
  std::vector<SeparatingWitness> witnesses;  // one per generator when not compact
  std::vector<std::size_t> unseparated;      // generators without a witness
  std::optional<Counterexample> counterexample;
};

// hull_dominator, falling back to a separating witness for every generator
// as candidate dominator; anything in between is undetermined.
CompactnessVerdict analyze_compactness(const GeneratorFamily& family, const FreesetOptions& opts = {});

}  // namespace freehull
