#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "freehull/ncpoly.hpp"
#include "freehull/types.hpp"

namespace freehull {

// g square complex matrices of a common size n (g >= 1, n >= 1).
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<Matrix> matrices);

  static MatrixTuple scalars(std::initializer_list<Complex> values);

  int num_vars() const noexcept { return static_cast<int>(matrices_.size()); }
  Index size() const noexcept { return matrices_.front().rows(); }

  // 0-based access; letter i of a word refers to (*this)[i - 1].
  const Matrix& operator[](int i) const { return matrices_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }

  bool operator==(const MatrixTuple& other) const;

 private:
  std::vector<Matrix> matrices_;
};

// An N x m matrix V with V*V = I_m.
class Isometry {
 public:
  static constexpr double kTolerance = 1e-10;

  // Throws ShapeError when V is wider than tall or V*V deviates from the
  // identity by more than tol in operator norm.
  explicit Isometry(Matrix v, double tol = kTolerance);

  Index domain_dim() const noexcept { return v_.cols(); }
  Index codomain_dim() const noexcept { return v_.rows(); }
  const Matrix& matrix() const noexcept { return v_; }

  // Operator norm of V*V - I.
  double defect() const;

  // Polar factor V (V*V)^{-1/2} of a full-column-rank matrix.
  static Isometry nearest(const Matrix& v);

 private:
  Matrix v_;
};

Matrix kron(const Matrix& a, const Matrix& b);
Matrix block_diag(const Matrix& a, const Matrix& b);

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y);
MatrixTuple direct_sum(std::span<const MatrixTuple> parts);

// Entry i becomes I_k (x) X_i.
MatrixTuple ampliate(const MatrixTuple& x, Index k);

// Entry i becomes V* X_i V.
MatrixTuple compress(const MatrixTuple& x, const Isometry& v);

// Largest singular value. Dense Hermitian eigensolve of the smaller Gram
// matrix up to kSvdLimit, power iteration on A*A beyond that.
double operator_norm(const Matrix& a);
inline constexpr Index kSvdLimit = 256;

// Index permutations that relate Kronecker layouts. A permutation perm acts on
// a matrix by (permute(A))(i, j) = A(perm_r[i], perm_c[j]).
using Permutation = std::vector<Index>;

// Index shuffle for C^a (x) C^b (x) C^c. permute(A, s, s) with
// s = swap_shuffle(a, b, c) re-expresses A, laid out as (a, b, c), in the
// (b, a, c) layout. With a = d, b = k and c = n it turns
// sum_w C_w (x) I_k (x) w(X) into I_k (x) sum_w C_w (x) w(X); with c = 1 it
// sends B (x) A to A (x) B when B is a x a.
const Permutation& swap_shuffle(Index a, Index b, Index c);

// Rows of p(X (+) Y) for a d-row coefficient polynomial, listed so that the
// permuted matrix is p(X) (+) p(Y). n and m are the sizes of X and Y.
const Permutation& direct_sum_shuffle(Index d, Index n, Index m);

Matrix permute(const Matrix& a, const Permutation& rows, const Permutation& cols);

// Reproducible random model. Complex Gaussian entries have independent real
// and imaginary parts of variance 1/2 (E|z|^2 = 1), scaled by `scale`.
struct TupleParams {
  int g = 1;
  Index n = 1;
  double scale = 1.0;
};

struct IsometryParams {
  Index m = 1;  // domain dimension
  Index N = 1;  // codomain dimension
};

struct PolynomialParams {
  int g = 1;
  Index rows = 1;
  Index cols = 1;
  int max_degree = 1;
  double scale = 1.0;
};

MatrixTuple sample_tuple(const TupleParams& params, std::uint64_t seed);
// First m columns of the unitary Q factor of an N x N Gaussian matrix, with
// the phases of R's diagonal absorbed so the distribution is Haar.
Isometry sample_isometry(const IsometryParams& params, std::uint64_t seed);
// Gaussian coefficients on every word of degree <= max_degree.
FreePolynomial sample_polynomial(const PolynomialParams& params, std::uint64_t seed);

// A tuple X = [[A, C], [0, B]] that is block upper triangular with respect to
// a random split of C^n, and Y = V* (I_N (x) X) V where every copy of X is
// compressed to A (invariant), B (co-invariant), all of C^n, or dropped, then
// mixed by Haar unitaries on both sides. These compressions are multiplicative,
// so p(Y) = V* (I_N (x) p(X)) V for every polynomial p.
struct DilationParams {
  int g = 1;
  Index n = 1;
  Index N = 1;
  double scale = 1.0;
};

struct DilationSample {
  MatrixTuple x;
  Isometry v;  // (N n) x m
  MatrixTuple y;
};

DilationSample sample_dilation(const DilationParams& params, std::uint64_t seed);

// Complex Gaussian matrix drawn from an existing generator state.
Matrix gaussian_matrix(Index rows, Index cols, double scale, std::mt19937_64& rng);

}  // namespace freehull
