#include "freehull/mattuple.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "freehull/error.hpp"

namespace freehull {

MatrixTuple::MatrixTuple(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw ShapeError("a matrix tuple needs at least one matrix");
  const Index n = matrices_.front().rows();
  if (n < 1) throw ShapeError("tuple matrices must be at least 1x1");
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const Matrix& m = matrices_[i];
    if (m.rows() != n || m.cols() != n) {
      throw ShapeError("tuple entry " + std::to_string(i + 1) + " is " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
    if (!m.allFinite()) throw ShapeError("tuple entry " + std::to_string(i + 1) + " has non-finite entries");
  }
}

MatrixTuple MatrixTuple::scalars(std::initializer_list<Complex> values) {
  std::vector<Matrix> mats;
  for (Complex v : values) mats.push_back(Matrix::Constant(1, 1, v));
  return MatrixTuple(std::move(mats));
}

bool MatrixTuple::operator==(const MatrixTuple& other) const {
  if (num_vars() != other.num_vars() || size() != other.size()) return false;
  for (int i = 0; i < num_vars(); ++i) {
    if (matrices_[i] != other.matrices_[i]) return false;
  }
  return true;
}

Isometry::Isometry(Matrix v, double tol) : v_(std::move(v)) {
  if (v_.rows() < v_.cols() || v_.cols() < 1) {
    throw ShapeError("isometry must be N x m with N >= m >= 1, got " + std::to_string(v_.rows()) +
                     "x" + std::to_string(v_.cols()));
  }
  const double d = defect();
  if (!(d <= tol)) {
    throw ShapeError("matrix is not an isometry: |V*V - I| = " + std::to_string(d));
  }
}

double Isometry::defect() const {
  return operator_norm(v_.adjoint() * v_ - Matrix::Identity(v_.cols(), v_.cols()));
}

Isometry Isometry::nearest(const Matrix& v) {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || svd.singularValues().minCoeff() <= 0.0) {
    throw ShapeError("polar factor needs a full column rank matrix");
  }
  return Isometry(svd.matrixU() * svd.matrixV().adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y) {
  if (x.num_vars() != y.num_vars()) {
    throw ShapeError("direct sum of tuples with " + std::to_string(x.num_vars()) + " and " +
                     std::to_string(y.num_vars()) + " variables");
  }
  std::vector<Matrix> mats;
  mats.reserve(static_cast<std::size_t>(x.num_vars()));
  for (int i = 0; i < x.num_vars(); ++i) mats.push_back(block_diag(x[i], y[i]));
  return MatrixTuple(std::move(mats));
}

MatrixTuple direct_sum(std::span<const MatrixTuple> parts) {
  if (parts.empty()) throw ShapeError("direct sum of an empty list");
  const int g = parts.front().num_vars();
  Index total = 0;
  for (const auto& p : parts) {
    if (p.num_vars() != g) throw ShapeError("direct sum of tuples with different variable counts");
    total += p.size();
  }
  std::vector<Matrix> mats(static_cast<std::size_t>(g), Matrix::Zero(total, total));
  Index offset = 0;
  for (const auto& p : parts) {
    for (int i = 0; i < g; ++i) mats[i].block(offset, offset, p.size(), p.size()) = p[i];
    offset += p.size();
  }
  return MatrixTuple(std::move(mats));
}

MatrixTuple ampliate(const MatrixTuple& x, Index k) {
  if (k < 1) throw ShapeError("ampliation multiplicity must be positive");
  const Matrix id = Matrix::Identity(k, k);
  std::vector<Matrix> mats;
  for (const auto& m : x.matrices()) mats.push_back(kron(id, m));
  return MatrixTuple(std::move(mats));
}

MatrixTuple compress(const MatrixTuple& x, const Isometry& v) {
  if (v.codomain_dim() != x.size()) {
    throw ShapeError("isometry codomain " + std::to_string(v.codomain_dim()) +
                     " does not match tuple size " + std::to_string(x.size()));
  }
  std::vector<Matrix> mats;
  for (const auto& m : x.matrices()) mats.push_back(v.matrix().adjoint() * m * v.matrix());
  return MatrixTuple(std::move(mats));
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) <= kSvdLimit) {
    // Largest eigenvalue of the smaller Gram matrix; relative accuracy of
    // sigma_max is unaffected by squaring.
    const Matrix gram = a.rows() < a.cols() ? Matrix(a * a.adjoint()) : Matrix(a.adjoint() * a);
    const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return std::sqrt(std::max(top, 0.0));
  }
  // Power iteration on A*A from a deterministic start.
  const Matrix gram = a.adjoint() * a;
  Vector v = Vector::Ones(gram.cols()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(norm - estimate) <= 1e-12 * norm) {
      estimate = norm;
      break;
    }
    estimate = norm;
  }
  return std::sqrt(estimate);
}

namespace {

template <typename Key>
class PermutationCache {
 public:
  template <typename Build>
  const Permutation& get(const Key& key, Build build) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, build()).first;
    return it->second;
  }

 private:
  std::mutex mutex_;
  std::map<Key, Permutation> cache_;
};

}  // namespace

const Permutation& swap_shuffle(Index a, Index b, Index c) {
  static PermutationCache<std::tuple<Index, Index, Index>> cache;
  return cache.get({a, b, c}, [&] {
    Permutation perm(static_cast<std::size_t>(a * b * c));
    // Position (j, i, k) in the (b, a, c) layout.
    for (Index j = 0; j < b; ++j) {
      for (Index i = 0; i < a; ++i) {
        for (Index k = 0; k < c; ++k) {
          perm[static_cast<std::size_t>((j * a + i) * c + k)] = (i * b + j) * c + k;
        }
      }
    }
    return perm;
  });
}

const Permutation& direct_sum_shuffle(Index d, Index n, Index m) {
  static PermutationCache<std::tuple<Index, Index, Index>> cache;
  return cache.get({d, n, m}, [&] {
    Permutation perm;
    perm.reserve(static_cast<std::size_t>(d * (n + m)));
    // Rows of p(X) first, then rows of p(Y); in p(X (+) Y) coefficient row a
    // owns the stripe [a (n + m), (a + 1)(n + m)).
    for (Index a = 0; a < d; ++a) {
      for (Index r = 0; r < n; ++r) perm.push_back(a * (n + m) + r);
    }
    for (Index a = 0; a < d; ++a) {
      for (Index r = 0; r < m; ++r) perm.push_back(a * (n + m) + n + r);
    }
    return perm;
  });
}

Matrix permute(const Matrix& a, const Permutation& rows, const Permutation& cols) {
  if (static_cast<Index>(rows.size()) != a.rows() || static_cast<Index>(cols.size()) != a.cols()) {
    throw ShapeError("permutation size does not match matrix shape");
  }
  Matrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out(i, j) = a(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

Matrix gaussian_matrix(Index rows, Index cols, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix out(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = scale * Complex{re, im};
    }
  }
  return out;
}

MatrixTuple sample_tuple(const TupleParams& params, std::uint64_t seed) {
  if (params.g < 1 || params.n < 1) throw ShapeError("sample_tuple needs g >= 1 and n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Matrix> mats;
  for (int i = 0; i < params.g; ++i) mats.push_back(gaussian_matrix(params.n, params.n, params.scale, rng));
  return MatrixTuple(std::move(mats));
}

Isometry sample_isometry(const IsometryParams& params, std::uint64_t seed) {
  if (params.m < 1 || params.N < params.m) throw ShapeError("sample_isometry needs 1 <= m <= N");
  std::mt19937_64 rng(seed);
  const Matrix g = gaussian_matrix(params.N, params.N, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(params.N, params.N);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < params.N; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return Isometry(q.leftCols(params.m), 1e-12);
}

FreePolynomial sample_polynomial(const PolynomialParams& params, std::uint64_t seed) {
  if (params.g < 1 || params.rows < 1 || params.cols < 1 || params.max_degree < 0) {
    throw ShapeError("invalid polynomial sampling parameters");
  }
  std::mt19937_64 rng(seed);
  FreePolynomial::TermMap terms;
  for (const Word& w : words_up_to(params.g, params.max_degree)) {
    terms.emplace(w, gaussian_matrix(params.rows, params.cols, params.scale, rng));
  }
  return FreePolynomial::from_terms(params.g, params.rows, params.cols, std::move(terms));
}

DilationSample sample_dilation(const DilationParams& params, std::uint64_t seed) {
  if (params.g < 1 || params.n < 1 || params.N < 1) throw ShapeError("sample_dilation needs g, n, N >= 1");
  std::mt19937_64 rng(seed);
  const Index n = params.n;
  const Index split = n > 1 ? std::uniform_int_distribution<Index>(1, n - 1)(rng) : n;

  std::vector<Matrix> mats;
  for (int i = 0; i < params.g; ++i) {
    Matrix x = gaussian_matrix(n, n, params.scale, rng);
    x.bottomLeftCorner(n - split, split).setZero();
    mats.push_back(std::move(x));
  }

  // Per copy: 0 = whole space, 1 = invariant block, 2 = co-invariant block, 3 = dropped.
  std::uniform_int_distribution<int> pick(0, n > 1 ? 3 : 1);
  std::vector<Matrix> blocks;
  Index m = 0;
  for (Index j = 0; j < params.N; ++j) {
    int kind = pick(rng);
    if (n == 1 && kind == 1) kind = 3;
    if (j + 1 == params.N && m == 0 && kind == 3) kind = 0;
    Matrix e = Matrix::Zero(n, 0);
    if (kind == 0) e = Matrix::Identity(n, n);
    if (kind == 1) e = Matrix::Identity(n, n).leftCols(split);
    if (kind == 2) e = Matrix::Identity(n, n).rightCols(n - split);
    m += e.cols();
    blocks.push_back(std::move(e));
  }
  Matrix selector = Matrix::Zero(params.N * n, m);
  for (Index j = 0, col = 0; j < params.N; ++j) {
    selector.block(j * n, col, n, blocks[j].cols()) = blocks[j];
    col += blocks[j].cols();
  }

  const Matrix left = kron(sample_isometry({params.N, params.N}, rng()).matrix(), Matrix::Identity(n, n));
  const Matrix right = sample_isometry({m, m}, rng()).matrix();
  Isometry v(left * selector * right, 1e-10);
  MatrixTuple x(std::move(mats));
  MatrixTuple y = compress(ampliate(x, params.N), v);
  return {std::move(x), std::move(v), std::move(y)};
}

}  // namespace freehull
