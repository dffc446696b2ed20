#include "word_span.hpp"

#include <algorithm>

#include "freehull/error.hpp"

namespace freehull::detail {

WordSpan::WordSpan(std::span<const MatrixTuple> tuples, double rank_tol)
    : tuples_(tuples), rank_tol_(rank_tol) {
  if (tuples_.empty()) throw ShapeError("word span over no tuples");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ShapeError("rank tolerance must lie in (0, 1)");
  const int g = tuples_.front().num_vars();
  for (const auto& t : tuples_) {
    if (t.num_vars() != g) throw ShapeError("word span over tuples with different variable counts");
    ambient_ += t.size() * t.size();
  }
  q_.resize(ambient_, ambient_);
}

Vector WordSpan::stack(const std::vector<Matrix>& values) const {
  Vector v(ambient_);
  Index offset = 0;
  for (const auto& m : values) {
    v.segment(offset, m.size()) = Eigen::Map<const Vector>(m.data(), m.size());
    offset += m.size();
  }
  return v;
}

std::vector<Matrix> WordSpan::extend(const std::vector<Matrix>& values, int letter) const {
  std::vector<Matrix> out;
  out.reserve(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) out.push_back(values[t] * tuples_[t][letter - 1]);
  return out;
}

bool WordSpan::try_add(const Vector& v) {
  const double norm = v.norm();
  max_norm_ = std::max(max_norm_, norm);
  if (norm == 0.0 || rank_ == ambient_) return false;
  Vector r = v;
  // Two passes of Gram-Schmidt keep the basis orthonormal to working precision.
  for (int pass = 0; pass < 2 && rank_ > 0; ++pass) {
    const auto q = q_.leftCols(rank_);
    r -= q * (q.adjoint() * r);
  }
  const double residual = r.norm();
  if (residual <= rank_tol_ * max_norm_) return false;
  q_.col(rank_++) = r / residual;
  return true;
}

std::vector<Complex> WordSpan::solve_coefficients(const Eigen::MatrixXcd& basis, const Vector& target) {
  std::vector<Complex> out(static_cast<std::size_t>(basis.cols()));
  if (basis.cols() == 0) return out;
  const Vector c = basis.colPivHouseholderQr().solve(target);
  for (Index i = 0; i < c.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::abs(c(i)) < 1e-12 ? Complex{} : c(i);
  }
  return out;
}

WordSpan::Result WordSpan::run(Stop stop) {
  Result result;
  const int g = tuples_.front().num_vars();

  std::vector<Matrix> identity;
  for (const auto& t : tuples_) identity.push_back(Matrix::Identity(t.size(), t.size()));
  try_add(stack(identity));
  result.basis_words.push_back(Word{});
  result.basis_values.push_back(std::move(identity));
  result.dims_by_degree.push_back(static_cast<int>(rank_));

  std::size_t level_begin = 0;
  for (int degree = 1;; ++degree) {
    const std::size_t level_end = result.basis_words.size();
    bool added = false;
    for (std::size_t b = level_begin; b < level_end; ++b) {
      for (int letter = 1; letter <= g; ++letter) {
        Word w = result.basis_words[b].append(letter);
        std::vector<Matrix> values = extend(result.basis_values[b], letter);
        const Vector v = stack(values);
        if (try_add(v)) {
          result.basis_words.push_back(std::move(w));
          result.basis_values.push_back(std::move(values));
          added = true;
        } else if (stop == Stop::kFirstRelation) {
          Eigen::MatrixXcd basis(ambient_, static_cast<Index>(result.basis_words.size()));
          for (std::size_t k = 0; k < result.basis_words.size(); ++k) {
            basis.col(static_cast<Index>(k)) = stack(result.basis_values[k]);
          }
          result.relation = Relation{std::move(w), solve_coefficients(basis, v)};
          result.dims_by_degree.push_back(static_cast<int>(rank_));
          result.last_degree = degree;
          return result;
        }
      }
    }
    result.dims_by_degree.push_back(static_cast<int>(rank_));
    level_begin = level_end;
    if (stop == Stop::kStabilized && (!added || rank_ == ambient_)) {
      result.last_degree = degree;
      return result;
    }
  }
}

}  // namespace freehull::detail
