#pragma once

#include <optional>
#include <span>
#include <vector>

#include "freehull/mattuple.hpp"
#include "freehull/ncpoly.hpp"

namespace freehull::detail {

// Incremental rank tracker over word evaluations at one or more tuples. The
// value of a word is the concatenation of vec(w(T)) over the tuples T, so a
// scan over {X, Y} measures the span of w(X (+) Y).
class WordSpan {
 public:
  WordSpan(std::span<const MatrixTuple> tuples, double rank_tol);

  enum class Stop {
    // Stop after the first degree that adds nothing or fills the space.
    kStabilized,
    // Stop at the first word whose value is dependent on earlier basis words.
    kFirstRelation,
  };

  struct Relation {
    Word word;
    // word(T) = sum_b coefficients[b] * basis_words[b](T), restricted to the
    // basis words that precede `word`.
    std::vector<Complex> coefficients;
  };

  struct Result {
    std::vector<Word> basis_words;
    std::vector<std::vector<Matrix>> basis_values;  // [basis index][tuple]
    std::vector<int> dims_by_degree;
    int last_degree = 0;
    std::optional<Relation> relation;
  };

  Result run(Stop stop);

  // Least-squares coefficients of `target` against the columns of `basis`.
  static std::vector<Complex> solve_coefficients(const Eigen::MatrixXcd& basis, const Vector& target);

 private:
  Vector stack(const std::vector<Matrix>& values) const;
  std::vector<Matrix> extend(const std::vector<Matrix>& values, int letter) const;
  // Returns true and records the direction when v adds rank.
  bool try_add(const Vector& v);

  std::span<const MatrixTuple> tuples_;
  double rank_tol_;
  Index ambient_ = 0;
  Eigen::MatrixXcd q_;  // orthonormal basis of the span so far
  Index rank_ = 0;
  double max_norm_ = 0.0;
};

}  // namespace freehull::detail
