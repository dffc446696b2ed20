#pragma once

#include <vector>

#include "freehull/mattuple.hpp"
#include "freehull/ncpoly.hpp"

namespace freehull {

inline constexpr double kDefaultRankTol = 1e-10;

// Graded-lex scan of word evaluations w(X) up to the degree where the span of
// S(X) = span{w(X)} stops growing.
struct Filtration {
  // Words whose evaluations are linearly independent, in graded-lex order.
  std::vector<Word> basis_words;
  // First degree >= 1 at which no word adds rank, or at which the span first
  // fills all of M_n.
  int stabilization_degree = 0;
  int span_dim = 0;
  // span_dim after each degree 0..stabilization_degree.
  std::vector<int> dims_by_degree;
};

// A word joins the basis when its vectorized value keeps a residual above
// rank_tol times the largest value norm seen so far after orthogonalizing
// against the current basis.
Filtration word_filtration(const MatrixTuple& X, double rank_tol = kDefaultRankTol);

// The nonzero scalar p with p(X) = 0 whose leading word is graded-lex
// smallest, normalized to leading coefficient 1. Its degree is at most n^2.
FreePolynomial annihilating_polynomial(const MatrixTuple& X, double rank_tol = kDefaultRankTol);

// |p(Y)| <= tol (1 + sum |coeff|).
bool vanishes_on(const FreePolynomial& p, const MatrixTuple& Y, double tol);

}  // namespace freehull
