#include "freehull/annihilator.hpp"

#include "freehull/error.hpp"
#include "word_span.hpp"

namespace freehull {

Filtration word_filtration(const MatrixTuple& X, double rank_tol) {
  const MatrixTuple tuples[] = {X};
  detail::WordSpan span(tuples, rank_tol);
  auto run = span.run(detail::WordSpan::Stop::kStabilized);
  Filtration f;
  f.basis_words = std::move(run.basis_words);
  f.span_dim = static_cast<int>(f.basis_words.size());
  f.stabilization_degree = run.last_degree;
  f.dims_by_degree = std::move(run.dims_by_degree);
  return f;
}

FreePolynomial annihilating_polynomial(const MatrixTuple& X, double rank_tol) {
  const MatrixTuple tuples[] = {X};
  detail::WordSpan span(tuples, rank_tol);
  auto run = span.run(detail::WordSpan::Stop::kFirstRelation);
  const auto& rel = *run.relation;
  const int g = X.num_vars();
  FreePolynomial::TermMap terms;
  terms.emplace(rel.word, Matrix::Constant(1, 1, 1.0));
  for (std::size_t k = 0; k < rel.coefficients.size(); ++k) {
    if (rel.coefficients[k] != Complex{}) {
      terms.emplace(run.basis_words[k], Matrix::Constant(1, 1, -rel.coefficients[k]));
    }
  }
  return FreePolynomial::from_terms(g, 1, 1, std::move(terms));
}

bool vanishes_on(const FreePolynomial& p, const MatrixTuple& Y, double tol) {
  if (!p.is_scalar()) throw ShapeError("vanishes_on expects a scalar polynomial");
  return operator_norm(evaluate(p, Y)) <= tol * (1.0 + p.coefficient_mass());
}

}  // namespace freehull
