#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "freehull/types.hpp"

namespace freehull {

class MatrixTuple;

// A monomial of the free algebra: a sequence of 1-based variable indices.
// The empty word is the identity monomial.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<int> letters) : letters_(letters) {}

  const std::vector<int>& letters() const noexcept { return letters_; }
  int degree() const noexcept { return static_cast<int>(letters_.size()); }
  bool empty() const noexcept { return letters_.empty(); }

  // Largest letter, 0 for the empty word.
  int max_letter() const noexcept;

  Word append(int letter) const;
  Word concat(const Word& tail) const;

  bool operator==(const Word&) const = default;
  // Graded lexicographic: shorter words first, ties broken letter by letter.
  std::strong_ordering operator<=>(const Word& other) const noexcept;

 private:
  std::vector<int> letters_;
};

// Every word of degree <= max_degree over g letters, in graded-lex order.
std::vector<Word> words_up_to(int g, int max_degree);

std::string to_string(const Word& w);

// Finitely supported map Word -> d1 x d2 complex matrix. Values are kept in
// canonical form: terms are ordered graded-lex, coefficient entries below
// kPruneThreshold in magnitude are zeroed and zero coefficients are dropped.
class FreePolynomial {
 public:
  using TermMap = std::map<Word, Matrix>;

  static constexpr double kPruneThreshold = 1e-14;

  // The zero polynomial with d1 x d2 coefficients.
  FreePolynomial(int g, Index rows, Index cols);

  static FreePolynomial from_terms(int g, Index rows, Index cols, TermMap terms);
  static FreePolynomial constant(int g, const Matrix& c);
  static FreePolynomial scalar(int g, Complex c);
  static FreePolynomial identity(int g, Index d = 1);
  static FreePolynomial variable(int g, int index);
  static FreePolynomial monomial(int g, const Word& w, Complex c = 1.0);

  int num_vars() const noexcept { return g_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_scalar() const noexcept { return rows_ == 1 && cols_ == 1; }
  bool is_zero() const noexcept { return terms_.empty(); }
  // -1 for the zero polynomial.
  int degree() const noexcept;

  const TermMap& terms() const noexcept { return terms_; }
  // Zero matrix when w is not in the support.
  Matrix coefficient(const Word& w) const;
  Complex scalar_coefficient(const Word& w) const;

  // Sum over terms of the largest coefficient entry magnitude; for scalar
  // polynomials this is the l1 norm of the coefficient vector.
  double coefficient_mass() const;

  bool operator==(const FreePolynomial& other) const;

 private:
  FreePolynomial(int g, Index rows, Index cols, TermMap terms);

  int g_;
  Index rows_;
  Index cols_;
  TermMap terms_;
};

FreePolynomial add(const FreePolynomial& p, const FreePolynomial& q);
FreePolynomial sub(const FreePolynomial& p, const FreePolynomial& q);
// Word concatenation with matrix products of coefficients; needs p.cols() == q.rows().
FreePolynomial mul(const FreePolynomial& p, const FreePolynomial& q);
FreePolynomial scale(const FreePolynomial& p, Complex c);
FreePolynomial negate(const FreePolynomial& p);
FreePolynomial power(const FreePolynomial& p, int exponent);
// Replaces every coefficient C by C (x) I_k, turning a scalar polynomial into
// a k x k one that acts diagonally.
FreePolynomial promote(const FreePolynomial& p, Index k);

inline FreePolynomial operator+(const FreePolynomial& p, const FreePolynomial& q) { return add(p, q); }
inline FreePolynomial operator-(const FreePolynomial& p, const FreePolynomial& q) { return sub(p, q); }
inline FreePolynomial operator-(const FreePolynomial& p) { return negate(p); }
inline FreePolynomial operator*(const FreePolynomial& p, const FreePolynomial& q) { return mul(p, q); }
inline FreePolynomial operator*(Complex c, const FreePolynomial& p) { return scale(p, c); }

// Sum over words of C_w (x) w(X). The coefficient is the left tensor factor,
// so the result has shape (d1 n) x (d2 n) and block (a, b) is
// sum_w C_w(a, b) w(X).
Matrix evaluate(const FreePolynomial& p, const MatrixTuple& X);

// Grammar (whitespace insignificant):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer)?
//   primary := number | number 'i' | 'i' | variable | '(' expr ')' | matrix
//   variable:= 'x' digit | 'x{' integer '}'          (1-based)
//   matrix  := '[' row (',' row)* ']'    row := '[' expr (',' expr)* ']'
// Division is only by nonzero constant scalars. A 1x1 operand multiplying a
// matrix polynomial acts entrywise.
FreePolynomial parse_polynomial(std::string_view text, int g);

// Canonical text in the grammar above; parse_polynomial(to_string(p), g) == p.
std::string to_string(const FreePolynomial& p);

}  // namespace freehull
