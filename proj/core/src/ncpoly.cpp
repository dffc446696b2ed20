#include "freehull/ncpoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "freehull/error.hpp"
#include "freehull/mattuple.hpp"

namespace freehull {

int Word::max_letter() const noexcept {
  return letters_.empty() ? 0 : *std::max_element(letters_.begin(), letters_.end());
}

Word Word::append(int letter) const {
  std::vector<int> out = letters_;
  out.push_back(letter);
  return Word(std::move(out));
}

Word Word::concat(const Word& tail) const {
  std::vector<int> out = letters_;
  out.insert(out.end(), tail.letters_.begin(), tail.letters_.end());
  return Word(std::move(out));
}

std::strong_ordering Word::operator<=>(const Word& other) const noexcept {
  if (auto c = letters_.size() <=> other.letters_.size(); c != 0) return c;
  return letters_ <=> other.letters_;
}

std::vector<Word> words_up_to(int g, int max_degree) {
  std::vector<Word> out{Word{}};
  std::size_t level_begin = 0;
  for (int d = 1; d <= max_degree; ++d) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int letter = 1; letter <= g; ++letter) out.push_back(out[i].append(letter));
    }
    level_begin = level_end;
  }
  return out;
}

namespace {

std::string variable_name(int letter) {
  if (letter <= 9) return "x" + std::to_string(letter);
  return "x{" + std::to_string(letter) + "}";
}

// Entries below the threshold are zeroed individually so that a matrix
// coefficient and its entrywise text form prune identically.
void prune(FreePolynomial::TermMap& terms) {
  for (auto& [w, c] : terms) {
    c = c.unaryExpr([](Complex z) { return std::abs(z) < FreePolynomial::kPruneThreshold ? Complex{} : z; });
  }
  std::erase_if(terms, [](const auto& kv) { return kv.second.isZero(0.0); });
}

void check_same_vars(const FreePolynomial& p, const FreePolynomial& q) {
  if (p.num_vars() != q.num_vars()) {
    throw ShapeError("variable count mismatch: " + std::to_string(p.num_vars()) + " vs " +
                     std::to_string(q.num_vars()));
  }
}

std::string shape_string(const FreePolynomial& p) {
  return std::to_string(p.rows()) + "x" + std::to_string(p.cols());
}

}  // namespace

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.letters().size(); ++i) {
    if (i) out += '*';
    out += variable_name(w.letters()[i]);
  }
  return out;
}

FreePolynomial::FreePolynomial(int g, Index rows, Index cols) : FreePolynomial(g, rows, cols, {}) {}

FreePolynomial::FreePolynomial(int g, Index rows, Index cols, TermMap terms)
    : g_(g), rows_(rows), cols_(cols), terms_(std::move(terms)) {
  if (g < 1) throw ShapeError("variable count must be positive");
  if (rows < 1 || cols < 1) throw ShapeError("coefficient shape must be positive");
}

FreePolynomial FreePolynomial::from_terms(int g, Index rows, Index cols, TermMap terms) {
  for (const auto& [w, c] : terms) {
    if (c.rows() != rows || c.cols() != cols) {
      throw ShapeError("coefficient of " + to_string(w) + " has shape " + std::to_string(c.rows()) +
                       "x" + std::to_string(c.cols()) + ", expected " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
    for (int letter : w.letters()) {
      if (letter < 1 || letter > g) {
        throw ShapeError("variable index " + std::to_string(letter) + " outside 1.." +
                         std::to_string(g));
      }
    }
  }
  prune(terms);
  return FreePolynomial(g, rows, cols, std::move(terms));
}

FreePolynomial FreePolynomial::constant(int g, const Matrix& c) {
  return from_terms(g, c.rows(), c.cols(), {{Word{}, c}});
}

FreePolynomial FreePolynomial::scalar(int g, Complex c) {
  return from_terms(g, 1, 1, {{Word{}, Matrix::Constant(1, 1, c)}});
}

FreePolynomial FreePolynomial::identity(int g, Index d) {
  return constant(g, Matrix::Identity(d, d));
}

FreePolynomial FreePolynomial::variable(int g, int index) {
  return monomial(g, Word{index});
}

FreePolynomial FreePolynomial::monomial(int g, const Word& w, Complex c) {
  return from_terms(g, 1, 1, {{w, Matrix::Constant(1, 1, c)}});
}

int FreePolynomial::degree() const noexcept {
  // Graded order puts the longest word last.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

Matrix FreePolynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Matrix::Zero(rows_, cols_) : it->second;
}

Complex FreePolynomial::scalar_coefficient(const Word& w) const {
  if (!is_scalar()) throw ShapeError("scalar_coefficient on a " + shape_string(*this) + " polynomial");
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex{} : it->second(0, 0);
}

double FreePolynomial::coefficient_mass() const {
  double total = 0.0;
  for (const auto& [w, c] : terms_) total += c.cwiseAbs().maxCoeff();
  return total;
}

bool FreePolynomial::operator==(const FreePolynomial& other) const {
  if (g_ != other.g_ || rows_ != other.rows_ || cols_ != other.cols_) return false;
  if (terms_.size() != other.terms_.size()) return false;
  auto it = other.terms_.begin();
  for (const auto& [w, c] : terms_) {
    if (w != it->first || c != it->second) return false;
    ++it;
  }
  return true;
}

FreePolynomial add(const FreePolynomial& p, const FreePolynomial& q) {
  check_same_vars(p, q);
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw ShapeError("cannot add " + shape_string(p) + " and " + shape_string(q) + " polynomials");
  }
  FreePolynomial::TermMap terms = p.terms();
  for (const auto& [w, c] : q.terms()) {
    auto [it, inserted] = terms.try_emplace(w, c);
    if (!inserted) it->second += c;
  }
  return FreePolynomial::from_terms(p.num_vars(), p.rows(), p.cols(), std::move(terms));
}

FreePolynomial sub(const FreePolynomial& p, const FreePolynomial& q) {
  return add(p, negate(q));
}

FreePolynomial mul(const FreePolynomial& p, const FreePolynomial& q) {
  check_same_vars(p, q);
  if (p.cols() != q.rows()) {
    throw ShapeError("cannot multiply " + shape_string(p) + " by " + shape_string(q) + " polynomial");
  }
  FreePolynomial::TermMap terms;
  for (const auto& [u, a] : p.terms()) {
    for (const auto& [v, b] : q.terms()) {
      Word uv = u.concat(v);
      if (auto it = terms.find(uv); it != terms.end()) {
        it->second += a * b;
      } else {
        terms.emplace(std::move(uv), a * b);
      }
    }
  }
  return FreePolynomial::from_terms(p.num_vars(), p.rows(), q.cols(), std::move(terms));
}

FreePolynomial scale(const FreePolynomial& p, Complex c) {
  FreePolynomial::TermMap terms;
  for (const auto& [w, coeff] : p.terms()) terms.emplace(w, c * coeff);
  return FreePolynomial::from_terms(p.num_vars(), p.rows(), p.cols(), std::move(terms));
}

FreePolynomial negate(const FreePolynomial& p) {
  FreePolynomial::TermMap terms;
  for (const auto& [w, coeff] : p.terms()) terms.emplace(w, -coeff);
  return FreePolynomial::from_terms(p.num_vars(), p.rows(), p.cols(), std::move(terms));
}

FreePolynomial power(const FreePolynomial& p, int exponent) {
  if (exponent < 0) throw ShapeError("negative exponent");
  if (p.rows() != p.cols()) {
    throw ShapeError("power of non-square " + shape_string(p) + " polynomial");
  }
  FreePolynomial result = FreePolynomial::identity(p.num_vars(), p.rows());
  for (int i = 0; i < exponent; ++i) result = mul(result, p);
  return result;
}

FreePolynomial promote(const FreePolynomial& p, Index k) {
  FreePolynomial::TermMap terms;
  const Matrix id = Matrix::Identity(k, k);
  for (const auto& [w, coeff] : p.terms()) terms.emplace(w, kron(coeff, id));
  return FreePolynomial::from_terms(p.num_vars(), p.rows() * k, p.cols() * k, std::move(terms));
}

Matrix evaluate(const FreePolynomial& p, const MatrixTuple& X) {
  if (p.num_vars() != X.num_vars()) {
    throw ShapeError("polynomial has " + std::to_string(p.num_vars()) + " variables, tuple has " +
                     std::to_string(X.num_vars()));
  }
  const Index n = X.size();
  Matrix out = Matrix::Zero(p.rows() * n, p.cols() * n);
  // Prefix cache: graded order visits every proper prefix of a word before
  // the word itself, so w(X) is one multiplication away.
  std::map<Word, Matrix> cache;
  cache.emplace(Word{}, Matrix::Identity(n, n));
  auto word_value = [&](const Word& w) -> const Matrix& {
    if (auto it = cache.find(w); it != cache.end()) return it->second;
    std::vector<int> prefix;
    const Matrix* current = &cache.at(Word{});
    for (int letter : w.letters()) {
      prefix.push_back(letter);
      Word key(prefix);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache.emplace(std::move(key), (*current) * X[letter - 1]).first;
      }
      current = &it->second;
    }
    return *current;
  };
  for (const auto& [w, c] : p.terms()) {
    const Matrix& wx = word_value(w);
    for (Index a = 0; a < p.rows(); ++a) {
      for (Index b = 0; b < p.cols(); ++b) {
        if (c(a, b) != Complex{}) out.block(a * n, b * n, n, n) += c(a, b) * wx;
      }
    }
  }
  return out;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Sign and unsigned text of a scalar coefficient; a unit coefficient prints
// as nothing when a word follows.
std::pair<bool, std::string> format_coefficient(Complex c, bool has_word) {
  const double re = c.real();
  const double im = c.imag();
  if (im == 0.0) {
    const double mag = std::abs(re);
    if (mag == 1.0 && has_word) return {std::signbit(re), ""};
    return {std::signbit(re), format_real(mag)};
  }
  if (re == 0.0) return {std::signbit(im), format_real(std::abs(im)) + "i"};
  std::string s = "(" + format_real(re) + (std::signbit(im) ? "-" : "+") + format_real(std::abs(im)) + "i)";
  return {false, s};
}

std::string scalar_text(const std::vector<std::pair<Word, Complex>>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms) {
    auto [negative, coeff] = format_coefficient(c, !w.empty());
    std::string term = coeff;
    if (!w.empty()) {
      if (!term.empty()) term += '*';
      term += to_string(w);
    }
    if (first) {
      out += negative ? "-" + term : term;
    } else {
      out += negative ? " - " : " + ";
      out += term;
    }
    first = false;
  }
  return out;
}

}  // namespace

std::string to_string(const FreePolynomial& p) {
  auto entry_terms = [&](Index a, Index b) {
    std::vector<std::pair<Word, Complex>> terms;
    for (const auto& [w, c] : p.terms()) {
      if (c(a, b) != Complex{}) terms.emplace_back(w, c(a, b));
    }
    return terms;
  };
  if (p.is_scalar()) return scalar_text(entry_terms(0, 0));
  std::string out = "[";
  for (Index a = 0; a < p.rows(); ++a) {
    if (a) out += ", ";
    out += '[';
    for (Index b = 0; b < p.cols(); ++b) {
      if (b) out += ", ";
      out += scalar_text(entry_terms(a, b));
    }
    out += ']';
  }
  out += ']';
  return out;
}

}  // namespace freehull
