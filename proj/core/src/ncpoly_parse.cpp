#include <cctype>
#include <charconv>
#include <string>

#include "freehull/error.hpp"
#include "freehull/ncpoly.hpp"

namespace freehull {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int g) : text_(text), g_(g) {}

  FreePolynomial parse() {
    FreePolynomial result = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  // Summands are merged into one term map at the end so long sums parse in
  // near-linear time.
  FreePolynomial expr() {
    const FreePolynomial first = term();
    FreePolynomial::TermMap terms = first.terms();
    for (;;) {
      const std::size_t at = (skip_ws(), pos_);
      bool subtract = false;
      if (accept('-')) {
        subtract = true;
      } else if (!accept('+')) {
        break;
      }
      const FreePolynomial next = term();
      if (first.rows() != next.rows() || first.cols() != next.cols()) {
        fail_at("cannot add polynomials of shapes " + shape(first) + " and " + shape(next), at);
      }
      for (const auto& [w, c] : next.terms()) {
        auto [it, inserted] = terms.try_emplace(w, subtract ? Matrix(-c) : c);
        if (!inserted) it->second += subtract ? Matrix(-c) : c;
      }
    }
    return FreePolynomial::from_terms(g_, first.rows(), first.cols(), std::move(terms));
  }

  FreePolynomial term() {
    FreePolynomial acc = unary();
    for (;;) {
      const std::size_t at = (skip_ws(), pos_);
      if (accept('*')) {
        acc = multiply(acc, unary(), at);
      } else if (accept('/')) {
        FreePolynomial divisor = unary();
        if (!divisor.is_scalar() || divisor.degree() > 0) {
          fail_at("division is only defined by constant scalars", at);
        }
        const Complex c = divisor.scalar_coefficient(Word{});
        if (c == Complex{}) fail_at("division by zero", at);
        acc = scale(acc, 1.0 / c);
      } else {
        return acc;
      }
    }
  }

  FreePolynomial multiply(const FreePolynomial& a, const FreePolynomial& b, std::size_t at) {
    if (a.is_scalar() && !b.is_scalar()) return mul(promote(a, b.rows()), b);
    if (b.is_scalar() && !a.is_scalar()) return mul(a, promote(b, a.cols()));
    if (a.cols() != b.rows()) fail_at("cannot multiply shapes " + shape(a) + " and " + shape(b), at);
    return mul(a, b);
  }

  FreePolynomial unary() {
    if (accept('-')) return negate(unary());
    if (accept('+')) return unary();
    return power_expr();
  }

  FreePolynomial power_expr() {
    FreePolynomial base = primary();
    const std::size_t at = (skip_ws(), pos_);
    if (!accept('^')) return base;
    skip_ws();
    const int exponent = integer("exponent");
    if (base.rows() != base.cols()) fail_at("power of non-square polynomial " + shape(base), at);
    return power(base, exponent);
  }

  int integer(const char* what) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{}) fail_at(std::string(what) + " out of range", start);
    return value;
  }

  FreePolynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      FreePolynomial inner = expr();
      expect(')');
      return inner;
    }
    if (c == '[') return matrix();
    if (c == 'x') return variable();
    if (c == 'i') {
      ++pos_;
      return FreePolynomial::scalar(g_, Complex{0.0, 1.0});
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  FreePolynomial variable() {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    int index = 0;
    if (pos_ < text_.size() && text_[pos_] == '{') {
      ++pos_;
      index = integer("variable index");
      if (pos_ >= text_.size() || text_[pos_] != '}') fail("expected '}'");
      ++pos_;
    } else if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      index = text_[pos_] - '0';
      ++pos_;
    } else {
      fail("expected variable index after 'x'");
    }
    if (index < 1 || index > g_) {
      fail_at("variable x" + std::to_string(index) + " out of range 1.." + std::to_string(g_), start);
    }
    return FreePolynomial::variable(g_, index);
  }

  FreePolynomial number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_digits = pos_;
      digits();
      if (exp_digits == pos_) pos_ = save;  // not an exponent after all
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) fail_at("malformed number", start);
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      ++pos_;
      return FreePolynomial::scalar(g_, Complex{0.0, value});
    }
    return FreePolynomial::scalar(g_, Complex{value, 0.0});
  }

  FreePolynomial matrix() {
    const std::size_t start = pos_;
    expect('[');
    std::vector<std::vector<FreePolynomial>> rows;
    do {
      expect('[');
      std::vector<FreePolynomial> row;
      do {
        const std::size_t entry_at = (skip_ws(), pos_);
        FreePolynomial entry = expr();
        if (!entry.is_scalar()) {
          fail_at("matrix entries must be scalar polynomials, got shape " + shape(entry), entry_at);
        }
        row.push_back(std::move(entry));
      } while (accept(','));
      expect(']');
      if (!rows.empty() && row.size() != rows.front().size()) {
        fail_at("inconsistent row lengths in matrix literal", start);
      }
      rows.push_back(std::move(row));
    } while (accept(','));
    expect(']');

    const Index nr = static_cast<Index>(rows.size());
    const Index nc = static_cast<Index>(rows.front().size());
    FreePolynomial::TermMap terms;
    for (Index a = 0; a < nr; ++a) {
      for (Index b = 0; b < nc; ++b) {
        for (const auto& [w, c] : rows[a][b].terms()) {
          auto [it, inserted] = terms.try_emplace(w, Matrix::Zero(nr, nc));
          it->second(a, b) = c(0, 0);
        }
      }
    }
    return FreePolynomial::from_terms(g_, nr, nc, std::move(terms));
  }

  static std::string shape(const FreePolynomial& p) {
    return std::to_string(p.rows()) + "x" + std::to_string(p.cols());
  }

  std::string_view text_;
  int g_;
  std::size_t pos_ = 0;
};

}  // namespace

FreePolynomial parse_polynomial(std::string_view text, int g) {
  if (g < 1) throw ShapeError("variable count must be positive");
  return Parser(text, g).parse();
}

}  // namespace freehull
