#include "freehull/mattuple.hpp"

#include <gtest/gtest.h>

#include "freehull/error.hpp"
#include "test_support.hpp"

namespace freehull {
namespace {

using testing::case_seed;

Matrix diag(std::initializer_list<Complex> values) {
  Matrix d = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  Index i = 0;
  for (Complex v : values) d(i, i) = v, ++i;
  return d;
}

TEST(MatrixTupleTest, Validation) {
  EXPECT_THROW(MatrixTuple({}), ShapeError);
  EXPECT_THROW(MatrixTuple({Matrix::Zero(2, 3)}), ShapeError);
  EXPECT_THROW(MatrixTuple({Matrix::Zero(2, 2), Matrix::Zero(3, 3)}), ShapeError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(MatrixTuple({bad}), ShapeError);
}

TEST(MatrixTupleTest, DirectSumOfScalars) {
  const MatrixTuple z = direct_sum(MatrixTuple::scalars({2.0}), MatrixTuple::scalars({-3.0}));
  EXPECT_EQ(z[0], diag({2.0, -3.0}));
  EXPECT_THROW(direct_sum(MatrixTuple::scalars({1.0}), MatrixTuple::scalars({1.0, 2.0})), ShapeError);
}

TEST(MatrixTupleTest, Ampliate) {
  const MatrixTuple x = sample_tuple({2, 3, 1.0}, 4);
  EXPECT_EQ(ampliate(x, 1), x);
  EXPECT_EQ(ampliate(MatrixTuple::scalars({2.0}), 3)[0], 2.0 * Matrix::Identity(3, 3));
  EXPECT_EQ(ampliate(x, 2)[1], testing::naive_kron(Matrix::Identity(2, 2), x[1]));
}

TEST(MatrixTupleTest, Compress) {
  const MatrixTuple x = sample_tuple({2, 3, 1.0}, 5);
  EXPECT_EQ(compress(x, Isometry(Matrix::Identity(3, 3))), x);
  Matrix e1 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  EXPECT_EQ(compress(MatrixTuple({diag({4.0, 7.0})}), Isometry(e1))[0], Matrix::Constant(1, 1, 4.0));
}

TEST(IsometryTest, Validation) {
  EXPECT_THROW(Isometry(Matrix::Identity(2, 3)), ShapeError);
  EXPECT_THROW(Isometry(2.0 * Matrix::Identity(2, 2)), ShapeError);
  const Isometry v = Isometry::nearest(Matrix::Identity(3, 2) * 5.0);
  EXPECT_LT(v.defect(), 1e-14);
}

TEST(OperatorNormTest, HandValues) {
  EXPECT_NEAR(operator_norm(Matrix::Identity(4, 4)), 1.0, 1e-15);
  EXPECT_NEAR(operator_norm(diag({3.0, -4.0})), 4.0, 1e-15);
  Matrix a(2, 2);
  a << 0, 2, 0, 0;
  EXPECT_NEAR(operator_norm(a), 2.0, 1e-15);
  EXPECT_EQ(operator_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(OperatorNormTest, MatchesGramOracleAndPowerIteration) {
  for (int t = 0; t < 20; ++t) {
    std::mt19937_64 rng(case_seed(20, t));
    const Matrix a = gaussian_matrix(1 + t % 6, 1 + t % 5, 1.0, rng);
    EXPECT_NEAR(operator_norm(a), testing::gram_norm(a), 1e-10 * (1 + testing::gram_norm(a)));
  }
  std::mt19937_64 rng(99);
  const Matrix big = gaussian_matrix(kSvdLimit + 20, kSvdLimit + 5, 1.0, rng);
  EXPECT_NEAR(operator_norm(big), testing::gram_norm(big), 1e-8 * testing::gram_norm(big));
}

TEST(ShuffleTest, KronSwapLaw) {
  // S (B (x) A) S* = A (x) B for A of size a and B of size b.
  for (Index a = 1; a <= 3; ++a) {
    for (Index b = 1; b <= 3; ++b) {
      std::mt19937_64 rng(case_seed(21, a * 10 + b));
      const Matrix A = gaussian_matrix(a, a, 1.0, rng);
      const Matrix B = gaussian_matrix(b, b, 1.0, rng);
      const Permutation& s = swap_shuffle(b, a, 1);
      EXPECT_LT((permute(kron(B, A), s, s) - kron(A, B)).norm(), 1e-14);
      EXPECT_LT((kron(A, B) - testing::naive_kron(A, B)).norm(), 1e-14);
    }
  }
}

TEST(ShuffleTest, AmpliationInvariance) {
  for (int t = 0; t < 20; ++t) {
    const auto x = sample_tuple({2, 2, 1.0}, case_seed(22, t));
    const auto p = sample_polynomial({2, 2, 3, 2, 1.0}, case_seed(23, t));
    const Index k = 1 + t % 3;
    const Matrix px = evaluate(p, x);
    const Matrix pk = evaluate(p, ampliate(x, k));
    // Norm invariance under ampliation.
    EXPECT_NEAR(operator_norm(pk), operator_norm(px), 1e-10);
    // Explicit block identity after reshuffling rows and columns.
    const Matrix expected = kron(Matrix::Identity(k, k), px);
    const Matrix got = permute(pk, swap_shuffle(2, k, 2), swap_shuffle(3, k, 2));
    EXPECT_LT((got - expected).norm(), 1e-12);
  }
}

TEST(ShuffleTest, DirectSumShuffle) {
  const auto x = sample_tuple({2, 2, 1.0}, 31);
  const auto y = sample_tuple({2, 3, 1.0}, 32);
  const auto p = sample_polynomial({2, 2, 2, 2, 1.0}, 33);
  const Matrix joint = evaluate(p, direct_sum(x, y));
  const Permutation& s = direct_sum_shuffle(2, 2, 3);
  EXPECT_LT((permute(joint, s, s) - block_diag(evaluate(p, x), evaluate(p, y))).norm(), 1e-12);
}

TEST(SamplingTest, Determinism) {
  EXPECT_EQ(sample_tuple({3, 4, 1.0}, 17), sample_tuple({3, 4, 1.0}, 17));
  EXPECT_FALSE(sample_tuple({3, 4, 1.0}, 17) == sample_tuple({3, 4, 1.0}, 18));
  EXPECT_EQ(sample_isometry({2, 5}, 3).matrix(), sample_isometry({2, 5}, 3).matrix());
  EXPECT_EQ(sample_polynomial({2, 2, 2, 3, 1.0}, 9), sample_polynomial({2, 2, 2, 3, 1.0}, 9));
  const auto a = sample_dilation({2, 3, 2, 1.0}, 5);
  const auto b = sample_dilation({2, 3, 2, 1.0}, 5);
  EXPECT_EQ(a.y, b.y);
}

TEST(SamplingTest, SquareIsometryIsUnitary) {
  const Isometry u = sample_isometry({4, 4}, 11);
  EXPECT_LE(u.defect(), 1e-12);
  EXPECT_LE((u.matrix() * u.matrix().adjoint() - Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(SamplingTest, DilationSampleIsMultiplicative) {
  for (int t = 0; t < 30; ++t) {
    const int g = 1 + t % 3;
    const auto d = sample_dilation({g, 1 + t % 3, 1 + (t / 3) % 3, 1.0}, case_seed(24, t));
    const Index N = d.v.codomain_dim() / d.x.size();
    for (const Word& w : words_up_to(g, 3)) {
      const Matrix lhs = testing::naive_word(w, d.y);
      const Matrix rhs = d.v.matrix().adjoint() * kron(Matrix::Identity(N, N), testing::naive_word(w, d.x)) *
                         d.v.matrix();
      EXPECT_LT((lhs - rhs).norm(), 1e-9);
    }
  }
}

}  // namespace
}  // namespace freehull
