#include "freehull/cpmap.hpp"

#include <gtest/gtest.h>

#include "freehull/error.hpp"
#include "test_support.hpp"

namespace freehull {
namespace {

using testing::case_seed;

Matrix sum_gram(const std::vector<Matrix>& kraus) {
  Matrix s = Matrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& w : kraus) s += w.adjoint() * w;
  return s;
}

TEST(ChoiTest, ConventionSelfTest) { EXPECT_NO_THROW(validate_choi_convention()); }

TEST(ChoiTest, IdentityMapIsRankOne) {
  const std::vector<Matrix> id{Matrix::Identity(3, 3)};
  const ChoiMatrix c = choi_of_kraus(id, 3, 3);
  const auto kraus = kraus_from_choi(c);
  ASSERT_EQ(kraus.size(), 1u);
  // Single element equal to I up to a global phase.
  const Complex phase = kraus[0](0, 0);
  EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
  EXPECT_LT((kraus[0] / phase - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(ChoiTest, CompletelyDepolarizingMap) {
  // phi(T) = tr(T)/n I_n: Choi matrix I_{n^2}/n, n^2 Kraus elements.
  const Index n = 3;
  const ChoiMatrix c{n, n, Matrix::Identity(n * n, n * n) / static_cast<double>(n)};
  const auto kraus = kraus_from_choi(c);
  EXPECT_EQ(kraus.size(), static_cast<std::size_t>(n * n));
  EXPECT_LT((sum_gram(kraus) - Matrix::Identity(n, n)).norm(), 1e-9);
  std::mt19937_64 rng(3);
  const Matrix t = gaussian_matrix(n, n, 1.0, rng);
  const Matrix expected = t.trace() / static_cast<double>(n) * Matrix::Identity(n, n);
  EXPECT_LT((apply_kraus(kraus, t) - expected).norm(), 1e-9);
  EXPECT_LT((apply_choi(c, t) - expected).norm(), 1e-12);
}

TEST(ChoiTest, RankDeficientDropsZeroEigenpairs) {
  std::mt19937_64 rng(5);
  Matrix stacked = gaussian_matrix(4, 2, 1.0, rng);
  const Isometry v = Isometry::nearest(stacked);
  const std::vector<Matrix> kraus{v.matrix().topRows(2), v.matrix().bottomRows(2)};
  const ChoiMatrix c = choi_of_kraus(kraus, 2, 2);
  const auto back = kraus_from_choi(c);
  EXPECT_EQ(back.size(), 2u);
  const Matrix t = gaussian_matrix(2, 2, 1.0, rng);
  EXPECT_LT((apply_kraus(back, t) - apply_kraus(kraus, t)).norm(), 1e-9);
}

TEST(WellDefinedTest, Examples) {
  const auto X = sample_tuple({2, 3, 1.0}, 1);
  EXPECT_TRUE(std::holds_alternative<WellDefined>(check_well_defined(X, X)));

  const auto r = check_well_defined(MatrixTuple::scalars({1.0}), MatrixTuple::scalars({-1.0}));
  ASSERT_TRUE(std::holds_alternative<WellDefinednessViolation>(r));
  const auto& v = std::get<WellDefinednessViolation>(r);
  EXPECT_EQ(v.witness, parse_polynomial("x1 - 1", 1));
  EXPECT_NEAR(v.witness_norm_y, 2.0, 1e-12);

  for (int t = 0; t < 10; ++t) {
    const auto d = sample_dilation({2, 3, 2, 1.0}, case_seed(40, t));
    EXPECT_TRUE(std::holds_alternative<WellDefined>(check_well_defined(d.x, d.y)));
  }
  EXPECT_THROW(check_well_defined(X, sample_tuple({3, 3, 1.0}, 2)), ShapeError);
}

TEST(ChoiFeasibilityTest, IdentityPair) {
  const auto X = sample_tuple({2, 2, 1.0}, 3);
  const ChoiFeasibility f = choi_feasibility(X, X);
  ASSERT_EQ(f.status, FeasibilityStatus::kFeasible);
  // X generates M_2, so the only unital CP extension is the identity map.
  Matrix expected = Matrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) expected(i * 2 + i, j * 2 + j) = 1.0;
  EXPECT_LT((f.choi->c - expected).norm(), 1e-6);
}

TEST(ChoiFeasibilityTest, ConstructedDilationsAreFeasible) {
  for (int t = 0; t < 10; ++t) {
    const auto d = sample_dilation({1 + t % 3, 1 + t % 3, 1 + t % 3, 1.0}, case_seed(41, t));
    const ChoiFeasibility f = choi_feasibility(d.x, d.y);
    ASSERT_EQ(f.status, FeasibilityStatus::kFeasible) << t;
    EXPECT_TRUE(check_witness(*f.problem, f.choi->c).ok);
  }
}

TEST(ChoiFeasibilityTest, NormDominationViolated) {
  const ChoiFeasibility f = choi_feasibility(MatrixTuple::scalars({0.5}), MatrixTuple::scalars({2.0}));
  EXPECT_EQ(f.status, FeasibilityStatus::kInfeasible);
  EXPECT_TRUE(f.violation.has_value());
  EXPECT_TRUE(check_dual(*f.problem, f.dual).ok);
}

TEST(AssembleTest, SelfDilationIsUnitary) {
  const auto X = sample_tuple({2, 3, 1.0}, 8);
  const auto r = assemble_dilation(X, X);
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
  const auto& c = std::get<DilationCertificate>(r);
  EXPECT_EQ(c.multiplicity, 1);
  EXPECT_LT((c.v.matrix() * c.v.matrix().adjoint() - Matrix::Identity(3, 3)).norm(), 1e-7);
}

TEST(AssembleTest, DoubledTupleNeedsTwoCopies) {
  const auto X = sample_tuple({2, 2, 1.0}, 9);
  const auto r = assemble_dilation(X, direct_sum(X, X));
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
  const auto& c = std::get<DilationCertificate>(r);
  EXPECT_EQ(c.multiplicity, 2);
  EXPECT_LE(c.residual, 1e-6);
}

TEST(AssembleTest, ScalarSignFlipFailsWellDefinedness) {
  const auto r = assemble_dilation(MatrixTuple::scalars({1.0}), MatrixTuple::scalars({-1.0}));
  ASSERT_TRUE(std::holds_alternative<DilationFailure>(r));
  const auto& f = std::get<DilationFailure>(r);
  EXPECT_EQ(f.stage, DilationStage::kWellDefined);
  EXPECT_FALSE(f.undetermined);
  ASSERT_TRUE(f.witness.has_value());
  EXPECT_LT(operator_norm(evaluate(*f.witness, MatrixTuple::scalars({1.0}))), 1e-12);
}

TEST(AssembleTest, SoundnessOnSampledMatrixPolynomials) {
  for (int t = 0; t < 5; ++t) {
    const int g = 1 + t % 3;
    const auto d = sample_dilation({g, 1 + t % 3, 2, 1.0}, case_seed(42, t));
    const auto r = assemble_dilation(d.x, d.y);
    ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
    for (int k = 0; k < 100; ++k) {
      const auto delta = sample_polynomial({g, 2, 2, 3, 1.0}, case_seed(43, t * 100 + k));
      EXPECT_LE(operator_norm(evaluate(delta, d.y)), operator_norm(evaluate(delta, d.x)) + 1e-7);
    }
  }
}

TEST(VerifyTest, ProbeOneMeasuresIsometryDefect) {
  const auto d = sample_dilation({2, 2, 2, 1.0}, 10);
  const auto r = assemble_dilation(d.x, d.y);
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
  const auto& cert = std::get<DilationCertificate>(r);
  const std::vector<FreePolynomial> one{FreePolynomial::scalar(2, 1.0)};
  EXPECT_LE(verify_dilation(d.x, d.y, cert, one, 1e-10).max_residual, 1e-10);
}

TEST(VerifyTest, RectangularProbesMatchHandComputation) {
  for (int t = 0; t < 5; ++t) {
    const auto d = sample_dilation({2, 3, 2, 1.0}, case_seed(44, t));
    const auto r = assemble_dilation(d.x, d.y);
    ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
    const auto& cert = std::get<DilationCertificate>(r);
    std::vector<FreePolynomial> probes = word_probes(2, 2);
    for (int k = 0; k < 5; ++k) probes.push_back(sample_polynomial({2, 2, 3, 2, 1.0}, case_seed(45, 10 * t + k)));
    const VerifyReport rep = verify_dilation(d.x, d.y, cert, probes, 1e-6);
    EXPECT_TRUE(rep.accepted);

    // p(I_N (x) X) in coefficient-first layout is already compressed by
    // I (x) V on each side, so no reshuffle is needed here.
    const FreePolynomial& p = probes.back();
    const Index N = d.v.codomain_dim() / d.x.size();
    const Matrix px = testing::naive_evaluate(p, ampliate(d.x, N));
    const Matrix lhs = testing::naive_evaluate(p, d.y);
    const Matrix rhs = testing::naive_kron(Matrix::Identity(2, 2), d.v.matrix()).adjoint() *
                       px *
                       testing::naive_kron(Matrix::Identity(3, 3), d.v.matrix());
    EXPECT_LT((lhs - rhs).norm(), 1e-9);
  }
}

TEST(VerifyTest, RejectsWrongCertificate) {
  const auto d = sample_dilation({2, 2, 2, 1.0}, 11);
  const auto r = assemble_dilation(d.x, d.y);
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r));
  const auto cert = std::get<DilationCertificate>(r);
  const auto other = sample_tuple({2, d.y.size(), 1.0}, 12);
  EXPECT_FALSE(verify_dilation(d.x, other, cert, word_probes(2, 2), 1e-6).accepted);
  EXPECT_THROW(verify_dilation(d.x, sample_tuple({2, d.y.size() + 1, 1.0}, 1), cert, word_probes(2, 1), 1e-6),
               ShapeError);
}

TEST(CombineTest, BlockDiagonalCertificate) {
  const auto X = sample_tuple({2, 2, 1.0}, 13);
  const auto r1 = assemble_dilation(X, X);
  const auto r2 = assemble_dilation(X, direct_sum(X, X));
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r1));
  ASSERT_TRUE(std::holds_alternative<DilationCertificate>(r2));
  const std::vector<DilationCertificate> certs{std::get<DilationCertificate>(r1), std::get<DilationCertificate>(r2)};
  const Isometry v = combine_certificates(certs);
  const MatrixTuple z = direct_sum(X, direct_sum(X, X));
  const Index M = v.codomain_dim() / X.size();
  const DilationCertificate combined{M, X.size(), z.size(), v, {}, 0.0, 2, 0.0};
  EXPECT_TRUE(verify_dilation(X, z, combined, word_probes(2, 3), 1e-6).accepted);
}

}  // namespace
}  // namespace freehull
