// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria. Tolerances are pinned below, not read from options.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "freehull/annihilator.hpp"
#include "freehull/cpmap.hpp"
#include "freehull/freeset.hpp"
#include "freehull/sdpcore.hpp"
#include "test_support.hpp"

namespace freehull {
namespace {

using testing::case_seed;

constexpr double kDirectSumTol = 1e-9;
constexpr double kConverseNormTol = 1e-9;
constexpr double kConverseWordTol = 1e-9;
constexpr double kVerifyTol = 1e-6;
constexpr double kKrausTol = 1e-7;
constexpr double kDetectGap = 1e-3;
constexpr double kDualMargin = 1e-9;
constexpr double kAnnihilateX = 1e-8;
constexpr double kAnnihilateY = 1e-6;
constexpr double kCharpolyRel = 1e-6;
constexpr double kStandardTol = 1e-9;
constexpr double kStraddleMargin = 1e-6;

struct Result {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct ConstructedPair {
  DilationSample sample;
  int g = 1;
};

// The 50 constructed dilations shared by criteria 2, 3 and 5.
const std::vector<ConstructedPair>& constructed_pairs() {
  static const std::vector<ConstructedPair> pairs = [] {
    std::vector<ConstructedPair> out;
    for (int t = 0; t < 50; ++t) {
      const int g = 1 + t % 3;
      const Index n = 1 + (t / 3) % 3;
      const Index N = 1 + (t / 9) % 3;
      out.push_back({sample_dilation({g, n, N, 1.0}, case_seed(100, t)), g});
    }
    return out;
  }();
  return pairs;
}

const std::vector<DilationResult>& certified_results() {
  static const std::vector<DilationResult> results = [] {
    std::vector<DilationResult> out;
    for (const auto& p : constructed_pairs()) out.push_back(assemble_dilation(p.sample.x, p.sample.y));
    return out;
  }();
  return results;
}

Result direct_sum_norm_law() {
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int g = 1 + t % 3;
    const auto x = sample_tuple({g, 1 + t % 4, 1.0}, case_seed(200, t));
    const auto y = sample_tuple({g, 1 + (t / 4) % 4, 1.0}, case_seed(201, t));
    const auto delta = sample_polynomial({g, 1 + t % 2, 1 + (t / 2) % 2, 1 + t % 3, 1.0}, case_seed(202, t));
    const double joint = operator_norm(evaluate(delta, direct_sum(x, y)));
    const double parts = std::max(operator_norm(evaluate(delta, x)), operator_norm(evaluate(delta, y)));
    worst = std::max(worst, std::abs(joint - parts));
  }
  return {worst <= kDirectSumTol, "200 cases, max deviation " + fmt("%.2e", worst)};
}

Result converse_constructive() {
  double worst_norm = -1e300;
  double worst_word = 0.0;
  int k = 0;
  for (const auto& p : constructed_pairs()) {
    const auto& s = p.sample;
    const Index n = s.x.size();
    const Index N = s.v.codomain_dim() / n;
    for (int j = 0; j < 100; ++j) {
      const auto delta = sample_polynomial({p.g, 1 + j % 2, 1 + (j / 2) % 2, 1 + j % 3, 1.0}, case_seed(300, k * 100 + j));
      worst_norm = std::max(worst_norm, operator_norm(evaluate(delta, s.y)) - operator_norm(evaluate(delta, s.x)));
    }
    for (const Word& w : words_up_to(p.g, 3)) {
      const Matrix lhs = testing::naive_word(w, s.y);
      const Matrix rhs =
          s.v.matrix().adjoint() * kron(Matrix::Identity(N, N), testing::naive_word(w, s.x)) * s.v.matrix();
      worst_word = std::max(worst_word, operator_norm(lhs - rhs));
    }
    ++k;
  }
  return {worst_norm <= kConverseNormTol && worst_word <= kConverseWordTol,
          "50 pairs x 100 probes, max |d(Y)|-|d(X)| " + fmt("%.2e", worst_norm) + ", word residual " +
              fmt("%.2e", worst_word)};
}

Result forward_certified() {
  int certified = 0;
  double worst_residual = 0.0;
  double worst_kraus = 0.0;
  int k = 0;
  for (const auto& p : constructed_pairs()) {
    const DilationResult& r = certified_results()[static_cast<std::size_t>(k)];
    if (const auto* cert = std::get_if<DilationCertificate>(&r)) {
      ++certified;
      std::vector<FreePolynomial> probes = word_probes(p.g, 2);
      for (int j = 0; j < 20; ++j) {
        probes.push_back(sample_polynomial({p.g, 1 + j % 3, 1 + (j / 3) % 3, 2, 1.0}, case_seed(400, 20 * k + j)));
      }
      const VerifyReport rep = verify_dilation(p.sample.x, p.sample.y, *cert, probes, kVerifyTol);
      worst_residual = std::max(worst_residual, rep.max_residual);
      worst_kraus = std::max(worst_kraus, cert->kraus_defect);
    }
    ++k;
  }
  return {certified == 50 && worst_residual <= kVerifyTol && worst_kraus <= kKrausTol,
          std::to_string(certified) + "/50 certified, max residual " + fmt("%.2e", worst_residual) +
              ", max Kraus defect " + fmt("%.2e", worst_kraus)};
}

// Alternates two sources of non-dilating pairs: independent random tuples,
// and an upper triangular X = [[a, c], [0, b]] against an oblique idempotent
// combination Y = aP + b(I - P). The second kind satisfies every relation of
// X, so the verdict has to come from the semidefinite program itself.
std::pair<MatrixTuple, MatrixTuple> non_dilating_candidate(int t) {
  std::mt19937_64 rng(case_seed(500, t));
  if (t % 2 == 0) {
    const int g = 1 + (t / 2) % 2;
    return {sample_tuple({g, 1 + (t / 2) % 3, 1.0}, rng()), sample_tuple({g, 1 + (t / 4) % 3, 1.5}, rng())};
  }
  Matrix x = gaussian_matrix(2, 2, 1.0, rng);
  x(1, 0) = 0.0;
  const Index m = 2 + (t / 2) % 2;
  const Matrix s = gaussian_matrix(m, m, 1.0, rng);
  Matrix d = Matrix::Zero(m, m);
  d(0, 0) = 1.0;
  const Matrix proj = s * d * s.inverse();
  const Matrix y = x(0, 0) * proj + x(1, 1) * (Matrix::Identity(m, m) - proj);
  return {MatrixTuple({x}), MatrixTuple({y})};
}

bool detected_non_dilating(const MatrixTuple& x, const MatrixTuple& y, int t) {
  const int g = x.num_vars();
  for (const Word& w : words_up_to(g, 2)) {
    const auto delta = FreePolynomial::monomial(g, w);
    if (operator_norm(evaluate(delta, y)) > operator_norm(evaluate(delta, x)) + kDetectGap) return true;
  }
  for (int j = 0; j < 20; ++j) {
    const auto delta = sample_polynomial({g, 1 + j % 2, 1 + j % 2, 2, 1.0}, case_seed(501, 20 * t + j));
    if (operator_norm(evaluate(delta, y)) > operator_norm(evaluate(delta, x)) + kDetectGap) return true;
  }
  return false;
}

Result negative_consistency() {
  int tested = 0, feasible = 0, infeasible = 0, undetermined = 0, bad_duals = 0, solver_decided = 0;
  for (int t = 0; tested < 50 && t < 1000; ++t) {
    const auto [x, y] = non_dilating_candidate(t);
    if (!detected_non_dilating(x, y, t)) continue;
    ++tested;
    const ChoiFeasibility f = choi_feasibility(x, y);
    switch (f.status) {
      case FeasibilityStatus::kFeasible:
        ++feasible;
        break;
      case FeasibilityStatus::kInfeasible: {
        ++infeasible;
        SolverOptions opts;
        opts.dual_margin = kDualMargin;
        if (!check_dual(*f.problem, f.dual, opts).ok) ++bad_duals;
        if (!f.diagnostics.affine_inconsistent) ++solver_decided;
        break;
      }
      case FeasibilityStatus::kUndetermined:
        ++undetermined;
        break;
    }
  }
  return {tested == 50 && feasible == 0 && bad_duals == 0,
          std::to_string(tested) + " pairs: " + std::to_string(infeasible) + " infeasible (" +
              std::to_string(solver_decided) + " by iteration), " + std::to_string(undetermined) +
              " undetermined, " + std::to_string(feasible) + " feasible, " + std::to_string(bad_duals) +
              " unverified duals"};
}

Result annihilator_chain() {
  double worst_x = 0.0, worst_y = 0.0;
  int pairs = 0;
  bool ok = true;
  int k = 0;
  for (const auto& p : constructed_pairs()) {
    if (std::holds_alternative<DilationCertificate>(certified_results()[static_cast<std::size_t>(k++)])) {
      const FreePolynomial ann = annihilating_polynomial(p.sample.x);
      const double nx = operator_norm(evaluate(ann, p.sample.x));
      const double ny = operator_norm(evaluate(ann, p.sample.y));
      worst_x = std::max(worst_x, nx);
      worst_y = std::max(worst_y, ny / (1.0 + ann.coefficient_mass()));
      ok = ok && nx <= kAnnihilateX && ny <= kAnnihilateY * (1.0 + ann.coefficient_mass());
      ++pairs;
    }
  }
  double worst_rel = 0.0;
  for (int t = 0; t < 30; ++t) {
    const Index n = 1 + t % 5;
    const auto x = sample_tuple({1, n, 1.0}, case_seed(600, t));
    const FreePolynomial ann = annihilating_polynomial(x);
    const auto c = testing::charpoly_from_eigenvalues(x[0]);
    if (ann.degree() != n) {
      ok = false;
      continue;
    }
    for (Index j = 0; j <= n; ++j) {
      const Complex got = ann.scalar_coefficient(Word(std::vector<int>(static_cast<std::size_t>(j), 1)));
      const Complex want = c[static_cast<std::size_t>(j)];
      worst_rel = std::max(worst_rel, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
  }
  ok = ok && worst_rel <= kCharpolyRel && pairs == 50;
  return {ok, std::to_string(pairs) + " certified pairs, max |p(X)| " + fmt("%.2e", worst_x) +
                  ", max |p(Y)|/(1+mass) " + fmt("%.2e", worst_y) + ", charpoly rel " + fmt("%.2e", worst_rel)};
}

Result amitsur_levitzki() {
  const FreePolynomial s2 = testing::standard_polynomial(2);
  const FreePolynomial s4 = testing::standard_polynomial(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) worst = std::max(worst, operator_norm(evaluate(s2, sample_tuple({2, 1, 1.0}, case_seed(700, t)))));
  for (int t = 0; t < 50; ++t) worst = std::max(worst, operator_norm(evaluate(s4, sample_tuple({4, 2, 1.0}, case_seed(701, t)))));
  return {worst <= kStandardTol, "S2 on 100 scalar pairs, S4 on 50 2x2 quadruples, max norm " + fmt("%.2e", worst)};
}

Result dominated_branch() {
  const DilationSample s = sample_dilation({2, 2, 2, 1.0}, case_seed(800, 0));
  const GeneratorFamily fam({s.x, direct_sum(s.x, s.x), s.y});
  const CompactnessVerdict v = analyze_compactness(fam);
  bool ok = v.status == CompactnessStatus::kDominated && v.search.dominator == std::optional<std::size_t>(0) &&
            v.search.certificates.size() == 3;
  double worst = 0.0;
  for (std::size_t j = 0; ok && j < 3; ++j) {
    const VerifyReport rep =
        verify_dilation(fam[0], fam[j], v.search.certificates[j], word_probes(2, 2), kVerifyTol);
    ok = ok && rep.accepted;
    worst = std::max(worst, rep.max_residual);
  }
  return {ok, "status " + to_string(v.status) + ", dominator " +
                  (v.search.dominator ? std::to_string(*v.search.dominator) : std::string("none")) + ", " +
                  std::to_string(v.search.certificates.size()) + " certificates, max residual " +
                  fmt("%.2e", worst)};
}

Result non_compact_branch() {
  const GeneratorFamily fam({MatrixTuple::scalars({1.0}), MatrixTuple::scalars({-1.0})});
  const CompactnessVerdict v = analyze_compactness(fam);
  bool ok = v.status == CompactnessStatus::kNotCompact && v.witnesses.size() == 2 && v.counterexample.has_value();
  double margin = 1e300;
  for (const auto& w : v.witnesses) {
    const double nx = operator_norm(evaluate(w.delta, fam[w.source]));
    const double ny = operator_norm(evaluate(w.delta, fam[w.target]));
    margin = std::min({margin, 1.0 - nx, ny - 1.0});
    if (ok) ok = !in_basis_set(v.counterexample->z, w.delta);
  }
  ok = ok && margin >= kStraddleMargin;
  return {ok, "status " + to_string(v.status) + ", " + std::to_string(v.witnesses.size()) +
                  " witnesses, straddle margin " + fmt("%.3g", margin) + ", Z of size " +
                  (v.counterexample ? std::to_string(v.counterexample->z.size()) : std::string("-"))};
}

Result sdp_self_test() {
  Matrix e = Matrix::Identity(1, 1);
  Matrix target(2, 2);
  target << 1, 2, 2, 1;
  std::vector<LinearConstraint> pin;
  for (Index i = 0; i < 2; ++i) {
    Matrix d = Matrix::Zero(2, 2);
    d(i, i) = 1.0;
    pin.push_back({d, target(i, i).real()});
  }
  Matrix off = Matrix::Zero(2, 2);
  off(0, 1) = off(1, 0) = 0.5;
  pin.push_back({off, 2.0});
  Matrix offi = Matrix::Zero(2, 2);
  offi(0, 1) = Complex(0, -0.5);
  offi(1, 0) = Complex(0, 0.5);
  pin.push_back({offi, 0.0});

  const std::vector<std::pair<FeasibilityProblem, FeasibilityStatus>> cases{
      {FeasibilityProblem(1, {{e, 5.0}}), FeasibilityStatus::kFeasible},
      {FeasibilityProblem(1, {{e, -1.0}}), FeasibilityStatus::kInfeasible},
      {FeasibilityProblem(2, pin), FeasibilityStatus::kInfeasible}};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [problem, expected] : cases) {
    const FeasibilityOutcome first = solve_feasibility(problem);
    bool verified = first.status == expected;
    if (expected == FeasibilityStatus::kFeasible) verified = verified && check_witness(problem, first.witness).ok;
    if (expected == FeasibilityStatus::kInfeasible) verified = verified && check_dual(problem, first.dual).ok;
    for (int rep = 0; rep < 3; ++rep) {
      const FeasibilityOutcome again = solve_feasibility(problem);
      verified = verified && again.status == first.status && again.witness == first.witness &&
                 again.dual == first.dual;
    }
    ok = ok && verified;
    detail << to_string(first.status) << (verified ? "" : "(!)") << " ";
  }
  if (ok) ok = std::abs(solve_feasibility(cases[0].first).witness(0, 0) - Complex(5.0)) <= 1e-7 * 6.0;
  return {ok, detail.str() + "with 3 repeat runs each"};
}

}  // namespace
}  // namespace freehull

int main() {
  using namespace freehull;
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"direct-sum norm law", direct_sum_norm_law},
      {"constructed dilations compress every polynomial", converse_constructive},
      {"constructed dilations are certified", forward_certified},
      {"non-dilating pairs never feasible", negative_consistency},
      {"annihilators transport to dilations", annihilator_chain},
      {"standard polynomial identities", amitsur_levitzki},
      {"dominated family verdict", dominated_branch},
      {"separated family verdict", non_compact_branch},
      {"feasibility engine self-test", sdp_self_test},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Result r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += r.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), r.detail.c_str());
  }
  return failures;
}
