#include "freehull/freeset.hpp"

#include <algorithm>
#include <numeric>

#include "freehull/error.hpp"

namespace freehull {

GeneratorFamily::GeneratorFamily(std::vector<MatrixTuple> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) throw ShapeError("generator family must be nonempty");
  for (const auto& t : generators_) {
    if (t.num_vars() != generators_.front().num_vars()) {
      throw ShapeError("generators have different variable counts");
    }
  }
}

bool in_basis_set(const MatrixTuple& X, const FreePolynomial& delta) {
  return operator_norm(evaluate(delta, X)) < 1.0 - 1e-12;
}

bool in_sublevel(const MatrixTuple& X, const FreePolynomial& delta, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw ShapeError("sublevel parameter must lie in [0, 1)");
  return operator_norm(evaluate(delta, X)) <= s + 1e-12;
}

std::string to_string(CompactnessStatus s) {
  switch (s) {
    case CompactnessStatus::kDominated:
      return "dominated";
    case CompactnessStatus::kNotCompact:
      return "not_compact";
    case CompactnessStatus::kUndetermined:
      return "undetermined";
  }
  return "undetermined";
}

namespace {

std::vector<std::size_t> candidate_order(const GeneratorFamily& family) {
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return family[a].size() < family[b].size(); });
  return order;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

DominatorSearch hull_dominator(const GeneratorFamily& family, const FreesetOptions& opts) {
  DominatorSearch search;
  bool all_undetermined = true;
  for (std::size_t i : candidate_order(family)) {
    CandidateReport report{i, {}};
    std::vector<std::optional<DilationCertificate>> certs(family.size());
    bool dominated = true;
    bool blocked_undetermined = false;
    for (std::size_t j = 0; j < family.size(); ++j) {
      PairOutcome pair;
      pair.target = j;
      DilationResult result = assemble_dilation(family[i], family[j], opts.dilation);
      if (auto* cert = std::get_if<DilationCertificate>(&result)) {
        pair.certified = true;
        certs[j] = std::move(*cert);
      } else {
        const auto& failure = std::get<DilationFailure>(result);
        pair.stage = to_string(failure.stage);
        pair.reason = failure.reason;
        pair.undetermined = failure.undetermined;
        blocked_undetermined = blocked_undetermined || failure.undetermined;
        dominated = false;
      }
      report.pairs.push_back(std::move(pair));
      if (!dominated) break;
    }
    search.candidates.push_back(std::move(report));
    if (dominated) {
      search.dominator = i;
      for (auto& c : certs) search.certificates.push_back(std::move(*c));
      return search;
    }
    all_undetermined = all_undetermined && blocked_undetermined;
  }
  search.undetermined = all_undetermined;
  return search;
}

std::optional<SeparatingWitness> separating_witness(const MatrixTuple& X, const GeneratorFamily& family,
                                                    const FreesetOptions& opts) {
  if (opts.degree_bound < 1 || opts.trials < 1) throw ShapeError("separating_witness needs D >= 1 and T >= 1");
  if (X.num_vars() != family.num_vars()) throw ShapeError("separating_witness: variable count mismatch");
  const int g = X.num_vars();

  auto try_candidate = [&](const FreePolynomial& delta) -> std::optional<SeparatingWitness> {
    const double a = operator_norm(evaluate(delta, X));
    for (std::size_t j = 0; j < family.size(); ++j) {
      const double b = operator_norm(evaluate(delta, family[j]));
      if (!(b - a > opts.margin) || (b - a) / (a + b) < opts.margin) continue;
      const double c = 2.0 / (a + b);
      return SeparatingWitness{0, j, scale(delta, c), c * a, c * b};
    }
    return std::nullopt;
  };

  const auto words = words_up_to(g, opts.degree_bound);
  for (const Word& w : words) {
    if (auto hit = try_candidate(FreePolynomial::monomial(g, w))) return hit;
  }
  const FreePolynomial one = FreePolynomial::scalar(g, 1.0);
  for (const Word& w : words) {
    if (w.empty()) continue;
    const FreePolynomial mono = FreePolynomial::monomial(g, w);
    if (auto hit = try_candidate(one - mono)) return hit;
    if (auto hit = try_candidate(one + mono)) return hit;
  }
  for (int t = 0; t < opts.trials; ++t) {
    PolynomialParams params;
    params.g = g;
    params.rows = params.cols = (t % 2 == 0) ? 1 : 2;
    params.max_degree = 1 + (t / 2) % opts.degree_bound;
    const std::uint64_t seed = splitmix64(opts.seed ^ splitmix64(static_cast<std::uint64_t>(t)));
    if (auto hit = try_candidate(sample_polynomial(params, seed))) return hit;
  }
  return std::nullopt;
}

Counterexample cover_counterexample(std::span<const WitnessAssignment> assignments) {
  if (assignments.empty()) throw Error("counterexample needs at least one witness");
  std::vector<MatrixTuple> parts;
  std::vector<double> norms_y;
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    const auto& a = assignments[k];
    const double nx = operator_norm(evaluate(a.delta, a.x));
    const double ny = operator_norm(evaluate(a.delta, a.y));
    if (!(nx < 1.0 && ny > 1.0)) {
      throw Error("witness " + std::to_string(k) + " does not straddle 1: |delta(X)| = " + std::to_string(nx) +
                  ", |delta(Y)| = " + std::to_string(ny));
    }
    parts.push_back(a.y);
    norms_y.push_back(ny);
  }
  Counterexample out{direct_sum(parts), {}, true};
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    EscapeCheck check;
    check.norm_y = norms_y[k];
    check.norm_z = operator_norm(evaluate(assignments[k].delta, out.z));
    check.escapes = check.norm_z >= check.norm_y - 1e-9 && check.norm_y - 1e-9 > 1.0 &&
                    !in_basis_set(out.z, assignments[k].delta);
    out.no_finite_subcover = out.no_finite_subcover && check.escapes;
    out.checks.push_back(check);
  }
  return out;
}

CompactnessVerdict analyze_compactness(const GeneratorFamily& family, const FreesetOptions& opts) {
  CompactnessVerdict verdict;
  verdict.search = hull_dominator(family, opts);
  if (verdict.search.dominator) {
    verdict.status = CompactnessStatus::kDominated;
    return verdict;
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (auto w = separating_witness(family[i], family, opts)) {
      w->source = i;
      verdict.witnesses.push_back(std::move(*w));
    } else {
      verdict.unseparated.push_back(i);
    }
  }
  if (!verdict.unseparated.empty()) {
    verdict.status = CompactnessStatus::kUndetermined;
    return verdict;
  }
  std::vector<WitnessAssignment> assignments;
  for (const auto& w : verdict.witnesses) assignments.push_back({family[w.source], w.delta, family[w.target]});
  verdict.counterexample = cover_counterexample(assignments);
  verdict.status = verdict.counterexample->no_finite_subcover ? CompactnessStatus::kNotCompact
                                                              : CompactnessStatus::kUndetermined;
  return verdict;
}

}  // namespace freehull
