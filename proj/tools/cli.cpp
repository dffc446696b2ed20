#include "cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "freehull/annihilator.hpp"
#include "freehull/cpmap.hpp"
#include "freehull/freeset.hpp"
#include "freehull/io.hpp"
#include "freehull/ncpoly.hpp"
#include "json.hpp"

namespace freehull::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Inputs are read and hashed once; parsing reuses the same bytes.
struct Input {
  std::string role;
  std::filesystem::path path;
  std::string text;
};

Input load(std::string role, const std::string& path) {
  return {std::move(role), path, read_text_file(path)};
}

template <typename F>
auto parse_input(const Input& in, F&& parse) {
  try {
    return parse(in.text);
  } catch (const Error& e) {
    throw FormatError(in.path.string() + ": " + e.what());
  }
}

MatrixTuple tuple_input(const Input& in) {
  return parse_input(in, [](const std::string& t) { return tuple_from_json(t); });
}

// -p takes polynomial text, or @path to read it from a file.
struct PolyArg {
  std::string text;
  std::optional<Input> file;
};

PolyArg load_poly(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    Input in = load("poly", arg.substr(1));
    return {in.text, std::move(in)};
  }
  return {arg, std::nullopt};
}

FreePolynomial parse_poly(const PolyArg& arg, int g) {
  try {
    return parse_polynomial(arg.text, g);
  } catch (const ParseError& e) {
    const std::string where = arg.file ? arg.file->path.string() : std::string("--poly");
    throw FormatError(where + ": " + e.what());
  }
}

Json embed(const std::string& json_text) { return Json::parse(json_text); }

struct Report {
  std::string command;
  Json inputs = Json::array();
  Json options = Json::object();
  std::uint64_t seed = 0;
  Json outcome = Json::object();
  Json residuals = Json::object();

  void add_input(const Input& in) {
    Json entry;
    entry["role"] = in.role;
    entry["path"] = in.path.string();
    entry["fnv1a64"] = fnv1a64(in.text);
    inputs.push_back(std::move(entry));
  }

  Json finish(double wall_time) const {
    Json out;
    out["command"] = command;
    out["inputs"] = inputs;
    out["options"] = options;
    out["seed"] = seed;
    out["outcome"] = outcome;
    out["residuals"] = residuals;
    out["wall_time"] = wall_time;
    return out;
  }
};

struct Args {
  std::string poly;
  std::string x_path;
  std::string y_path;
  std::string family_path;
  std::string cert_path;
  std::string output_path;
  std::optional<double> sublevel;
  std::optional<double> tol;
  int degree = -1;
  int trials = 200;
  std::uint64_t seed = 0;
  bool pretty = false;
};

// Each runner fills the report and returns the exit code. Output files are
// written only after every computation has succeeded.
using Runner = int (*)(const Args&, Report&);

int run_eval(const Args& a, Report& r) {
  const Input x_in = load("X", a.x_path);
  const PolyArg poly = load_poly(a.poly);
  const MatrixTuple x = tuple_input(x_in);
  const FreePolynomial p = parse_poly(poly, x.num_vars());
  r.add_input(x_in);
  if (poly.file) r.add_input(*poly.file);
  r.options["poly"] = to_string(p);

  const Matrix value = evaluate(p, x);
  r.outcome["rows"] = value.rows();
  r.outcome["cols"] = value.cols();
  r.outcome["value"] = embed(matrix_to_json(value));
  r.outcome["norm"] = operator_norm(value);
  return kExitOk;
}

int run_norm(const Args& a, Report& r) {
  const Input x_in = load("X", a.x_path);
  const PolyArg poly = load_poly(a.poly);
  const MatrixTuple x = tuple_input(x_in);
  const FreePolynomial p = parse_poly(poly, x.num_vars());
  if (a.sublevel && !(*a.sublevel >= 0.0 && *a.sublevel < 1.0)) throw ShapeError("-s must lie in [0, 1)");
  r.add_input(x_in);
  if (poly.file) r.add_input(*poly.file);
  r.options["poly"] = to_string(p);
  if (a.sublevel) r.options["s"] = *a.sublevel;

  r.outcome["norm"] = operator_norm(evaluate(p, x));
  r.outcome["in_basis_set"] = in_basis_set(x, p);
  if (a.sublevel) r.outcome["in_sublevel"] = in_sublevel(x, p, *a.sublevel);
  return kExitOk;
}

int run_annihilate(const Args& a, Report& r) {
  const Input x_in = load("X", a.x_path);
  const MatrixTuple x = tuple_input(x_in);
  const double rank_tol = a.tol.value_or(kDefaultRankTol);
  if (!(rank_tol > 0.0)) throw ShapeError("--tol must be positive");
  r.add_input(x_in);
  r.options["rank_tol"] = rank_tol;

  const Filtration f = word_filtration(x, rank_tol);
  const FreePolynomial p = annihilating_polynomial(x, rank_tol);
  r.outcome["polynomial"] = to_string(p);
  r.outcome["degree"] = p.degree();
  r.outcome["span_dim"] = f.span_dim;
  r.outcome["stabilization_degree"] = f.stabilization_degree;
  r.residuals["norm_p_x"] = operator_norm(evaluate(p, x));
  return kExitOk;
}

DilationOptions dilation_options(const Args& a, Report& r) {
  DilationOptions opts;
  if (a.degree >= 0) opts.probe_degree = a.degree;
  if (a.tol) opts.verify_tol = *a.tol;
  if (!(opts.verify_tol > 0.0)) throw ShapeError("--tol must be positive");
  r.options["probe_degree"] = opts.probe_degree;
  r.options["verify_tol"] = opts.verify_tol;
  return opts;
}

int run_dilate(const Args& a, Report& r) {
  const Input x_in = load("X", a.x_path);
  const Input y_in = load("Y", a.y_path);
  const MatrixTuple x = tuple_input(x_in);
  const MatrixTuple y = tuple_input(y_in);
  if (x.num_vars() != y.num_vars()) throw ShapeError("X and Y have different variable counts");
  r.add_input(x_in);
  r.add_input(y_in);
  const DilationOptions opts = dilation_options(a, r);

  const DilationResult result = assemble_dilation(x, y, opts);
  if (const auto* cert = std::get_if<DilationCertificate>(&result)) {
    r.outcome["status"] = "certified";
    r.outcome["M"] = cert->multiplicity;
    r.outcome["certificate"] = embed(certificate_to_json(*cert));
    r.residuals["verification"] = cert->residual;
    r.residuals["kraus_defect"] = cert->kraus_defect;
    if (!a.output_path.empty()) {
      write_text_file_atomic(a.output_path, certificate_to_json(*cert) + "\n");
      r.outcome["certificate_file"] = a.output_path;
    }
    return kExitOk;
  }
  const auto& failure = std::get<DilationFailure>(result);
  r.outcome["status"] = failure.undetermined ? "undetermined" : "no_dilation";
  r.outcome["stage"] = to_string(failure.stage);
  r.outcome["reason"] = failure.reason;
  if (failure.witness) r.outcome["witness"] = to_string(*failure.witness);
  r.outcome["feasibility"] = to_string(failure.feasibility.status);
  r.residuals["solver_iterations"] = failure.feasibility.diagnostics.iterations;
  r.residuals["primal_residual"] = failure.feasibility.diagnostics.primal_residual;
  if (failure.feasibility.status == FeasibilityStatus::kInfeasible) {
    r.residuals["dual_max_eigenvalue"] = failure.feasibility.diagnostics.dual_max_eigenvalue;
  }
  return failure.undetermined ? kExitUndetermined : kExitOk;
}

int run_verify(const Args& a, Report& r) {
  const Input x_in = load("X", a.x_path);
  const Input y_in = load("Y", a.y_path);
  const Input c_in = load("certificate", a.cert_path);
  const MatrixTuple x = tuple_input(x_in);
  const MatrixTuple y = tuple_input(y_in);
  const DilationCertificate cert =
      parse_input(c_in, [](const std::string& t) { return certificate_from_json(t); });
  if (x.num_vars() != y.num_vars()) throw ShapeError("X and Y have different variable counts");
  if (cert.n != x.size() || cert.m != y.size()) {
    throw ShapeError("certificate is for sizes n = " + std::to_string(cert.n) + ", m = " +
                     std::to_string(cert.m) + " but X, Y have sizes " + std::to_string(x.size()) + ", " +
                     std::to_string(y.size()));
  }
  r.add_input(x_in);
  r.add_input(y_in);
  r.add_input(c_in);
  const int degree = a.degree >= 0 ? a.degree : 2;
  const double tol = a.tol.value_or(1e-6);
  if (!(tol > 0.0)) throw ShapeError("--tol must be positive");
  r.options["probe_degree"] = degree;
  r.options["verify_tol"] = tol;

  const auto probes = word_probes(x.num_vars(), degree);
  const VerifyReport report = verify_dilation(x, y, cert, probes, tol);
  r.outcome["accepted"] = report.accepted;
  r.outcome["probes"] = probes.size();
  r.residuals["max_residual"] = report.max_residual;
  r.residuals["isometry_defect"] = cert.v.defect();
  return kExitOk;
}

int run_compact(const Args& a, Report& r) {
  const Input f_in = load("family", a.family_path);
  const GeneratorFamily family = parse_input(f_in, [](const std::string& t) { return family_from_json(t); });
  FreesetOptions opts;
  if (a.degree >= 0) opts.degree_bound = a.degree;
  opts.trials = a.trials;
  opts.seed = a.seed;
  if (a.tol) opts.dilation.verify_tol = *a.tol;
  if (opts.degree_bound < 1 || opts.trials < 1) throw ShapeError("compact needs -D >= 1 and -T >= 1");
  r.add_input(f_in);
  r.seed = opts.seed;
  r.options["degree_bound"] = opts.degree_bound;
  r.options["trials"] = opts.trials;
  r.options["margin"] = opts.margin;
  r.options["verify_tol"] = opts.dilation.verify_tol;

  const CompactnessVerdict verdict = analyze_compactness(family, opts);
  r.outcome = embed(verdict_to_json(verdict));
  double worst = 0.0;
  for (const auto& c : verdict.search.certificates) worst = std::max(worst, c.residual);
  if (verdict.search.dominator) r.residuals["max_certificate_residual"] = worst;
  if (!a.output_path.empty()) {
    write_text_file_atomic(a.output_path, verdict_to_json(verdict, a.pretty ? 2 : -1) + "\n");
    r.outcome["verdict_file"] = a.output_path;
  }
  return verdict.status == CompactnessStatus::kUndetermined ? kExitUndetermined : kExitOk;
}

}  // namespace

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free polynomial dilation and compactness toolkit", "freehull"};
  app.require_subcommand(1);
  Args a;

  auto add_x = [&](CLI::App* sub) { sub->add_option("-X", a.x_path, "tuple file X")->required(); };
  auto add_poly = [&](CLI::App* sub) {
    sub->add_option("-p,--poly", a.poly, "polynomial text, or @file")->required();
  };
  auto add_pretty = [&](CLI::App* sub) { sub->add_flag("--pretty", a.pretty, "indent the JSON report"); };

  std::vector<std::pair<CLI::App*, Runner>> runners;

  auto* eval = app.add_subcommand("eval", "evaluate a polynomial at a tuple");
  add_poly(eval);
  add_x(eval);
  runners.emplace_back(eval, run_eval);

  auto* norm = app.add_subcommand("norm", "operator norm of delta(X) and set membership");
  add_poly(norm);
  add_x(norm);
  norm->add_option("-s", a.sublevel, "sublevel parameter in [0, 1)");
  runners.emplace_back(norm, run_norm);

  auto* annihilate = app.add_subcommand("annihilate", "annihilating polynomial of a tuple");
  add_x(annihilate);
  annihilate->add_option("--tol", a.tol, "relative rank tolerance");
  runners.emplace_back(annihilate, run_annihilate);

  auto* dilate = app.add_subcommand("dilate", "certify that Y dilates to an ampliation of X");
  add_x(dilate);
  dilate->add_option("-Y", a.y_path, "tuple file Y")->required();
  dilate->add_option("-o", a.output_path, "certificate output file");
  dilate->add_option("-D", a.degree, "probe word degree for verification")->check(CLI::NonNegativeNumber);
  dilate->add_option("--tol", a.tol, "verification tolerance");
  runners.emplace_back(dilate, run_dilate);

  auto* verify = app.add_subcommand("verify", "re-verify a dilation certificate");
  add_x(verify);
  verify->add_option("-Y", a.y_path, "tuple file Y")->required();
  verify->add_option("-c", a.cert_path, "certificate file")->required();
  verify->add_option("-D", a.degree, "probe word degree")->check(CLI::NonNegativeNumber);
  verify->add_option("--tol", a.tol, "acceptance tolerance");
  runners.emplace_back(verify, run_verify);

  auto* compact = app.add_subcommand("compact", "compactness verdict for a generator family");
  compact->add_option("-f", a.family_path, "family file")->required();
  compact->add_option("-o", a.output_path, "verdict output file");
  compact->add_option("-D", a.degree, "degree bound of the separation search");
  compact->add_option("-T", a.trials, "sampled separation candidates");
  compact->add_option("--seed", a.seed, "seed of the sampled search");
  compact->add_option("--tol", a.tol, "certificate verification tolerance");
  runners.emplace_back(compact, run_compact);

  for (auto& [sub, runner] : runners) add_pretty(sub);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  for (auto& [sub, runner] : runners) {
    if (!sub->parsed()) continue;
    Report report;
    report.command = sub->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
      const int code = runner(a, report);
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out << report.finish(elapsed).dump(a.pretty ? 2 : -1) << "\n";
      return code;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return kExitError;
}

}  // namespace freehull::cli
