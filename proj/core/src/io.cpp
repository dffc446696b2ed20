#include "freehull/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace freehull {

using Json = nlohmann::ordered_json;

namespace {

Json matrix_object(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw FormatError(where + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw FormatError(where + ": row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      const Json& z = row[static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw FormatError(where + ": entry (" + std::to_string(i) + ", " + std::to_string(k) +
                          ") must be a [re, im] pair of numbers");
      }
      m(i, k) = Complex{z[0].get<double>(), z[1].get<double>()};
    }
  }
  return m;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T get_field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field \"") + key + "\" has the wrong type");
  }
}

Json tuple_object(const MatrixTuple& x) {
  Json out;
  out["g"] = x.num_vars();
  out["n"] = x.size();
  Json mats = Json::array();
  for (const auto& m : x.matrices()) mats.push_back(matrix_object(m));
  out["matrices"] = std::move(mats);
  return out;
}

MatrixTuple tuple_from_object(const Json& obj) {
  const int g = get_field<int>(obj, "g");
  const Index n = get_field<Index>(obj, "n");
  if (g < 1 || n < 1) throw FormatError("tuple needs g >= 1 and n >= 1");
  if (!obj.contains("matrices")) throw FormatError("missing field \"matrices\"");
  const Json& mats = obj.at("matrices");
  if (!mats.is_array() || static_cast<int>(mats.size()) != g) {
    throw FormatError("\"matrices\" must list exactly g = " + std::to_string(g) + " matrices");
  }
  std::vector<Matrix> out;
  for (int i = 0; i < g; ++i) {
    out.push_back(matrix_from_json(mats[static_cast<std::size_t>(i)], n, n, "matrix " + std::to_string(i + 1)));
  }
  return MatrixTuple(std::move(out));
}

Json pair_outcome(const PairOutcome& p) {
  Json out;
  out["target"] = p.target;
  out["certified"] = p.certified;
  if (!p.certified) {
    out["stage"] = p.stage;
    out["undetermined"] = p.undetermined;
    out["reason"] = p.reason;
  }
  return out;
}

}  // namespace

std::string matrix_to_json(const Matrix& m) { return matrix_object(m).dump(); }

std::string tuple_to_json(const MatrixTuple& x) { return tuple_object(x).dump(); }

MatrixTuple tuple_from_json(std::string_view text) { return tuple_from_object(parse_json(text)); }

std::string family_to_json(const GeneratorFamily& family) {
  Json out;
  out["g"] = family.num_vars();
  Json gens = Json::array();
  for (const auto& t : family.generators()) gens.push_back(tuple_object(t));
  out["generators"] = std::move(gens);
  return out.dump();
}

GeneratorFamily family_from_json(std::string_view text) {
  const Json obj = parse_json(text);
  const int g = get_field<int>(obj, "g");
  if (!obj.contains("generators") || !obj["generators"].is_array() || obj["generators"].empty()) {
    throw FormatError("\"generators\" must be a nonempty array");
  }
  std::vector<MatrixTuple> gens;
  for (const auto& t : obj["generators"]) {
    gens.push_back(tuple_from_object(t));
    if (gens.back().num_vars() != g) {
      throw FormatError("generator " + std::to_string(gens.size()) + " has g = " +
                        std::to_string(gens.back().num_vars()) + ", family declares " + std::to_string(g));
    }
  }
  return GeneratorFamily(std::move(gens));
}

std::string certificate_to_json(const DilationCertificate& cert) {
  Json out;
  out["M"] = cert.multiplicity;
  out["n"] = cert.n;
  out["m"] = cert.m;
  out["V"] = matrix_object(cert.v.matrix());
  out["residual"] = cert.residual;
  out["probe_degree"] = cert.probe_degree;
  return out.dump();
}

DilationCertificate certificate_from_json(std::string_view text) {
  const Json obj = parse_json(text);
  const Index M = get_field<Index>(obj, "M");
  const Index n = get_field<Index>(obj, "n");
  const Index m = get_field<Index>(obj, "m");
  if (M < 1 || n < 1 || m < 1) throw FormatError("certificate needs M, n, m >= 1");
  if (!obj.contains("V")) throw FormatError("missing field \"V\"");
  Matrix v = matrix_from_json(obj["V"], M * n, m, "V");
  std::optional<Isometry> iso;
  try {
    iso.emplace(std::move(v));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("certificate V: ") + e.what());
  }
  std::vector<Matrix> kraus;
  for (Index j = 0; j < M; ++j) kraus.push_back(iso->matrix().middleRows(j * n, n));
  return DilationCertificate{M,
                             n,
                             m,
                             *iso,
                             std::move(kraus),
                             get_field<double>(obj, "residual"),
                             get_field<int>(obj, "probe_degree"),
                             0.0};
}

std::string verdict_to_json(const CompactnessVerdict& verdict, int indent) {
  Json out;
  out["status"] = to_string(verdict.status);
  out["dominator"] = verdict.search.dominator ? Json(*verdict.search.dominator) : Json(nullptr);
  Json certs = Json::array();
  for (std::size_t j = 0; j < verdict.search.certificates.size(); ++j) {
    const auto& c = verdict.search.certificates[j];
    Json entry;
    entry["generator"] = j;
    entry["M"] = c.multiplicity;
    entry["residual"] = c.residual;
    entry["probe_degree"] = c.probe_degree;
    entry["certificate"] = Json::parse(certificate_to_json(c));
    certs.push_back(std::move(entry));
  }
  out["certificates"] = std::move(certs);
  Json candidates = Json::array();
  for (const auto& cand : verdict.search.candidates) {
    Json entry;
    entry["candidate"] = cand.candidate;
    Json pairs = Json::array();
    for (const auto& p : cand.pairs) pairs.push_back(pair_outcome(p));
    entry["pairs"] = std::move(pairs);
    candidates.push_back(std::move(entry));
  }
  out["candidates"] = std::move(candidates);
  Json witnesses = Json::array();
  for (const auto& w : verdict.witnesses) {
    Json entry;
    entry["source"] = w.source;
    entry["target"] = w.target;
    entry["delta"] = to_string(w.delta);
    entry["norm_x"] = w.norm_x;
    entry["norm_y"] = w.norm_y;
    witnesses.push_back(std::move(entry));
  }
  out["witnesses"] = std::move(witnesses);
  out["unseparated"] = verdict.unseparated;
  if (verdict.counterexample) {
    Json ce;
    ce["z"] = tuple_object(verdict.counterexample->z);
    Json checks = Json::array();
    for (const auto& c : verdict.counterexample->checks) {
      Json entry;
      entry["norm_z"] = c.norm_z;
      entry["norm_y"] = c.norm_y;
      entry["escapes"] = c.escapes;
      checks.push_back(std::move(entry));
    }
    ce["checks"] = std::move(checks);
    ce["no_finite_subcover"] = verdict.counterexample->no_finite_subcover;
    out["counterexample"] = std::move(ce);
  } else {
    out["counterexample"] = nullptr;
  }
  return out.dump(indent);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError(path.string() + ": cannot move output into place");
  }
}

namespace {

template <typename F>
auto with_path(const std::filesystem::path& path, F&& parse) {
  const std::string text = read_text_file(path);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

MatrixTuple read_tuple_file(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& t) { return tuple_from_json(t); });
}

GeneratorFamily read_family_file(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& t) { return family_from_json(t); });
}

DilationCertificate read_certificate_file(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& t) { return certificate_from_json(t); });
}

}  // namespace freehull
