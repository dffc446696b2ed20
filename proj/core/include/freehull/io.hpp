#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "freehull/cpmap.hpp"
#include "freehull/error.hpp"
#include "freehull/freeset.hpp"
#include "freehull/mattuple.hpp"

namespace freehull {

// Malformed or unreadable input files.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Rows of [re, im] pairs.
std::string matrix_to_json(const Matrix& m);

// {"g": int, "n": int, "matrices": [M_1, ..., M_g]}, each M an n x n array of
// [re, im] pairs, doubles in shortest round-trip form, no whitespace.
std::string tuple_to_json(const MatrixTuple& x);
MatrixTuple tuple_from_json(std::string_view text);

// {"g": int, "generators": [tuple objects]}
std::string family_to_json(const GeneratorFamily& family);
GeneratorFamily family_from_json(std::string_view text);

// {"M", "n", "m", "V": rows of [re, im] pairs, "residual", "probe_degree"}
std::string certificate_to_json(const DilationCertificate& cert);
DilationCertificate certificate_from_json(std::string_view text);

// Status, dominator, per-pair outcomes, witness polynomials in the polynomial
// grammar and the counterexample tuple. Pretty-printed when indent >= 0.
std::string verdict_to_json(const CompactnessVerdict& verdict, int indent = -1);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

MatrixTuple read_tuple_file(const std::filesystem::path& path);
GeneratorFamily read_family_file(const std::filesystem::path& path);
DilationCertificate read_certificate_file(const std::filesystem::path& path);

}  // namespace freehull
