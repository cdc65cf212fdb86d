#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hirank/extend_linear.hpp"
#include "hirank/extend_quadratic.hpp"
#include "hirank/geometry.hpp"
#include "hirank/poly.hpp"

namespace hirank {

using Json = nlohmann::ordered_json;

// {"field": "3" | "p^l", "n": int, "polynomials": [string, ...]}
struct VarietySpec {
  Field F;
  int n = 0;
  std::vector<std::string> polynomials;

  PolyFamily family() const;
};
VarietySpec parse_variety_spec(const std::string& text);
VarietySpec load_variety_spec(const std::string& path);
Json variety_spec_json(const PolyFamily& fam);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

// Splits on commas outside brackets, trimming whitespace.
std::vector<std::string> split_csv_row(const std::string& line);

// Rows "x_0,...,x_{n-1},value"; an optional header row starting with "x_0".
FunctionTable parse_function_csv(const std::string& text, const Space& S);
FunctionTable load_function_csv(const std::string& path, const Space& S);
// Defined points in index order, with header.
std::string function_csv(const FunctionTable& f);

Json elem_json(const Field& F, Elem a);
Json vec_json(const Field& F, const Vec& v);
Json quadratic_json(const QuadraticFunction& g);
Json certificate_json(const ExtensionCertificate& c, const Field& F);
Json certificate_json(const QuadCertificate& c, const Field& F);

}  // namespace hirank
