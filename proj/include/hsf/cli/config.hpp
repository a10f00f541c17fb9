// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsf/cayley.hpp"
#include "hsf/integrator.hpp"
#include "hsf/matrix.hpp"
#include "hsf/quadrature.hpp"

namespace hsf::cli
{

using json = nlohmann::json;

/// Function input. Real functions use {"expr", "support", "max_order"};
/// circle functions use {"pullback_expr", "support", ...} or
/// {"angle_expr", "theta_support", ...}.
struct FunctionSpec
{
  enum class Kind
  {
    Real,
    Pullback,
    Angle,
  };

  Kind kind = Kind::Real;
  std::string expr;
  Interval support{};      // Real, Pullback
  Interval theta_support{}; // Angle
  int max_order = kDefaultMaxOrder;

  bool is_circle() const noexcept { return kind != Kind::Real; }
  SmoothCompactFunction real_function() const;
  CircleFunction circle_function() const;
  json to_json() const;
};

/// Matrix input: a JSON file, an inline matrix, or a synthesis spec
/// ({"lambdas": [...]} Hermitian, {"thetas": [...]} unitary) with a seed.
struct MatrixSource
{
  enum class Kind
  {
    None,
    File,
    Inline,
    SynthHermitian,
    SynthUnitary,
  };

  Kind kind = Kind::None;
  std::string path;
  ComplexMatrix matrix;
  std::vector<double> spectrum;
  std::uint64_t seed = 0;
  bool identity_basis = false;

  json to_json() const;
};

struct ExtendOptions
{
  std::optional<Rect> rect; // default: support x [-C, C]
  int nx = 64;
  int ny = 32;
};

struct CauchyOptions
{
  std::string field = "extension"; // z2 | one | extension
  std::optional<Rect> rect;        // default: support rectangle padded by 25%
  cplx xi{0.3, 0.0};
  int nodes_per_edge = 512;
  int area_cells = 512;
};

struct SweepOptions
{
  std::string problem = "scalar"; // scalar | selfadjoint | unitary
  std::string parameter = "epsilon"; // epsilon | cells
  std::vector<double> values{1e-1, 3e-2, 1e-2, 3e-3};
  std::vector<double> xis{0.0};
  bool grid_error = false;
};

struct JobConfig
{
  std::string command;
  std::optional<FunctionSpec> function;
  MatrixSource matrix;
  QuadratureSpec spec;
  int N = 6;
  double T0 = 0.5;
  std::optional<std::uint64_t> seed;
  std::string output_path;
  std::string format = "json";
  int threads = 0;

  ExtendOptions extend;
  CauchyOptions cauchy;
  SweepOptions sweep;

  /// Echo of every knob with defaults filled in. Execution-only settings
  /// (threads, output path) are left out so reports do not depend on them.
  json to_json() const;
};

const std::vector<std::string> &known_commands();

/// Validates against the schema; ConfigError names the offending field.
/// Relative matrix paths resolve against base_dir.
JobConfig parse_job_config(const json &j, const std::string &base_dir = ".");

ComplexMatrix matrix_from_json(const json &j);
json matrix_to_json(const ComplexMatrix &M);

ComplexMatrix read_matrix_file(const std::string &path);

} // namespace hsf::cli
