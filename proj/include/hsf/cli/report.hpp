// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hsf::cli
{

using json = nlohmann::json;

inline constexpr const char *kVersion = "0.1.0";

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitComputeError = 3;

struct Check
{
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparison = "<="; // "<=" or ">="
  bool pass = false;
};

/// measured <= threshold (NaN fails).
Check check_at_most(std::string name, double measured, double threshold);
/// measured >= threshold (NaN fails).
Check check_at_least(std::string name, double measured, double threshold);

struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report
{
  std::string command;
  std::optional<std::uint64_t> seed;
  json inputs = json::object();
  json results = json::object();
  std::vector<Check> checks;
  std::optional<Table> table;
  /// Table columns that vary between runs (timings); left out of the JSON
  /// form unless include_volatile is set. CSV output keeps them.
  std::vector<std::string> table_volatile_columns;
  bool include_volatile = false;
  /// Wall-clock times in ms. Only serialized when non-empty, so reports stay
  /// byte-stable unless timings are requested.
  json timings = json::object();

  bool all_pass() const;
  int exit_code() const { return all_pass() ? kExitOk : kExitCheckFailed; }
  json to_json() const;
};

enum class Format
{
  Json,
  Csv,
};

Format parse_format(const std::string &name);

/// Sorted keys, two-space indent, doubles as %.17g (non-finite as null),
/// LF line endings and a trailing newline.
std::string canonical_json(const json &j);

/// Plain CSV of a table: header line, then one row per line, %.17g values.
std::string table_csv(const Table &t);

/// JSON: the whole report. CSV: the report's table; a report without one
/// raises PreconditionError.
std::string emit(const Report &report, Format format);

std::string format_double(double v);

} // namespace hsf::cli
