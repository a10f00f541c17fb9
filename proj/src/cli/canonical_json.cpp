// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "hsf/cli/report.hpp"
#include "hsf/errors.hpp"

namespace hsf::cli
{

namespace
{

void write_string(std::string &out, const std::string &s)
{
  // nlohmann's dump gives the standard escaping for a lone string.
  out += json(s).dump();
}

void write(std::string &out, const json &j, int indent)
{
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type())
  {
  case json::value_t::object:
  {
    if (j.empty())
    {
      out += "{}";
      return;
    }
    // Sort explicitly; do not rely on the container's ordering.
    std::map<std::string, const json *> sorted;
    for (auto it = j.begin(); it != j.end(); ++it)
      sorted.emplace(it.key(), &it.value());
    out += "{\n";
    bool first = true;
    for (const auto &[key, value] : sorted)
    {
      if (!first)
        out += ",\n";
      first = false;
      out += inner;
      write_string(out, key);
      out += ": ";
      write(out, *value, indent + 1);
    }
    out += "\n" + pad + "}";
    return;
  }
  case json::value_t::array:
  {
    if (j.empty())
    {
      out += "[]";
      return;
    }
    // Arrays of scalars stay on one line.
    bool flat = true;
    for (const auto &e : j)
      flat = flat && !e.is_structured();
    if (flat)
    {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i)
      {
        if (i)
          out += ", ";
        write(out, j[i], indent + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i)
    {
      if (i)
        out += ",\n";
      out += inner;
      write(out, j[i], indent + 1);
    }
    out += "\n" + pad + "]";
    return;
  }
  case json::value_t::string:
    write_string(out, j.get_ref<const std::string &>());
    return;
  case json::value_t::boolean:
    out += j.get<bool>() ? "true" : "false";
    return;
  case json::value_t::number_integer:
    out += std::to_string(j.get<std::int64_t>());
    return;
  case json::value_t::number_unsigned:
    out += std::to_string(j.get<std::uint64_t>());
    return;
  case json::value_t::number_float:
  {
    const double v = j.get<double>();
    out += std::isfinite(v) ? format_double(v) : "null";
    return;
  }
  default:
    out += "null";
    return;
  }
}

} // namespace

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Check check_at_most(std::string name, double measured, double threshold)
{
  return {std::move(name), measured, threshold, "<=", measured <= threshold};
}

Check check_at_least(std::string name, double measured, double threshold)
{
  return {std::move(name), measured, threshold, ">=", measured >= threshold};
}

bool Report::all_pass() const
{
  for (const auto &c : checks)
    if (!c.pass)
      return false;
  return true;
}

json Report::to_json() const
{
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["inputs"] = inputs;
  j["results"] = results;
  json checks_json = json::array();
  for (const auto &c : checks)
  {
    checks_json.push_back({{"name", c.name},
                           {"measured", c.measured},
                           {"threshold", c.threshold},
                           {"comparison", c.comparison},
                           {"pass", c.pass}});
  }
  j["checks"] = std::move(checks_json);
  j["all_pass"] = all_pass();
  j["exit_code"] = exit_code();
  if (table)
  {
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < table->columns.size(); ++c)
    {
      const bool vol = std::find(table_volatile_columns.begin(), table_volatile_columns.end(),
                                 table->columns[c]) != table_volatile_columns.end();
      if (include_volatile || !vol)
        keep.push_back(c);
    }
    json cols = json::array(), rows = json::array();
    for (std::size_t c : keep)
      cols.push_back(table->columns[c]);
    for (const auto &row : table->rows)
    {
      json jr = json::array();
      for (std::size_t c : keep)
        jr.push_back(row[c]);
      rows.push_back(std::move(jr));
    }
    j["table"] = {{"columns", std::move(cols)}, {"rows", std::move(rows)}};
  }
  if (!timings.empty())
    j["timings_ms"] = timings;
  return j;
}

Format parse_format(const std::string &name)
{
  if (name == "json")
    return Format::Json;
  if (name == "csv")
    return Format::Csv;
  throw ConfigError("format", "expected json or csv");
}

std::string canonical_json(const json &j)
{
  std::string out;
  write(out, j, 0);
  out += "\n";
  return out;
}

std::string table_csv(const Table &t)
{
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
  {
    if (i)
      out += ",";
    out += t.columns[i];
  }
  out += "\n";
  for (const auto &row : t.rows)
  {
    for (std::size_t i = 0; i < row.size(); ++i)
    {
      if (i)
        out += ",";
      out += format_double(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string emit(const Report &report, Format format)
{
  if (format == Format::Json)
    return canonical_json(report.to_json());
  if (!report.table)
    throw PreconditionError("command '" + report.command + "' produces no table for CSV output");
  return table_csv(*report.table);
}

} // namespace hsf::cli
