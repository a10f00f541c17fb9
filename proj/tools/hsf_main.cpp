// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsf/cli/commands.hpp"

namespace
{

struct Flags
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<int> threads;
  bool timings = false;
};

void add_common(CLI::App *sub, Flags &f)
{
  sub->add_option("-c,--config", f.config, "job config (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "random seed (overrides the config)");
  sub->add_option("-o,--out", f.out, "output file (default: stdout)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", f.threads, "worker threads, 0 = OpenMP default")
      ->check(CLI::Range(0, 4096));
  sub->add_flag("--timings", f.timings, "include wall-clock times in the report");
}

hsf::cli::JobConfig load(const std::string &command, const Flags &f)
{
  using hsf::cli::json;
  json j = json::object();
  std::string base_dir = ".";
  if (!f.config.empty())
  {
    std::ifstream in(f.config);
    try
    {
      in >> j;
    }
    catch (const json::parse_error &e)
    {
      throw hsf::ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    base_dir = std::filesystem::path(f.config).parent_path().string();
    if (base_dir.empty())
      base_dir = ".";
  }
  if (j.is_object() && j.contains("command") && j["command"] != command)
    throw hsf::ConfigError("command", "config is for '" + j["command"].dump() +
                                          "' but was run as '" + command + "'");
  if (j.is_object())
    j["command"] = command;
  hsf::cli::JobConfig cfg = hsf::cli::parse_job_config(j, base_dir);
  if (f.seed)
    cfg.seed = *f.seed;
  if (!f.out.empty())
    cfg.output_path = f.out;
  if (!f.format.empty())
    cfg.format = f.format;
  if (f.threads)
    cfg.threads = *f.threads;
  return cfg;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Functional calculus of Hermitian and unitary matrices by almost-analytic "
               "extension"};
  app.set_version_flag("--version", std::string("hsf ") + hsf::cli::kVersion);
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char *, const char *> commands[] = {
      {"extend", "sample an extension and its d-bar derivative over a rectangle"},
      {"apply-sa", "f(A) for a Hermitian matrix, checked against the spectral oracle"},
      {"apply-unitary", "f(U) for a unitary matrix, checked against the spectral oracle"},
      {"cauchy-check", "Cauchy-Pompeiu reconstruction of a test field"},
      {"convergence", "error sweep over epsilon or cell counts"},
      {"verify", "run the property suite"},
  };
  for (const auto &[name, help] : commands)
    add_common(app.add_subcommand(name, help), flags);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try
  {
    const hsf::cli::JobConfig cfg = load(command, flags);
    const hsf::cli::Report report = hsf::cli::run(cfg, {flags.timings});
    const std::string bytes = hsf::cli::emit(report, hsf::cli::parse_format(cfg.format));
    if (cfg.output_path.empty())
    {
      std::cout << bytes;
    }
    else
    {
      std::ofstream out(cfg.output_path, std::ios::binary);
      if (!out || !(out << bytes))
      {
        std::cerr << "hsf: cannot write " << cfg.output_path << "\n";
        return hsf::cli::kExitComputeError;
      }
    }
    for (const auto &c : report.checks)
      if (!c.pass)
        std::cerr << "hsf: check failed: " << c.name << " measured " << c.measured << " "
                  << (c.comparison == "<=" ? "> " : "< ") << c.threshold << "\n";
    return report.exit_code();
  }
  catch (const hsf::ConfigError &e)
  {
    std::cerr << "hsf: " << e.what() << "\n";
    return hsf::cli::kExitConfigError;
  }
  catch (const std::exception &e)
  {
    std::cerr << "hsf: " << e.what() << "\n";
    return hsf::cli::kExitComputeError;
  }
}
