// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "hsf/cli/commands.hpp"
#include "hsf/cli/config.hpp"
#include "hsf/cli/report.hpp"
#include "support.hpp"

namespace hsf::cli
{
namespace
{

namespace fs = std::filesystem;

std::string config_error_field(const json &j)
{
  try
  {
    parse_job_config(j);
  }
  catch (const ConfigError &e)
  {
    return e.field();
  }
  return "<no error>";
}

json apply_sa_job()
{
  return json::parse(R"J({
    "command": "apply-sa",
    "seed": 7,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "matrix": {"lambdas": [-0.6, -0.1, 0.3, 0.75], "seed": 3},
    "spec": {"cells": 64}
  })J");
}

fs::path temp_dir()
{
  const fs::path dir = fs::temp_directory_path() / ("hsf_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

// Config schema

TEST(Config, ErrorsNameTheField)
{
  json j = apply_sa_job();
  j["colour"] = 1;
  EXPECT_EQ(config_error_field(j), "colour");

  j = apply_sa_job();
  j["spec"]["epsilon"] = -1.0;
  EXPECT_EQ(config_error_field(j), "spec.epsilon");

  j = apply_sa_job();
  j["spec"]["eps"] = 0.1;
  EXPECT_EQ(config_error_field(j), "spec.eps");

  j = apply_sa_job();
  j["function"]["expr"] = "sin(x) + foo(x)";
  EXPECT_EQ(config_error_field(j), "function.expr");

  j = apply_sa_job();
  j["matrix"] = json::parse(R"J({"n": 2, "entries": [[1, 0], [0, 0], [0, 0]]})J");
  EXPECT_EQ(config_error_field(j), "matrix.entries");

  j = apply_sa_job();
  j["matrix"] = json::parse(R"J({"n": 1, "entries": [[1, 0, 5]]})J");
  EXPECT_EQ(config_error_field(j), "matrix.entries[0]");

  j = apply_sa_job();
  j["command"] = "integrate";
  EXPECT_EQ(config_error_field(j), "command");

  j = apply_sa_job();
  j["matrix"].erase("seed");
  EXPECT_EQ(config_error_field(j), "matrix.seed");

  j = apply_sa_job();
  j["format"] = "xml";
  EXPECT_EQ(config_error_field(j), "format");

  EXPECT_EQ(config_error_field(json::array()), "<root>");
}

TEST(Config, DefaultsAndEcho)
{
  const JobConfig cfg = parse_job_config(json::parse(R"J({"command": "apply-sa"})J"));
  EXPECT_EQ(cfg.spec.epsilon, 1e-3);
  EXPECT_EQ(cfg.spec.base_cells_x, 256);
  EXPECT_EQ(cfg.spec.base_cells_y, 256);
  EXPECT_EQ(cfg.spec.refinement_levels, 6);
  EXPECT_EQ(cfg.N, 6);
  EXPECT_FALSE(cfg.seed.has_value());

  const JobConfig full = parse_job_config(apply_sa_job());
  const json echo = full.to_json();
  EXPECT_EQ(echo["spec"]["cells"], json::array({64, 64}));
  EXPECT_EQ(echo["seed"], 7);
  EXPECT_FALSE(echo.contains("threads"));
  // The echo parses back to the same job.
  EXPECT_EQ(parse_job_config(echo).to_json(), echo);
}

TEST(Config, SeedIsRequiredToRun)
{
  json j = apply_sa_job();
  j.erase("seed");
  const JobConfig cfg = parse_job_config(j);
  try
  {
    run(cfg);
    FAIL() << "expected ConfigError";
  }
  catch (const ConfigError &e)
  {
    EXPECT_EQ(e.field(), "seed");
  }
}

TEST(Config, MatrixFileRoundTrip)
{
  Rng rng(71);
  ComplexMatrix M(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      M(i, k) = rng.complex_normal();
  const fs::path dir = temp_dir();
  {
    std::ofstream out(dir / "m.json");
    out << canonical_json(matrix_to_json(M));
  }
  EXPECT_EQ(test::max_diff(read_matrix_file((dir / "m.json").string()), M), 0.0);

  json j = apply_sa_job();
  j["matrix"] = "m.json";
  const JobConfig cfg = parse_job_config(j, dir.string());
  EXPECT_EQ(cfg.matrix.kind, MatrixSource::Kind::File);
  EXPECT_EQ(test::max_diff(cfg.matrix.matrix, M), 0.0);

  j["matrix"] = "missing.json";
  EXPECT_EQ(config_error_field(j), "matrix");
  fs::remove_all(dir);
}

// Output

TEST(CanonicalJson, Layout)
{
  const json j = json::parse(R"J({"b": [1, 2.5, -0.1], "a": {"y": null, "x": true}, "c": "s"})J");
  const std::string expected = "{\n"
                               "  \"a\": {\n"
                               "    \"x\": true,\n"
                               "    \"y\": null\n"
                               "  },\n"
                               "  \"b\": [1, 2.5, -0.10000000000000001],\n"
                               "  \"c\": \"s\"\n"
                               "}\n";
  EXPECT_EQ(canonical_json(j), expected);
  EXPECT_EQ(canonical_json(json(std::numeric_limits<double>::quiet_NaN())), "null\n");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(canonical_json(json::object()), "{}\n");
}

TEST(Checks, ComparisonsAndNaN)
{
  EXPECT_TRUE(check_at_most("a", 1.0, 1.0).pass);
  EXPECT_FALSE(check_at_most("a", 1.5, 1.0).pass);
  EXPECT_TRUE(check_at_least("a", 1.0, 1.0).pass);
  EXPECT_FALSE(check_at_least("a", 0.5, 1.0).pass);
  EXPECT_FALSE(check_at_most("a", std::nan(""), 1.0).pass);
  EXPECT_FALSE(check_at_least("a", std::nan(""), 1.0).pass);
  Report r;
  r.checks.push_back(check_at_most("ok", 0.0, 1.0));
  EXPECT_EQ(r.exit_code(), kExitOk);
  r.checks.push_back(check_at_most("bad", 2.0, 1.0));
  EXPECT_EQ(r.exit_code(), kExitCheckFailed);
  EXPECT_FALSE(r.to_json()["all_pass"].get<bool>());
}

TEST(Commands, ReportsAreByteIdenticalAcrossRunsAndThreads)
{
  JobConfig cfg = parse_job_config(apply_sa_job());
  cfg.threads = 1;
  const std::string a = emit(run(cfg), Format::Json);
  const std::string b = emit(run(cfg), Format::Json);
  cfg.threads = 4;
  const std::string c = emit(run(cfg), Format::Json);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a.back(), '\n');
}

TEST(Commands, ApplySaDiagonalInput)
{
  json j = apply_sa_job();
  j["matrix"] = json::parse(R"J({"n": 3, "entries": [[-0.5, 0], [0, 0], [0, 0],
                                                    [0, 0], [0.1, 0], [0, 0],
                                                    [0, 0], [0, 0], [0.6, 0]]})J");
  j["spec"] = json::object();
  const Report r = run(parse_job_config(j));
  EXPECT_TRUE(r.all_pass());
  bool found = false;
  for (const Check &c : r.checks)
    if (c.name == "diagonal_consistency")
    {
      found = true;
      EXPECT_LE(c.measured, 1e-12);
    }
  EXPECT_TRUE(found);
}

TEST(Commands, ApplyUnitaryFromFileUsesCayleyOracle)
{
  // The oracle for file inputs must agree with the synthesis decomposition.
  const CircleFunction f = CircleFunction::from_pullback("bump(x)", {-1.0, 1.0});
  const std::vector<double> thetas{1.9, 2.6, 3.1, 3.7, 4.4};
  const auto [U, d] = synth_unitary(thetas, 12);
  const ComplexMatrix synth = spectral_apply(
      d, [&](cplx z) { return cplx(f.pullback().value(psi_inv(z).real())); });
  EXPECT_LE(test::max_diff(unitary_oracle(U, f), synth), 1e-10);
  EXPECT_THROW(unitary_oracle(ComplexMatrix::Identity(2, 2), f), PoleError);
}

TEST(Commands, ConvergenceCsvHeader)
{
  const json j = json::parse(R"J({
    "command": "convergence", "seed": 1,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "spec": {"cells": 64},
    "convergence": {"values": [0.1, 0.03, 0.01, 0.003]}
  })J");
  const Report r = run(parse_job_config(j));
  const std::string csv = emit(r, Format::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "param,error,runtime_ms");
  int lines = 0;
  for (char ch : csv)
    lines += ch == '\n';
  EXPECT_EQ(lines, 5);
  // runtime_ms is left out of the JSON form.
  EXPECT_EQ(r.to_json()["table"]["columns"], json::array({"param", "error"}));
}

TEST(Commands, ExtendTableAndRestriction)
{
  const json j = json::parse(R"J({
    "command": "extend", "seed": 1,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "extend": {"nx": 8, "ny": 4}
  })J");
  const Report r = run(parse_job_config(j));
  EXPECT_TRUE(r.all_pass());
  ASSERT_TRUE(r.table.has_value());
  EXPECT_EQ(r.table->columns,
            (std::vector<std::string>{"x", "y", "re_f", "im_f", "re_dbar", "im_dbar"}));
  EXPECT_EQ(r.table->rows.size(), 32u);
  EXPECT_THROW(emit(Report{}, Format::Csv), PreconditionError);
}

TEST(Commands, FailedCheckGivesNonzeroExit)
{
  // The rectangle cuts through the support, so the boundary term is not zero.
  const json j = json::parse(R"J({
    "command": "cauchy-check", "seed": 1,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "cauchy": {"field": "extension", "rect": [-0.5, 0.5, -0.2, 0.2], "xi": 0.1}
  })J");
  const Report r = run(parse_job_config(j));
  EXPECT_FALSE(r.all_pass());
  EXPECT_EQ(r.exit_code(), kExitCheckFailed);
}

TEST(Commands, CauchyFieldsPass)
{
  for (const char *field : {"z2", "one", "extension"})
  {
    json j = json::parse(R"J({"command": "cauchy-check", "seed": 1,
                             "function": {"expr": "bump(x)", "support": [-1, 1]}})J");
    j["cauchy"]["field"] = field;
    EXPECT_TRUE(run(parse_job_config(j)).all_pass()) << field;
  }
}

// Binary

int run_binary(const std::string &args, std::string *out = nullptr)
{
  const fs::path dir = temp_dir();
  const std::string out_file = (dir / "stdout.txt").string();
  const std::string cmd = std::string(HSF_BINARY) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (out)
  {
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  fs::remove_all(dir);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes)
{
  const fs::path dir = fs::temp_directory_path() / ("hsf_cli_bin_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto write = [&](const std::string &name, const json &j) {
    std::ofstream(dir / name) << j.dump();
    return (dir / name).string();
  };

  json good = json::parse(R"J({"command": "cauchy-check", "seed": 1, "cauchy": {"field": "z2"}})J");
  EXPECT_EQ(run_binary("cauchy-check -c " + write("good.json", good)), kExitOk);

  json failing = json::parse(R"J({
    "command": "cauchy-check", "seed": 1,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "cauchy": {"field": "extension", "rect": [-0.5, 0.5, -0.2, 0.2], "xi": 0.1}
  })J");
  EXPECT_EQ(run_binary("cauchy-check -c " + write("fail.json", failing)), kExitCheckFailed);

  json bad = good;
  bad["spec"] = {{"epsilon", "small"}};
  EXPECT_EQ(run_binary("cauchy-check -c " + write("bad.json", bad)), kExitConfigError);
  EXPECT_EQ(run_binary("apply-sa -c " + write("good2.json", good)), kExitConfigError);
  EXPECT_EQ(run_binary("cauchy-check --seed 1 --format csv"), kExitConfigError);

  json compute = json::parse(R"J({
    "command": "apply-sa", "seed": 1,
    "function": {"expr": "bump(x)", "support": [-1, 1]},
    "matrix": {"n": 2, "entries": [[0, 0], [1, 0], [0, 0], [0, 0]]}
  })J");
  EXPECT_EQ(run_binary("apply-sa -c " + write("nonherm.json", compute)), kExitComputeError);
  fs::remove_all(dir);
}

TEST(Binary, SeedFlagOverridesConfig)
{
  const fs::path dir = fs::temp_directory_path() / ("hsf_cli_seed_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "z2.json").string();
  std::ofstream(cfg) << R"J({"command": "cauchy-check", "seed": 1, "cauchy": {"field": "z2"}})J";
  std::string a, b;
  ASSERT_EQ(run_binary("cauchy-check -c " + cfg + " --seed 5", &a), kExitOk);
  ASSERT_EQ(run_binary("cauchy-check -c " + cfg + " --seed 5 --threads 3", &b), kExitOk);
  EXPECT_EQ(a, b);
  EXPECT_EQ(json::parse(a)["seed"], 5);
  fs::remove_all(dir);
}

} // namespace
} // namespace hsf::cli
