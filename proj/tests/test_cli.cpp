#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "stokes_branch/cli.hpp"

namespace cli = stokes_branch::cli;

namespace {

const std::string kConfigs = STOKES_BRANCH_CONFIGS;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_inprocess(const std::string& command, const std::string& config,
                  std::optional<cli::Format> f = std::nullopt) {
  Run r;
  cli::RunConfig c;
  if (!config.empty()) c = cli::load_config(kConfigs + "/" + config);
  if (f) c.format = f;
  std::ostringstream out, err;
  r.code = cli::run(command, c, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run_binary(const std::string& args) {
  const std::string out = testing::TempDir() + "cli_out.txt";
  const std::string err = testing::TempDir() + "cli_err.txt";
  const std::string cmd = std::string(STOKES_BRANCH_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double kv(const std::string& text, const std::string& key) {
  for (const auto& row : csv_rows(text)) {
    if (row.size() == 2 && row[0] == key) return std::stod(row[1]);
  }
  ADD_FAILURE() << "missing key " << key;
  return NAN;
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_THROW(cli::parse_config(nlohmann::json::parse(R"({"s": 1, "R": 2})")), stokes_branch::Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json::parse(R"({"omega_poly": []})")), stokes_branch::Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json::parse(R"({"tau_scan": {"min": 1, "max": 1, "n": 3}})")),
               stokes_branch::Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json::parse(R"({"tau_scan": {"min": 0, "max": 1, "n": 1}})")),
               stokes_branch::Error);
  const auto c = cli::parse_config(nlohmann::json::parse(
      R"({"omega_poly": [1, 2], "R": 2, "output": {"format": "json"}, "tolerances": {"root": 1e-9}})"));
  EXPECT_EQ(c.omega_poly.size(), 2u);
  EXPECT_DOUBLE_EQ(*c.R, 2.0);
  EXPECT_EQ(*c.format, cli::Format::Json);
  EXPECT_DOUBLE_EQ(c.tol.root, 1e-9);
}

TEST(Stream, IrrotationalSubcritical) {
  const auto r = run_inprocess("stream", "irrotational_subcritical.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(kv(r.out, "F"), std::pow(0.8, 1.5), 1e-11);
  EXPECT_NE(r.out.find("verdict,SubcriticalWavesExist"), std::string::npos);
  EXPECT_NEAR(kv(r.out, "s_c"), 1.0, 1e-10);
  EXPECT_NEAR(kv(r.out, "R_c"), 1.5, 1e-11);
}

TEST(Stream, UnitStream) {
  const auto r = run_inprocess("stream", "irrotational_unit.json");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(kv(r.out, "F"), 1.0, 1e-11);
}

TEST(Stream, JsonSchema) {
  const auto r = run_inprocess("stream", "linear_vorticity.json", cli::Format::Json);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "v1");
  EXPECT_NEAR(j["R"].get<double>(), 1.9, 1e-10);
}

TEST(Dispersion, IncreasingSigmaAndRootFooter) {
  const auto r = run_inprocess("dispersion", "irrotational_subcritical.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.front(), (std::vector<std::string>{"tau", "sigma"}));
  double prev = -INFINITY;
  std::size_t data = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] == "tau_star" || rows[i][0] == "lambda0") continue;
    const double sg = std::stod(rows[i][1]);
    EXPECT_GT(sg, prev);
    prev = sg;
    ++data;
  }
  EXPECT_GT(data, 10u);
  const double ts = kv(r.out, "tau_star");
  const auto st = stokes_branch::stream_profile(stokes_branch::VorticitySpec({0.0}), 0.8);
  EXPECT_LT(std::abs(stokes_branch::sigma(st, ts)), 1e-9);
  EXPECT_NEAR(kv(r.out, "lambda0") * ts, 2.0 * std::numbers::pi, 1e-9);
}

TEST(Dispersion, ConfiguredScanGrid) {
  const auto r = run_inprocess("dispersion", "linear_vorticity.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 1u + 41u + 2u);
}

TEST(Dispersion, SupercriticalIsNoRoot) {
  const auto r = run_inprocess("dispersion", "supercritical.json");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("NoRoot"), std::string::npos);
}

TEST(Mu2, SignsAroundFroudeThreshold) {
  const auto a = run_inprocess("mu2", "froude_1p2.json");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto ja = nlohmann::json::parse(a.out);
  EXPECT_GT(ja["mu2"].get<double>(), 0.0);
  EXPECT_LT(ja["relation_residual"].get<double>(), 1e-7);
  EXPECT_LT(ja["y_form_residual"].get<double>(), 1e-7);
  EXPECT_EQ(ja["schema"], "v1");
  const auto b = run_inprocess("mu2", "froude_1p45.json");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_LT(nlohmann::json::parse(b.out)["mu2"].get<double>(), 0.0);
}

TEST(IrrotationalScan, FooterAndColumns) {
  const auto r = run_inprocess("irrotational-scan", "scan.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows.front(),
            (std::vector<std::string>{"tau", "theta", "F", "f", "lambda2", "mu2_sign"}));
  EXPECT_EQ(rows.size(), 1u + 26u + 4u);
  const double t0 = kv(r.out, "tau0");
  const double F0 = kv(r.out, "F0");
  EXPECT_GE(t0, 1.987);
  EXPECT_LE(t0, 1.997);
  EXPECT_GE(F0, 1.394);
  EXPECT_LE(F0, 1.404);
  EXPECT_DOUBLE_EQ(kv(r.out, "window_low"), 1.29);
  EXPECT_DOUBLE_EQ(kv(r.out, "window_high"), F0);
}

TEST(Determinism, ByteIdenticalOutput) {
  for (const char* cfg : {"linear_vorticity.json", "irrotational_subcritical.json"}) {
    EXPECT_EQ(run_inprocess("dispersion", cfg).out, run_inprocess("dispersion", cfg).out);
  }
  EXPECT_EQ(run_inprocess("irrotational-scan", "scan.json").out,
            run_inprocess("irrotational-scan", "scan.json").out);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/irrotational_subcritical.json").code, 0);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/missing_selector.json").code, 2);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/both_selectors.json").code, 2);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/not_json.json").code, 2);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/does_not_exist.json").code, 2);
  EXPECT_EQ(run_binary("dispersion --config " + kConfigs + "/bad_scan.json").code, 2);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/irrotational_subcritical.json --tol -1").code, 2);
  EXPECT_EQ(run_binary("stream --config " + kConfigs + "/irrotational_subcritical.json --format xml").code, 2);
  EXPECT_EQ(run_binary("dispersion --config " + kConfigs + "/supercritical.json").code, 4);
  EXPECT_EQ(run_binary("bogus").code, 2);
}

TEST(Binary, OutputFileAndFormat) {
  const std::string path = testing::TempDir() + "scan_out.json";
  const auto r = run_binary("irrotational-scan --config " + kConfigs + "/scan.json --format json --out " + path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j["schema"], "v1");
  EXPECT_EQ(j["rows"].size(), 26u);
  EXPECT_FALSE(j["analytic_bound_sufficient"].get<bool>());
}

TEST(Binary, StreamCsvMatchesInProcess) {
  const auto a = run_binary("stream --config " + kConfigs + "/linear_vorticity.json");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run_inprocess("stream", "linear_vorticity.json").out);
}
