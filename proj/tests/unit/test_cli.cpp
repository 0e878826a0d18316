#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "zkdamp_cli/commands.hpp"
#include "zkdamp_cli/config.hpp"

using namespace zkdamp;
using namespace zkdamp::cli;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_config_text(text, "test.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("zkdamp_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

const char* kSmallSimulate = R"(
[grid]
dim = 2
half_length = 4pi
points = 32
[solver]
dt = 0.01
t_end = 0.1
[damping]
kind = uniform
alpha0 = 0.5
[initial]
kind = gaussian
sigma = 1.5
)";

int run_binary(const std::string& args) {
  const int status = std::system((std::string(ZKDAMP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config_text("");
  EXPECT_EQ(c.grid, default_grid(2));
  EXPECT_FALSE(c.dt_set);
  EXPECT_EQ(c.damping.kind, DampingKind::localized);
}

TEST(Config, ParsesValues) {
  const RunConfig c = parse_config_text(kSmallSimulate);
  EXPECT_EQ(c.grid.points[0], 32);
  EXPECT_DOUBLE_EQ(c.grid.half_length[1], 4.0 * 3.14159265358979323846);
  EXPECT_TRUE(c.dt_set);
  EXPECT_DOUBLE_EQ(c.solver.dt, 0.01);
  EXPECT_EQ(c.damping.kind, DampingKind::uniform);
  EXPECT_DOUBLE_EQ(c.initial.sigma, 1.5);
  const SuiteConfig s = c.suite_config();
  EXPECT_DOUBLE_EQ(s.dt, 0.01);
  EXPECT_DOUBLE_EQ(s.damping.alpha0, 0.5);
}

TEST(Config, CommentsAndQuotes) {
  const RunConfig c = parse_config_text("# top\n[output]\ndir = \"a b#c\"  ; trailing\n");
  EXPECT_EQ(c.output_dir, std::filesystem::path("a b#c"));
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const std::string e = error_of("[damping]\nalpha_O = 0.5\n");
  EXPECT_NE(e.find("test.ini:2"), std::string::npos) << e;
  EXPECT_NE(e.find("damping.alpha_O"), std::string::npos) << e;
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_NE(error_of("[damping]\nkind = uniform\nalpha0 = -1\n").find("damping.alpha0"), std::string::npos);
  EXPECT_NE(error_of("[grid]\npoints = 33\n").find("grid.points"), std::string::npos);
  EXPECT_NE(error_of("[grid]\ndim = 4\n").find("grid.dim"), std::string::npos);
  EXPECT_NE(error_of("[solver]\ndt = fast\n").find("solver.dt"), std::string::npos);
  EXPECT_NE(error_of("[solver]\nscheme = euler\n").find("solver.scheme"), std::string::npos);
  EXPECT_NE(error_of("[solver]\ndealias = yes\n").find("solver.dealias"), std::string::npos);
  EXPECT_NE(error_of("[damping]\nkind = custom\n").find("damping.table"), std::string::npos);
  EXPECT_NE(error_of("[solver]\ndt = 1\ndt = 2\n").find("test.ini:3"), std::string::npos);
  EXPECT_NE(error_of("[solver\n").find("test.ini:1"), std::string::npos);
  EXPECT_NE(error_of("dt 0.1\n").find("test.ini:1"), std::string::npos);
  EXPECT_FALSE(error_of("[nowhere]\nx = 1\n").empty());
}

TEST(Config, ObservabilityDefaultsFollowDimension) {
  const RunConfig two = parse_config_text("");
  EXPECT_EQ(two.observability_points, 128);
  EXPECT_EQ(two.observability_band, 24);
  const RunConfig three = parse_config_text("[grid]\ndim = 3\n");
  EXPECT_EQ(three.observability_points, 32);
  EXPECT_EQ(three.observability_band, 8);
  EXPECT_EQ(three.suite_config().observability_grid.points[2], 32);
  EXPECT_NE(error_of("[suite]\nobservability_band = 50\n").find("suite.observability_band"), std::string::npos);
  EXPECT_NE(error_of("[suite]\nobservability_dt = 0.3\n").find("suite.observability_dt"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(parse_config("/nonexistent/zkdamp.ini"), ConfigError);
}

TEST(Timeseries, RoundTripIsBitwise) {
  History h;
  for (int i = 0; i < 4; ++i) {
    EnergyRecord r;
    r.t = 0.1 * i;
    r.E = 1.0 / 3.0 + i;
    r.H = -std::exp(-i) * 1e-300;
    r.grad_sq = std::sqrt(2.0) * i;
    r.h1_sq = r.E + r.grad_sq;
    r.dissipation = 0.1 / 7.0;
    r.local_E = 5e-324;
    r.local_grad_sq_weighted = 1e300;
    h.push_back(r);
  }
  const auto dir = scratch_dir("csv");
  std::filesystem::create_directories(dir);
  write_timeseries(h, dir / "a.csv");
  const History back = read_timeseries(dir / "a.csv");
  ASSERT_EQ(back.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(back[i].t, h[i].t);
    EXPECT_EQ(back[i].E, h[i].E);
    EXPECT_EQ(back[i].H, h[i].H);
    EXPECT_EQ(back[i].grad_sq, h[i].grad_sq);
    EXPECT_EQ(back[i].local_E, h[i].local_E);
    EXPECT_EQ(back[i].local_grad_sq_weighted, h[i].local_grad_sq_weighted);
  }
  std::ifstream in(dir / "a.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kTimeseriesHeader);
}

TEST(Timeseries, EmptyAndMalformed) {
  const auto dir = scratch_dir("csv_bad");
  std::filesystem::create_directories(dir);
  write_timeseries({}, dir / "empty.csv");
  EXPECT_TRUE(read_timeseries(dir / "empty.csv").empty());
  {
    std::ofstream out(dir / "bad.csv");
    out << kTimeseriesHeader << "\n1,2,3\n";
  }
  EXPECT_THROW(read_timeseries(dir / "bad.csv"), std::runtime_error);
  {
    std::ofstream out(dir / "hdr.csv");
    out << "t,E\n";
  }
  EXPECT_THROW(read_timeseries(dir / "hdr.csv"), std::runtime_error);
}

TEST(Commands, SimulateWritesOutputs) {
  RunConfig c = parse_config_text(kSmallSimulate);
  c.output_dir = scratch_dir("simulate");
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, "simulate", {true}, out, err), kPass);
  EXPECT_EQ(out.str().rfind("PASS simulate [", 0), 0u) << out.str();
  const History h = read_timeseries(c.output_dir / "simulate__main.csv");
  EXPECT_EQ(h.size(), 11u);
  std::ifstream summary(c.output_dir / "summary.jsonl");
  std::string line;
  ASSERT_TRUE(std::getline(summary, line));
  EXPECT_NE(line.find("\"params_hash\""), std::string::npos);
  EXPECT_FALSE(std::getline(summary, line));
}

TEST(Commands, SummaryHashIsStable) {
  RunConfig c = parse_config_text(kSmallSimulate);
  c.output_dir = scratch_dir("hash");
  std::ostringstream a, b, err;
  run_command(c, "simulate", {true}, a, err);
  run_command(c, "simulate", {true}, b, err);
  EXPECT_EQ(a.str(), b.str());
  c.solver.t_end = 0.2;
  std::ostringstream d;
  run_command(c, "simulate", {true}, d, err);
  EXPECT_NE(a.str(), d.str());
}

TEST(Commands, UnknownCommandIsUsageError) {
  RunConfig c;
  c.output_dir = scratch_dir("unknown");
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, "frobnicate", {true}, out, err), kUsageError);
}

TEST(Commands, BlowUpExitCode) {
  RunConfig c = parse_config_text(std::string(kSmallSimulate) + "amplitude = 1e200\n");
  c.output_dir = scratch_dir("blowup");
  c.solver.dt = 0.5;
  c.solver.t_end = 50.0;
  std::ostringstream out, err;
  EXPECT_EQ(run_command(c, "simulate", {true}, out, err), kBlowUp);
  EXPECT_NE(out.str().find("blow-up"), std::string::npos) << out.str();
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch_dir("binary");
  std::filesystem::create_directories(dir);
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary(""), 2);
  EXPECT_EQ(run_binary("simulate --config /nonexistent.ini"), 2);
  {
    std::ofstream bad(dir / "bad.ini");
    bad << "[damping]\nalpha0 = -1\n";
  }
  EXPECT_EQ(run_binary("simulate --config " + (dir / "bad.ini").string()), 2);
  {
    std::ofstream good(dir / "good.ini");
    good << kSmallSimulate;
  }
  EXPECT_EQ(run_binary("simulate --quiet --config " + (dir / "good.ini").string() + " --out " + (dir / "out").string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.jsonl"));
  EXPECT_EQ(run_binary("simulate --seed -3"), 2);
}
