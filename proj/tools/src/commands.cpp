#include "zkdamp_cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "zkdamp/initial_data.hpp"

namespace zkdamp::cli {

namespace {

std::filesystem::path series_path(const std::filesystem::path& dir, const std::string& suite,
                                  const std::string& series) {
  return dir / (suite + "__" + series + ".csv");
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string summary_line(const ExperimentResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS " : "FAIL ") << r.name << " [" << r.params_hash() << "]";
  for (const auto& c : r.checks) {
    if (!c.pass) os << " " << c.name << "=" << c.value << " (" << c.relation << " " << c.threshold << ")";
  }
  return os.str();
}

ExperimentResult simulate(const RunConfig& config, std::ostream* log) {
  const GridSpec& g = config.grid;
  auto profile = std::make_shared<const DampingProfile>(make_damping(g, config.damping));
  RecorderOptions opts;
  opts.rho = make_weight(g, config.rho_r, WeightKind::rho, config.rho_transition);
  const Recorder recorder(*profile, opts);
  if (log) *log << "simulate: " << to_string(profile->kind) << " damping, T = " << config.solver.t_end << std::endl;
  const auto state = run(make_initial_data(g, config.initial), profile, config.solver, recorder);

  ExperimentResult r;
  r.name = "simulate";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  r.params["grid.dim"] = std::to_string(g.dim);
  r.params["grid.points"] = std::to_string(g.points[0]);
  r.params["grid.half_length"] = num(g.half_length[0]);
  r.params["dt"] = num(config.solver.dt);
  r.params["t_end"] = num(config.solver.t_end);
  r.params["scheme"] = to_string(config.solver.scheme);
  r.params["damping.kind"] = to_string(profile->kind);
  r.params["damping.alpha0"] = num(profile->alpha0);
  r.params["initial.kind"] = to_string(config.initial.kind);
  r.params["initial.seed"] = std::to_string(config.initial.seed);
  r.series["main"] = state.history;
  const History& h = state.history;
  r.metrics["E0"] = h.front().E;
  r.metrics["E_final"] = h.back().E;
  r.metrics["H0"] = h.front().H;
  r.metrics["H_final"] = h.back().H;
  if (h.size() >= 2) r.metrics["l2_balance_residual"] = l2_balance_residual(h);
  r.pass = true;
  return r;
}

}  // namespace

void write_timeseries(const History& history, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(history.size() + 1);
  lines.emplace_back(kTimeseriesHeader);
  char buf[512];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.E, r.H, r.grad_sq,
                  r.h1_sq, r.dissipation, r.local_E, r.local_grad_sq_weighted);
    lines.emplace_back(buf);
  }
  write_lines(path, lines);
}

History read_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader) {
    throw std::runtime_error(path.string() + ":1: unexpected header");
  }
  History h;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    EnergyRecord r;
    double* cols[] = {&r.t, &r.E, &r.H, &r.grad_sq, &r.h1_sq, &r.dissipation, &r.local_E, &r.local_grad_sq_weighted};
    std::size_t pos = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      const auto end = line.find(',', pos);
      const std::string field = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      char* stop = nullptr;
      *cols[i] = std::strtod(field.c_str(), &stop);
      const bool last = i == 7;
      if (field.empty() || *stop != '\0' || (last != (end == std::string::npos))) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
      }
      pos = end + 1;
    }
    h.push_back(r);
  }
  return h;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"simulate"};
    for (const auto& s : suite_names()) n.push_back(s);
    n.emplace_back("all");
    return n;
  }();
  return names;
}

int run_command(const RunConfig& config, const std::string& command, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  std::vector<std::string> suites;
  if (command == "all") {
    suites = suite_names();
  } else if (command == "simulate" ||
             std::find(suite_names().begin(), suite_names().end(), command) != suite_names().end()) {
    suites = {command};
  } else {
    err << "zkdamp: unknown command '" << command << "'\n";
    return kUsageError;
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    err << "zkdamp: cannot create output directory " << config.output_dir << ": " << ec.message() << "\n";
    return kUsageError;
  }

  SuiteConfig sc = config.suite_config();
  sc.log = options.quiet ? nullptr : &err;
  std::vector<std::string> summaries;
  int status = kPass;
  for (const auto& name : suites) {
    ExperimentResult r;
    try {
      r = name == "simulate" ? simulate(config, sc.log) : run_suite(name, sc);
    } catch (const BlowUpError& e) {
      out << "FAIL " << name << " blow-up: " << e.what() << "\n";
      status = kBlowUp;
      continue;
    } catch (const std::invalid_argument& e) {
      err << "zkdamp: " << name << ": " << e.what() << "\n";
      return kUsageError;
    }
    for (const auto& [series, history] : r.series) write_timeseries(history, series_path(config.output_dir, name, series));
    summaries.push_back(r.summary_json());
    out << summary_line(r) << "\n";
    if (!r.pass && status == kPass) status = kCriteriaFailed;
  }
  write_lines(config.output_dir / "summary.jsonl", summaries);
  return status;
}

}  // namespace zkdamp::cli
