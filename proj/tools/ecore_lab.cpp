// ecore-lab: command-line harness for the e-core experiments.
//
// Exit codes: 0 all checks pass, 1 a statistical check failed, 2 usage or I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ecore/experiment.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

unsigned worker_count() {
  if (const char* env = std::getenv("ECORE_LAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid ECORE_LAB_WORKERS=" << env << '\n';
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size()) throw ecore::Error(ecore::ErrorCode::BadParameter, "not an integer: " + item);
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ecore::Error(ecore::ErrorCode::BadParameter, "not a number: " + item);
    out.push_back(v);
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ecore::Error(ecore::ErrorCode::BadParameter, "range must be lo:hi");
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

void print_report(const ecore::TrialReport& r) {
  for (const auto& [k, v] : r.info) std::cout << k << ": " << v << '\n';
  for (const auto& c : r.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " empirical=" << ecore::format_double(c.empirical)
              << " reference=" << ecore::format_double(c.reference)
              << " tolerance=" << ecore::format_double(c.tolerance) << " rule=" << c.rule << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecore-lab: e-cores of random partitions"};
  app.require_subcommand(1);

  std::int64_t e = 2;
  std::optional<std::int64_t> n;
  std::optional<double> t;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  std::int64_t bins = 200;
  std::string range = "0:5";
  std::string out;
  std::string format = "csv";
  std::vector<std::string> patterns;
  std::string t_grid;
  std::string e_list;
  std::int64_t cdf_points = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--e", e, "modulus e >= 2")->required();
    sub->add_option("--n", n, "fixed size n (Plancherel)");
    sub->add_option("--t", t, "Poisson parameter t");
    sub->add_option("--trials", trials, "number of trials");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--bins", bins, "histogram bins");
    sub->add_option("--range", range, "histogram range lo:hi");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  };

  auto* core_law = app.add_subcommand("core-law", "rescaled core-size law versus the Gamma-sum reference");
  add_common(core_law);
  auto* verify_kernel = app.add_subcommand("verify-kernel", "Monte Carlo correlations versus kernel determinants");
  add_common(verify_kernel);
  verify_kernel->add_option("--pattern", patterns, "comma-separated point set; repeatable");
  auto* verify_moments = app.add_subcommand("verify-moments", "moments of the x-vector versus the kernel route");
  add_common(verify_moments);
  verify_moments->add_option("--t-grid", t_grid, "comma-separated t values");
  auto* limit_shape = app.add_subcommand("limit-shape", "rescaled profiles versus the limit shape");
  add_common(limit_shape);
  auto* tables = app.add_subcommand("tables", "covariance, eigenvalue and Gamma-scale tables");
  tables->add_option("--e-list", e_list, "comma-separated moduli");
  tables->add_option("--out", out, "output directory");
  tables->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  tables->add_option("--cdf-points", cdf_points, "Gamma-sum CDF grid intervals (0 disables)");
  tables->add_option("--range", range, "CDF grid range lo:hi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const ecore::Format fmt = format == "jsonl" ? ecore::Format::Jsonl : ecore::Format::Csv;
    if (tables->parsed()) {
      const auto list = parse_int_list(e_list);
      const auto [lo, hi] = parse_range(range);
      if (cdf_points < 0) throw ecore::Error(ecore::ErrorCode::BadParameter, "cdf-points must be >= 0");
      const auto written = ecore::cmd_tables(list, {out.empty() ? "." : out, fmt, cdf_points, lo, hi});
      for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
      return 0;
    }

    if (n.has_value() == t.has_value()) throw ecore::Error(ecore::ErrorCode::BadParameter, "give exactly one of --n or --t");
    ecore::ExperimentSpec spec;
    spec.e = e;
    if (n) spec.mode = ecore::FixedN{*n};
    else spec.mode = ecore::Poissonised{*t};
    spec.trials = trials;
    spec.seed = seed;
    spec.bins = bins;
    std::tie(spec.range_lo, spec.range_hi) = parse_range(range);
    spec.out = out;
    spec.format = fmt;
    const unsigned workers = worker_count();

    ecore::TrialReport report;
    if (core_law->parsed()) {
      spec.command = ecore::Command::CoreLaw;
      report = ecore::cmd_core_law(spec, workers);
    } else if (verify_kernel->parsed()) {
      spec.command = ecore::Command::VerifyKernel;
      std::vector<std::vector<std::int64_t>> pts;
      for (const auto& p : patterns) pts.push_back(parse_int_list(p));
      report = ecore::cmd_verify_kernel(spec, pts, workers);
    } else if (verify_moments->parsed()) {
      spec.command = ecore::Command::VerifyMoments;
      report = ecore::cmd_verify_moments(spec, parse_real_list(t_grid), workers);
    } else {
      spec.command = ecore::Command::LimitShape;
      report = ecore::cmd_limit_shape(spec, workers);
    }
    print_report(report);
    return report.all_pass() ? 0 : kExitFail;
  } catch (const ecore::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
}
