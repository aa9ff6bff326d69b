#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecore/bessel.hpp"
#include "ecore/core.hpp"
#include "ecore/error.hpp"
#include "ecore/limits.hpp"
#include "ecore/partition.hpp"
#include "ecore/sampler.hpp"
#include "ecore/stats.hpp"
#include "json.hpp"

namespace ecore {

inline constexpr int kSchemaVersion = 1;

enum class Command { CoreLaw, VerifyKernel, VerifyMoments, LimitShape, Tables };
enum class Format { Csv, Jsonl };

constexpr std::string_view to_string(Command c) {
  switch (c) {
    case Command::CoreLaw: return "core-law";
    case Command::VerifyKernel: return "verify-kernel";
    case Command::VerifyMoments: return "verify-moments";
    case Command::LimitShape: return "limit-shape";
    case Command::Tables: return "tables";
  }
  return "unknown";
}

constexpr std::string_view extension(Format f) { return f == Format::Csv ? "csv" : "jsonl"; }

/// Pass/fail thresholds. Finite-size proxies, not limit statements.
struct Thresholds {
  double ks = 0.05;
  double mean_rel = 0.10;
  double var_ratio_tol = 0.20;
  double kernel_se = 3.0;
  double kernel_pass_fraction = 0.90;
  double moment_se = 4.0;
  double shape_sup = 0.10;
  double shape_ci = 0.02;
  double shape_endpoint = 0.25;
};

struct ExperimentSpec {
  Command command = Command::CoreLaw;
  std::int64_t e = 2;
  std::variant<FixedN, Poissonised> mode = FixedN{1};
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  std::int64_t bins = 200;
  double range_lo = 0.0;
  double range_hi = 5.0;
  std::filesystem::path out;  // empty: nothing is written
  Format format = Format::Csv;
  Thresholds thresholds;

  bool poissonised() const noexcept { return std::holds_alternative<Poissonised>(mode); }
  /// t in poissonised mode, n in fixed-n mode.
  double scale_parameter() const {
    if (const auto* p = std::get_if<Poissonised>(&mode)) return p->t;
    return static_cast<double>(std::get<FixedN>(mode).n);
  }

  SamplerConfig sampler() const { return SamplerConfig{mode, seed, trials}; }

  void validate() const {
    require_modulus(e);
    sampler().validate();
    if (bins < 1) throw Error(ErrorCode::BadParameter, "bins must be >= 1");
    if (!(range_hi > range_lo)) throw Error(ErrorCode::BadParameter, "range must be nonempty");
  }
};

/// One statistic: passes when |empirical - reference| <= tolerance ("abs"),
/// <= tolerance * |reference| ("rel"), or < tolerance ("lt", reference 0).
struct CheckBlock {
  std::string name;
  double empirical = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  std::string rule = "abs";
  bool pass = false;
};

inline CheckBlock make_check(std::string name, double empirical, double reference, double tolerance,
                             std::string rule = "abs") {
  CheckBlock c{std::move(name), empirical, reference, tolerance, std::move(rule), false};
  const double gap = std::abs(empirical - reference);
  if (c.rule == "rel") c.pass = gap <= tolerance * std::abs(reference);
  else if (c.rule == "lt") c.pass = gap < tolerance;
  else c.pass = gap <= tolerance;
  return c;
}

struct TrialReport {
  ExperimentSpec spec;
  std::vector<std::pair<std::string, std::string>> info;
  std::vector<CheckBlock> checks;
  std::optional<Histogram> histogram;
  std::optional<double> ks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const CheckBlock* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline nlohmann::ordered_json json_field(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

inline void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::Csv) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_field(row[k]);
      os << '\n';
    }
    return;
  }
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    for (std::size_t k = 0; k < row.size(); ++k) j[t.columns[k]] = json_field(row[k]);
    os << j.dump() << '\n';
  }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return os;
}

inline void close_output(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline std::filesystem::path output_file(const ExperimentSpec& spec, std::string_view stem) {
  return spec.out / (std::string(stem) + "." + std::string(extension(spec.format)));
}

inline void write_table_file(const std::filesystem::path& path, const Table& t, Format f) {
  auto os = open_output(path);
  write_table(os, t, f);
  close_output(os, path);
}

inline std::vector<std::pair<std::string, std::string>> spec_echo(const ExperimentSpec& s) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", std::string(to_string(s.command)));
  kv.emplace_back("e", std::to_string(s.e));
  if (const auto* p = std::get_if<Poissonised>(&s.mode)) {
    kv.emplace_back("mode", "poissonised");
    kv.emplace_back("t", format_double(p->t));
  } else {
    kv.emplace_back("mode", "fixed_n");
    kv.emplace_back("n", std::to_string(std::get<FixedN>(s.mode).n));
  }
  kv.emplace_back("trials", std::to_string(s.trials));
  kv.emplace_back("seed", std::to_string(s.seed));
  kv.emplace_back("bins", std::to_string(s.bins));
  kv.emplace_back("range", format_double(s.range_lo) + ":" + format_double(s.range_hi));
  kv.emplace_back("format", std::string(extension(s.format)));
  return kv;
}

/// Report rows: kind in {meta, spec, info, check}.
inline Table report_table(const TrialReport& r) {
  Table t{{"kind", "name", "empirical", "reference", "tolerance", "rule", "pass"}, {}};
  const std::string blank;
  t.rows.push_back({std::string("meta"), std::string("schema_version"), std::to_string(kSchemaVersion), blank, blank,
                    blank, blank});
  for (const auto& [k, v] : spec_echo(r.spec))
    t.rows.push_back({std::string("spec"), k, v, blank, blank, blank, blank});
  for (const auto& [k, v] : r.info) t.rows.push_back({std::string("info"), k, v, blank, blank, blank, blank});
  for (const auto& c : r.checks)
    t.rows.push_back({std::string("check"), c.name, c.empirical, c.reference, c.tolerance, c.rule, c.pass});
  return t;
}

inline void write_report(const TrialReport& r) {
  if (r.spec.out.empty()) return;
  const auto path = output_file(r.spec, "report");
  auto os = open_output(path);
  if (r.spec.format == Format::Csv) {
    write_table(os, report_table(r), Format::Csv);
  } else {
    nlohmann::ordered_json head;
    head["schema_version"] = kSchemaVersion;
    head["kind"] = "spec";
    for (const auto& [k, v] : spec_echo(r.spec)) head[k] = v;
    os << head.dump() << '\n';
    for (const auto& [k, v] : r.info) {
      nlohmann::ordered_json j;
      j["kind"] = "info";
      j["name"] = k;
      j["value"] = v;
      os << j.dump() << '\n';
    }
    for (const auto& c : r.checks) {
      nlohmann::ordered_json j;
      j["kind"] = "check";
      j["name"] = c.name;
      j["empirical"] = c.empirical;
      j["reference"] = c.reference;
      j["tolerance"] = c.tolerance;
      j["rule"] = c.rule;
      j["pass"] = c.pass;
      os << j.dump() << '\n';
    }
  }
  close_output(os, path);
}

inline Table histogram_table(const Histogram& h) {
  Table t{{"bin", "lo", "hi", "count", "density"}, {}};
  const auto density = h.density();
  for (std::int64_t k = 0; k < h.bins(); ++k)
    t.rows.push_back({k, h.edge(k), h.edge(k + 1), h.counts()[static_cast<std::size_t>(k)],
                      density[static_cast<std::size_t>(k)]});
  return t;
}

inline void write_trials(const ExperimentSpec& spec, const TrialBatch& batch) {
  const auto path = output_file(spec, "trials");
  auto os = open_output(path);
  if (spec.format == Format::Csv) write_csv(os, batch);
  else write_jsonl(os, batch);
  close_output(os, path);
}

inline constexpr const char* kThresholdNote = "engineering thresholds for finite-size proxies";

// ---------------------------------------------------------------------------
// core-law

/// Rescaled core sizes |core| * pi / (4 sqrt(t or n)), histogram and KS distance
/// against the Gamma-sum law.
inline TrialReport cmd_core_law(const ExperimentSpec& spec, unsigned workers = 1) {
  spec.validate();
  const TrialBatch batch = run_trials(spec.sampler(), spec.e, Collect{}, workers);
  const double scale = std::numbers::pi / (4.0 * std::sqrt(spec.scale_parameter()));

  std::vector<double> rescaled;
  rescaled.reserve(batch.records.size());
  Histogram hist(spec.bins, spec.range_lo, spec.range_hi);
  for (const auto& r : batch.records) {
    rescaled.push_back(static_cast<double>(r.core_size) * scale);
    hist.add(rescaled.back());
  }
  const GammaSumLaw law = gamma_sum_law(spec.e);
  const auto reference = gamma_sum_reference(law);
  std::vector<double> sorted = rescaled;
  std::sort(sorted.begin(), sorted.end());
  const double ks = ks_statistic(sorted, [&](double x) { return reference->cdf(x); });

  TrialReport rep;
  rep.spec = spec;
  rep.info.emplace_back("label", spec.poissonised() ? "poissonised: rescaled by pi/(4 sqrt t)"
                                                    : "fixed-n: rescaled by pi/(4 sqrt n)");
  rep.info.emplace_back("thresholds", kThresholdNote);
  rep.info.emplace_back("ks_distance", format_double(ks));
  rep.info.emplace_back("reference_cdf_error", format_double(reference->certified_error()));
  rep.info.emplace_back("underflow", std::to_string(hist.underflow()));
  rep.info.emplace_back("overflow", std::to_string(hist.overflow()));
  rep.checks.push_back(make_check("ks_distance", ks, 0.0, spec.thresholds.ks, "lt"));
  rep.checks.push_back(make_check("mean_rescaled_core_size", mean(rescaled), law.mean(), spec.thresholds.mean_rel, "rel"));
  if (spec.poissonised() && rescaled.size() >= 2)
    rep.checks.push_back(
        make_check("variance_ratio", variance(rescaled) / law.variance(), 1.0, spec.thresholds.var_ratio_tol));
  rep.histogram = std::move(hist);
  rep.ks = ks;

  if (!spec.out.empty()) {
    write_trials(spec, batch);
    write_table_file(output_file(spec, "histogram"), histogram_table(*rep.histogram), spec.format);
    write_report(rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify-kernel

inline std::vector<std::vector<std::int64_t>> default_kernel_patterns() {
  return {{0}, {1}, {-1}, {0, 1}, {-1, 2}, {-3, 0, 2}, {0, 2}, {-2, -1}, {1, 2, 3}, {-1, 0, 1}, {-4, -2, 3}, {2, 4}};
}

inline constexpr std::int64_t kComplementPairs[] = {0, 1, 2};

/// k in D(lambda) = {lambda_a - a : a >= 1}.
inline bool in_descent_set(const Partition& p, std::int64_t k) {
  if (k < -p.length()) return true;
  for (std::int64_t a = 1; a <= p.length(); ++a) {
    const std::int64_t d = p.row(a - 1) - a;
    if (d == k) return true;
    if (d < k) return false;
  }
  return false;
}

inline std::string pattern_name(std::span<const std::int64_t> pts) {
  std::string s = "{";
  for (std::size_t k = 0; k < pts.size(); ++k) s += (k ? " " : "") + std::to_string(pts[k]);
  return s + "}";
}

/// Monte Carlo Pl_t(X subset D) against det[K(x_a, x_b)] for each pattern X,
/// plus the complement identity 1 - rho(k) = rho(-k-1).
inline TrialReport cmd_verify_kernel(const ExperimentSpec& spec, std::vector<std::vector<std::int64_t>> patterns,
                                     unsigned workers = 1) {
  spec.validate();
  if (!spec.poissonised()) throw Error(ErrorCode::BadParameter, "verify-kernel needs poissonised mode");
  const double t = spec.scale_parameter();
  if (t > 50.0) throw Error(ErrorCode::BadParameter, "verify-kernel needs t <= 50");
  if (patterns.empty()) patterns = default_kernel_patterns();
  for (auto& p : patterns) {
    if (p.empty() || p.size() > 6) throw Error(ErrorCode::BadParameter, "patterns need 1..6 points");
    std::sort(p.begin(), p.end());
    if (std::adjacent_find(p.begin(), p.end()) != p.end())
      throw Error(ErrorCode::DuplicatePoints, "pattern " + pattern_name(p) + " repeats a point");
  }
  // Singletons k and -k-1 for the complement pairs follow the patterns.
  std::vector<std::vector<std::int64_t>> events = patterns;
  for (auto k : kComplementPairs) {
    events.push_back({k});
    events.push_back({-k - 1});
  }
  if (events.size() > 64) throw Error(ErrorCode::BadParameter, "at most 58 patterns");

  std::vector<std::uint64_t> masks(static_cast<std::size_t>(spec.trials), 0);
  const SamplerConfig cfg = spec.sampler();
  parallel_for(spec.trials, workers, [&](std::int64_t i) {
    const Partition p = sample_trial(cfg, static_cast<std::uint64_t>(i));
    std::uint64_t m = 0;
    for (std::size_t ev = 0; ev < events.size(); ++ev) {
      bool all = true;
      for (auto k : events[ev]) all = all && in_descent_set(p, k);
      if (all) m |= std::uint64_t{1} << ev;
    }
    masks[static_cast<std::size_t>(i)] = m;
  });
  std::vector<std::int64_t> hits(events.size(), 0);
  for (auto m : masks)
    for (std::size_t ev = 0; ev < events.size(); ++ev) hits[ev] += static_cast<std::int64_t>((m >> ev) & 1u);

  const BesselTable table = bessel_table(t);
  const auto n = static_cast<double>(spec.trials);
  Table data{{"pattern", "hits", "trials", "mc", "se", "determinant", "z", "pass"}, {}};
  std::int64_t passed = 0;
  for (std::size_t ev = 0; ev < patterns.size(); ++ev) {
    const double mc = static_cast<double>(hits[ev]) / n;
    const double det = correlation(patterns[ev], table);
    const double se = std::sqrt(std::max(det * (1.0 - det), 0.0) / n);
    const double z = se > 0.0 ? (mc - det) / se : (mc == det ? 0.0 : INFINITY);
    const bool ok = std::abs(mc - det) <= spec.thresholds.kernel_se * se;
    passed += ok ? 1 : 0;
    data.rows.push_back({pattern_name(patterns[ev]), hits[ev], spec.trials, mc, se, det, z, ok});
  }

  TrialReport rep;
  rep.spec = spec;
  rep.info.emplace_back("thresholds", kThresholdNote);
  rep.info.emplace_back("patterns", std::to_string(patterns.size()));
  rep.info.emplace_back("patterns_within_se", std::to_string(passed));
  rep.checks.push_back(make_check("fraction_patterns_within_" + format_double(spec.thresholds.kernel_se) + "se",
                                  static_cast<double>(passed) / static_cast<double>(patterns.size()), 1.0,
                                  1.0 - spec.thresholds.kernel_pass_fraction + 1e-12));
  for (std::size_t c = 0; c < std::size(kComplementPairs); ++c) {
    const std::int64_t k = kComplementPairs[c];
    const std::size_t ev = patterns.size() + 2 * c;
    const double lhs = 1.0 - kernel(k, k, table);
    const double rhs = kernel(-k - 1, -k - 1, table);
    rep.checks.push_back(make_check("complement_identity_k" + std::to_string(k), lhs, rhs, 1e-10));
    const double p1 = static_cast<double>(hits[ev]) / n;
    const double p2 = static_cast<double>(hits[ev + 1]) / n;
    const double se = std::sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / n);
    rep.checks.push_back(
        make_check("complement_mc_k" + std::to_string(k), 1.0 - p1, p2, spec.thresholds.moment_se * se));
  }

  if (!spec.out.empty()) {
    write_table_file(output_file(spec, "kernel"), data, spec.format);
    write_report(rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify-moments

inline constexpr std::uint64_t kJitterSalt = 0x6a69747465720001ULL;

/// Empirical mean and covariance of x over trials at each t, against the
/// kernel route and the first-order asymptotics.
inline TrialReport cmd_verify_moments(const ExperimentSpec& spec, std::vector<double> t_grid, unsigned workers = 1) {
  spec.validate();
  if (!spec.poissonised()) throw Error(ErrorCode::BadParameter, "verify-moments needs poissonised mode");
  if (t_grid.empty()) t_grid.push_back(spec.scale_parameter());
  for (double t : t_grid)
    if (!(t > 0.0 && std::isfinite(t))) throw Error(ErrorCode::BadParameter, "t-grid entries must be > 0");
  if (spec.trials < 2) throw Error(ErrorCode::BadParameter, "verify-moments needs at least two trials");
  const std::int64_t e = spec.e;
  const auto ue = static_cast<std::size_t>(e);
  const auto n = static_cast<double>(spec.trials);
  const LimitModel model = limit_model(e);

  TrialReport rep;
  rep.spec = spec;
  rep.info.emplace_back("thresholds", kThresholdNote);
  rep.info.emplace_back("t_grid", [&] {
    std::string s;
    for (std::size_t k = 0; k < t_grid.size(); ++k) s += (k ? " " : "") + format_double(t_grid[k]);
    return s;
  }());
  rep.info.emplace_back("marginal_ks", "integer x_i plus uniform(-1/2,1/2) jitter before rescaling");

  Table means{{"t", "i", "empirical", "se", "kernel_route"}, {}};
  Table covs{{"t", "i", "j", "empirical", "se", "kernel_route", "asymptotic", "ratio"}, {}};
  std::vector<double> e2_over_var;

  for (double t : t_grid) {
    ExperimentSpec at = spec;
    at.mode = Poissonised{t};
    const TrialBatch batch = run_trials(at.sampler(), e, Collect{}, workers);
    const BesselTable table = bessel_table(t);
    const std::string tag = "t=" + format_double(t);

    std::int64_t unbalanced = 0;
    std::vector<std::vector<double>> xs(ue, std::vector<double>(batch.records.size()));
    for (std::size_t r = 0; r < batch.records.size(); ++r) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < ue; ++i) {
        xs[i][r] = static_cast<double>(batch.records[r].x[i]);
        s += batch.records[r].x[i];
      }
      unbalanced += s != 0 ? 1 : 0;
    }
    rep.checks.push_back(make_check(tag + " trials_with_nonzero_sum_x", static_cast<double>(unbalanced), 0.0, 0.0));

    double worst = 0.0;
    for (std::size_t i = 0; i < ue; ++i) {
      const double m = mean(xs[i]);
      const double se = std::sqrt(variance(xs[i]) / n);
      const double ref = et_xi_bessel(static_cast<std::int64_t>(i), e, table);
      means.rows.push_back({t, static_cast<std::int64_t>(i), m, se, ref});
      rep.checks.push_back(make_check(tag + " mean_x" + std::to_string(i), m, ref, spec.thresholds.moment_se * se));
      worst = std::max(worst, ref * ref / cov_xi_kernel(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), e, table));
    }
    e2_over_var.push_back(worst);

    for (std::size_t i = 0; i < ue; ++i)
      for (std::size_t j = i; j < ue; ++j) {
        const auto ii = static_cast<std::int64_t>(i);
        const auto jj = static_cast<std::int64_t>(j);
        const double c = covariance(xs[i], xs[j]);
        const double se = covariance_standard_error(xs[i], xs[j]);
        const double ref = cov_xi_kernel(ii, jj, e, table);
        const double asym = cov_asymptotic(ii, jj, e, t);
        covs.rows.push_back({t, ii, jj, c, se, ref, asym, c / asym});
        rep.checks.push_back(make_check(tag + " cov_x" + std::to_string(i) + "_x" + std::to_string(j), c, ref,
                                        spec.thresholds.moment_se * se));
      }

    // Marginal normality of e sqrt(pi/2) x_i / t^{1/4} against N(0, b_ii). The recentred
    // variant subtracts the kernel-route mean first; it is reported, not checked.
    const double rescale = static_cast<double>(e) * std::sqrt(std::numbers::pi / 2.0) / std::pow(t, 0.25);
    const double sd = std::sqrt(model(0, 0));
    double worst_ks = 0.0;
    double worst_recentred = 0.0;
    for (std::size_t i = 0; i < ue; ++i) {
      std::vector<double> z(batch.records.size());
      for (std::size_t r = 0; r < z.size(); ++r) {
        Substream jitter(spec.seed ^ kJitterSalt, static_cast<std::uint64_t>(r) * ue + i);
        z[r] = (xs[i][r] + jitter.uniform() - 0.5) * rescale;
      }
      std::sort(z.begin(), z.end());
      const double shift = et_xi_bessel(static_cast<std::int64_t>(i), e, table) * rescale;
      worst_ks = std::max(worst_ks, ks_statistic(z, [sd](double v) { return normal_cdf(v / sd); }));
      worst_recentred =
          std::max(worst_recentred, ks_statistic(z, [sd, shift](double v) { return normal_cdf((v - shift) / sd); }));
    }
    rep.checks.push_back(make_check(tag + " marginal_ks_max", worst_ks, 0.0, spec.thresholds.ks, "lt"));
    rep.info.emplace_back(tag + " marginal_ks_recentred_max", format_double(worst_recentred));
  }

  if (e2_over_var.size() >= 2) {
    std::int64_t rises = 0;
    for (std::size_t k = 1; k < e2_over_var.size(); ++k) rises += e2_over_var[k] < e2_over_var[k - 1] ? 0 : 1;
    rep.checks.push_back(make_check("mean_sq_over_var_non_decreasing_steps", static_cast<double>(rises), 0.0, 0.0));
  }

  if (!spec.out.empty()) {
    write_table_file(output_file(spec, "means"), means, spec.format);
    write_table_file(output_file(spec, "moments"), covs, spec.format);
    write_report(rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// limit-shape

inline constexpr std::int64_t kShapeGridPoints = 1201;
inline constexpr double kShapeGridHalfWidth = 3.0;

/// sup over the grid s in [-3, 3] of |omega_lambda(s sqrt n)/sqrt n - Omega(s)|.
inline double shape_distance(const Partition& p) {
  const double rn = std::sqrt(static_cast<double>(p.size()));
  double sup = 0.0;
  for (std::int64_t k = 0; k < kShapeGridPoints; ++k) {
    const double s = -kShapeGridHalfWidth + 2.0 * kShapeGridHalfWidth * static_cast<double>(k) /
                                                static_cast<double>(kShapeGridPoints - 1);
    sup = std::max(sup, std::abs(profile(p, s * rn) / rn - limit_shape_omega(s)));
  }
  return sup;
}

inline TrialReport cmd_limit_shape(const ExperimentSpec& spec, unsigned workers = 1) {
  spec.validate();
  if (spec.poissonised()) throw Error(ErrorCode::BadParameter, "limit-shape needs fixed-n mode");
  const std::int64_t e = spec.e;
  const auto ue = static_cast<std::size_t>(e);
  const TrialBatch batch = run_trials(spec.sampler(), e, Collect{true}, workers);
  const double n = spec.scale_parameter();
  const double rn = std::sqrt(n);

  std::vector<double> sup(batch.records.size());
  std::vector<double> row(batch.records.size());
  std::vector<double> col(batch.records.size());
  parallel_for(static_cast<std::int64_t>(batch.records.size()), workers, [&](std::int64_t r) {
    const auto& p = *batch.records[static_cast<std::size_t>(r)].partition;
    sup[static_cast<std::size_t>(r)] = shape_distance(p);
    row[static_cast<std::size_t>(r)] = static_cast<double>(p.first_part()) / rn;
    col[static_cast<std::size_t>(r)] = static_cast<double>(p.length()) / rn;
  });

  Table shape{{"trial", "sup_distance", "first_row", "first_column"}, {}};
  for (std::size_t r = 0; r < sup.size(); ++r) shape.rows.push_back({static_cast<std::int64_t>(r), sup[r], row[r], col[r]});

  double worst_ci = 0.0;
  for (std::size_t i = 0; i < ue; ++i) {
    std::vector<double> gap(batch.records.size());
    for (std::size_t r = 0; r < gap.size(); ++r) {
      const auto c = residue_counts(*batch.records[r].partition, e);
      gap[r] = std::abs(static_cast<double>(c[i]) / n - 1.0 / static_cast<double>(e));
    }
    worst_ci = std::max(worst_ci, median(gap));
  }

  TrialReport rep;
  rep.spec = spec;
  rep.info.emplace_back("thresholds", kThresholdNote);
  rep.info.emplace_back("grid", "1201 points on [-3, 3]");
  rep.checks.push_back(make_check("median_sup_profile_distance", median(sup), 0.0, spec.thresholds.shape_sup));
  rep.checks.push_back(make_check("max_i_median_abs_ci_over_n_minus_1_over_e", worst_ci, 0.0, spec.thresholds.shape_ci));
  rep.checks.push_back(make_check("median_first_row_over_sqrt_n", median(row), 2.0, spec.thresholds.shape_endpoint));
  rep.checks.push_back(make_check("median_first_column_over_sqrt_n", median(col), 2.0, spec.thresholds.shape_endpoint));

  if (!spec.out.empty()) {
    const auto& p = *batch.records.front().partition;
    Table prof{{"s", "profile", "limit"}, {}};
    for (std::int64_t k = 0; k < kShapeGridPoints; ++k) {
      const double s = -kShapeGridHalfWidth + 2.0 * kShapeGridHalfWidth * static_cast<double>(k) /
                                                  static_cast<double>(kShapeGridPoints - 1);
      prof.rows.push_back({s, profile(p, s * rn) / rn, limit_shape_omega(s)});
    }
    write_table_file(output_file(spec, "profile"), prof, spec.format);
    write_table_file(output_file(spec, "shape"), shape, spec.format);
    write_report(rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// tables

struct TablesOptions {
  std::filesystem::path out;
  Format format = Format::Csv;
  std::int64_t cdf_points = 0;  // 0: no CDF grid dump
  double cdf_lo = 0.0;
  double cdf_hi = 5.0;
};

/// Writes covariance, eigenvalues, Re L_k, Gamma scales (and optionally a CDF
/// grid) for every e. Returns the files written; an empty list writes nothing.
inline std::vector<std::filesystem::path> cmd_tables(std::span<const std::int64_t> e_list, const TablesOptions& opt) {
  for (auto e : e_list) require_modulus(e);
  if (e_list.empty()) return {};
  Table cov{{"e", "i", "j", "b_ij"}, {}};
  Table eig{{"e", "k", "lambda_k"}, {}};
  Table rel{{"e", "k", "re_L_k"}, {}};
  Table scl{{"e", "k", "scale"}, {}};
  Table cdf{{"e", "x", "cdf"}, {}};
  for (auto e : e_list) {
    const LimitModel m = limit_model(e);
    for (std::int64_t i = 0; i < e; ++i)
      for (std::int64_t j = 0; j < e; ++j) cov.rows.push_back({e, i, j, m(i, j)});
    for (std::int64_t k = 0; k < e; ++k) eig.rows.push_back({e, k, m.eigenvalues[static_cast<std::size_t>(k)]});
    for (std::int64_t k = 1; k < e; ++k) {
      rel.rows.push_back({e, k, re_limd(k, e)});
      scl.rows.push_back({e, k, m.scales[static_cast<std::size_t>(k - 1)]});
    }
    if (opt.cdf_points > 0) {
      const GammaSumLaw law = gamma_sum_law(e);
      const auto ref = gamma_sum_reference(law);
      for (std::int64_t k = 0; k <= opt.cdf_points; ++k) {
        const double x = opt.cdf_lo + (opt.cdf_hi - opt.cdf_lo) * static_cast<double>(k) / static_cast<double>(opt.cdf_points);
        cdf.rows.push_back({e, x, ref->cdf(x)});
      }
    }
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](std::string_view stem, const Table& t) {
    const auto path = opt.out / (std::string(stem) + "." + std::string(extension(opt.format)));
    write_table_file(path, t, opt.format);
    written.push_back(path);
  };
  emit("covariance", cov);
  emit("eigenvalues", eig);
  emit("re_limd", rel);
  emit("gamma_scales", scl);
  if (opt.cdf_points > 0) emit("gamma_cdf", cdf);
  return written;
}

}  // namespace ecore
