#include "bpdiag/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bpdiag/weingarten.hpp"

#ifndef BPDIAG_VERSION
#define BPDIAG_VERSION "unknown"
#endif

namespace bpdiag {

namespace {

int log2_exact(int d, const char* what) {
  if (d < 2 || !std::has_single_bit(static_cast<unsigned>(d))) {
    throw std::invalid_argument(std::string(what) + ": dimensions must be powers of two >= 2");
  }
  return std::countr_zero(static_cast<unsigned>(d));
}

SamplingOptions sampling(const RunConfig& c) { return SamplingOptions{c.threads, c.bootstrap_resamples}; }

double relative_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return (*hi - *lo) / mean;
}

CsvRow stats_row(const std::string& experiment, const GradientStatsReport& s, std::uint64_t seed) {
  CsvRow row;
  row.experiment = experiment;
  row.n = s.n_qubits;
  row.n_samples = s.n_samples;
  row.var_grad = s.var_grad.value;
  row.var_grad_se = s.var_grad.se;
  row.second_moment = s.second_moment.value;
  row.second_moment_se = s.second_moment.se;
  row.r = s.corr_r.value;
  row.one_minus_r = s.one_minus_r.value;
  row.one_minus_r_se = s.one_minus_r.se;
  row.identity_z = s.identity_z;
  row.seed = seed;
  return row;
}

CheckOutcome at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckOutcome at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value >= threshold, value, threshold, std::move(detail)};
}

nlohmann::json to_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

nlohmann::json to_json(const BatchBoundResult& b) {
  nlohmann::json batches = nlohmann::json::array();
  for (const auto& t : b.batches) {
    batches.push_back({{"gamma", t.gamma}, {"norm_sq", t.norm_sq}, {"bound", to_json(t.bound)}});
  }
  return {{"var_grad", to_json(b.var_grad)}, {"total_bound", to_json(b.total_bound)}, {"ratio", b.ratio},
          {"margin_z", b.margin_z}, {"holds", b.holds}, {"n_samples", b.n_samples}, {"batches", batches}};
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> known{"tree-sweep", "example1", "example2", "verify"};
  if (std::find(known.begin(), known.end(), experiment) == known.end()) {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  if (samples < kMinSamples) throw std::invalid_argument("samples must be >= 100");
  if (n_step < 1) throw std::invalid_argument("n-step must be >= 1");
  if (n_min < 3 || n_max > 14 || n_min > n_max) throw std::invalid_argument("n range must satisfy 3 <= n-min <= n-max <= 14");
  if (bootstrap_resamples < 2) throw std::invalid_argument("bootstrap resamples must be >= 2");
  for (const auto& d : dims) {
    int total = 0;
    for (int v : d) total += log2_exact(v, "--dims");
    if (total > 14) throw std::invalid_argument("--dims: d1 d2 d3 exceeds 2^14");
    if (log2_exact(d[1], "--dims") + log2_exact(d[2], "--dims") > kMaxLightCone) {
      throw std::invalid_argument("--dims: d2 d3 exceeds the light-cone limit 2^10");
    }
  }
  for (int d : dims2) {
    if (log2_exact(d, "--dims2") > 7) throw std::invalid_argument("--dims2: d must be <= 128");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json d = nlohmann::json::array();
  for (const auto& t : dims) d.push_back({t[0], t[1], t[2]});
  return {{"experiment", experiment}, {"seed", seed}, {"samples", samples}, {"n_min", n_min}, {"n_max", n_max},
          {"n_step", n_step}, {"dims", d}, {"dims2", dims2}, {"out_dir", out_dir}, {"dump_pairs", dump_pairs},
          {"threads", threads}, {"bootstrap_resamples", bootstrap_resamples}, {"haar_samples", haar_samples}};
}

std::string csv_header() {
  return "experiment,n,dim1,dim2,dim3,n_samples,var_grad,var_grad_se,second_moment,second_moment_se,r,one_minus_r,"
         "one_minus_r_se,identity_z,seed";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_csv_row(const CsvRow& row) {
  std::string out = row.experiment;
  auto add_int = [&out](const std::optional<int>& v) {
    out += ',';
    if (v) out += std::to_string(*v);
  };
  auto add = [&out](const std::optional<double>& v) {
    out += ',';
    if (v) out += format_double(*v);
  };
  add_int(row.n);
  add_int(row.dim1);
  add_int(row.dim2);
  add_int(row.dim3);
  out += ',' + std::to_string(row.n_samples);
  for (const auto* v : {&row.var_grad, &row.var_grad_se, &row.second_moment, &row.second_moment_se, &row.r,
                        &row.one_minus_r, &row.one_minus_r_se, &row.identity_z}) {
    add(*v);
  }
  out += ',' + std::to_string(row.seed);
  return out;
}

nlohmann::json to_json(const CheckOutcome& c) {
  nlohmann::json j{{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

nlohmann::json to_json(const GradientStatsReport& r) {
  return {{"ensemble", r.ensemble}, {"n_qubits", r.n_qubits}, {"n_samples", r.n_samples}, {"seed", r.seed},
          {"u", r.u}, {"pooled_center", r.pooled_center}, {"var_grad", to_json(r.var_grad)},
          {"second_moment", to_json(r.second_moment)}, {"cross_moment", to_json(r.cross_moment)},
          {"corr_r", to_json(r.corr_r)}, {"one_minus_r", to_json(r.one_minus_r)},
          {"mean_center", to_json(r.mean_center)}, {"identity_residual", r.identity_residual},
          {"identity_z", r.identity_z}};
}

nlohmann::json to_json(const SlopeFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"slope_se", f.slope_se},
          {"n_points", f.n_points}};
}

bool RunResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view experiment, int n) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the experiment name
  for (char ch : experiment) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001B3ULL;
  return mix64(seed ^ mix64(h + static_cast<std::uint64_t>(n)));
}

std::string version_string() { return BPDIAG_VERSION; }

void write_pairs(const std::string& path, const std::vector<ShiftTriple>& triples) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t_plus,t_minus\n";
  for (const auto& t : triples) f << format_double(t.t_plus) << ',' << format_double(t.t_minus) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path);
}

RunResult run_tree_sweep(const RunConfig& config) {
  config.validate();
  RunResult res;
  std::vector<double> ns, var, omr, second;
  nlohmann::json reports = nlohmann::json::array();
  if (config.dump_pairs) std::filesystem::create_directories(config.out_dir);
  for (int n = config.n_min; n <= config.n_max; n += config.n_step) {
    const std::uint64_t seed = derive_seed(config.seed, "tree-sweep", n);
    std::vector<ShiftTriple> triples;
    const auto stats = estimate_stats(tree_ensemble(n), config.samples, seed, sampling(config), triples);
    if (config.dump_pairs) write_pairs(config.out_dir + "/pairs_n" + std::to_string(n) + ".csv", triples);
    res.rows.push_back(stats_row("tree-sweep", stats, config.seed));
    reports.push_back(to_json(stats));
    ns.push_back(n);
    var.push_back(stats.var_grad.value);
    omr.push_back(stats.one_minus_r.value);
    second.push_back(stats.second_moment.value);
    res.checks.push_back(at_most("identity_n" + std::to_string(n), std::abs(stats.identity_z), 3.0,
                                 "|identity_z| of the variance decomposition"));
  }
  nlohmann::json fits = nlohmann::json::object();
  if (ns.size() >= 3) {
    const auto fv = slope_fit(ns, var);
    const auto fo = slope_fit(ns, omr);
    const auto fs = slope_fit(ns, second);
    fits = {{"log10_var_grad", to_json(fv)}, {"log10_one_minus_r", to_json(fo)}, {"log10_second_moment", to_json(fs)}};
    res.checks.push_back(at_most("var_grad_slope_negative", fv.slope, 0.0));
    res.checks.push_back(at_least("var_grad_fit_r_squared", fv.r_squared, 0.9));
    res.checks.push_back(at_most("slopes_agree", std::abs(fv.slope - fo.slope) / std::abs(fv.slope), 0.2,
                                 "relative difference of the log10 var_grad and log10(1-r) slopes"));
    const double span = ns.back() - ns.front();
    res.checks.push_back(at_most("second_moment_flat", std::abs(fs.slope) * span, 0.5 * std::abs(fv.slope) * span,
                                 "fitted change of log10 second_moment vs half the fitted var_grad drop"));
  }
  res.summary = {{"experiment", "tree-sweep"}, {"reports", reports}, {"fits", fits}};
  return res;
}

RunResult run_example1(const RunConfig& config) {
  config.validate();
  RunResult res;
  nlohmann::json entries = nlohmann::json::array();
  std::vector<double> mc_omr, mc_second, d1s;
  for (const auto& d : config.dims) {
    const int n1 = log2_exact(d[0], "--dims"), n2 = log2_exact(d[1], "--dims"), n3 = log2_exact(d[2], "--dims");
    const std::uint64_t seed = derive_seed(config.seed, "example1", d[0] * 10000 + d[1] * 100 + d[2]);
    const Ensemble ens = example1_ensemble(n1, n2, n3);
    const auto stats = estimate_stats(ens, config.samples, seed, sampling(config));
    const auto exact = example1_closed_form(d[0], d[1], d[2]);
    const Example1Layout layout{n1, n2, n3};
    const auto bound = check_info_loss_bound(ens, {PauliTerm{1.0, example1_default_observable(layout)}},
                                             config.samples, seed ^ 0x5A5A5A5AULL, sampling(config));

    CsvRow row = stats_row("example1", stats, config.seed);
    row.dim1 = d[0];
    row.dim2 = d[1];
    row.dim3 = d[2];
    res.rows.push_back(row);

    const double se = stats.one_minus_r.se;
    const double z_exact = (stats.one_minus_r.value - exact.one_minus_r_exact) / se;
    const double z_displayed = (stats.one_minus_r.value - exact.one_minus_r_displayed) / se;
    const std::string tag = std::to_string(d[0]) + "_" + std::to_string(d[1]) + "_" + std::to_string(d[2]);
    res.checks.push_back(at_most("mc_vs_exact_moments_" + tag, std::abs(z_exact), 5.0,
                                 "|z| of Monte-Carlo 1-r against the ratio of the exact moment expressions"));
    res.checks.push_back(at_most("mc_vs_displayed_ratio_" + tag, std::abs(z_displayed), 5.0,
                                 "|z| of Monte-Carlo 1-r against the simplified displayed ratio"));
    res.checks.push_back(at_least("info_loss_bound_" + tag, bound.margin_z, -kBoundSigma));
    entries.push_back({{"dims", {d[0], d[1], d[2]}},
                       {"dimension_constraint_d2_le_d3_half", 2 * d[1] <= d[2]},
                       {"stats", to_json(stats)},
                       {"closed_form",
                        {{"b_U", exact.b_u}, {"c_U", exact.c_u}, {"b_V", exact.b_v}, {"c_V", exact.c_v},
                         {"b_V_prime", exact.b_v_prime}, {"c_V_prime", exact.c_v_prime},
                         {"second_moment", exact.second_moment}, {"cross_moment", exact.cross_moment},
                         {"one_minus_r_exact", exact.one_minus_r_exact},
                         {"one_minus_r_displayed", exact.one_minus_r_displayed}}},
                       {"z_vs_exact", z_exact},
                       {"z_vs_displayed", z_displayed},
                       {"info_loss_bound", to_json(bound)}});
    mc_omr.push_back(stats.one_minus_r.value);
    mc_second.push_back(stats.second_moment.value);
    d1s.push_back(d[0]);
  }
  // Halving checks along consecutive doublings of d1 with d2, d3 fixed.
  for (std::size_t i = 1; i < config.dims.size(); ++i) {
    const auto& a = config.dims[i - 1];
    const auto& b = config.dims[i];
    if (b[0] == 2 * a[0] && b[1] == a[1] && b[2] == a[2]) {
      const double ratio = mc_omr[i] / mc_omr[i - 1];
      res.checks.push_back({"halving_d1_" + std::to_string(a[0]) + "_to_" + std::to_string(b[0]),
                            std::abs(ratio - 0.5) <= 0.15, ratio, 0.5, "ratio of 1-r under d1 doubling; pass within 30% of 1/2"});
    }
  }
  if (mc_second.size() >= 2) {
    res.checks.push_back(at_most("second_moment_spread", relative_spread(mc_second), 0.3,
                                 "(max - min) / mean of the Monte-Carlo second moment across d1"));
  }
  res.summary = {{"experiment", "example1"}, {"entries", entries}};
  return res;
}

RunResult run_example2(const RunConfig& config) {
  config.validate();
  RunResult res;
  nlohmann::json entries = nlohmann::json::array();
  std::vector<double> scaled;
  for (int d : config.dims2) {
    const int n = log2_exact(d, "--dims2");
    const std::uint64_t seed = derive_seed(config.seed, "example2", d);
    const auto stats = estimate_stats(example2_ensemble(n), config.samples, seed, sampling(config));
    CsvRow row = stats_row("example2", stats, config.seed);
    row.dim1 = d;
    res.rows.push_back(row);
    const double product = d * stats.one_minus_r.value;
    scaled.push_back(product);
    nlohmann::json e{{"d", d}, {"stats", to_json(stats)}, {"d_times_one_minus_r", product}};
    if (n <= 6) {
      const auto gen = example2_default_generator(n);
      const auto obs = example2_default_observable(n);
      const auto psi = example2_input_state(n);
      const auto exact = example2_exact_r(gen, obs, psi);
      const auto paired = example2_exact_r_trace_pairing(gen, obs, psi);
      const double z = (stats.corr_r.value - exact.r) / stats.corr_r.se;
      e["exact"] = {{"r", exact.r}, {"one_minus_r", exact.one_minus_r}, {"numerator", exact.numerator},
                    {"denominator", exact.denominator}, {"pseudo_inverse", exact.pseudo_inverse},
                    {"trace_pairing_r", paired.r}, {"z_mc_vs_exact", z}};
      if (!exact.pseudo_inverse) {
        res.checks.push_back(at_most("exact_vs_mc_d" + std::to_string(d), std::abs(z), 5.0,
                                     "|z| of Monte-Carlo r against the Weingarten value"));
      }
      res.checks.push_back(at_most("exact_routes_agree_d" + std::to_string(d), std::abs(exact.r - paired.r), 1e-10));
    }
    entries.push_back(std::move(e));
  }
  if (scaled.size() >= 2) {
    res.checks.push_back(at_most("d_times_one_minus_r_spread", relative_spread(scaled), 0.3,
                                 "(max - min) / mean of d (1 - r)"));
  }
  res.summary = {{"experiment", "example2"}, {"entries", entries}};
  return res;
}

void write_outputs(const RunConfig& config, const RunResult& result) {
  std::filesystem::create_directories(config.out_dir);
  const std::string base = config.out_dir + "/" + config.experiment;
  if (!result.rows.empty()) {
    std::ofstream csv(base + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + base + ".csv");
    csv << csv_header() << '\n';
    for (const auto& r : result.rows) csv << format_csv_row(r) << '\n';
    if (!csv) throw std::runtime_error("write failed: " + base + ".csv");
  }
  nlohmann::json summary = result.summary;
  summary["version"] = version_string();
  summary["config"] = config.to_json();
  summary["checks"] = nlohmann::json::array();
  for (const auto& c : result.checks) summary["checks"].push_back(to_json(c));
  summary["passed"] = result.passed();
  std::ofstream js(base + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot open " + base + ".json");
  js << summary.dump(2) << '\n';
  if (!js) throw std::runtime_error("write failed: " + base + ".json");
}

}  // namespace bpdiag
