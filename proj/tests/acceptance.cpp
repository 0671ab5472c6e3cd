// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bpdiag/experiments.hpp"
#include "bpdiag/verify.hpp"
#include "bpdiag/weingarten.hpp"

namespace {

using bpdiag::CheckOutcome;

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<CheckOutcome> gating;
  std::vector<CheckOutcome> info;
  double seconds = 0;
  double time_limit = 0;
  bool passed() const {
    for (const auto& c : gating) {
      if (!c.passed) return false;
    }
    return seconds <= time_limit;
  }
};

std::vector<CheckOutcome> pick(const std::vector<CheckOutcome>& checks, const std::vector<std::string>& names) {
  std::vector<CheckOutcome> out;
  for (const auto& name : names) {
    bool found = false;
    for (const auto& c : checks) {
      if (c.name == name) {
        out.push_back(c);
        found = true;
      }
    }
    if (!found) out.push_back({name, false, std::nan(""), std::nan(""), "check missing"});
  }
  return out;
}

std::vector<CheckOutcome> with_prefix(const std::vector<CheckOutcome>& checks, const std::string& prefix) {
  std::vector<CheckOutcome> out;
  for (const auto& c : checks) {
    if (c.name.rfind(prefix, 0) == 0) out.push_back(c);
  }
  return out;
}

void timed(Criterion& c, const std::function<void(Criterion&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.gating.push_back({"exception", false, std::nan(""), std::nan(""), e.what()});
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_line(const char* tag, const CheckOutcome& c) {
  std::printf("    %-5s %-34s %s value=%s threshold=%s%s%s\n", tag, c.name.c_str(), c.passed ? "ok  " : "FAIL",
              bpdiag::format_double(c.value).c_str(), bpdiag::format_double(c.threshold).c_str(),
              c.detail.empty() ? "" : "  # ", c.detail.c_str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli, work = "acceptance_work";
  std::uint64_t seed = 1234;
  int threads = 0;
  app.add_option("--cli", cli, "Path to the bpdiag executable")->required();
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(work);

  bpdiag::VerifyOptions vo;
  vo.seed = seed;
  vo.threads = threads;

  std::vector<Criterion> crit;

  {
    Criterion c{1, "variance decomposition identity, tree n in {3,5,7}, 10^4 samples", {}, {}, 0, 120};
    timed(c, [&](Criterion& c) {
      auto o = vo;
      o.samples = 10000;
      c.gating = with_prefix(bpdiag::suite_variance_identity(o).checks, "tree_n");
    });
    crit.push_back(std::move(c));
  }
  {
    Criterion c{2, "tree-sweep decay, n = 3..13 step 2, 4096 samples", {}, {}, 0, 600};
    timed(c, [&](Criterion& c) {
      bpdiag::RunConfig rc;
      rc.experiment = "tree-sweep";
      rc.seed = seed;
      rc.threads = threads;
      rc.out_dir = work + "/tree";
      const auto r = bpdiag::run_tree_sweep(rc);
      bpdiag::write_outputs(rc, r);
      c.gating = pick(r.checks, {"var_grad_slope_negative", "var_grad_fit_r_squared", "slopes_agree", "second_moment_flat"});
      c.info = with_prefix(r.checks, "identity_n");
    });
    crit.push_back(std::move(c));
  }
  {
    Criterion c{3, "information-loss closed form, (d1,2,4), d1 in {4,8,16}", {}, {}, 0, 300};
    timed(c, [&](Criterion& c) {
      bpdiag::RunConfig rc;
      rc.experiment = "example1";
      rc.seed = seed;
      rc.threads = threads;
      rc.out_dir = work + "/example1";
      const auto r = bpdiag::run_example1(rc);
      bpdiag::write_outputs(rc, r);
      c.gating = with_prefix(r.checks, "mc_vs_displayed_ratio_");
      const auto cf = bpdiag::example1_closed_form(16, 2, 4);
      c.gating.push_back({"closed_form_16_2_4_equals_one_third", std::abs(cf.one_minus_r_displayed - 1.0 / 3.0) <= 1e-12,
                          cf.one_minus_r_displayed, 1.0 / 3.0, "displayed ratio"});
      for (const auto& h : with_prefix(r.checks, "halving_")) c.gating.push_back(h);
      for (const auto& h : pick(r.checks, {"second_moment_spread"})) c.gating.push_back(h);
      c.info = with_prefix(r.checks, "mc_vs_exact_moments_");
      c.info.push_back({"exact_moment_ratio_16_2_4", true, cf.one_minus_r_exact, 1.0 / 3.0,
                        "1 - E[t+ t-]/E[t^2] from the moment expressions"});
    });
    crit.push_back(std::move(c));
  }
  {
    Criterion c{4, "scrambled rotation, d in {4,8,16,32}, 10^4 samples", {}, {}, 0, 300};
    timed(c, [&](Criterion& c) {
      bpdiag::RunConfig rc;
      rc.experiment = "example2";
      rc.seed = seed;
      rc.threads = threads;
      rc.samples = 10000;
      rc.out_dir = work + "/example2";
      const auto r = bpdiag::run_example2(rc);
      bpdiag::write_outputs(rc, r);
      c.gating = pick(r.checks, {"d_times_one_minus_r_spread", "exact_vs_mc_d4", "exact_vs_mc_d8"});
      c.info = pick(r.checks, {"exact_vs_mc_d16", "exact_vs_mc_d32"});
      for (const auto& x : with_prefix(r.checks, "exact_routes_agree_")) c.info.push_back(x);
    });
    crit.push_back(std::move(c));
  }
  bpdiag::SuiteResult bounds;
  {
    Criterion c{5, "observable-concentration bound", {}, {}, 0, 600};
    timed(c, [&](Criterion& c) {
      bounds = bpdiag::suite_bounds(vo);
      c.gating = pick(bounds.checks, {"oc_tree_n5", "oc_single_qubit", "clifford_twirl_closed_form", "clifford_twirl_ratio"});
    });
    crit.push_back(std::move(c));
  }
  {
    Criterion c{6, "information-loss and batch bounds, K in {1,2}", {}, {}, 0, 600};
    timed(c, [&](Criterion& c) {
      c.gating = pick(bounds.checks, {"info_loss_tree_n5_k1", "batch_tree_n5_k2", "info_loss_example1_k1", "batch_example1_k2"});
    });
    c.seconds = crit.back().seconds;
    crit.push_back(std::move(c));
  }
  {
    Criterion c{7, "Weingarten twirl vs Haar Monte-Carlo, k in {2,3,4}, d in {k..6}", {}, {}, 0, 1800};
    timed(c, [&](Criterion& c) {
      auto o = vo;
      o.haar_samples = 100000;
      c.gating = bpdiag::suite_haar_moments(o).checks;
      for (const auto& x : pick(bpdiag::suite_weingarten_tables(o).checks, {"k2_closed_form", "shift_trace_identity"})) {
        c.gating.push_back(x);
      }
    });
    crit.push_back(std::move(c));
  }
  {
    Criterion c{8, "determinism, tree-sweep CSV byte-identical across runs", {}, {}, 0, 600};
    timed(c, [&](Criterion& c) {
      const std::string args = " tree-sweep --seed " + std::to_string(seed) + " --n-min 3 --n-max 9 --samples 1000";
      std::vector<std::string> csv;
      for (const char* run : {"det_a", "det_b"}) {
        const std::string dir = work + "/" + run;
        std::filesystem::remove_all(dir);
        const std::string cmd = "\"" + cli + "\"" + args + " --out \"" + dir + "\" > \"" + dir + ".log\" 2>&1";
        const int rc = std::system(cmd.c_str());
        c.info.push_back({std::string("exit_status_") + run, rc == 0, double(rc), 0, cmd});
        csv.push_back(slurp(dir + "/tree-sweep.csv"));
      }
      const bool same = !csv[0].empty() && csv[0] == csv[1];
      c.gating.push_back({"csv_byte_identical", same, double(csv[0].size()), double(csv[1].size()), "sizes in bytes"});
    });
    crit.push_back(std::move(c));
  }

  bool all = true;
  for (const auto& c : crit) {
    std::printf("criterion %d: %s\n", c.id, c.title.c_str());
    for (const auto& x : c.gating) print_line("gate", x);
    for (const auto& x : c.info) print_line("info", x);
    std::printf("    time %.1f s (limit %.0f s)\n", c.seconds, c.time_limit);
  }
  std::printf("\n");
  for (const auto& c : crit) {
    std::printf("CRITERION %d %s  %s\n", c.id, c.passed() ? "PASS" : "FAIL", c.title.c_str());
    all = all && c.passed();
  }
  return all ? 0 : 1;
}
