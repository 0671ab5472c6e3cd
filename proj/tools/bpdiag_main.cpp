// bpdiag: barren-plateau diagnostics experiment runner.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bpdiag/experiments.hpp"
#include "bpdiag/verify.hpp"

namespace {

std::vector<std::array<int, 3>> parse_dims(const std::vector<std::string>& specs) {
  std::vector<std::array<int, 3>> out;
  for (const auto& s : specs) {
    std::array<int, 3> d{};
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> d[0] >> c1 >> d[1] >> c2 >> d[2]) || c1 != ',' || c2 != ',' || !is.eof()) {
      throw CLI::ValidationError("--dims", "expected d1,d2,d3 but got '" + s + "'");
    }
    out.push_back(d);
  }
  return out;
}

void print_checks(const std::vector<bpdiag::CheckOutcome>& checks) {
  for (const auto& c : checks) {
    std::printf("  %-34s %s  value=%s threshold=%s\n", c.name.c_str(), c.passed ? "ok  " : "FAIL",
                bpdiag::format_double(c.value).c_str(), bpdiag::format_double(c.threshold).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barren-plateau diagnostics: gradient-variance decomposition, bound checks and Haar moments"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  bpdiag::RunConfig cfg;
  std::vector<std::string> dims;
  bool check = false;
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte-Carlo samples per point (>= 100)")->capture_default_str();
  app.add_option("--n-min", cfg.n_min, "Smallest tree size")->capture_default_str();
  app.add_option("--n-max", cfg.n_max, "Largest tree size (<= 14)")->capture_default_str();
  app.add_option("--n-step", cfg.n_step, "Tree size step")->capture_default_str();
  app.add_option("--dims", dims, "example1 register dimensions d1,d2,d3 (repeatable)");
  app.add_option("--dims2", cfg.dims2, "example2 dimensions d (repeatable)")->delimiter(',');
  app.add_option("--out", cfg.out_dir, "Output directory")->envname("BPDIAG_OUT_DIR")->capture_default_str();
  app.add_flag("--dump-pairs", cfg.dump_pairs, "Write raw (t_plus, t_minus) pairs per n (tree-sweep)");
  app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  app.add_option("--bootstrap", cfg.bootstrap_resamples, "Bootstrap resamples")->capture_default_str();
  app.add_option("--haar-samples", cfg.haar_samples, "Haar samples per (k, d) in verify")->capture_default_str();
  app.add_flag("--check", check, "Exit non-zero when any experiment check fails (always on for verify)");

  app.add_subcommand("tree-sweep", "Gradient statistics of tree circuits across n")->fallthrough();
  app.add_subcommand("example1", "Information-loss circuit: Monte-Carlo vs closed form")->fallthrough();
  app.add_subcommand("example2", "Scrambled rotation: Monte-Carlo vs exact Weingarten r")->fallthrough();
  app.add_subcommand("verify", "Run every verification suite")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (!dims.empty()) cfg.dims = parse_dims(dims);
    cfg.validate();

    if (cfg.experiment == "verify") {
      bpdiag::VerifyOptions opts;
      opts.seed = cfg.seed;
      opts.samples = cfg.samples;
      opts.haar_samples = cfg.haar_samples;
      opts.threads = cfg.threads;
      const auto report = bpdiag::run_verify(opts);
      std::filesystem::create_directories(cfg.out_dir);
      nlohmann::json j = report.to_json();
      j["version"] = bpdiag::version_string();
      j["config"] = cfg.to_json();
      const std::string path = cfg.out_dir + "/verify.json";
      std::ofstream(path, std::ios::binary) << j.dump(2) << '\n';
      for (const auto& s : report.suites) {
        std::printf("%-20s %s\n", s.name.c_str(), s.passed() ? "pass" : "FAIL");
        print_checks(s.checks);
      }
      std::printf("wrote %s\n", path.c_str());
      return report.passed() ? 0 : 1;
    }

    bpdiag::RunResult result;
    if (cfg.experiment == "tree-sweep") {
      result = bpdiag::run_tree_sweep(cfg);
    } else if (cfg.experiment == "example1") {
      result = bpdiag::run_example1(cfg);
    } else {
      result = bpdiag::run_example2(cfg);
    }
    bpdiag::write_outputs(cfg, result);
    std::printf("%s: %zu rows -> %s/%s.{csv,json}\n", cfg.experiment.c_str(), result.rows.size(), cfg.out_dir.c_str(),
                cfg.experiment.c_str());
    print_checks(result.checks);
    return (check && !result.passed()) ? 1 : 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
