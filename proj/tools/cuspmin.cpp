// cuspmin: run one named experiment, write report.json and CSV series.
//
//   cuspmin <experiment> [--config PATH] [--out DIR] [--seed N] [--fixed-clock]
//
// Exit codes: 0 all checks pass, 1 a check failed (report written), 2 usage or
// configuration error (no report).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cuspmin/cuspmin.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool fixed_clock = false;
};

nlohmann::json load_config(const std::string& experiment, const Options& opt) {
  nlohmann::json j = nlohmann::json::object();
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw cuspmin::ConfigError("cannot read config " + opt.config);
    j = nlohmann::json::parse(in);
    if (!j.is_object()) throw cuspmin::ConfigError("config must be a JSON object");
  }
  if (j.contains("experiment") && j.at("experiment") != experiment) {
    throw cuspmin::ConfigError("config is for '" + j.at("experiment").dump() + "', not '" + experiment + "'");
  }
  j["experiment"] = experiment;
  if (opt.seed) j["seed"] = *opt.seed;
  return j;
}

void print_summary(const cuspmin::RunReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%-4s %-40s measured=%.10g expected=%.10g tol=%.3g (%s)\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                c.measured, c.expected, c.tolerance, cuspmin::to_string(c.provenance).c_str());
  }
  std::printf("%s: %s in %.2f s\n", r.experiment.c_str(), r.passed() ? "PASS" : "FAIL", r.seconds);
}

int run_experiment(const std::string& experiment, const Options& opt) {
  cuspmin::ExperimentConfig cfg;
  try {
    const nlohmann::json j = load_config(experiment, opt);
    const fs::path base = opt.config.empty() ? fs::current_path() : fs::absolute(opt.config).parent_path();
    cfg = cuspmin::experiment_config_from_json(j, base);
    fs::create_directories(opt.out);
  } catch (const std::exception& e) {
    std::cerr << "cuspmin: " << e.what() << '\n';
    return kExitUsage;
  }

  cuspmin::RunReport report;
  try {
    report = cuspmin::run(cfg, opt.out);
  } catch (const cuspmin::ConfigError& e) {
    std::cerr << "cuspmin: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cuspmin::ArgumentError& e) {
    std::cerr << "cuspmin: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "cuspmin: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    // A numerical failure mid-run is a failed check, not a usage error.
    report = cuspmin::RunReport{};
    report.experiment = cfg.name;
    report.config = cfg.raw;
    report.add(cuspmin::check_true("run.completed", false, cuspmin::Provenance::recorded));
    report.results["error"] = e.what();
  }

  try {
    std::ofstream out(fs::path(opt.out) / "report.json", std::ios::binary);
    if (!out) throw cuspmin::IoError("cannot write report.json in " + opt.out);
    out << cuspmin::report_json(report, opt.fixed_clock).dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "cuspmin: " << e.what() << '\n';
    return kExitFail;
  }
  print_summary(report);
  return report.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on minimal surfaces in cusped hyperbolic 3-manifolds"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  for (const auto& name : cuspmin::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory for report.json and CSV files");
    sub->add_option("--seed", opt.seed, "random seed, overrides the config");
    sub->add_flag("--fixed-clock", opt.fixed_clock, "write timing as 0 for byte-identical reports");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run_experiment(chosen, opt);
}
