// Command line front end: one subcommand per experiment plus `all`.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "spfem/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> lambdas;
  std::vector<double> ps;
  int generations = 0;
  std::string out;
  long long seed = -1;
  unsigned workers = 0;
  std::vector<std::string> settings;
};

spfem::ExperimentConfig resolve(const Overrides& o) {
  spfem::ExperimentConfig c = o.config_path.empty() ? spfem::ExperimentConfig{} : spfem::load_config(o.config_path);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw spfem::Error("--set expects key=value, got '" + s + "'");
    spfem::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.lambdas.empty()) c.lambdas = o.lambdas;
  if (!o.ps.empty()) c.ps = o.ps;
  if (o.generations != 0) c.generations = o.generations;
  if (!o.out.empty()) c.out = o.out;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (o.workers != 0) c.workers = o.workers;
  return c;
}

void print_summary(const spfem::ExperimentReport& r, const std::string& out) {
  std::printf("%s: %zu rows -> %s/%s.{csv,json}\n", r.experiment.c_str(), r.rows.size(), out.c_str(),
              r.experiment.c_str());
  for (const auto& c : r.checks)
    std::printf("  [%s] %s: %s\n", spfem::to_string(c.status).c_str(), c.name.c_str(), c.detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-norm finite element experiments on convex polygons"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::string> names = spfem::experiment_names();
  names.push_back("all");
  std::string chosen;
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, name == "all" ? "Run every experiment in order" : "Run " + name);
    sub->add_option("--config", o.config_path, "INI-style key = value file")->check(CLI::ExistingFile);
    sub->add_option("--lambda", o.lambdas, "Weight exponents (comma separated)")->delimiter(',');
    sub->add_option("--p", o.ps, "Integrability exponents (comma separated)")->delimiter(',');
    sub->add_option("--generations", o.generations, "Number of meshes in the refinement family");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for randomized inputs")->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--set", o.settings, "Extra setting key=value (repeatable)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = resolve(o);
    const std::vector<std::string> run = chosen == "all" ? spfem::experiment_names() : std::vector{chosen};
    bool passed = true;
    for (const auto& name : run) {
      const auto report = spfem::run_experiment(name, config);
      spfem::write_report(report, config.out);
      print_summary(report, config.out);
      passed = passed && report.passed();
    }
    return passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spfem: error: %s\n", e.what());
    return 2;
  }
}
