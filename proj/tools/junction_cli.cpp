// Command-line front end: validate coefficient data and test functions,
// simulate ensembles, run local-time estimators, Ito residual checks, and
// the named experiments. All output is CSV/JSON under --out.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "junction/config.hpp"
#include "junction/engine.hpp"
#include "junction/experiments.hpp"
#include "junction/io.hpp"
#include "junction/ito.hpp"
#include "junction/local_time.hpp"
#include "junction/path_metrics.hpp"
#include "junction/test_functions.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  long long seed = -1;
  int workers = 0;
  std::string format = "csv";
};

junction::ExperimentConfig load(const CommonOpts& opts) {
  auto cfg = junction::ExperimentConfig::from_config(
      junction::ConfigFile::parse_file(opts.config));
  if (opts.seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.workers > 0) cfg.workers = opts.workers;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (!opts.format.empty()) cfg.format = opts.format;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "configuration file")->required();
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--workers", opts.workers,
                  "worker threads (default: JUNCTION_SIM_WORKERS or 1)");
  cmd->add_option("--format", opts.format, "path dump format: csv or binary")
      ->check(CLI::IsMember({"csv", "binary"}));
}

void write_json(const std::string& dir, const std::string& name,
                const nlohmann::ordered_json& j) {
  if (dir.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(dir);
  std::ofstream os(dir + "/" + name, std::ios::binary);
  os << j.dump(2) << '\n';
  std::cout << "wrote " << dir << "/" << name << '\n';
}

int cmd_validate(const CommonOpts& opts) {
  const auto cfg = load(opts);
  junction::FieldGrid grid;
  grid.x_max = cfg.sim.x0 + 6.0 * cfg.sim.field.diffusion_bound() *
                                std::sqrt(cfg.sim.horizon);
  const auto field_report =
      junction::validate_field(cfg.sim.field, cfg.sim.alpha, grid);
  nlohmann::ordered_json j;
  j["field"] = field_report.to_json();
  auto fns = nlohmann::ordered_json::array();
  bool fn_pass = true;
  for (const std::string& name : cfg.functions) {
    const auto f =
        junction::make_test_function(name, cfg.sim.field.edge_count());
    const auto report = junction::validate_test_function(f, cfg.sim.horizon);
    fn_pass = fn_pass && report.all_pass;
    fns.push_back({{"function", name}, {"report", report.to_json()}});
  }
  j["test_functions"] = fns;
  j["all_pass"] = field_report.all_pass && fn_pass;
  write_json(opts.out, "validation.json", j);
  std::cout << (j["all_pass"].get<bool>() ? "PASS" : "FAIL") << '\n';
  return j["all_pass"].get<bool>() ? 0 : 1;
}

int cmd_simulate(const CommonOpts& opts, std::size_t n_paths_flag) {
  auto cfg = load(opts);
  const std::size_t n = n_paths_flag > 0 ? n_paths_flag : cfg.n_paths;
  const auto ensemble = junction::simulate_batch(cfg.sim, n, cfg.workers);
  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  if (cfg.format == "binary") {
    junction::write_ensemble_pack_file(dir + "/paths.jpke", ensemble.paths);
  } else {
    for (std::size_t i = 0; i < ensemble.paths.size(); ++i)
      junction::write_path_csv_file(dir + "/path_" + std::to_string(i) + ".csv",
                                    ensemble.paths[i]);
  }
  std::ofstream os(dir + "/manifest.json", std::ios::binary);
  os << junction::ensemble_manifest(cfg.sim, n, cfg.format).dump(2) << '\n';
  std::cout << "wrote " << n << " paths under " << dir << '\n';
  return 0;
}

int cmd_localtime(const CommonOpts& opts) {
  auto cfg = load(opts);
  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const auto path = junction::simulate_delta_path(cfg.sim, 0);
  const double eps = cfg.epsilons.empty() ? 0.05 : cfg.epsilons.back();

  const auto jc = junction::jump_count_local_time(path);
  const auto occ =
      junction::occupation_local_time(path, cfg.sim.field, cfg.sim.alpha, eps);
  const auto phi =
      junction::phi_decomposition_local_time(path, cfg.sim.field, eps);
  junction::write_series_csv_file(dir + "/jump_count.csv", jc);
  junction::write_series_csv_file(dir + "/occupation.csv", occ);
  junction::write_series_csv_file(dir + "/phi_decomposition.csv", phi);
  if (!cfg.subset.empty()) {
    junction::write_series_csv_file(
        dir + "/occupation_subset.csv",
        junction::occupation_local_time(path, cfg.sim.field, cfg.sim.alpha, eps,
                                        cfg.subset));
  }
  nlohmann::ordered_json j;
  j["epsilon"] = eps;
  j["delta"] = cfg.sim.delta;
  j["final_jump_count"] = jc.value.back();
  j["final_occupation"] = occ.value.back();
  j["final_phi_decomposition"] = phi.value.back();
  j["mean_abs_gap"] = std::fabs(occ.value.back() - jc.value.back());
  write_json(dir, "localtime.json", j);
  return 0;
}

int cmd_ito(const CommonOpts& opts) {
  auto cfg = load(opts);
  const std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  std::filesystem::create_directories(dir);
  const auto path = junction::simulate_delta_path(cfg.sim, 0);
  const auto l = junction::jump_count_local_time(path);
  for (const std::string& name : cfg.functions) {
    const auto f =
        junction::make_test_function(name, cfg.sim.field.edge_count());
    for (auto mode : {junction::ResidualMode::against_local_time,
                      junction::ResidualMode::against_stochastic_integral}) {
      const auto series =
          junction::ito_residual(path, f, cfg.sim.field, cfg.sim.alpha, l, mode);
      const std::string suffix =
          mode == junction::ResidualMode::against_local_time ? "local_time"
                                                             : "stochastic";
      junction::write_residual_csv_file(
          dir + "/residual_" + name + "_" + suffix + ".csv", series);
    }
  }
  std::cout << "wrote residual series under " << dir << '\n';
  return 0;
}

int cmd_experiment(const CommonOpts& opts) {
  const auto cfg = load(opts);
  const auto record = junction::run_experiment(cfg);
  for (const auto& flag : record.flags)
    std::cout << (flag.pass ? "[PASS] " : "[FAIL] ") << flag.check
              << " observed=" << flag.observed
              << " threshold=" << flag.threshold << '\n';
  std::cout << (record.all_pass ? "ALL PASS" : "FAILURES PRESENT") << '\n';
  return record.all_pass ? 0 : 1;
}

int cmd_report(const std::string& dir) {
  namespace fs = std::filesystem;
  bool any = false, all_pass = true;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.path().filename() != "summary.json") continue;
    any = true;
    std::ifstream is(entry.path());
    nlohmann::json j;
    is >> j;
    const bool pass = j.value("all_pass", false);
    all_pass = all_pass && pass;
    std::cout << (pass ? "[PASS] " : "[FAIL] ")
              << j.value("experiment", std::string("?")) << "  ("
              << entry.path().string() << ")\n";
    for (const auto& flag : j["flags"])
      if (!flag.value("pass", true))
        std::cout << "   failed: " << flag.value("check", std::string("?"))
                  << " observed=" << flag.value("observed", 0.0) << '\n';
  }
  if (!any) {
    std::cerr << "no summary.json found under " << dir << '\n';
    return 2;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion on a star junction: simulation and diagnostics"};
  app.require_subcommand(1);

  CommonOpts validate_opts, simulate_opts, localtime_opts, ito_opts,
      experiment_opts;
  std::size_t n_paths_flag = 0;
  std::string report_dir;

  add_common(app.add_subcommand("validate",
                                "check coefficient bounds and test functions"),
             validate_opts);
  auto* sim_cmd =
      app.add_subcommand("simulate", "write a path ensemble with manifest");
  add_common(sim_cmd, simulate_opts);
  sim_cmd->add_option("--paths", n_paths_flag, "number of paths (override)");
  add_common(app.add_subcommand("localtime",
                                "local-time estimator series for one path"),
             localtime_opts);
  add_common(app.add_subcommand("ito", "Ito residual series for one path"),
             ito_opts);
  add_common(app.add_subcommand("experiment", "run a named experiment"),
             experiment_opts);
  auto* report_cmd =
      app.add_subcommand("report", "summarize experiment outputs");
  report_cmd->add_option("--out", report_dir, "directory to scan")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(validate_opts);
    if (app.got_subcommand("simulate"))
      return cmd_simulate(simulate_opts, n_paths_flag);
    if (app.got_subcommand("localtime")) return cmd_localtime(localtime_opts);
    if (app.got_subcommand("ito")) return cmd_ito(ito_opts);
    if (app.got_subcommand("experiment")) return cmd_experiment(experiment_opts);
    if (app.got_subcommand("report")) return cmd_report(report_dir);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
