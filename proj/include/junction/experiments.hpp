#pragma once

#include <optional>
#include <string>
#include <vector>

#include "junction/config.hpp"
#include "junction/engine.hpp"
#include "junction/stats.hpp"
#include "json.hpp"

// Named experiments over path ensembles. Each run is deterministic given
// (config, seed): per-path streams are index-derived and every reduction is
// performed in a fixed order, so the summary JSON is byte-identical for any
// worker count.
//
//   edge_occupation        edge frequencies at T against the vertex weights
//   radial_law             KS test of y(T) against the reflected reference
//   local_time_delta_ladder  E[delta N(T)] along a delta ladder
//   estimator_consistency  occupation vs jump-count estimators over epsilons
//   ito_residual           zero-mean checkpoints and refinement of residuals
//   modulus_scaling        moment and modulus-of-continuity envelope ratios
//   exp_moment             exponential moment envelope along a delta ladder
//   vertex_occupation      time near the vertex along an epsilon ladder

namespace junction {

struct LadderPoint {
  double delta = 0.0;
  double step = 0.0;
  std::size_t n_paths = 0;
};

struct ExperimentConfig {
  explicit ExperimentConfig(SimConfig sim_) : sim(std::move(sim_)) {}

  std::string name;
  SimConfig sim;
  std::size_t n_paths = 1000;
  int workers = 1;
  std::string out_dir;
  std::string format = "csv";  // csv | binary, for optional path dumps
  bool write_paths = false;

  // estimator block
  std::vector<LadderPoint> delta_ladder;
  bool x0_tracks_delta = false;
  std::vector<double> epsilons;
  std::vector<int> subset;
  std::vector<double> thetas;

  // ito block
  std::vector<std::string> functions;
  std::vector<double> checkpoints;
  int refine_levels = 3;
  double refine_delta = 0.1;
  double refine_h_factor = 64.0;
  std::size_t refine_paths = 2000;
  double refine_x0 = 0.3;

  // thresholds, echoed into every summary
  double z_max = 3.0;
  double gap_max = 0.05;
  double oracle_rel_max = 0.25;
  double ratio_lo = 0.35;
  double ratio_hi = 0.65;
  double calib_factor = 1.5;

  static ExperimentConfig from_config(const ConfigFile& cfg);
  void validate() const;
};

struct SummaryPoint {
  std::string label;
  double scale = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  nlohmann::ordered_json extra;  // experiment-specific fields
};

struct SummaryFlag {
  std::string check;
  double observed = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct SummaryRecord {
  std::string experiment;
  nlohmann::ordered_json config_echo;
  std::vector<SummaryPoint> points;
  std::vector<SummaryFlag> flags;
  std::optional<FitResult> fit;
  bool all_pass = true;

  nlohmann::ordered_json to_json() const;
  void add_flag(const std::string& check, double observed, double threshold,
                bool pass);
};

// Runs the named experiment, writes summary.json (and series CSVs) under
// cfg.out_dir when set, and returns the record.
SummaryRecord run_experiment(const ExperimentConfig& cfg);

}  // namespace junction
