// Acceptance suite: one line per criterion, checked at the thresholds pinned
// in configs/. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "junction/engine.hpp"
#include "junction/experiments.hpp"
#include "junction/io.hpp"
#include "junction/path_metrics.hpp"
#include "junction/stats.hpp"

using namespace junction;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(const std::string& id, bool pass, const std::string& detail,
            double seconds) {
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << id << ": " << detail << "  ("
       << std::fixed;
  line.precision(1);
  line << seconds << "s)";
  std::cout << line.str() << std::endl;
  if (!pass) ++failures;
}

std::string flag_detail(const SummaryRecord& record) {
  std::ostringstream os;
  int shown = 0;
  for (const auto& f : record.flags) {
    if (f.pass) continue;
    if (shown++) os << "; ";
    os << f.check << "=" << f.observed << " (limit " << f.threshold << ")";
  }
  if (shown == 0) os << record.flags.size() << " checks";
  return os.str();
}

ExperimentConfig load_config(const std::string& configs_dir,
                             const std::string& name,
                             const std::string& out_dir) {
  ExperimentConfig cfg = ExperimentConfig::from_config(
      ConfigFile::parse_file(configs_dir + "/" + name));
  cfg.out_dir = out_dir;
  return cfg;
}

// --------------------------------------------------------------------------
// C1: structural path invariants over a mixed ensemble.

struct StructuralCounts {
  std::size_t paths = 0;
  std::size_t membership_failures = 0;
  std::size_t positivity_failures = 0;
  std::size_t reflection_failures = 0;
  std::size_t counter_failures = 0;
};

void check_structurals(const SimConfig& cfg, std::size_t n_paths,
                       StructuralCounts& counts) {
  for (std::size_t i = 0; i < n_paths; ++i) {
    const PathRecord p = simulate_delta_path(cfg, i);
    p.validate();
    ++counts.paths;

    const MembershipReport membership = validate_jump_membership(p);
    if (!membership.pass || membership.detected_jumps != p.jumps.back())
      ++counts.membership_failures;

    std::int64_t landings = 0, hits_with_slot = 0, reflection_mass = 0;
    bool positive = true;
    for (std::size_t k = 0; k + 1 < p.time.size(); ++k) {
      if (!(p.position[k] >= 0.0)) positive = false;
      const std::int64_t dn = p.jumps[k + 1] - p.jumps[k];
      if (dn == 1) {
        ++landings;
        if (p.position[k + 1] != cfg.delta) positive = false;
        if (p.position[k] > 0.0) ++reflection_mass;  // dN charging off-vertex
      }
      if (p.position[k] == 0.0 && k + 1 < p.time.size()) ++hits_with_slot;
    }
    if (!positive || !(p.position.back() >= 0.0)) ++counts.positivity_failures;
    if (reflection_mass != 0) ++counts.reflection_failures;
    if (landings != p.jumps.back() || hits_with_slot != landings)
      ++counts.counter_failures;
  }
}

void criterion_1() {
  Timer timer;
  StructuralCounts counts;

  auto constant_cfg = [](double delta, double x0, std::uint64_t seed) {
    FieldSpec spec;
    spec.name = "constant";
    spec.edge_count = 3;
    SimConfig cfg{make_field(spec), VertexWeights({0.2, 0.3, 0.5})};
    cfg.delta = delta;
    cfg.x0 = x0;
    cfg.seed = seed;
    return cfg;
  };
  check_structurals(constant_cfg(0.05, 0.3, 11), 250, counts);
  check_structurals(constant_cfg(0.02, 0.02, 12), 250, counts);

  FieldSpec decay;
  decay.name = "linear_decay";
  decay.edge_count = 3;
  SimConfig decay_cfg{make_field(decay), VertexWeights({0.2, 0.3, 0.5})};
  decay_cfg.delta = 0.04;
  decay_cfg.x0 = 0.2;
  decay_cfg.seed = 13;
  check_structurals(decay_cfg, 250, counts);

  FieldSpec ramp;
  ramp.name = "time_ramp";
  ramp.edge_count = 3;
  SimConfig ramp_cfg{make_field(ramp), VertexWeights({0.2, 0.3, 0.5})};
  ramp_cfg.delta = 0.08;
  ramp_cfg.x0 = 0.3;
  ramp_cfg.seed = 14;
  check_structurals(ramp_cfg, 250, counts);

  const bool pass = counts.membership_failures == 0 &&
                    counts.positivity_failures == 0 &&
                    counts.reflection_failures == 0 &&
                    counts.counter_failures == 0 && timer.seconds() < 60.0;
  std::ostringstream detail;
  detail << counts.paths << " paths, membership/positivity/reflection/counter"
         << " failures " << counts.membership_failures << "/"
         << counts.positivity_failures << "/" << counts.reflection_failures
         << "/" << counts.counter_failures;
  report("C1 structural path invariants", pass, detail.str(), timer.seconds());
}

void criterion_experiment(const std::string& id, const std::string& configs,
                          const std::string& file, const std::string& out) {
  Timer timer;
  const SummaryRecord record = run_experiment(load_config(configs, file, out));
  report(id, record.all_pass, flag_detail(record), timer.seconds());
}

void criterion_9(const std::string& configs, const std::string& out) {
  Timer timer;
  auto run_with = [&](const std::string& sub, int workers) {
    ExperimentConfig cfg =
        load_config(configs, "acceptance_determinism.ini", out + "/" + sub);
    cfg.workers = workers;
    run_experiment(cfg);
    std::ifstream is(out + "/" + sub + "/summary.json", std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
  };
  const std::string first = run_with("det_a", 1);
  const std::string second = run_with("det_b", 1);
  const std::string third = run_with("det_c", 4);
  const bool pass = !first.empty() && first == second && first == third;
  report("C9 determinism", pass,
         pass ? "byte-identical summaries for reruns and 1 vs 4 workers"
              : "summaries differ",
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  std::string configs = "configs";
  std::string out = "acceptance_out";
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--configs") == 0 && i + 1 < argc)
      configs = argv[++i];
    else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
      out = argv[++i];
    else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }
  auto enabled = [only](int n) { return only == 0 || only == n; };

  try {
    if (enabled(1)) criterion_1();
    if (enabled(2))
      criterion_experiment("C2 edge frequencies", configs,
                           "acceptance_edge_occupation.ini", out + "/edge");
    if (enabled(3))
      criterion_experiment("C3 radial law", configs,
                           "acceptance_radial_law.ini", out + "/radial");
    if (enabled(4))
      criterion_experiment("C4 local-time ladder", configs,
                           "acceptance_local_time_ladder.ini", out + "/ladder");
    if (enabled(5))
      criterion_experiment("C5 estimator consistency", configs,
                           "acceptance_estimator_consistency.ini",
                           out + "/estimators");
    if (enabled(6))
      criterion_experiment("C6 ito residuals", configs,
                           "acceptance_ito_residual.ini", out + "/ito");
    if (enabled(7))
      criterion_experiment("C7 vertex occupation", configs,
                           "acceptance_vertex_occupation.ini", out + "/vertex");
    if (enabled(8)) {
      criterion_experiment("C8a moment and modulus envelopes", configs,
                           "acceptance_modulus_scaling.ini", out + "/modulus");
      criterion_experiment("C8b exponential moment envelope", configs,
                           "acceptance_exp_moment.ini", out + "/expmoment");
    }
    if (enabled(9)) criterion_9(configs, out);
  } catch (const std::exception& ex) {
    std::cerr << "acceptance: " << ex.what() << '\n';
    return 99;
  }

  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: failures present")
            << std::endl;
  return failures;
}
