#include "junction/engine.hpp"

#include <algorithm>
#include <cstdlib>

namespace junction {

void SimConfig::validate() const {
  if (!(x0 > 0.0))
    throw std::invalid_argument("SimConfig: x0 must be positive");
  if (!(delta > 0.0))
    throw std::invalid_argument("SimConfig: delta must be positive");
  if (!(horizon > 0.0))
    throw std::invalid_argument("SimConfig: horizon must be positive");
  const double h = step_size();
  if (!(h > 0.0)) throw std::invalid_argument("SimConfig: step must be positive");
  if (h > delta * delta / 4.0 + 1e-15 && !allow_coarse_step)
    throw std::invalid_argument(
        "SimConfig: step exceeds delta^2/4; set allow_coarse_step to override");
  if (field.edge_count() != alpha.edge_count())
    throw std::invalid_argument("SimConfig: field and weights edge counts differ");
  if (horizon > field.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("SimConfig: horizon exceeds the field's horizon");
  if (initial_edge < 0 || initial_edge > field.edge_count())
    throw std::invalid_argument("SimConfig: initial edge out of range");
}

EdgeSampler::EdgeSampler(const VertexWeights& alpha) {
  cumulative_.reserve(static_cast<std::size_t>(alpha.edge_count()));
  double run = 0.0;
  for (double a : alpha.values()) {
    run += a;
    cumulative_.push_back(run);
  }
  cumulative_.back() = 1.0;
}

int EdgeSampler::draw(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin()) + 1;
}

namespace {

struct RecordBuilder {
  PathRecord record;

  void start(const PathStart& s) {
    const std::size_t n = s.n_steps;
    record.time.reserve(n + 1);
    record.position.reserve(n + 1);
    record.edge.reserve(n + 1);
    record.jumps.reserve(n + 1);
    record.noise.reserve(n);
    record.time.push_back(0.0);
    record.position.push_back(s.x0);
    record.edge.push_back(s.edge);
    record.jumps.push_back(0);
  }

  void step(const StepEvent& ev) {
    record.time.push_back(ev.t1);
    record.position.push_back(ev.x1);
    record.edge.push_back(ev.edge1);
    record.jumps.push_back(ev.jumps);
    record.noise.push_back(ev.noise);
  }
};

}  // namespace

PathRecord simulate_delta_path(const SimConfig& cfg, std::uint64_t path_index) {
  RecordBuilder builder;
  builder.record.delta = cfg.delta;
  simulate_visit(cfg, path_index, builder);
  return std::move(builder.record);
}

Ensemble simulate_batch(const SimConfig& cfg, std::size_t n_paths, int workers) {
  if (n_paths < 1)
    throw std::invalid_argument("simulate_batch: n_paths must be >= 1");
  Ensemble out;
  out.paths.resize(n_paths);
  for_each_path(n_paths, workers, [&](std::size_t i) {
    try {
      out.paths[i] = simulate_delta_path(cfg, i);
    } catch (const std::exception& ex) {
      throw std::runtime_error("path " + std::to_string(i) + ": " + ex.what());
    }
  });
  return out;
}

std::vector<PathRecord> simulate_coupled_refinement(
    SimConfig cfg, const std::vector<double>& deltas, std::uint64_t shared_seed) {
  if (deltas.empty())
    throw std::invalid_argument("simulate_coupled_refinement: empty ladder");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument(
          "simulate_coupled_refinement: deltas must decrease");
  const double h = cfg.step_size();
  const double finest = deltas.back();
  if (h > finest * finest / 4.0 + 1e-15 && !cfg.allow_coarse_step)
    throw std::invalid_argument(
        "simulate_coupled_refinement: step must resolve the smallest delta");
  cfg.seed = shared_seed;
  cfg.step = h;
  std::vector<PathRecord> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    SimConfig level = cfg;
    level.delta = d;
    out.push_back(simulate_delta_path(level, 0));
  }
  return out;
}

int workers_from_env() {
  if (const char* env = std::getenv("JUNCTION_SIM_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

}  // namespace junction
