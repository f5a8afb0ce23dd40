#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "junction/coefficients.hpp"
#include "junction/geometry.hpp"
#include "junction/path_record.hpp"
#include "junction/rng.hpp"

// Euler stepping per edge with the vertex jump rule. A step whose proposal
// crosses zero lands the path exactly at the vertex (the stored increment is
// truncated so the Euler map is an exact identity on the grid); the next grid
// slot carries the pure jump to position delta on a freshly drawn edge and
// increments the jump counter. The recorded dynamics therefore satisfy
//   x[k+1] = x[k] + b dt + sigma dW[k] + delta dN[k]
// exactly. Gaussian variate k belongs to grid step k whether or not the slot
// diffuses, so refinement runs with a shared seed stay aligned.

namespace junction {

struct SimConfig {
  CoefficientField field;
  VertexWeights alpha;
  double x0 = 1.0;
  int initial_edge = 0;  // 0 = draw from alpha (index 0 of the edge stream)
  double delta = 0.1;
  double step = 0.0;     // 0 => delta^2/8
  double horizon = 1.0;
  std::uint64_t seed = 0;
  bool allow_coarse_step = false;  // permit step > delta^2/4

  double step_size() const { return step > 0.0 ? step : delta * delta / 8.0; }
  void validate() const;
};

// CDF inversion for the edge law at the vertex.
class EdgeSampler {
 public:
  explicit EdgeSampler(const VertexWeights& alpha);
  // least edge i with u < cumulative[i]; u in [0,1).
  int draw(double u) const;
  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  std::vector<double> cumulative_;
};

struct PathStart {
  double x0 = 0.0;
  int edge = 1;
  std::size_t n_steps = 0;
};

struct StepEvent {
  std::size_t index = 0;  // slot from t0 to t1
  double t0 = 0.0, t1 = 0.0;
  double x0 = 0.0, x1 = 0.0;
  int edge0 = 1, edge1 = 1;
  double noise = 0.0;            // recorded Brownian increment of the slot
  std::int64_t jumps = 0;        // counter value at t1
  bool hit = false;              // slot ended at the vertex
  bool landing = false;          // slot carried the jump to delta
};

namespace detail {

inline std::size_t grid_steps(double horizon, double h) {
  return static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
}

template <class Coeffs, class V>
void run_steps(const SimConfig& cfg, std::uint64_t path_index, Coeffs&& coeffs,
               V&& visitor) {
  const double h = cfg.step_size();
  const double T = cfg.horizon;
  const std::size_t n = grid_steps(T, h);

  PathStream stream(cfg.seed, path_index);
  GaussianScan gauss(stream);
  EdgeSampler sampler(cfg.alpha);

  double x = cfg.x0;
  int edge = cfg.initial_edge > 0 ? cfg.initial_edge
                                  : sampler.draw(stream.uniform(0));
  std::int64_t jumps = 0;
  bool pending = false;
  const double sqrt_h = std::sqrt(h);

  visitor.start(PathStart{x, edge, n});

  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = static_cast<double>(k) * h;
    const double t1 = k + 1 == n ? T : static_cast<double>(k + 1) * h;
    const double dt = t1 - t0;
    const double sqrt_dt = dt == h ? sqrt_h : std::sqrt(dt);
    const double xi = gauss.next();  // one variate per grid step, used or not

    StepEvent ev;
    ev.index = k;
    ev.t0 = t0;
    ev.t1 = t1;
    ev.x0 = x;
    ev.edge0 = edge;

    if (pending) {
      x = cfg.delta;
      edge = sampler.draw(stream.uniform(static_cast<std::uint64_t>(jumps) + 1));
      ++jumps;
      pending = false;
      ev.landing = true;
      ev.noise = 0.0;
    } else {
      const auto [b, s] = coeffs(edge, t0, x);
      const double dw = sqrt_dt * xi;
      const double proposal = x + b * dt + s * dw;
      if (!std::isfinite(proposal))
        throw std::runtime_error("simulate: non-finite state at step " +
                                 std::to_string(k));
      if (proposal <= 0.0) {
        ev.noise = s > 0.0 ? (-x - b * dt) / s : 0.0;
        x = 0.0;
        pending = true;
        ev.hit = true;
      } else {
        ev.noise = dw;
        x = proposal;
      }
    }

    ev.x1 = x;
    ev.edge1 = edge;
    ev.jumps = jumps;
    visitor.step(ev);
  }
}

}  // namespace detail

// Runs the stepper, feeding a visitor with .start(PathStart) and
// .step(StepEvent). Dispatches to a fast loop for uniform-constant fields.
template <class V>
void simulate_visit(const SimConfig& cfg, std::uint64_t path_index, V&& visitor) {
  cfg.validate();
  if (auto uc = cfg.field.uniform_constants()) {
    const double b = uc->first, s = uc->second;
    detail::run_steps(
        cfg, path_index,
        [b, s](int, double, double) { return std::pair<double, double>{b, s}; },
        visitor);
  } else {
    const CoefficientField& f = cfg.field;
    detail::run_steps(
        cfg, path_index,
        [&f](int edge, double t, double x) { return f.eval_unchecked(edge, t, x); },
        visitor);
  }
}

PathRecord simulate_delta_path(const SimConfig& cfg, std::uint64_t path_index = 0);

struct Ensemble {
  std::vector<PathRecord> paths;
};

// Path k uses the stream derived from (seed, k); the result is identical for
// any worker count or schedule.
Ensemble simulate_batch(const SimConfig& cfg, std::size_t n_paths,
                        int workers = 1);

// One record per delta, all consuming the same Gaussian stream (variate k at
// grid step k) and the same edge-draw sequence.
std::vector<PathRecord> simulate_coupled_refinement(SimConfig cfg,
                                                    const std::vector<double>& deltas,
                                                    std::uint64_t shared_seed);

// Static-slot parallel map over path indices. The first exception thrown by
// fn stops the pool and is rethrown in the calling thread.
template <class Fn>
void for_each_path(std::size_t n_paths, int workers, Fn&& fn) {
  if (workers <= 1 || n_paths <= 1) {
    for (std::size_t i = 0; i < n_paths; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t count =
      std::min(static_cast<std::size_t>(workers), n_paths);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_paths || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int workers_from_env();

}  // namespace junction
