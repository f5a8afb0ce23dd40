#include "junction/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace junction {

void LocalTimeSeries::validate() const {
  if (time.size() != value.size() || time.empty())
    throw std::invalid_argument("LocalTimeSeries: bad array lengths");
  if (value.front() != 0.0)
    throw std::invalid_argument("LocalTimeSeries: must start at 0");
  for (std::size_t k = 1; k < value.size(); ++k)
    if (value[k] < value[k - 1])
      throw std::invalid_argument("LocalTimeSeries: decreasing at index " +
                                  std::to_string(k));
}

LocalTimeSeries jump_count_local_time(const PathRecord& p) {
  if (!(p.delta > 0.0))
    throw std::invalid_argument("jump_count_local_time: requires delta > 0");
  LocalTimeSeries out;
  out.kind = EstimatorKind::jump_count;
  out.tag = "jump_count";
  out.time = p.time;
  out.value.reserve(p.jumps.size());
  for (std::int64_t n : p.jumps)
    out.value.push_back(p.delta * static_cast<double>(n));
  return out;
}

LocalTimeSeries occupation_local_time(const PathRecord& p,
                                      const CoefficientField& field,
                                      const VertexWeights& alpha, double eps,
                                      const std::vector<int>& subset) {
  if (!(eps > 0.0))
    throw std::invalid_argument("occupation_local_time: eps must be positive");

  std::vector<bool> in_subset(static_cast<std::size_t>(field.edge_count()) + 1,
                              subset.empty());
  double weight = subset.empty() ? 1.0 : 0.0;
  for (int e : subset) {
    if (e < 1 || e > field.edge_count())
      throw std::invalid_argument("occupation_local_time: edge out of range");
    if (!in_subset[static_cast<std::size_t>(e)]) {
      in_subset[static_cast<std::size_t>(e)] = true;
      weight += alpha.at(e);
    }
  }
  if (!(weight > 0.0))
    throw std::invalid_argument("occupation_local_time: empty subset");
  const double prefactor = 1.0 / (2.0 * eps * weight);

  LocalTimeSeries out;
  out.kind = subset.empty() ? EstimatorKind::occupation_full
                            : EstimatorKind::occupation_subset;
  if (subset.empty()) {
    out.tag = "occupation_full";
  } else {
    out.tag = "occupation_subset({";
    std::vector<int> sorted(subset);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      out.tag += (i ? "," : "") + std::to_string(sorted[i]);
    out.tag += "})";
  }
  out.time = p.time;
  out.value.resize(p.time.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.time.size(); ++k) {
    const int e = p.edge[k];
    if (p.position[k] <= eps && in_subset[static_cast<std::size_t>(e)]) {
      const double s0 = field.diffusion(e, p.time[k], 0.0);
      acc += prefactor * s0 * s0 * (p.time[k + 1] - p.time[k]);
    }
    out.value[k + 1] = acc;
  }
  return out;
}

RampValue phi_epsilon(double y, double eps) {
  if (!(y >= 0.0)) throw std::invalid_argument("phi_epsilon: y must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("phi_epsilon: eps must be > 0");
  if (y <= eps) return {y * y / (2.0 * eps), y / eps, 1.0 / eps};
  return {y - eps / 2.0, 1.0, 0.0};
}

std::vector<double> phi_decomposition_series(const PathRecord& p,
                                             const CoefficientField& field,
                                             double eps) {
  if (p.noise.size() + 1 != p.time.size())
    throw std::invalid_argument("phi_decomposition_series: missing noise data");
  if (!(eps > 0.0))
    throw std::invalid_argument("phi_decomposition_series: eps must be > 0");
  std::vector<double> series(p.time.size(), 0.0);
  const double phi0 = phi_epsilon(p.position.front(), eps).value;
  double integrals = 0.0;
  for (std::size_t k = 0; k + 1 < p.time.size(); ++k) {
    const double dt = p.time[k + 1] - p.time[k];
    const RampValue ramp = phi_epsilon(p.position[k], eps);
    const auto [b, s] = field.eval(p.edge[k], p.time[k], p.position[k]);
    integrals += ramp.derivative * (b * dt + s * p.noise[k]);
    series[k + 1] = phi_epsilon(p.position[k + 1], eps).value - phi0 - integrals;
  }
  return series;
}

LocalTimeSeries phi_decomposition_local_time(const PathRecord& p,
                                             const CoefficientField& field,
                                             double eps) {
  LocalTimeSeries out;
  out.kind = EstimatorKind::phi_decomposition;
  out.tag = "phi_decomposition";
  out.time = p.time;
  out.value = phi_decomposition_series(p, field, eps);
  double running = 0.0;
  for (double& v : out.value) {
    running = std::max(running, v);
    v = running;
  }
  return out;
}

double occupation_time_near_zero(const PathRecord& p, double eps) {
  if (!(eps >= 0.0))
    throw std::invalid_argument("occupation_time_near_zero: eps must be >= 0");
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.time.size(); ++k)
    if (p.position[k] <= eps) acc += p.time[k + 1] - p.time[k];
  return acc;
}

}  // namespace junction
