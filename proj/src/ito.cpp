#include "junction/ito.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace junction {

double dynkin_apply(const TestFunction& f, const CoefficientField& field,
                    double t, const JunctionPoint& p) {
  if (p.edge < 1 || p.edge > f.edge_count())
    throw std::out_of_range("dynkin_apply: edge index out of range");
  const auto& part = f.edge(p.edge);
  const auto [b, s] = field.eval(p.edge, t, p.x);
  return part.ft(t, p.x) + part.fy(t, p.x) * b + 0.5 * part.fyy(t, p.x) * s * s;
}

ResidualSeries ito_residual(const PathRecord& p, const TestFunction& f,
                            const CoefficientField& field,
                            const VertexWeights& alpha, const LocalTimeSeries& l,
                            ResidualMode mode) {
  if (l.time != p.time)
    throw std::invalid_argument("ito_residual: local time grid differs from path");
  if (f.edge_count() != field.edge_count() ||
      alpha.edge_count() != field.edge_count())
    throw std::invalid_argument("ito_residual: edge counts differ");
  if (mode == ResidualMode::against_stochastic_integral &&
      p.noise.size() + 1 != p.time.size())
    throw std::invalid_argument("ito_residual: missing noise increments");

  ResidualSeries out;
  out.mode = mode;
  out.function = f.name;
  out.time = p.time;
  out.value.resize(p.time.size(), 0.0);

  const double f0 = f.edge(p.edge.front()).f(0.0, p.position.front());
  double sums = 0.0;
  for (std::size_t k = 0; k + 1 < p.time.size(); ++k) {
    const double t = p.time[k];
    const double dt = p.time[k + 1] - t;
    const double y = p.position[k];
    const int e = p.edge[k];

    sums += dynkin_apply(f, field, t, {y, e}) * dt;

    const double dl = l.value[k + 1] - l.value[k];
    if (dl != 0.0) {
      double vertex = 0.0;
      for (int i = 1; i <= f.edge_count(); ++i)
        vertex += alpha.at(i) * f.edge(i).fy(t, 0.0);
      sums += vertex * dl;
    }

    if (mode == ResidualMode::against_stochastic_integral && p.noise[k] != 0.0) {
      sums += f.edge(e).fy(t, y) * field.diffusion(e, t, y) * p.noise[k];
    }

    out.value[k + 1] =
        f.edge(p.edge[k + 1]).f(p.time[k + 1], p.position[k + 1]) - f0 - sums;
  }
  return out;
}

ZeroMeanReport martingale_zero_mean_test(const std::vector<ResidualSeries>& ensemble,
                                         const std::vector<double>& checkpoints,
                                         double z_max) {
  if (ensemble.size() < 30)
    throw std::invalid_argument(
        "martingale_zero_mean_test: need at least 30 series");
  ZeroMeanReport report;
  report.z_max = z_max;
  for (double t : checkpoints) {
    double sum = 0.0, sumsq = 0.0;
    for (const ResidualSeries& series : ensemble) {
      auto it = std::upper_bound(series.time.begin(), series.time.end(),
                                 t * (1.0 + 1e-12));
      if (it == series.time.begin())
        throw std::invalid_argument("martingale_zero_mean_test: checkpoint " +
                                    std::to_string(t) + " before the grid");
      const std::size_t idx = static_cast<std::size_t>(it - series.time.begin()) - 1;
      const double v = series.value[idx];
      sum += v;
      sumsq += v * v;
    }
    const double n = static_cast<double>(ensemble.size());
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);
    const double z = se > 0.0 ? mean / se : (mean == 0.0 ? 0.0 : INFINITY);
    CheckpointStat stat{t, mean, se, z, ensemble.size(), std::fabs(z) > z_max};
    report.pass = report.pass && !stat.flagged;
    report.checkpoints.push_back(stat);
  }
  return report;
}

}  // namespace junction
