#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace junction {

struct MeanStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanStats mean_stats(const std::vector<double>& xs);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Ordinary least squares on (log scale, log error); >= 2 strictly positive
// points required.
FitResult fit_convergence_rate(const std::vector<std::pair<double, double>>& points);

struct KsResult {
  double statistic = 0.0;
  double critical_value = 0.0;  // 1.63 / sqrt(n), asymptotic 1% level
  std::size_t n = 0;
  bool pass = false;
};

// One-sample Kolmogorov-Smirnov statistic against a reference CDF;
// requires >= 100 samples.
KsResult ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf);

// Law of |x0 + W(T)| on the half line: F(z) = Phi((z-x0)/sqrt(T)) +
// Phi((z+x0)/sqrt(T)) - 1 for z >= 0. Radial reference for flat unit-noise
// fields, for any edge weights.
double reflected_bm_cdf(double z, double x0, double horizon);

// E[l(T)] for Brownian motion reflected at 0 started at x0 >= 0:
// sqrt(T) * 2 (phi(u) - u (1 - Phi(u))) with u = x0 / sqrt(T).
double reflected_bm_mean_local_time(double x0, double horizon);

// E of the time in [0,T] the reflected path (from 0) spends at or below eps:
// the quadrature of 2 Phi(eps / sqrt(s)) - 1 over [0, T].
double reflected_bm_band_occupation(double eps, double horizon);

}  // namespace junction
