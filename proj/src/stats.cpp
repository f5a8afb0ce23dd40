#include "junction/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "junction/rng.hpp"

namespace junction {

MeanStats mean_stats(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_stats: empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  const double se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se, xs.size()};
}

FitResult fit_convergence_rate(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_convergence_rate: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [scale, error] : points) {
    if (!(scale > 0.0) || !(error > 0.0))
      throw std::invalid_argument("fit_convergence_rate: nonpositive input");
    const double x = std::log(scale);
    const double y = std::log(error);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0)
    throw std::invalid_argument("fit_convergence_rate: degenerate scales");
  FitResult fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (const auto& [scale, error] : points) {
    const double resid =
        std::log(error) - (fit.intercept + fit.slope * std::log(scale));
    ss_res += resid * resid;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

KsResult ks_statistic(std::vector<double> samples,
                      const std::function<double(double)>& cdf) {
  if (samples.size() < 100)
    throw std::invalid_argument("ks_statistic: need >= 100 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - F, F - lo});
  }
  KsResult out;
  out.statistic = d;
  out.n = samples.size();
  out.critical_value = 1.63 / std::sqrt(n);
  out.pass = d <= out.critical_value;
  return out;
}

double reflected_bm_cdf(double z, double x0, double horizon) {
  if (z < 0.0) return 0.0;
  const double s = std::sqrt(horizon);
  return normal_cdf((z - x0) / s) + normal_cdf((z + x0) / s) - 1.0;
}

double reflected_bm_mean_local_time(double x0, double horizon) {
  const double s = std::sqrt(horizon);
  const double u = x0 / s;
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
  return s * 2.0 * (pdf - u * (1.0 - normal_cdf(u)));
}

double reflected_bm_band_occupation(double eps, double horizon) {
  if (!(eps > 0.0)) return 0.0;
  // substitute s = u^2: integral of (2 Phi(eps/u) - 1) 2u du over (0, sqrt(T)]
  const int n = 4096;  // Simpson on a smooth integrand
  const double b = std::sqrt(horizon);
  auto g = [eps](double u) {
    if (u <= 0.0) return 0.0;
    return (2.0 * normal_cdf(eps / u) - 1.0) * 2.0 * u;
  };
  double acc = g(0.0) + g(b);
  for (int i = 1; i < n; ++i)
    acc += g(b * i / n) * (i % 2 ? 4.0 : 2.0);
  return acc * b / (3.0 * n);
}

}  // namespace junction
