#include "junction/stats.hpp"

#include <cmath>

#include "doctest.h"
#include "junction/rng.hpp"

using namespace junction;

TEST_CASE("log-log slope fits") {
  CHECK(fit_convergence_rate({{0.1, 0.1}, {0.01, 0.01}}).slope ==
        doctest::Approx(1.0));
  CHECK(fit_convergence_rate({{0.1, 0.01}, {0.01, 0.0001}}).slope ==
        doctest::Approx(2.0));
  CHECK(fit_convergence_rate({{0.1, 5.0}, {0.01, 5.0}}).slope ==
        doctest::Approx(0.0));

  const FitResult noisy = fit_convergence_rate(
      {{0.1, 0.11}, {0.05, 0.048}, {0.025, 0.026}, {0.0125, 0.012}});
  CHECK(noisy.slope == doctest::Approx(1.0).epsilon(0.1));
  CHECK(noisy.r_squared > 0.98);

  CHECK_THROWS(fit_convergence_rate({{0.1, 0.1}}));
  CHECK_THROWS(fit_convergence_rate({{0.1, 0.1}, {0.01, -0.1}}));
  CHECK_THROWS(fit_convergence_rate({{0.1, 0.1}, {0.0, 0.01}}));
}

TEST_CASE("kolmogorov-smirnov statistic") {
  // samples drawn from the reference itself pass at the 1% level
  PathStream s(424242, 0);
  std::vector<double> uniforms;
  for (int k = 0; k < 2000; ++k)
    uniforms.push_back(s.uniform(static_cast<std::uint64_t>(k)));
  const KsResult ok = ks_statistic(uniforms, [](double z) {
    return z < 0.0 ? 0.0 : (z > 1.0 ? 1.0 : z);
  });
  CHECK(ok.pass);
  CHECK(ok.critical_value == doctest::Approx(1.63 / std::sqrt(2000.0)));

  // degenerate sample against a continuous reference
  const KsResult bad = ks_statistic(std::vector<double>(500, 0.0),
                                    [](double z) { return z < 0.0 ? 0.0 : z; });
  CHECK(bad.statistic == doctest::Approx(1.0));
  CHECK(!bad.pass);

  CHECK_THROWS(ks_statistic(std::vector<double>(99, 0.5),
                            [](double) { return 0.5; }));
}

TEST_CASE("reflected reference distribution") {
  CHECK(reflected_bm_cdf(-0.1, 0.0, 1.0) == 0.0);
  CHECK(reflected_bm_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(reflected_bm_cdf(100.0, 0.3, 1.0) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double z = 0.0; z <= 3.0; z += 0.1) {
    const double F = reflected_bm_cdf(z, 0.25, 1.0);
    CHECK(F >= prev);
    prev = F;
  }
  // mass below x0 at small T concentrates around the start point
  CHECK(reflected_bm_cdf(0.5, 0.5, 1e-4) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("reflected local time oracle") {
  CHECK(reflected_bm_mean_local_time(0.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  CHECK(reflected_bm_mean_local_time(0.01, 1.0) ==
        doctest::Approx(0.787924454698457).epsilon(1e-12));
  CHECK(reflected_bm_mean_local_time(0.08, 1.0) ==
        doctest::Approx(0.7204364305454558).epsilon(1e-12));
  // Brownian scaling in the horizon
  CHECK(reflected_bm_mean_local_time(0.0, 4.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-12));
}

TEST_CASE("band occupation quadrature") {
  // reference values from an independent adaptive quadrature
  CHECK(reflected_bm_band_occupation(0.2, 1.0) ==
        doctest::Approx(0.2812772732234174).epsilon(1e-8));
  CHECK(reflected_bm_band_occupation(0.1, 1.0) ==
        doctest::Approx(0.14984274079497606).epsilon(1e-8));
  CHECK(reflected_bm_band_occupation(0.05, 1.0) ==
        doctest::Approx(0.07732169711540697).epsilon(1e-8));
  CHECK(reflected_bm_band_occupation(0.0, 1.0) == 0.0);
}

TEST_CASE("mean statistics") {
  const MeanStats s = mean_stats({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.std_error ==
        doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));  // sd/sqrt(n)
  CHECK(s.n == 4);
  CHECK_THROWS(mean_stats({}));
}
