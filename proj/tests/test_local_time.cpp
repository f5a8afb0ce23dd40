#include "junction/local_time.hpp"

#include <cmath>

#include "doctest.h"
#include "junction/engine.hpp"
#include "junction/stats.hpp"

using namespace junction;

namespace {

CoefficientField drift_only_field(double drift, int edges = 3, double T = 1.0) {
  std::vector<CoefficientField::Edge> parts(
      static_cast<std::size_t>(edges),
      {[drift](double, double) { return drift; },
       [](double, double) { return 0.0; }});
  return CoefficientField(std::move(parts), 0.5, std::fabs(drift) + 1.0, 1.0, T);
}

SimConfig decay_config() {
  SimConfig cfg{drift_only_field(-1.0), VertexWeights({0.2, 0.3, 0.5})};
  cfg.x0 = 0.5;
  cfg.delta = 0.1;
  cfg.step = 1e-4;
  cfg.horizon = 0.95;
  cfg.seed = 5;
  return cfg;
}

SimConfig reflected_config(double delta, double x0, std::uint64_t seed) {
  FieldSpec spec;
  spec.name = "constant";
  spec.edge_count = 3;
  SimConfig cfg{make_field(spec), VertexWeights({0.2, 0.3, 0.5})};
  cfg.x0 = x0;
  cfg.delta = delta;
  cfg.horizon = 1.0;
  cfg.seed = seed;
  return cfg;
}

PathRecord constant_level_path(double T, std::size_t n, double level, int edge,
                               double delta) {
  PathRecord p;
  p.delta = delta;
  for (std::size_t k = 0; k < n; ++k) {
    p.time.push_back(T * static_cast<double>(k) / static_cast<double>(n - 1));
    p.position.push_back(level);
    p.edge.push_back(edge);
    p.jumps.push_back(0);
  }
  p.noise.assign(n - 1, 0.0);
  return p;
}

}  // namespace

TEST_CASE("jump count series") {
  const PathRecord none = constant_level_path(1.0, 21, 0.4, 1, 0.1);
  const LocalTimeSeries zero = jump_count_local_time(none);
  zero.validate();
  CHECK(zero.value.back() == 0.0);

  const PathRecord decay = simulate_delta_path(decay_config());
  const LocalTimeSeries l = jump_count_local_time(decay);
  l.validate();
  CHECK(l.value.back() == doctest::Approx(0.5));  // 5 jumps of size 0.1
  CHECK(l.tag == "jump_count");

  PathRecord limit = none;
  limit.delta = 0.0;
  CHECK_THROWS(jump_count_local_time(limit));
}

TEST_CASE("occupation estimator on synthetic paths") {
  FieldSpec spec;
  spec.name = "constant";
  spec.edge_count = 2;
  const CoefficientField field = make_field(spec);
  const VertexWeights alpha({0.5, 0.5});

  // never below eps
  const PathRecord high = constant_level_path(1.0, 101, 0.5, 1, 0.1);
  CHECK(occupation_local_time(high, field, alpha, 0.05).value.back() == 0.0);

  // constant at eps/2 on edge 1, full subset: value(T) = T / (2 eps)
  const double eps = 0.04;
  const PathRecord mid = constant_level_path(1.0, 101, eps / 2.0, 1, 0.1);
  const LocalTimeSeries occ = occupation_local_time(mid, field, alpha, eps);
  occ.validate();
  CHECK(occ.value.back() == doctest::Approx(1.0 / (2.0 * eps)));
  CHECK(occ.tag == "occupation_full");

  // subset weighting: only edge 1 occupied, so the {1}-estimator sees the
  // full mass divided by alpha_1
  const LocalTimeSeries sub = occupation_local_time(mid, field, alpha, eps, {1});
  CHECK(sub.value.back() == doctest::Approx(occ.value.back() / alpha.at(1)));
  CHECK(sub.tag == "occupation_subset({1})");
  const LocalTimeSeries other =
      occupation_local_time(mid, field, alpha, eps, {2});
  CHECK(other.value.back() == 0.0);

  CHECK_THROWS(occupation_local_time(mid, field, alpha, 0.0));
  CHECK_THROWS(occupation_local_time(mid, field, alpha, eps, {5}));
}

TEST_CASE("phi ramp values") {
  const double eps = 0.3;
  const RampValue at0 = phi_epsilon(0.0, eps);
  CHECK(at0.value == 0.0);
  CHECK(at0.derivative == 0.0);
  CHECK(at0.second_derivative == doctest::Approx(1.0 / eps));

  const RampValue knee = phi_epsilon(eps, eps);
  CHECK(knee.value == doctest::Approx(eps / 2.0));
  CHECK(knee.derivative == doctest::Approx(1.0));
  CHECK(knee.second_derivative == doctest::Approx(1.0 / eps));  // left value

  const RampValue above = phi_epsilon(2.0 * eps, eps);
  CHECK(above.value == doctest::Approx(1.5 * eps));
  CHECK(above.derivative == 1.0);
  CHECK(above.second_derivative == 0.0);

  CHECK_THROWS(phi_epsilon(-0.1, eps));
  CHECK_THROWS(phi_epsilon(0.1, 0.0));
}

TEST_CASE("phi decomposition vanishes away from the vertex") {
  SimConfig cfg = reflected_config(0.05, 3.0, 17);  // starts far from 0
  cfg.horizon = 0.25;
  const PathRecord p = simulate_delta_path(cfg);
  REQUIRE(p.jumps.back() == 0);
  const auto series = phi_decomposition_series(p, cfg.field, 0.02);
  for (double v : series) CHECK(std::fabs(v) <= 1e-10);  // exact identity
  const LocalTimeSeries clamped =
      phi_decomposition_local_time(p, cfg.field, 0.02);
  clamped.validate();
  CHECK(clamped.value.back() <= 2.0 * 0.02);
}

TEST_CASE("phi decomposition tracks the decay local time") {
  const SimConfig cfg = decay_config();
  const PathRecord p = simulate_delta_path(cfg);
  const double eps = 0.02;
  const LocalTimeSeries series = phi_decomposition_local_time(p, cfg.field, eps);
  series.validate();
  // each jump contributes phi(delta) - phi(0) = delta - eps/2 = 0.09
  CHECK(series.value.back() == doctest::Approx(0.45).epsilon(0.03));
  CHECK(std::fabs(series.value.back() - 0.5) <= 0.1);

  PathRecord stripped = p;
  stripped.noise.clear();
  CHECK_THROWS(phi_decomposition_series(stripped, cfg.field, eps));
}

TEST_CASE("occupation time near zero") {
  const PathRecord high = constant_level_path(1.0, 101, 0.5, 1, 0.1);
  CHECK(occupation_time_near_zero(high, 0.05) == 0.0);

  // below eps exactly on [0.2, 0.3)
  PathRecord p = constant_level_path(1.0, 101, 0.5, 1, 0.1);
  for (std::size_t k = 20; k < 30; ++k) p.position[k] = 0.01;
  CHECK(occupation_time_near_zero(p, 0.05) == doctest::Approx(0.1));
  CHECK(occupation_time_near_zero(p, 0.0) == 0.0);
  p.position[20] = 0.0;
  CHECK(occupation_time_near_zero(p, 0.0) == doctest::Approx(0.01));
}

TEST_CASE("estimators agree on the reflected ensemble") {
  // jump-count vs occupation vs phi decomposition, small desk-scale ensemble
  const double delta = 0.01;
  const double eps = 0.1;
  SimConfig cfg = reflected_config(delta, delta, 2026);
  cfg.step = delta * delta / 32.0;

  const std::size_t n_paths = 60;
  std::vector<double> jc(n_paths), occ(n_paths), occ1(n_paths), phi(n_paths);
  for_each_path(n_paths, 1, [&](std::size_t i) {
    const PathRecord p = simulate_delta_path(cfg, i);
    jc[i] = jump_count_local_time(p).value.back();
    occ[i] = occupation_local_time(p, cfg.field, cfg.alpha, eps).value.back();
    occ1[i] =
        occupation_local_time(p, cfg.field, cfg.alpha, eps, {1}).value.back();
    phi[i] = phi_decomposition_local_time(p, cfg.field, eps).value.back();
  });

  const MeanStats jc_stats = mean_stats(jc);
  const MeanStats occ_stats = mean_stats(occ);
  CHECK(std::fabs(occ_stats.mean - jc_stats.mean) <=
        3.0 * (occ_stats.std_error + jc_stats.std_error) + 0.05);

  // subset estimator agrees with the full one in the mean
  std::vector<double> diff(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) diff[i] = occ1[i] - occ[i];
  const MeanStats d = mean_stats(diff);
  CHECK(std::fabs(d.mean) <= 3.0 * d.std_error + 1e-9);

  // phi decomposition is a coarser diagnostic; same scale
  const MeanStats phi_stats = mean_stats(phi);
  CHECK(std::fabs(phi_stats.mean - jc_stats.mean) <=
        3.0 * (phi_stats.std_error + jc_stats.std_error) + 3.0 * eps);
}
