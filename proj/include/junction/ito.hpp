#pragma once

#include <string>
#include <vector>

#include "junction/coefficients.hpp"
#include "junction/geometry.hpp"
#include "junction/local_time.hpp"
#include "junction/path_record.hpp"
#include "junction/test_functions.hpp"

// The generator applied edge-wise and the residual of the junction Ito
// formula along recorded paths:
//   f(t, Y(t)) - f(0, Y(0)) = int L(f) ds + int df/dy sigma dB
//                             + sum_i alpha_i int df_i/dy(s, 0) dl(s).
// The residual subtracts everything except the stochastic integral
// (against_local_time; the remainder should be a centered martingale) or
// everything including it via the stored increments
// (against_stochastic_integral; the remainder should vanish as h, delta -> 0).

namespace junction {

// L(f)(t, (y,j)) = df_j/dt + df_j/dy b_j + (1/2) d2f_j/dy2 sigma_j^2 at (t,y).
double dynkin_apply(const TestFunction& f, const CoefficientField& field,
                    double t, const JunctionPoint& p);

enum class ResidualMode { against_local_time, against_stochastic_integral };

struct ResidualSeries {
  std::vector<double> time;
  std::vector<double> value;  // M(0) = 0
  ResidualMode mode = ResidualMode::against_local_time;
  std::string function;
};

// l must live on the path's grid. Sums use left endpoints, matching the
// stepper; the vertex term weights the edge derivatives at the vertex by
// alpha over all edges. The second mode requires stored noise increments.
ResidualSeries ito_residual(const PathRecord& p, const TestFunction& f,
                            const CoefficientField& field,
                            const VertexWeights& alpha, const LocalTimeSeries& l,
                            ResidualMode mode);

struct CheckpointStat {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  std::size_t n = 0;
  bool flagged = false;  // |z| > z_max
};

struct ZeroMeanReport {
  std::vector<CheckpointStat> checkpoints;
  double z_max = 3.0;
  bool pass = true;
};

// Sample mean / standard error / z of M(t) at each checkpoint over an
// ensemble of residual series (>= 30 required). Values are read at the last
// grid point <= t.
ZeroMeanReport martingale_zero_mean_test(const std::vector<ResidualSeries>& ensemble,
                                         const std::vector<double>& checkpoints,
                                         double z_max = 3.0);

}  // namespace junction
