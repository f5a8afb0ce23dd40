#pragma once

#include <string>
#include <vector>

#include "junction/coefficients.hpp"
#include "junction/geometry.hpp"
#include "junction/path_record.hpp"

// Estimators of the reflection process l(t) at the vertex: the jump-count
// series delta*N(t), occupation-time estimators (full edge set and subset
// weighted), and a diagnostic decomposition through the quadratically
// smoothed ramp phi_eps.

namespace junction {

enum class EstimatorKind {
  jump_count,
  occupation_full,
  occupation_subset,
  phi_decomposition,
};

struct LocalTimeSeries {
  std::vector<double> time;
  std::vector<double> value;  // starts at 0, nondecreasing
  EstimatorKind kind = EstimatorKind::jump_count;
  std::string tag;  // e.g. "occupation_subset({1,2})"

  void validate() const;  // throws on a violated invariant
};

// values[k] = delta * jumps[k]; requires p.delta > 0.
LocalTimeSeries jump_count_local_time(const PathRecord& p);

// Left-endpoint Riemann sum of
//   (1 / (2 eps sum_{k in subset} alpha_k)) *
//       sum_{j in subset} sigma_j(s, 0)^2 1{y(s) <= eps, edge(s) = j}
// over the path grid. Empty subset means all edges (prefactor 1/(2 eps)).
// sigma is evaluated exactly at the vertex, as the estimator is defined.
LocalTimeSeries occupation_local_time(const PathRecord& p,
                                      const CoefficientField& field,
                                      const VertexWeights& alpha, double eps,
                                      const std::vector<int>& subset = {});

struct RampValue {
  double value = 0.0;
  double derivative = 0.0;
  double second_derivative = 0.0;  // a.e.; left value 1/eps at y == eps
};

// phi_eps(y) = y^2/(2 eps) on [0, eps], y - eps/2 beyond.
RampValue phi_epsilon(double y, double eps);

// Raw decomposition series: phi(y(t)) - phi(y0) minus the drift and noise
// integrals of phi along the stored path; its limit is the same local time.
// Requires engine-produced noise increments.
std::vector<double> phi_decomposition_series(const PathRecord& p,
                                             const CoefficientField& field,
                                             double eps);

// The raw series clamped to a nondecreasing series by running maximum, so
// the LocalTimeSeries invariants hold. Diagnostic use only.
LocalTimeSeries phi_decomposition_local_time(const PathRecord& p,
                                             const CoefficientField& field,
                                             double eps);

// Left-endpoint Riemann sum of 1{y(s) <= eps}; eps = 0 counts time exactly
// at the vertex.
double occupation_time_near_zero(const PathRecord& p, double eps);

}  // namespace junction
