#include "junction/path_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace junction {

JunctionPoint point_at(const PathRecord& p, double t) {
  const auto& ts = p.time;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t idx = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin() - 1);
  return {p.position[idx], p.edge[idx]};
}

double uniform_distance(const PathRecord& a, const PathRecord& b) {
  if (a.time != b.time)
    throw std::invalid_argument("uniform_distance: time grids differ");
  double sup = 0.0;
  for (std::size_t k = 0; k < a.time.size(); ++k) {
    sup = std::max(sup, junction_distance({a.position[k], a.edge[k]},
                                          {b.position[k], b.edge[k]}));
  }
  return sup;
}

double modulus_of_continuity(const PathRecord& p, double theta) {
  const double T = p.horizon();
  if (!(theta > 0.0) || theta > T * (1.0 + 1e-12))
    throw std::invalid_argument("modulus_of_continuity: theta outside (0, T]");
  const std::size_t n = p.time.size();
  double sup = 0.0;
  std::size_t hi = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (hi < k) hi = k;
    while (hi + 1 < n && p.time[hi + 1] - p.time[k] <= theta * (1.0 + 1e-12))
      ++hi;
    const JunctionPoint pk{p.position[k], p.edge[k]};
    for (std::size_t l = k + 1; l <= hi; ++l) {
      sup = std::max(sup, junction_distance(pk, {p.position[l], p.edge[l]}));
    }
  }
  return sup;
}

PathRecord coarsen(const PathRecord& p, std::size_t max_points) {
  const std::size_t n = p.time.size();
  if (max_points < 2) throw std::invalid_argument("coarsen: need >= 2 points");
  if (n <= max_points) return p;
  PathRecord out;
  out.delta = p.delta;
  out.time.reserve(max_points);
  out.position.reserve(max_points);
  out.edge.reserve(max_points);
  out.jumps.reserve(max_points);
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < max_points; ++i) {
    std::size_t idx = (i * (n - 1)) / (max_points - 1);
    if (idx == prev) continue;
    prev = idx;
    out.time.push_back(p.time[idx]);
    out.position.push_back(p.position[idx]);
    out.edge.push_back(p.edge[idx]);
    out.jumps.push_back(p.jumps[idx]);
  }
  out.noise.assign(out.time.size() - 1, 0.0);
  return out;
}

namespace {

// Knot vector: uniform grid plus both paths' jump times.
std::vector<double> warp_knots(const PathRecord& a, const PathRecord& b,
                               int resolution) {
  const double T = a.horizon();
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(resolution) + 64);
  for (int i = 0; i < resolution; ++i)
    knots.push_back(T * i / (resolution - 1));
  auto add_jump_times = [&knots, resolution](const PathRecord& p) {
    std::size_t budget = static_cast<std::size_t>(2 * resolution);
    for (std::size_t k = 1; k < p.time.size() && budget > 0; ++k) {
      if (p.jumps[k] != p.jumps[k - 1]) {
        knots.push_back(p.time[k]);
        knots.push_back(p.time[k - 1]);
        --budget;
      }
    }
  };
  add_jump_times(a);
  add_jump_times(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

// Sup of d(a(lambda(t)), b(t)) for linear lambda: [t0,t1] -> [s0,s1].
// Both composed maps are step functions; every constancy piece gets sampled.
double warped_sup(const PathRecord& a, const PathRecord& b, double t0,
                  double t1, double s0, double s1) {
  const double slope = (s1 - s0) / (t1 - t0);
  thread_local std::vector<double> ts;
  ts.clear();
  ts.push_back(t0);
  {
    auto lo = std::upper_bound(b.time.begin(), b.time.end(), t0);
    auto hi = std::upper_bound(b.time.begin(), b.time.end(), t1);
    for (auto it = lo; it != hi; ++it) ts.push_back(*it);
  }
  {
    auto lo = std::upper_bound(a.time.begin(), a.time.end(), s0);
    auto hi = std::upper_bound(a.time.begin(), a.time.end(), s1);
    for (auto it = lo; it != hi; ++it)
      ts.push_back(t0 + (*it - s0) / slope);
  }
  std::sort(ts.begin(), ts.end());
  double sup = 0.0;
  for (double t : ts) {
    const double s = s0 + (t - t0) * slope;
    sup = std::max(sup, junction_distance(point_at(a, s), point_at(b, t)));
  }
  return sup;
}

}  // namespace

double skorokhod_distance_upper(const PathRecord& a, const PathRecord& b,
                                int warp_resolution) {
  if (warp_resolution < 2)
    throw std::invalid_argument("skorokhod_distance_upper: warp_resolution < 2");
  if (std::fabs(a.horizon() - b.horizon()) > 1e-12)
    throw std::invalid_argument("skorokhod_distance_upper: horizons differ");

  const std::vector<double> K = warp_knots(a, b, warp_resolution);
  const std::size_t m = K.size();
  const std::size_t band = std::max<std::size_t>(4, m / 6);
  const std::size_t skip = 4;  // knots a linear piece may span per axis
  const double inf = std::numeric_limits<double>::infinity();

  // dp[i][j]: best max-cost of a piecewise-linear increasing warp through
  // lattice pairs ending with lambda(K[i]) = K[j]. A piece may skip knots,
  // so warps that pass between lattice points remain representable.
  std::vector<std::vector<double>> dp(m, std::vector<double>(m, inf));
  dp[0][0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const std::size_t jlo = std::max<std::size_t>(1, i > band ? i - band : 1);
    const std::size_t jhi = std::min(m - 1, i + band);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      if (i == m - 1 && j != m - 1) continue;  // lambda(T) = T
      if (j == m - 1 && i != m - 1) continue;
      double best = inf;
      for (std::size_t di = 1; di <= skip && di <= i; ++di) {
        const std::size_t ip = i - di;
        for (std::size_t dj = 1; dj <= skip && dj <= j; ++dj) {
          const std::size_t jp = j - dj;
          const double prev = dp[ip][jp];
          if (!(prev < inf) || prev >= best) continue;
          double cost = std::max(prev, std::fabs(K[jp] - K[ip]));
          cost = std::max(cost, std::fabs(K[j] - K[i]));
          if (cost >= best) continue;
          cost = std::max(cost, warped_sup(a, b, K[ip], K[i], K[jp], K[j]));
          best = std::min(best, cost);
        }
      }
      dp[i][j] = best;
    }
  }
  return dp[m - 1][m - 1];
}

MembershipReport validate_jump_membership(const PathRecord& p, double tau_jump,
                                          double position_tolerance) {
  if (!(p.delta > 0.0))
    throw std::invalid_argument("validate_jump_membership: requires delta > 0");
  MembershipReport report;
  try {
    p.validate();
  } catch (const std::exception& ex) {
    report.events.push_back(
        {0, 0.0, 0.0, 0, 0, 0, 0.0, true, std::string("structural: ") + ex.what()});
    report.pass = false;
  }
  report.tau_jump = tau_jump > 0.0 ? tau_jump : p.delta / 2.0;
  report.position_tolerance =
      position_tolerance > 0.0 ? position_tolerance : p.delta / 100.0;
  const double tol = report.position_tolerance;

  for (std::size_t k = 0; k + 1 < p.time.size(); ++k) {
    const JunctionPoint from{p.position[k], p.edge[k]};
    const JunctionPoint to{p.position[k + 1], p.edge[k + 1]};
    const double inc = junction_distance(from, to);
    const std::int64_t dn = p.jumps[k + 1] - p.jumps[k];
    const bool signature =
        from.x <= tol && std::fabs(to.x - p.delta) <= tol;

    if (dn == 1) {
      report.detected_jumps += signature ? 1 : 0;
      if (!signature) {
        report.events.push_back({k, from.x, to.x, from.edge, to.edge, dn, inc,
                                 true, "counted jump not from the vertex to delta"});
        report.pass = false;
      } else {
        report.events.push_back(
            {k, from.x, to.x, from.edge, to.edge, dn, inc, false, "jump"});
      }
      continue;
    }
    if (inc <= report.tau_jump) continue;
    if (signature) {
      report.events.push_back({k, from.x, to.x, from.edge, to.edge, dn, inc,
                               true, "vertex jump missing from the counter"});
      report.pass = false;
    } else if (to.edge != from.edge && from.x > tol && to.x > tol) {
      report.events.push_back({k, from.x, to.x, from.edge, to.edge, dn, inc,
                               true, "cross-edge move away from the vertex"});
      report.pass = false;
    } else {
      report.events.push_back({k, from.x, to.x, from.edge, to.edge, dn, inc,
                               false, "large same-edge move"});
    }
  }
  return report;
}

}  // namespace junction
