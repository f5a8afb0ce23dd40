#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "junction/geometry.hpp"
#include "junction/path_record.hpp"

namespace junction {

// Cadlag value of the stored path at time t (right-continuous step lookup).
JunctionPoint point_at(const PathRecord& p, double t);

// Sup over the common grid of the junction distance between the two paths.
// Requires bit-identical time grids; throws std::invalid_argument otherwise.
double uniform_distance(const PathRecord& a, const PathRecord& b);

// Sup of junction_distance(p(u), p(s)) over grid pairs with |u - s| <= theta,
// both window endpoints included. Grid evaluation is a lower bound of the
// continuum modulus.
double modulus_of_continuity(const PathRecord& p, double theta);

// Restriction of p to at most max_points grid points (always keeps the
// endpoints). Metrics evaluated on the coarsened path remain lower bounds.
PathRecord coarsen(const PathRecord& p, std::size_t max_points);

// Upper bound of the Skorokhod distance in the |lambda - Id| form, obtained
// by minimizing max(|lambda - Id|, sup_t d(a(lambda(t)), b(t))) over
// piecewise-linear increasing time changes through a knot lattice built from
// warp_resolution uniform knots plus both paths' jump times. The identity
// warp is always admissible, so the result never exceeds the grid-evaluated
// uniform distance when the horizons match.
double skorokhod_distance_upper(const PathRecord& a, const PathRecord& b,
                                int warp_resolution);

// Validation that a path lives in the delta-jump class: discontinuities only
// from the vertex, all of size exactly delta, in lockstep with the jump
// counter.
struct MembershipEvent {
  std::size_t step = 0;       // index k of the move t_k -> t_{k+1}
  double from = 0.0, to = 0.0;
  int edge_from = 0, edge_to = 0;
  std::int64_t counter_step = 0;
  double increment = 0.0;     // junction distance of the move
  bool violation = false;
  std::string reason;
};

struct MembershipReport {
  bool pass = true;
  double tau_jump = 0.0;
  double position_tolerance = 0.0;
  std::int64_t detected_jumps = 0;  // counter steps carrying the jump signature
  std::vector<MembershipEvent> events;
};

// tau_jump <= 0 defaults to delta/2, position_tolerance <= 0 to delta/100.
// A step with a counter increment must show the exact jump signature
// (previous position at the vertex, new position equal to delta, both within
// position_tolerance). The tau_jump scan reports every large move and flags
// unflagged vertex jumps and cross-edge moves away from the vertex; large
// same-edge diffusion moves are reported without failing the path.
MembershipReport validate_jump_membership(const PathRecord& p,
                                          double tau_jump = 0.0,
                                          double position_tolerance = 0.0);

}  // namespace junction
