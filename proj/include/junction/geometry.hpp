#pragma once

#include <vector>

// A star junction: I half-lines (edges, indexed 1..I) glued at a single
// vertex. Points are (position, edge); every point with position 0 is the
// vertex, whatever its stored edge label.

namespace junction {

struct JunctionPoint {
  double x = 0.0;  // position along the edge, >= 0
  int edge = 1;    // edge index in 1..I; retained at the vertex for bookkeeping
};

// Metric on the junction: |x - y| on a common edge, x + y across edges.
// The cross-edge branch already collapses correctly at the vertex.
double junction_distance(const JunctionPoint& a, const JunctionPoint& b);

// Equality under vertex identification.
bool same_point(const JunctionPoint& a, const JunctionPoint& b);

class Junction {
 public:
  explicit Junction(int edge_count);

  int edge_count() const { return edge_count_; }
  bool contains(const JunctionPoint& p) const;

  // junction_distance with edge-range validation; throws std::out_of_range.
  double distance(const JunctionPoint& a, const JunctionPoint& b) const;

 private:
  int edge_count_;
};

// Probability weights over edges used when the process leaves the vertex.
class VertexWeights {
 public:
  // Requires every entry in (0,1) and sum within 1e-12 of 1.
  explicit VertexWeights(std::vector<double> alpha);

  int edge_count() const { return static_cast<int>(alpha_.size()); }
  double at(int edge) const { return alpha_.at(static_cast<std::size_t>(edge - 1)); }
  const std::vector<double>& values() const { return alpha_; }

 private:
  std::vector<double> alpha_;
};

}  // namespace junction
