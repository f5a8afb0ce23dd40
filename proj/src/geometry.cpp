#include "junction/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace junction {

double junction_distance(const JunctionPoint& a, const JunctionPoint& b) {
  if (!(a.x >= 0.0) || !(b.x >= 0.0))
    throw std::invalid_argument("junction_distance: positions must be >= 0");
  if (a.edge == b.edge) return std::fabs(a.x - b.x);
  return a.x + b.x;  // equals |a.x - b.x| whenever either point is the vertex
}

bool same_point(const JunctionPoint& a, const JunctionPoint& b) {
  if (a.x == 0.0 && b.x == 0.0) return true;
  return a.x == b.x && a.edge == b.edge;
}

Junction::Junction(int edge_count) : edge_count_(edge_count) {
  if (edge_count < 1)
    throw std::invalid_argument("Junction: edge count must be >= 1");
}

bool Junction::contains(const JunctionPoint& p) const {
  return p.x >= 0.0 && p.edge >= 1 && p.edge <= edge_count_;
}

double Junction::distance(const JunctionPoint& a, const JunctionPoint& b) const {
  if (!contains(a) || !contains(b))
    throw std::out_of_range("Junction::distance: edge index out of range");
  return junction_distance(a, b);
}

VertexWeights::VertexWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty())
    throw std::invalid_argument("VertexWeights: at least one edge required");
  double sum = 0.0;
  for (double a : alpha_) {
    if (!(a > 0.0 && a < 1.0) && !(alpha_.size() == 1 && a == 1.0))
      throw std::invalid_argument(
          "VertexWeights: entries must lie in (0,1); got " + std::to_string(a));
    sum += a;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("VertexWeights: entries must sum to 1, got " +
                                std::to_string(sum));
}

}  // namespace junction
