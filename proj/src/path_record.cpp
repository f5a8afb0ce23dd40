#include "junction/path_record.hpp"

#include <stdexcept>
#include <string>

namespace junction {

void PathRecord::validate() const {
  const std::size_t n = time.size();
  if (n < 2) throw std::invalid_argument("PathRecord: need at least two grid points");
  if (position.size() != n || edge.size() != n || jumps.size() != n)
    throw std::invalid_argument("PathRecord: array lengths differ");
  if (noise.size() != n - 1)
    throw std::invalid_argument("PathRecord: noise must be one shorter than the grid");
  if (time.front() != 0.0)
    throw std::invalid_argument("PathRecord: grid must start at 0");
  if (jumps.front() != 0)
    throw std::invalid_argument("PathRecord: jump counter must start at 0");
  if (delta < 0.0) throw std::invalid_argument("PathRecord: delta must be >= 0");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(position[k] >= 0.0))
      throw std::invalid_argument("PathRecord: negative position at index " +
                                  std::to_string(k));
    if (k == 0) continue;
    if (!(time[k] > time[k - 1]))
      throw std::invalid_argument("PathRecord: grid not strictly increasing at index " +
                                  std::to_string(k));
    const std::int64_t dn = jumps[k] - jumps[k - 1];
    if (dn != 0 && dn != 1)
      throw std::invalid_argument("PathRecord: jump counter step not in {0,1} at index " +
                                  std::to_string(k));
    if (edge[k] != edge[k - 1] && dn != 1)
      throw std::invalid_argument(
          "PathRecord: edge label changed without a counted jump at index " +
          std::to_string(k));
  }
}

}  // namespace junction
