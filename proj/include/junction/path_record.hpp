#pragma once

#include <cstdint>
#include <vector>

// A discretized junction path: grid times, positions, edge labels, the
// running jump counter, and the Brownian increments the stepper actually
// used (zero where a slot carried no diffusion, e.g. jump landings, and
// zero-filled for synthetic paths).

namespace junction {

struct PathRecord {
  std::vector<double> time;          // n+1 points, strictly increasing, [0, T]
  std::vector<double> position;      // n+1, all >= 0
  std::vector<int> edge;             // n+1, labels in 1..I
  std::vector<std::int64_t> jumps;   // n+1, nondecreasing, steps of 0 or 1
  std::vector<double> noise;         // n, per-step increments
  double delta = 0.0;                // jump size; 0 for limit/synthetic paths

  std::size_t points() const { return time.size(); }
  std::size_t steps() const { return noise.size(); }
  double horizon() const { return time.empty() ? 0.0 : time.back(); }

  // Structural invariants: array lengths, grid monotonicity, positivity,
  // jump-counter steps in {0,1}, edge changes only at counter steps.
  // Throws std::invalid_argument naming the first violation.
  void validate() const;
};

}  // namespace junction
