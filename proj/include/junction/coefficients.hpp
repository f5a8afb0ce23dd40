#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "junction/geometry.hpp"
#include "json.hpp"

// Per-edge drift/diffusion data b_i(t,x), sigma_i(t,x) on [0,T] x [0,inf),
// supplied as opaque evaluators together with *declared* constants: an
// ellipticity floor c, a drift bound and a diffusion bound (each bound covers
// both the sup norm and the Lipschitz constant in x). The declared constants
// are validated by sampling -- a necessary check only, not a proof.

namespace junction {

class CoefficientField {
 public:
  using Evaluator = std::function<double(double t, double x)>;

  struct Edge {
    Evaluator drift;
    Evaluator diffusion;
  };

  CoefficientField(std::vector<Edge> edges, double ellipticity_floor,
                   double drift_bound, double diffusion_bound, double horizon);

  int edge_count() const { return static_cast<int>(edges_.size()); }
  double horizon() const { return horizon_; }
  double ellipticity_floor() const { return ellipticity_floor_; }
  double drift_bound() const { return drift_bound_; }
  double diffusion_bound() const { return diffusion_bound_; }

  // (drift, diffusion) at (t, x) on the given edge. Throws std::out_of_range
  // for a bad edge, std::domain_error for t/x outside the domain or a
  // non-finite evaluator value.
  std::pair<double, double> eval(int edge, double t, double x) const;

  double drift(int edge, double t, double x) const;
  double diffusion(int edge, double t, double x) const;

  // Evaluation without domain/finiteness checks, for stepper inner loops
  // that guarantee the domain themselves.
  std::pair<double, double> eval_unchecked(int edge, double t, double x) const {
    const Edge& e = edges_[static_cast<std::size_t>(edge - 1)];
    return {e.drift(t, x), e.diffusion(t, x)};
  }

  // Set when every edge shares constant coefficients (b0, sigma0); lets
  // steppers skip the evaluator indirection.
  std::optional<std::pair<double, double>> uniform_constants() const {
    return uniform_constants_;
  }
  void mark_uniform_constants(double b, double sigma) {
    uniform_constants_ = {b, sigma};
  }

  // Catalog name when built from one; informational (manifests, summaries).
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

 private:
  const Edge& edge_at(int edge) const;

  std::vector<Edge> edges_;
  double ellipticity_floor_;
  double drift_bound_;
  double diffusion_bound_;
  double horizon_;
  std::optional<std::pair<double, double>> uniform_constants_;
  std::string label_;
};

// Named fields constructible from a config file. Built-ins:
//   constant      b_i = 0,              sigma_i = 1
//   linear_decay  b_i = -drift_scale*x, sigma_i = 1
//   time_ramp     b_i = 0,              sigma_i = 1 + ramp*t
struct FieldSpec {
  std::string name = "constant";
  int edge_count = 1;
  double horizon = 1.0;
  double drift_scale = 1.0;  // linear_decay only
  double ramp = 0.5;         // time_ramp only
  double ellipticity_floor = 0.5;
  double drift_bound = 0.0;      // 0 => per-builtin default
  double diffusion_bound = 0.0;  // 0 => per-builtin default
};

CoefficientField make_field(const FieldSpec& spec);
std::vector<std::string> builtin_field_names();

// Programmatic registration of additional named fields.
using FieldFactory = std::function<CoefficientField(const FieldSpec&)>;
void register_field(const std::string& name, FieldFactory factory);

// Sampled validation of the declared constants and the weight simplex.
struct FieldCheck {
  std::string item;  // e.g. "ellipticity", "drift_bound", "diffusion_lipschitz"
  int edge = 0;      // 0 for junction-wide items
  double observed = 0.0;
  double required = 0.0;
  bool pass = true;
};

struct FieldReport {
  std::vector<FieldCheck> checks;
  bool all_pass = true;
  // Sampling resolution used; the check is necessary, not sufficient.
  int t_samples = 0;
  int x_samples = 0;
  double x_max = 0.0;
  std::string note;

  nlohmann::ordered_json to_json() const;
};

struct FieldGrid {
  int t_samples = 64;
  int x_samples = 64;
  double x_max = 0.0;  // <= 0 => x0 + 6*|sigma|*sqrt(T) with x0 = 1
};

FieldReport validate_field(const CoefficientField& field,
                           const VertexWeights& alpha,
                           const FieldGrid& grid = {});

}  // namespace junction
