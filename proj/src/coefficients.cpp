#include "junction/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace junction {

CoefficientField::CoefficientField(std::vector<Edge> edges,
                                   double ellipticity_floor, double drift_bound,
                                   double diffusion_bound, double horizon)
    : edges_(std::move(edges)),
      ellipticity_floor_(ellipticity_floor),
      drift_bound_(drift_bound),
      diffusion_bound_(diffusion_bound),
      horizon_(horizon) {
  if (edges_.empty())
    throw std::invalid_argument("CoefficientField: no edges");
  if (!(ellipticity_floor_ > 0.0) || !(drift_bound_ > 0.0) ||
      !(diffusion_bound_ > 0.0))
    throw std::invalid_argument(
        "CoefficientField: declared constants must be positive");
  if (!(horizon_ > 0.0))
    throw std::invalid_argument("CoefficientField: horizon must be positive");
  for (const Edge& e : edges_)
    if (!e.drift || !e.diffusion)
      throw std::invalid_argument("CoefficientField: missing evaluator");
}

const CoefficientField::Edge& CoefficientField::edge_at(int edge) const {
  if (edge < 1 || edge > edge_count())
    throw std::out_of_range("CoefficientField: edge index out of range");
  return edges_[static_cast<std::size_t>(edge - 1)];
}

std::pair<double, double> CoefficientField::eval(int edge, double t,
                                                 double x) const {
  const Edge& e = edge_at(edge);
  if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12))
    throw std::domain_error("CoefficientField::eval: t outside [0, T]");
  if (!(x >= 0.0))
    throw std::domain_error("CoefficientField::eval: x must be >= 0");
  const double b = e.drift(t, x);
  const double s = e.diffusion(t, x);
  if (!std::isfinite(b) || !std::isfinite(s))
    throw std::domain_error("CoefficientField::eval: non-finite value");
  return {b, s};
}

double CoefficientField::drift(int edge, double t, double x) const {
  return eval(edge, t, x).first;
}

double CoefficientField::diffusion(int edge, double t, double x) const {
  return eval(edge, t, x).second;
}

namespace {

std::map<std::string, FieldFactory>& field_registry() {
  static std::map<std::string, FieldFactory> registry = {
      {"constant",
       [](const FieldSpec& s) {
         std::vector<CoefficientField::Edge> edges(
             static_cast<std::size_t>(s.edge_count),
             {[](double, double) { return 0.0; },
              [](double, double) { return 1.0; }});
         const double bb = s.drift_bound > 0 ? s.drift_bound : 1.0;
         const double sb = s.diffusion_bound > 0 ? s.diffusion_bound : 1.5;
         CoefficientField f(std::move(edges), s.ellipticity_floor, bb, sb,
                            s.horizon);
         f.mark_uniform_constants(0.0, 1.0);
         return f;
       }},
      {"linear_decay",
       [](const FieldSpec& s) {
         const double scale = s.drift_scale;
         std::vector<CoefficientField::Edge> edges(
             static_cast<std::size_t>(s.edge_count),
             {[scale](double, double x) { return -scale * x; },
              [](double, double) { return 1.0; }});
         const double bb = s.drift_bound > 0 ? s.drift_bound : 10.0 * scale;
         const double sb = s.diffusion_bound > 0 ? s.diffusion_bound : 1.5;
         return CoefficientField(std::move(edges), s.ellipticity_floor, bb, sb,
                                 s.horizon);
       }},
      {"time_ramp",
       [](const FieldSpec& s) {
         const double ramp = s.ramp;
         std::vector<CoefficientField::Edge> edges(
             static_cast<std::size_t>(s.edge_count),
             {[](double, double) { return 0.0; },
              [ramp](double t, double) { return 1.0 + ramp * t; }});
         const double bb = s.drift_bound > 0 ? s.drift_bound : 1.0;
         const double sb =
             s.diffusion_bound > 0 ? s.diffusion_bound : 1.0 + ramp * s.horizon + 0.5;
         return CoefficientField(std::move(edges), s.ellipticity_floor, bb, sb,
                                 s.horizon);
       }},
  };
  return registry;
}

}  // namespace

CoefficientField make_field(const FieldSpec& spec) {
  auto& reg = field_registry();
  auto it = reg.find(spec.name);
  if (it == reg.end())
    throw std::invalid_argument("make_field: unknown field name '" + spec.name +
                                "'");
  if (spec.edge_count < 1)
    throw std::invalid_argument("make_field: edge count must be >= 1");
  CoefficientField field = it->second(spec);
  field.set_label(spec.name);
  return field;
}

std::vector<std::string> builtin_field_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : field_registry()) names.push_back(name);
  return names;
}

void register_field(const std::string& name, FieldFactory factory) {
  field_registry()[name] = std::move(factory);
}

FieldReport validate_field(const CoefficientField& field,
                           const VertexWeights& alpha, const FieldGrid& grid) {
  FieldReport report;
  report.t_samples = grid.t_samples;
  report.x_samples = grid.x_samples;
  report.x_max = grid.x_max > 0.0
                     ? grid.x_max
                     : 1.0 + 6.0 * field.diffusion_bound() *
                               std::sqrt(field.horizon());
  report.note =
      "sampled check on a finite grid; necessary for the declared bounds, "
      "not sufficient";

  const int nt = std::max(2, grid.t_samples);
  const int nx = std::max(2, grid.x_samples);
  const double T = field.horizon();
  const double xmax = report.x_max;

  auto add = [&report](const std::string& item, int edge, double observed,
                       double required, bool pass) {
    report.checks.push_back({item, edge, observed, required, pass});
    report.all_pass = report.all_pass && pass;
  };

  for (int e = 1; e <= field.edge_count(); ++e) {
    double sig_min = std::numeric_limits<double>::infinity();
    double sig_max = 0.0, b_max = 0.0, b_lip = 0.0, sig_lip = 0.0;
    for (int it = 0; it < nt; ++it) {
      const double t = T * it / (nt - 1);
      double prev_b = 0.0, prev_s = 0.0, prev_x = 0.0;
      for (int ix = 0; ix < nx; ++ix) {
        const double x = xmax * ix / (nx - 1);
        const auto [b, s] = field.eval(e, t, x);
        sig_min = std::min(sig_min, s);
        sig_max = std::max(sig_max, std::fabs(s));
        b_max = std::max(b_max, std::fabs(b));
        if (ix > 0) {
          const double dx = x - prev_x;
          b_lip = std::max(b_lip, std::fabs(b - prev_b) / dx);
          sig_lip = std::max(sig_lip, std::fabs(s - prev_s) / dx);
        }
        prev_b = b;
        prev_s = s;
        prev_x = x;
      }
    }
    const double c = field.ellipticity_floor();
    add("ellipticity", e, sig_min, c, sig_min >= c);
    add("drift_bound", e, b_max, field.drift_bound(),
        b_max <= field.drift_bound());
    add("diffusion_bound", e, sig_max, field.diffusion_bound(),
        sig_max <= field.diffusion_bound());
    add("drift_lipschitz", e, b_lip, field.drift_bound(),
        b_lip <= field.drift_bound());
    add("diffusion_lipschitz", e, sig_lip, field.diffusion_bound(),
        sig_lip <= field.diffusion_bound());
  }

  double sum = 0.0;
  bool in_range = true;
  for (double a : alpha.values()) {
    sum += a;
    in_range = in_range && a > 0.0 && a <= 1.0;
  }
  add("weights_in_range", 0, in_range ? 1.0 : 0.0, 1.0, in_range);
  add("weights_sum", 0, sum, 1.0, std::fabs(sum - 1.0) <= 1e-12);
  if (alpha.edge_count() != field.edge_count())
    add("weights_edge_count", 0, alpha.edge_count(), field.edge_count(), false);

  return report;
}

nlohmann::ordered_json FieldReport::to_json() const {
  nlohmann::ordered_json j;
  j["all_pass"] = all_pass;
  j["note"] = note;
  j["grid"] = {{"t_samples", t_samples},
               {"x_samples", x_samples},
               {"x_max", x_max}};
  auto arr = nlohmann::ordered_json::array();
  for (const FieldCheck& c : checks) {
    arr.push_back({{"item", c.item},
                   {"edge", c.edge},
                   {"observed", c.observed},
                   {"required", c.required},
                   {"pass", c.pass}});
  }
  j["checks"] = arr;
  return j;
}

}  // namespace junction
