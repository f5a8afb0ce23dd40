#include "junction/test_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace junction {

namespace {

TestFunction::EdgePart constant_part() {
  auto zero = [](double, double) { return 0.0; };
  return {[](double, double) { return 1.0; }, zero, zero, zero};
}

TestFunction::EdgePart linear_part() {
  auto zero = [](double, double) { return 0.0; };
  return {[](double, double y) { return y; }, zero,
          [](double, double) { return 1.0; }, zero};
}

TestFunction::EdgePart quadratic_part() {
  auto zero = [](double, double) { return 0.0; };
  return {[](double, double y) { return y * y; }, zero,
          [](double, double y) { return 2.0 * y; },
          [](double, double) { return 2.0; }};
}

TestFunction::EdgePart edge_weighted_part(int i) {
  const double c = static_cast<double>(i);
  return {[c](double, double y) { return c * y * std::exp(-y); },
          [](double, double) { return 0.0; },
          [c](double, double y) { return c * (1.0 - y) * std::exp(-y); },
          [c](double, double y) { return c * (y - 2.0) * std::exp(-y); }};
}

TestFunction::EdgePart time_decay_sin_part() {
  return {[](double t, double y) { return std::exp(-t) * std::sin(y); },
          [](double t, double y) { return -std::exp(-t) * std::sin(y); },
          [](double t, double y) { return std::exp(-t) * std::cos(y); },
          [](double t, double y) { return -std::exp(-t) * std::sin(y); }};
}

}  // namespace

TestFunction make_test_function(const std::string& name, int edge_count) {
  if (edge_count < 1)
    throw std::invalid_argument("make_test_function: edge count must be >= 1");
  TestFunction out;
  out.name = name;
  out.edges.reserve(static_cast<std::size_t>(edge_count));
  for (int i = 1; i <= edge_count; ++i) {
    if (name == "constant") {
      out.edges.push_back(constant_part());
    } else if (name == "linear_symmetric") {
      out.edges.push_back(linear_part());
    } else if (name == "quadratic") {
      out.edges.push_back(quadratic_part());
    } else if (name == "edge_weighted_linear") {
      out.edges.push_back(edge_weighted_part(i));
    } else if (name == "time_decay_sin") {
      out.edges.push_back(time_decay_sin_part());
    } else {
      throw std::invalid_argument("make_test_function: unknown name '" + name +
                                  "'");
    }
  }
  return out;
}

std::vector<std::string> test_function_names() {
  return {"constant", "linear_symmetric", "quadratic", "edge_weighted_linear",
          "time_decay_sin"};
}

TestFunctionReport validate_test_function(const TestFunction& f, double horizon,
                                          int t_samples, int y_samples,
                                          double y_max) {
  if (f.edges.empty())
    throw std::invalid_argument("validate_test_function: no edges");
  TestFunctionReport report;
  auto add = [&report](const TestFunctionCheck& c) {
    report.checks.push_back(c);
    report.all_pass = report.all_pass && c.pass;
  };

  const int nt = std::max(2, t_samples);
  const int ny = std::max(2, y_samples);

  // Vertex continuity across edges.
  double worst_gap = 0.0, worst_t = 0.0;
  for (int it = 0; it < nt; ++it) {
    const double t = horizon * it / (nt - 1);
    const double f1 = f.edges.front().f(t, 0.0);
    for (std::size_t e = 1; e < f.edges.size(); ++e) {
      const double gap = std::fabs(f.edges[e].f(t, 0.0) - f1);
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_t = t;
      }
    }
  }
  add({"vertex_continuity", 0, worst_t, 0.0, worst_gap, 1e-9,
       worst_gap <= 1e-9});

  // Supplied derivatives against central differences.
  const double ht = std::max(1e-6, horizon * 1e-6);
  const double hy = std::max(1e-6, y_max * 1e-6);
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    const auto& part = f.edges[e];
    double worst_ratio = 0.0;
    TestFunctionCheck worst{"derivatives", static_cast<int>(e + 1), 0, 0, 0, 0,
                            true};
    for (int it = 0; it < nt; ++it) {
      const double t = ht + (horizon - 2 * ht) * it / (nt - 1);
      for (int iy = 0; iy < ny; ++iy) {
        const double y = hy + (y_max - 2 * hy) * iy / (ny - 1);
        const double value = part.f(t, y);
        const double tol = std::max(1e-5, 1e-3 * std::fabs(value));
        const double dt_fd = (part.f(t + ht, y) - part.f(t - ht, y)) / (2 * ht);
        const double dy_fd = (part.f(t, y + hy) - part.f(t, y - hy)) / (2 * hy);
        const double dyy_fd =
            (part.f(t, y + hy) - 2 * value + part.f(t, y - hy)) / (hy * hy);
        const double errs[3] = {std::fabs(part.ft(t, y) - dt_fd),
                                std::fabs(part.fy(t, y) - dy_fd),
                                std::fabs(part.fyy(t, y) - dyy_fd)};
        const char* items[3] = {"time_derivative", "space_derivative",
                                "second_space_derivative"};
        for (int d = 0; d < 3; ++d) {
          if (errs[d] / tol > worst_ratio) {
            worst_ratio = errs[d] / tol;
            worst = {items[d], static_cast<int>(e + 1), t,     y,
                     errs[d],  tol,                     errs[d] <= tol};
          }
        }
      }
    }
    add(worst);
  }
  return report;
}

nlohmann::ordered_json TestFunctionReport::to_json() const {
  nlohmann::ordered_json j;
  j["all_pass"] = all_pass;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"item", c.item},
                   {"edge", c.edge},
                   {"t", c.t},
                   {"y", c.y},
                   {"observed", c.observed},
                   {"limit", c.limit},
                   {"pass", c.pass}});
  j["checks"] = arr;
  return j;
}

}  // namespace junction
