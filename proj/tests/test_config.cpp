#include "junction/config.hpp"

#include <string>

#include "doctest.h"

using namespace junction;

namespace {

const char* kSample = R"(# sample configuration
[experiment]
name = radial_law        # trailing comment
n_paths = 500

[sim]
field = constant
edges = 3
alpha = 0.2, 0.3, 0.5
delta = 0.01
x0 = 0.01
seed = 7
draw = true

[estimator]
epsilons = 0.2, 0.1, 0.05
subset = 1, 2
)";

}  // namespace

TEST_CASE("parsing sections, scalars and lists") {
  const ConfigFile cfg = ConfigFile::parse_string(kSample);
  CHECK(cfg.require_string("experiment", "name") == "radial_law");
  CHECK(cfg.get_int("experiment", "n_paths", 0) == 500);
  CHECK(cfg.get_double("sim", "delta", 0.0) == doctest::Approx(0.01));
  CHECK(cfg.get_string("sim", "field", "") == "constant");
  CHECK(cfg.get_bool("sim", "draw", false));
  CHECK(cfg.get_doubles("sim", "alpha", {}) ==
        std::vector<double>{0.2, 0.3, 0.5});
  CHECK(cfg.get_ints("estimator", "subset", {}) == std::vector<int>{1, 2});
  CHECK(cfg.has("estimator", "epsilons"));
  CHECK(!cfg.has("estimator", "thetas"));
  CHECK(cfg.get_double("sim", "missing", 1.25) == 1.25);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    ConfigFile::parse_string("[a]\nx = 1\nx = 2\n", "dup.ini");
    FAIL("expected duplicate-key error");
  } catch (const std::exception& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("dup.ini:3") != std::string::npos);
    CHECK(msg.find("duplicate") != std::string::npos);
  }

  CHECK_THROWS(ConfigFile::parse_string("x = 1\n"));        // before a section
  CHECK_THROWS(ConfigFile::parse_string("[a\nx = 1\n"));    // unterminated
  CHECK_THROWS(ConfigFile::parse_string("[a]\nno_equals\n"));
  CHECK_THROWS(ConfigFile::parse_string("[a]\n= 1\n"));     // empty key

  const ConfigFile bad = ConfigFile::parse_string("[a]\nx = pears\n", "t.ini");
  try {
    bad.require_double("a", "x");
    FAIL("expected number error");
  } catch (const std::exception& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("t.ini:2") != std::string::npos);
    CHECK(msg.find("not a number") != std::string::npos);
  }
  CHECK_THROWS(bad.require_string("a", "missing"));
  CHECK_THROWS(bad.get_bool("a", "x", true));
}

TEST_CASE("list parsing errors") {
  const ConfigFile cfg =
      ConfigFile::parse_string("[s]\nxs = 1, two, 3\n", "l.ini");
  CHECK_THROWS(cfg.get_doubles("s", "xs", {}));
  CHECK_THROWS(cfg.get_ints("s", "xs", {}));
  CHECK(cfg.get_strings("s", "xs", {}) ==
        std::vector<std::string>{"1", "two", "3"});
}
