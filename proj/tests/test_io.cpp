#include "junction/io.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "junction/engine.hpp"

using namespace junction;

namespace {

SimConfig small_config(std::uint64_t seed) {
  FieldSpec spec;
  spec.name = "constant";
  spec.edge_count = 3;
  SimConfig cfg{make_field(spec), VertexWeights({0.2, 0.3, 0.5})};
  cfg.x0 = 0.15;
  cfg.delta = 0.1;
  cfg.step = 1e-3;
  cfg.horizon = 0.5;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("path CSV round trip is value-exact") {
  const PathRecord p = simulate_delta_path(small_config(8), 2);
  std::ostringstream os;
  write_path_csv(os, p);
  std::istringstream is(os.str());
  const PathRecord q = read_path_csv(is);
  CHECK(q.delta == p.delta);
  CHECK(q.time == p.time);
  CHECK(q.position == p.position);
  CHECK(q.edge == p.edge);
  CHECK(q.jumps == p.jumps);
  CHECK(q.noise == p.noise);
  q.validate();

  std::istringstream garbage("not a header\n");
  CHECK_THROWS(read_path_csv(garbage));
}

TEST_CASE("binary pack round trip is bit-exact") {
  const PathRecord p = simulate_delta_path(small_config(9), 0);
  std::ostringstream os(std::ios::binary);
  write_path_pack(os, p);
  std::istringstream is(os.str(), std::ios::binary);
  const PathRecord q = read_path_pack(is);
  CHECK(q.time == p.time);
  CHECK(q.position == p.position);
  CHECK(q.noise == p.noise);

  std::istringstream bad("XXXX", std::ios::binary);
  CHECK_THROWS(read_path_pack(bad));
}

TEST_CASE("ensemble pack and manifest") {
  const SimConfig cfg = small_config(10);
  const Ensemble ensemble = simulate_batch(cfg, 3);
  const std::string path = "test_io_ensemble.jpke";
  write_ensemble_pack_file(path, ensemble.paths);
  const auto loaded = read_ensemble_pack_file(path);
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded[i].position == ensemble.paths[i].position);
    CHECK(loaded[i].jumps == ensemble.paths[i].jumps);
  }
  std::filesystem::remove(path);

  const auto manifest = ensemble_manifest(cfg, 3, "binary");
  CHECK(manifest["n_paths"].get<std::size_t>() == 3);
  CHECK(manifest["config"]["field"].get<std::string>() == "constant");
  CHECK(manifest["config"]["seed"].get<std::uint64_t>() == 10);
  CHECK(manifest["streams"].size() == 3);
  CHECK(manifest.contains("version"));
}

TEST_CASE("double formatting round-trips") {
  for (double x : {0.1, 1e-17, 123456.789, 0.30000000000000004, 2e300}) {
    CHECK(std::stod(format_double(x)) == x);
    CHECK(std::stod(format_double(-x)) == -x);
  }
  CHECK(std::stod(format_double(0.0)) == 0.0);
}
