#include "junction/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace junction {

const char* version_string() { return "junction-sim 0.1.0"; }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_path_csv(std::ostream& os, const PathRecord& p) {
  os << "# junction-path v1 delta=" << format_double(p.delta) << "\n";
  os << "t,x,edge,N,dW\n";
  for (std::size_t k = 0; k < p.time.size(); ++k) {
    os << format_double(p.time[k]) << ',' << format_double(p.position[k]) << ','
       << p.edge[k] << ',' << p.jumps[k] << ',';
    if (k > 0) os << format_double(p.noise[k - 1]);
    os << '\n';
  }
}

void write_path_csv_file(const std::string& path, const PathRecord& p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_path_csv(os, p);
}

PathRecord read_path_csv(std::istream& is) {
  PathRecord p;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# junction-path v1", 0) != 0)
    throw std::runtime_error("path CSV: missing v1 header");
  const auto pos = line.find("delta=");
  if (pos == std::string::npos)
    throw std::runtime_error("path CSV: missing delta in header");
  p.delta = std::stod(line.substr(pos + 6));
  if (!std::getline(is, line))  // column header
    throw std::runtime_error("path CSV: missing column header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double t, x, dw = 0.0;
    int edge;
    long long n;
    char tail[64] = {0};
    const int got = std::sscanf(line.c_str(), "%lf,%lf,%d,%lld,%63s", &t, &x,
                                &edge, &n, tail);
    if (got < 4) throw std::runtime_error("path CSV: bad row '" + line + "'");
    p.time.push_back(t);
    p.position.push_back(x);
    p.edge.push_back(edge);
    p.jumps.push_back(n);
    if (!p.time.empty() && p.time.size() > 1) {
      dw = tail[0] ? std::stod(tail) : 0.0;
      p.noise.push_back(dw);
    }
  }
  return p;
}

PathRecord read_path_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_path_csv(is);
}

namespace {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw std::runtime_error("path pack: truncated stream");
  return v;
}

template <class T>
void put_vec(std::ostream& os, const std::vector<T>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void get_vec(std::istream& is, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw std::runtime_error("path pack: truncated stream");
}

void write_pack_body(std::ostream& os, const PathRecord& p) {
  put<std::uint64_t>(os, p.time.size());
  put<double>(os, p.delta);
  put_vec(os, p.time);
  put_vec(os, p.position);
  put_vec(os, p.edge);
  put_vec(os, p.jumps);
  put_vec(os, p.noise);
}

PathRecord read_pack_body(std::istream& is) {
  PathRecord p;
  const auto n = static_cast<std::size_t>(get<std::uint64_t>(is));
  p.delta = get<double>(is);
  get_vec(is, p.time, n);
  get_vec(is, p.position, n);
  get_vec(is, p.edge, n);
  get_vec(is, p.jumps, n);
  get_vec(is, p.noise, n > 0 ? n - 1 : 0);
  return p;
}

}  // namespace

void write_path_pack(std::ostream& os, const PathRecord& p) {
  os.write("JPK1", 4);
  put<std::uint32_t>(os, 1);
  write_pack_body(os, p);
}

PathRecord read_path_pack(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "JPK1", 4) != 0)
    throw std::runtime_error("path pack: bad magic");
  if (get<std::uint32_t>(is) != 1)
    throw std::runtime_error("path pack: unsupported version");
  return read_pack_body(is);
}

void write_ensemble_pack_file(const std::string& path,
                              const std::vector<PathRecord>& paths) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write("JPKE", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint64_t>(os, paths.size());
  for (const PathRecord& p : paths) write_pack_body(os, p);
}

std::vector<PathRecord> read_ensemble_pack_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "JPKE", 4) != 0)
    throw std::runtime_error("ensemble pack: bad magic");
  if (get<std::uint32_t>(is) != 1)
    throw std::runtime_error("ensemble pack: unsupported version");
  const auto count = static_cast<std::size_t>(get<std::uint64_t>(is));
  std::vector<PathRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(read_pack_body(is));
  return out;
}

void write_series_csv_file(const std::string& path, const LocalTimeSeries& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "# junction-series v1\n";
  os << "t,value,estimator_tag\n";
  for (std::size_t k = 0; k < s.time.size(); ++k)
    os << format_double(s.time[k]) << ',' << format_double(s.value[k]) << ','
       << s.tag << '\n';
}

void write_residual_csv_file(const std::string& path, const ResidualSeries& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  const char* mode = s.mode == ResidualMode::against_local_time
                         ? "against_local_time"
                         : "against_stochastic_integral";
  os << "# junction-residual v1 function=" << s.function << "\n";
  os << "t,M,mode\n";
  for (std::size_t k = 0; k < s.time.size(); ++k)
    os << format_double(s.time[k]) << ',' << format_double(s.value[k]) << ','
       << mode << '\n';
}

nlohmann::ordered_json sim_config_json(const SimConfig& cfg) {
  nlohmann::ordered_json j;
  j["field"] = cfg.field.label().empty() ? "custom" : cfg.field.label();
  j["edges"] = cfg.field.edge_count();
  j["alpha"] = cfg.alpha.values();
  j["x0"] = cfg.x0;
  j["initial_edge"] =
      cfg.initial_edge == 0 ? "draw-from-alpha" : std::to_string(cfg.initial_edge);
  j["delta"] = cfg.delta;
  j["step"] = cfg.step_size();
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  j["ellipticity_floor"] = cfg.field.ellipticity_floor();
  j["drift_bound"] = cfg.field.drift_bound();
  j["diffusion_bound"] = cfg.field.diffusion_bound();
  return j;
}

nlohmann::ordered_json ensemble_manifest(const SimConfig& cfg,
                                         std::size_t n_paths,
                                         const std::string& format) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["format"] = format;
  j["config"] = sim_config_json(cfg);
  j["n_paths"] = n_paths;
  auto streams = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < n_paths; ++i)
    streams.push_back({{"path", i}, {"seed", cfg.seed}, {"stream", i}});
  j["streams"] = streams;
  return j;
}

}  // namespace junction
