#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "junction/engine.hpp"
#include "junction/ito.hpp"
#include "junction/local_time.hpp"
#include "junction/path_record.hpp"
#include "json.hpp"

// File formats, all versioned:
//   path CSV v1     header "# junction-path v1 delta=<d>", columns t,x,edge,N,dW
//                   (row k carries the increment of the step ending at t_k)
//   path pack v1    magic JPK1, little-endian; ensemble pack magic JPKE
//   series CSV v1   header "# junction-series v1 tag=<tag>", columns t,value
//   residual CSV v1 header "# junction-residual v1 ...", columns t,M

namespace junction {

void write_path_csv(std::ostream& os, const PathRecord& p);
void write_path_csv_file(const std::string& path, const PathRecord& p);
PathRecord read_path_csv(std::istream& is);
PathRecord read_path_csv_file(const std::string& path);

void write_path_pack(std::ostream& os, const PathRecord& p);
PathRecord read_path_pack(std::istream& is);

void write_ensemble_pack_file(const std::string& path,
                              const std::vector<PathRecord>& paths);
std::vector<PathRecord> read_ensemble_pack_file(const std::string& path);

void write_series_csv_file(const std::string& path, const LocalTimeSeries& s);
void write_residual_csv_file(const std::string& path, const ResidualSeries& s);

// Ensemble manifest: full configuration echo, code version, per-path stream
// identifiers.
nlohmann::ordered_json ensemble_manifest(const SimConfig& cfg,
                                         std::size_t n_paths,
                                         const std::string& format);
nlohmann::ordered_json sim_config_json(const SimConfig& cfg);

// Serialize a double so that parsing returns the identical value.
std::string format_double(double x);

const char* version_string();

}  // namespace junction
