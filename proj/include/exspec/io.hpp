// io.hpp — CSV and JSON artifact writers shared by the CLI commands.

#pragma once

#include <string>
#include <vector>

#include "exspec/circuit.hpp"
#include "exspec/config.hpp"
#include "exspec/response.hpp"
#include "exspec/spectra.hpp"

namespace exspec::io {

// time_fs column plus one Re/Im pair per named complex observable
struct TrajectoryColumn {
    std::string name;
    std::vector<alg::cxd> values;
};
void write_trajectory_csv(const std::string& path, const std::vector<double>& times_fs,
                          const std::vector<TrajectoryColumn>& columns);

// long format: one row per grid point, delay columns then re/im (and variance
// when present)
void write_response_csv(const std::string& path, const response::ResponseGrid& grid);

void write_spectrum1d_csv(const std::string& path, const spectra::Spectrum1D& s);
void write_spectrum2d_csv(const std::string& path, const spectra::Spectrum2D& s);
// gnuplot-compatible matrix block (one omega1 row per line)
void write_spectrum2d_matrix(const std::string& path, const spectra::Spectrum2D& s);

void write_gate_census_json(const std::string& path, const circuit::GateCensus& census,
                            int n_qubits);

// run manifest: config hash + canonical config + code version + seeds
void write_manifest(const std::string& path, const cli::RunConfig& cfg,
                    const std::string& command);

std::string version_string();

} // namespace exspec::io
