#include "exspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace exspec::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

} // namespace

std::string version_string() { return "exspec 0.1.0"; }

void write_trajectory_csv(const std::string& path, const std::vector<double>& times_fs,
                          const std::vector<TrajectoryColumn>& columns) {
    auto out = open_out(path);
    out << "time_fs";
    for (const auto& c : columns) out << "," << c.name << "_re," << c.name << "_im";
    out << "\n";
    for (std::size_t k = 0; k < times_fs.size(); ++k) {
        out << fmt(times_fs[k]);
        for (const auto& c : columns) {
            out << "," << fmt(c.values[k].real()) << "," << fmt(c.values[k].imag());
        }
        out << "\n";
    }
}

void write_response_csv(const std::string& path, const response::ResponseGrid& grid) {
    auto out = open_out(path);
    const std::size_t n_axes = grid.axes.size();
    for (std::size_t a = 0; a < n_axes; ++a) out << "t" << (a + 1) << "_fs,";
    out << "re,im";
    if (!grid.variance.empty()) out << ",variance";
    out << "\n";
    std::vector<int> idx(n_axes, 0);
    const long npts = grid.points();
    for (long lin = 0; lin < npts; ++lin) {
        long rem = lin;
        for (std::size_t k = n_axes; k-- > 0;) {
            idx[k] = static_cast<int>(rem % grid.axes[k].count);
            rem /= grid.axes[k].count;
        }
        for (std::size_t a = 0; a < n_axes; ++a) {
            out << fmt(grid.axes[a].start_fs + grid.axes[a].step_fs * idx[a]) << ",";
        }
        const auto v = grid.values[static_cast<std::size_t>(lin)];
        out << fmt(v.real()) << "," << fmt(v.imag());
        if (!grid.variance.empty()) out << "," << fmt(grid.variance[static_cast<std::size_t>(lin)]);
        out << "\n";
    }
}

void write_spectrum1d_csv(const std::string& path, const spectra::Spectrum1D& s) {
    auto out = open_out(path);
    out << "omega_ev,amplitude\n";
    for (std::size_t j = 0; j < s.omega_ev.size(); ++j) {
        out << fmt(s.omega_ev[j]) << "," << fmt(s.amplitude[j]) << "\n";
    }
}

void write_spectrum2d_csv(const std::string& path, const spectra::Spectrum2D& s) {
    auto out = open_out(path);
    out << "omega1_ev,omega3_ev,amplitude\n";
    for (std::size_t i = 0; i < s.omega1_ev.size(); ++i) {
        for (std::size_t k = 0; k < s.omega3_ev.size(); ++k) {
            out << fmt(s.omega1_ev[i]) << "," << fmt(s.omega3_ev[k]) << ","
                << fmt(s.amplitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)))
                << "\n";
        }
    }
}

void write_spectrum2d_matrix(const std::string& path, const spectra::Spectrum2D& s) {
    auto out = open_out(path);
    out << "# omega3_ev:";
    for (double w : s.omega3_ev) out << " " << fmt(w);
    out << "\n";
    for (std::size_t i = 0; i < s.omega1_ev.size(); ++i) {
        out << fmt(s.omega1_ev[i]);
        for (std::size_t k = 0; k < s.omega3_ev.size(); ++k) {
            out << " " << fmt(s.amplitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        }
        out << "\n";
    }
}

void write_gate_census_json(const std::string& path, const circuit::GateCensus& census,
                            int n_qubits) {
    nlohmann::json j;
    j["qubits"] = n_qubits;
    j["total_instructions"] = census.total;
    j["two_qubit_gates"] = census.two_qubit;
    j["depth"] = census.depth;
    j["counts"] = census.counts;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_manifest(const std::string& path, const cli::RunConfig& cfg,
                    const std::string& command) {
    nlohmann::json j;
    j["version"] = version_string();
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.simulation.seed;
    j["engine"] = cfg.simulation.engine;
    j["dt_fs"] = cfg.simulation.dt_fs;
    j["config"] = cfg.canonical();
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

} // namespace exspec::io
