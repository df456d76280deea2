// config.hpp — Run configuration: INI-style file with [system],
// [environment] and [simulation] sections, schema validation with
// field-level messages, and canonical serialization for reproducibility
// hashes. CLI flags override file values.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exspec/model.hpp"
#include "exspec/response.hpp"

namespace exspec::cli {

struct SimulationConfig {
    double dt_fs{0.1};
    double t_max_fs{200.0};
    double scan_step_fs{10.0};
    double t1_max_fs{110.0};
    double t3_max_fs{110.0};
    std::vector<double> t2_list_fs{0.0};
    double rotating_frame_ev{0.0};
    std::string engine{"classical"};  // classical | quantum-exact | quantum-shots
    long shots{0};                    // 0 = engine default
    std::uint64_t seed{1};
    std::string ancilla_scheme{"single"};  // single | per-pseudomode | per-collision
    int n_t1{1};
    int n_t2{1};
    int pad_factor{8};
    std::vector<std::string> pathways{"gsb", "se", "esa"};
    std::string pruning{"excitation"};  // none | excitation
    int threads{0};                     // 0 = hardware
    std::string stepper{"rk4"};         // rk4 | expm
    double noise_floor{-1.0};           // <0 = auto from shot variance
    std::string window{"none"};         // none | hann
};

struct RunConfig {
    model::ExcitonSystem system;
    model::EnvironmentSpec environment;
    SimulationConfig simulation;

    void validate() const;
    std::string canonical() const;     // deterministic text form
    std::uint64_t hash() const;        // FNV-1a of canonical()

    response::Engine engine() const;
    model::AncillaScheme scheme() const;
    response::Pruning pruning_mode() const;
    lindblad::Stepper stepper_mode() const;
    long effective_shots(int order) const;  // defaults: 20000 linear, 4000 third order
    int effective_threads() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

} // namespace exspec::cli
