// response.hpp — Dynamical pathways (double-sided Feynman diagrams), their
// site-basis decomposition, and response-function evaluation on delay-time
// grids with classical or circuit engines.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exspec/circuit.hpp"
#include "exspec/collision.hpp"
#include "exspec/lindblad.hpp"
#include "exspec/model.hpp"

namespace exspec::response {

using alg::cxd;
using lindblad::DipoleSign;
using lindblad::Side;

enum class PathwayLabel { Linear, GSB, SE, ESA, Custom };
enum class PhaseMatching { Linear, Rephasing };

struct PathwayEvent {
    Side side;
    DipoleSign sign;
};

// Ordered light-matter events of one pathway; the final emission is a
// ket-side interaction with the stated sign (Minus except for the conjugate
// linear pathway). overall_sign is the commutator sign s = (-1)^(#bra).
struct PathwaySpec {
    int order{1};  // M
    std::vector<PathwayEvent> events;
    DipoleSign emission{DipoleSign::Minus};
    int overall_sign{1};
    PathwayLabel label{PathwayLabel::Custom};

    std::string name() const;
    void validate() const;
    // ket minus bra excitation count after the first m+1 events; drives the
    // rotating-frame sense of delay axis m.
    int coherence_sense(int axis) const;
    // True when the sign pattern can survive from the global ground state
    // (first event and first ket event must excite; emission must close the
    // excitation bookkeeping).
    bool structurally_allowed() const;
};

// All pathways of the phase-matched set. Linear: the two conjugate first-order
// pathways. Rephasing (M=3): GSB, SE, ESA with their interaction sequences.
std::vector<PathwaySpec> enumerate_pathways(int order, PhaseMatching pm);

struct SiteEvent {
    int site{0};
    char pauli{'X'};
};

// One circuit-sized unit: a pathway resolved to per-event sites and Pauli
// components. weight = Π μ_site; phase carries the ladder-decomposition
// coefficients of the chosen Pauli components.
struct SiteBasisPathway {
    std::vector<SiteEvent> events;  // M+1 entries, emission last
    double weight{1.0};
    cxd phase{1.0, 0.0};
};

enum class Pruning { None, ExcitationConserving };

std::vector<SiteBasisPathway> decompose_site_basis(const PathwaySpec& pathway,
                                                   const model::ExcitonSystem& sys,
                                                   Pruning pruning);

struct DelayAxis {
    double start_fs{0.0};
    double step_fs{10.0};
    int count{1};
};

struct GridSpec {
    std::vector<DelayAxis> axes;  // one per delay time t_1..t_M
    long points() const;
};

enum class Engine { Classical, QuantumExact, QuantumShots };
enum class ClassicalBackend { Lindblad, Collision };

struct Provenance {
    Engine engine{Engine::Classical};
    ClassicalBackend backend{ClassicalBackend::Lindblad};
    double dt_fs{0.1};
    int n_t1{1};
    int n_t2{1};
    long shots{0};
    std::uint64_t seed{0};
    std::string pruning{"none"};
    double rotating_frame_ev{0.0};
};

struct ResponseGrid {
    std::string pathway;
    std::vector<DelayAxis> axes;
    std::vector<int> senses;          // rotating-frame sense per axis
    std::vector<cxd> values;          // row-major, axis 0 slowest
    std::vector<double> variance;     // per-point estimate, shots engine only
    Provenance provenance;

    long points() const;
    long index(const std::vector<int>& idx) const;
};

struct ClassicalOptions {
    double dt_fs{0.1};
    lindblad::Stepper stepper{lindblad::Stepper::RK4};
    ClassicalBackend backend{ClassicalBackend::Lindblad};
};

ResponseGrid evaluate_classical(const PathwaySpec& pathway, const GridSpec& grid,
                                const model::ExcitonSystem& sys,
                                const model::EnvironmentSpec& env,
                                const ClassicalOptions& opts = {});

struct QuantumOptions {
    double dt_fs{0.1};
    int n_t1{1};
    int n_t2{1};
    Pruning pruning{Pruning::ExcitationConserving};
    model::AncillaScheme scheme{model::AncillaScheme::Single};
    long shots{0};             // 0 = exact mode
    std::uint64_t seed{0};
    int threads{1};
    std::uint64_t memory_budget_bytes{0};
};

// Hadamard-test evaluation: decomposes into site-basis pathways, emulates the
// coherence-block circuits over the grid, and assembles Σ w·phase·(<X>+i<Y>)
// with the s·i^M prefactor. Bin-by-bin comparable with evaluate_classical.
ResponseGrid evaluate_quantum(const PathwaySpec& pathway, const GridSpec& grid,
                              const model::ExcitonSystem& sys,
                              const model::EnvironmentSpec& env,
                              const QuantumOptions& opts = {});

// Single site-basis pathway evaluated as Pauli operator chains through the
// classical propagator; testing oracle for the decomposition algebra and the
// Hadamard-test phase convention.
std::vector<cxd> evaluate_pauli_chain_classical(const PathwaySpec& pathway,
                                                const SiteBasisPathway& sbp,
                                                const GridSpec& grid,
                                                const model::ExcitonSystem& sys,
                                                const model::EnvironmentSpec& env,
                                                const ClassicalOptions& opts = {});

} // namespace exspec::response
