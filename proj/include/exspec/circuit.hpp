// circuit.hpp — Circuit synthesis and emulation: Hadamard-test backbone,
// controlled dipole gates, Trotterized system-pseudomode evolution with
// collision blocks and mid-circuit resets, exact density-matrix emulation and
// shot sampling, gate census.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exspec/algebra.hpp"
#include "exspec/lindblad.hpp"
#include "exspec/model.hpp"

namespace exspec::circuit {

using alg::cxd;
using alg::Mat;

enum class GateKind { H, X, Y, CX, CY, RZ, RX, RXX, RYY, RZX, Reset, Measure };
enum class ControlPolarity { Closed, Open };
enum class MeasureBasis { X, Y };

// Rotation conventions: RZ(θ)=exp(-iθ/2 Z), RX(θ)=exp(-iθ/2 X),
// RXX(θ)=exp(-iθ/2 X⊗X), RYY(θ)=exp(-iθ/2 Y⊗Y),
// RZX(θ)=exp(-iθ/2 Z⊗X) with Z on qubits[0] and X on qubits[1].
struct Gate {
    GateKind kind;
    std::vector<int> qubits;   // controlled gates: {control, target}
    double angle{0.0};
    ControlPolarity polarity{ControlPolarity::Closed};
    MeasureBasis basis{MeasureBasis::X};

    static Gate h(int q) { return {GateKind::H, {q}}; }
    static Gate x(int q) { return {GateKind::X, {q}}; }
    static Gate y(int q) { return {GateKind::Y, {q}}; }
    static Gate cx(int c, int t, ControlPolarity p = ControlPolarity::Closed) {
        return {GateKind::CX, {c, t}, 0.0, p};
    }
    static Gate cy(int c, int t, ControlPolarity p = ControlPolarity::Closed) {
        return {GateKind::CY, {c, t}, 0.0, p};
    }
    static Gate rz(int q, double th) { return {GateKind::RZ, {q}, th}; }
    static Gate rx(int q, double th) { return {GateKind::RX, {q}, th}; }
    static Gate rxx(int a, int b, double th) { return {GateKind::RXX, {a, b}, th}; }
    static Gate ryy(int a, int b, double th) { return {GateKind::RYY, {a, b}, th}; }
    static Gate rzx(int zq, int xq, double th) { return {GateKind::RZX, {zq, xq}, th}; }
    static Gate reset(int q) { return {GateKind::Reset, {q}}; }
    static Gate measure(int q, MeasureBasis b) { return {GateKind::Measure, {q}, 0.0, ControlPolarity::Closed, b}; }

    bool operator==(const Gate& o) const;
};

struct CircuitMetadata {
    std::string pathway;
    std::vector<double> delays_fs;
    long shots{0};
    std::uint64_t seed{0};
};

struct CircuitIR {
    model::RegisterLayout layout;
    std::vector<Gate> instructions;
    CircuitMetadata metadata;

    int n_qubits() const { return layout.total_qubits(); }
    // Every Reset targets a collision ancilla; at most one Measure, on the
    // response ancilla.
    void validate() const;
};

// --------------------------- circuit synthesis ------------------------------

struct TrotterSettings {
    double dt_fs{0.1};
    int n_t1{1};
    int n_t2{1};
};

// Instruction block evolving the register by one time step dt: n_t1
// repetitions of the Hamiltonian sub-step followed by the collision block
// (n_t2 repetitions per channel) with ancilla resets. step_index selects the
// ancilla set in the PerCollision scheme.
std::vector<Gate> trotter_step_circuit(const model::ExcitonSystem& sys,
                                       const model::EnvironmentSpec& env,
                                       const model::RegisterLayout& layout,
                                       const TrotterSettings& ts, int step_index = 0);

// Controlled dipole gate for one light-matter event: closed control for
// ket-side events, open control for bra-side ones.
std::vector<Gate> interaction_gates(const model::RegisterLayout& layout, lindblad::Side side,
                                    char pauli, int site);

struct PathwayCircuitEvent {
    lindblad::Side side;
    char pauli;  // 'X' or 'Y'
    int site;    // 0-based
};

// Full Hadamard-test circuit: H on the response ancilla, alternating
// interaction gates and delay evolution blocks, emission gates (ket side),
// and a single measurement in the requested basis. delays_fs must have one
// entry per interaction event (the evolution after the emission is omitted).
CircuitIR build_pathway_circuit(const model::ExcitonSystem& sys,
                                const model::EnvironmentSpec& env,
                                const model::RegisterLayout& layout,
                                const std::vector<PathwayCircuitEvent>& events,
                                const PathwayCircuitEvent& emission,
                                const std::vector<double>& delays_fs,
                                const TrotterSettings& ts, MeasureBasis basis);

// exp(-i angle/2 · P) for a Pauli string over `qubits` via basis rotations
// and a CX staircase.
std::vector<Gate> pauli_exponential_gates(const std::string& ops, const std::vector<int>& qubits,
                                          double angle);

// ------------------------------- emulation ----------------------------------

struct EmulationResult {
    double expectation{0.0};
    double variance{0.0};
    long shots{0};   // 0 = exact mode
};

std::uint64_t default_memory_budget();  // EXSPEC_MEM_BUDGET_BYTES or 2 GiB

struct EmulateOptions {
    long shots{0};
    std::uint64_t seed{0};
    std::uint64_t memory_budget_bytes{0};  // 0 = default_memory_budget()
};

// Exact density-matrix emulation (Reset = trace-out-and-reinitialize). With
// shots > 0 the expectation is a seeded Bernoulli estimate of the exact
// single-qubit marginal.
EmulationResult emulate(const CircuitIR& circuit, const EmulateOptions& opts = {});

// Both ancilla readouts from a single density-matrix pass; the circuit's own
// Measure instruction is ignored in favor of the two bases.
std::pair<EmulationResult, EmulationResult> emulate_xy(const CircuitIR& circuit,
                                                       const EmulateOptions& opts = {});

// Full end-of-circuit density matrix (testing hook).
Mat emulate_density_matrix(const CircuitIR& circuit, std::uint64_t memory_budget_bytes = 0);

// ------------------------------ block engine --------------------------------

// Fast path for pathway sweeps. The Hadamard-test state is block-diagonal in
// the response ancilla; only the |1><0| coherence block B (dimension
// 2^(Q-1)) is tracked: ket-controlled gates multiply from the left,
// bra-controlled ones from the right, evolution gates conjugate, and
// <X> + i<Y> = Tr B with B(0) = ρ0.
class BlockEmulator {
public:
    BlockEmulator(const model::ExcitonSystem& sys, const model::EnvironmentSpec& env,
                  const model::RegisterLayout& layout, const TrotterSettings& ts);

    const alg::Space& block_space() const { return space_; }
    Mat initial_block() const;

    void apply_step(Mat& block) const;  // one dt evolution block
    void apply_event(Mat& block, lindblad::Side side, char pauli, int site) const;
    // Tr{P_site · block}: emission readout without materializing the product.
    cxd readout(const Mat& block, char pauli, int site) const;

private:
    struct Prepared {
        enum class Action { Conjugate, Reset } action;
        std::optional<alg::LocalOp> op;
        int reset_subsystem{-1};
    };
    alg::Space space_;
    model::RegisterLayout layout_;
    std::vector<Prepared> step_ops_;
    mutable Mat buf_, buf2_;
};

// -------------------------------- census ------------------------------------

struct GateCensus {
    std::map<std::string, long> counts;  // by gate name
    long two_qubit{0};
    long total{0};
    int depth{0};
};

GateCensus gate_census(const CircuitIR& circuit);
// Two-qubit gates in one Hamiltonian sub-step acting on system qubits only.
long system_block_two_qubit_count(const model::ExcitonSystem& sys,
                                  const model::EnvironmentSpec& env);

const char* gate_name(GateKind kind);

// Dense unitary of a gate on its own qubits (no controls resolved), testing hook.
Mat gate_matrix(const Gate& g);

} // namespace exspec::circuit
