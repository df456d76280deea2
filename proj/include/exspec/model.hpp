// model.hpp — Physical model: exciton system, environment decomposition,
// pseudomode embedding, register layouts, and Hamiltonian construction.

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exspec/algebra.hpp"

namespace exspec::model {

using alg::Mat;

// Coupled two-level chromophores. couplings is a symmetric N×N matrix with
// zero diagonal; dipoles holds per-site transition dipole strengths.
struct ExcitonSystem {
    int n_sites{1};
    std::vector<double> energies_ev;
    Eigen::MatrixXd couplings_ev;
    std::vector<double> dipoles;

    void validate() const;
};

inline constexpr double kInfiniteWidth = std::numeric_limits<double>::infinity();

// One Lorentzian component of the environment spectral function. A term with
// infinite width is memoryless: it carries no pseudomode and acts purely as a
// dephasing channel. split_count replicates the term into identical
// pseudomodes of amplitude amplitude_ev / split_count.
struct LorentzianTerm {
    double amplitude_ev{0.0};   // Γ
    double width_ev{kInfiniteWidth};  // Ω (INFINITE -> memoryless)
    double center_ev{0.0};      // ω0
    int levels{2};              // truncation d per replica
    int split_count{1};         // W'

    bool memoryless() const { return std::isinf(width_ev); }
    double coupling_ev() const;  // g = sqrt(Γ·Ω/2), finite terms only
    void validate() const;
};

struct TrapSpec {
    int site{0};        // 0-based target chromophore
    double rate_ev{0.0};
};

// Environment shared by every chromophore, plus optional site relaxation and
// trapping channels.
struct EnvironmentSpec {
    std::vector<LorentzianTerm> terms;
    std::vector<double> relaxation_rates_ev;  // per site, empty = all zero
    std::optional<TrapSpec> trap;

    void validate(int n_sites) const;
    // Terms after applying split_count, memoryless terms excluded.
    std::vector<LorentzianTerm> pseudomode_terms() const;
    std::vector<LorentzianTerm> memoryless_terms() const;
};

// Spectral function C(ω) = Σ_k Γ_k Ω_k² / ((ω-ω0_k)² + Ω_k²); memoryless
// terms contribute the constant Γ_k.
double spectral_function(const EnvironmentSpec& env, double omega_ev);

// Split one finite term into w identical replicas of amplitude Γ/w.
std::vector<LorentzianTerm> split_lorentzian(const LorentzianTerm& term, int w);

enum class AncillaScheme { PerCollision, PerPseudomode, Single };

enum class QubitRole { ResponseAncilla, Site, Pseudomode, CollisionAncilla, ReactionCenter };

struct QubitInfo {
    QubitRole role;
    std::string name;   // "a", "s1", "p1.1", "ac", "rc", ...
    int site{-1};       // chromophore index for Site/Pseudomode
    int mode{-1};       // replica index for Pseudomode
    int bit{0};         // bit within a Gray-coded mode register
};

// Qubit register for the circuit realization: [a][s_1..s_N][p_11..p_NW][ac...][rc?].
struct RegisterLayout {
    std::vector<QubitInfo> qubits;
    AncillaScheme scheme{AncillaScheme::Single};
    int n_sites{0};
    int n_modes_per_site{0};   // post-split replica count W

    int total_qubits() const { return static_cast<int>(qubits.size()); }
    int response_ancilla() const { return 0; }
    int site_qubit(int i) const;
    // First qubit and width of the Gray register of replica (site i, mode k).
    std::pair<int, int> mode_qubits(int i, int k) const;
    std::vector<int> collision_ancillae() const;
    std::optional<int> reaction_center() const;
};

// n_steps is only used by the PerCollision scheme (one ancilla per collision
// per time step).
RegisterLayout layout_register(const ExcitonSystem& sys, const EnvironmentSpec& env,
                               AncillaScheme scheme, int n_steps = 1);

// Classical composite register: one qubit per site followed by one d-level
// subsystem per post-split pseudomode (site-major), plus one qubit for the
// reaction center when a trap is configured.
struct CompositeSpace {
    alg::Space space;
    int n_sites{0};
    std::vector<std::pair<int, LorentzianTerm>> modes;  // (subsystem index, term) site-major
    std::vector<int> mode_site;                         // owning site per mode
    std::optional<int> reaction_center;                 // subsystem index
};

CompositeSpace composite_space(const ExcitonSystem& sys, const EnvironmentSpec& env);

// H_S = -Σ ε_i/2 σ_i^z + Σ_{i<j} J_ij (σ_i^+ σ_j^- + σ_i^- σ_j^+) on the
// 2^N one-hot space.
Mat build_system_hamiltonian(const ExcitonSystem& sys);

// H_P = Σ ω0_k a†_ik a_ik and H_EP = Σ_i |e_i><e_i| Σ_k g_k (a†_ik + a_ik)
// on the composite space. All terms must be finite-width.
struct PseudomodeHamiltonians {
    Mat h_modes;
    Mat h_coupling;
};
PseudomodeHamiltonians build_pseudomode_hamiltonians(const ExcitonSystem& sys,
                                                     const EnvironmentSpec& env,
                                                     const CompositeSpace& cs);

// Full H = H_S + H_P + H_EP embedded in the composite space.
Mat build_total_hamiltonian(const ExcitonSystem& sys, const EnvironmentSpec& env,
                            const CompositeSpace& cs);

// μ^± = Σ_i μ_i σ_i^± embedded in the composite space.
Mat dipole_raising(const ExcitonSystem& sys, const CompositeSpace& cs);
Mat dipole_lowering(const ExcitonSystem& sys, const CompositeSpace& cs);

// Total-excitation number operator of the system qubits.
Mat excitation_number(const ExcitonSystem& sys, const CompositeSpace& cs);

} // namespace exspec::model
