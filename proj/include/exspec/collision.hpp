// collision.hpp — Discrete-time collision-model propagator. Each step applies
// the exact Hamiltonian propagator followed by pair collisions with fresh
// two-level ancillae, realized as Kraus maps on the colliding subsystems.

#pragma once

#include <vector>

#include "exspec/algebra.hpp"
#include "exspec/lindblad.hpp"
#include "exspec/model.hpp"

namespace exspec::collision {

using alg::Mat;
using lindblad::DensityMatrix;

enum class CollisionKind { Pseudomode, Memoryless, Relaxation, Trap };

// One collision channel: `targets` lists the composite-space subsystems the
// ancilla couples to. rate_ev is Ω for pseudomode collisions, Γ for
// memoryless dephasing, γ for relaxation/trapping.
struct Collision {
    CollisionKind kind;
    double rate_ev{0.0};
    std::vector<int> targets;
};

struct CollisionStepSpec {
    double dt_fs{0.1};
    int hamiltonian_trotter_steps{1};  // n_T1, circuit realization only
    int collision_trotter_steps{1};    // n_T2, circuit realization only
    std::vector<Collision> collisions;
};

// Collision Hamiltonian on (target ⊗ ancilla); scales as dt^{-1/2}:
//   Pseudomode:  sqrt(2Ω ħ/dt) (a† σ_C^- + a σ_C^+)        [d_target = d]
//   Memoryless:  sqrt(Γ ħ/(4 dt)) σ^z ⊗ σ_C^x              [d_target = 2]
//   Relaxation:  sqrt(γ ħ/dt) (σ^+ σ_C^- + σ^- σ_C^+)      [d_target = 2]
//   Trap:        sqrt(γ ħ/dt) (σ_j^+ σ_rc^- σ_C^- + h.c.)  [d_target = 4]
Mat collision_hamiltonian(CollisionKind kind, double rate_ev, double dt_fs,
                          int d_target = 2, double hbar_ev_fs = 0.6582119569);

// Kraus pair of one collision map: K_b = <b_C| exp(-i H_C dt/ħ) |0_C>.
std::pair<Mat, Mat> collision_kraus(CollisionKind kind, double rate_ev, double dt_fs,
                                    int d_target = 2, double hbar_ev_fs = 0.6582119569);

// Channels implied by an EnvironmentSpec, site-major (same order as
// lindblad::standard_dissipators).
std::vector<Collision> standard_collisions(const model::ExcitonSystem& sys,
                                           const model::EnvironmentSpec& env,
                                           const model::CompositeSpace& cs);

class CollisionPropagator {
public:
    CollisionPropagator(const model::ExcitonSystem& sys, const model::EnvironmentSpec& env,
                        const model::CompositeSpace& cs, double dt_fs,
                        double hbar_ev_fs = 0.6582119569);
    // Explicit variant for custom collision lists / orderings.
    CollisionPropagator(alg::Space space, const Mat& hamiltonian,
                        std::vector<Collision> collisions, double dt_fs,
                        double hbar_ev_fs = 0.6582119569);

    double dt() const { return dt_fs_; }
    const alg::Space& space() const { return space_; }

    // ρ' = Tr_C{ U_C U (ρ ⊗ |0><0|_C) U† U_C† }; completely positive and
    // trace preserving.
    void step_inplace(Mat& rho) const;
    DensityMatrix step(const DensityMatrix& rho) const;

    // Composition of t/dt collision steps; t must be a multiple of dt.
    DensityMatrix propagate(const DensityMatrix& rho, double t_fs) const;

    // Reference path for tests: append an explicit ancilla qubit, conjugate
    // by exp(-i H_C dt/ħ), trace it out.
    Mat step_with_explicit_ancillae(const Mat& rho) const;

private:
    void build(const Mat& hamiltonian, const std::vector<Collision>& collisions);

    alg::Space space_;
    double dt_fs_;
    double hbar_;
    Mat u_h_;
    Mat u_h_dag_;
    std::vector<Collision> collisions_;
    struct KrausChannel {
        alg::LocalOp k0;
        alg::LocalOp k1;
    };
    std::vector<KrausChannel> kraus_;
    mutable Mat buf_a_, buf_b_, buf_c_;
};

// Convergence helper: max deviation of a trace observable between runs at dt
// and dt/2, for each dt in the list.
std::vector<double> scan_timestep(const model::ExcitonSystem& sys,
                                  const model::EnvironmentSpec& env,
                                  const std::vector<double>& dts_fs, double t_fs,
                                  const Mat& system_observable);

} // namespace exspec::collision
