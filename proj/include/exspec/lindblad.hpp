// lindblad.hpp — Dense Lindblad master-equation propagator on the composite
// system⊗pseudomode register. Serves as the classical reference for the
// collision model and the circuit emulator.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "exspec/algebra.hpp"
#include "exspec/model.hpp"

namespace exspec::lindblad {

using alg::Mat;

// Density matrix plus a contract flag: physical states stay Hermitian,
// trace-one and positive; perturbative states reached through one-sided
// dipole applications are exempt from those checks.
struct DensityMatrix {
    Mat data;
    bool physical{true};
};

// Hermiticity / trace / positivity checks for physical states.
bool is_hermitian(const Mat& rho, double tol = 1e-10);
double trace_error(const Mat& rho);
double min_eigenvalue(const Mat& rho);
void check_physical(const DensityMatrix& rho, double herm_tol = 1e-10, double pos_tol = 1e-8);

enum class DissipatorKind { PseudomodeDecay, MemorylessDephasing, SiteRelaxation, Trap };

// One Lindblad channel: rate (eV) and jump operator acting on `targets` of
// the composite space. The propagator divides rates by hbar.
struct DissipatorSpec {
    DissipatorKind kind;
    double rate_ev{0.0};
    std::vector<int> targets;
    Mat jump;
};

// Channels implied by an EnvironmentSpec: pseudomode decay at 2Ω_k per
// replica, memoryless dephasing at Γ/4 with jump σ_i^z per site, site
// relaxation γ_R,i σ_i^-, and the joint trap jump σ_j^- σ_rc^+.
std::vector<DissipatorSpec> standard_dissipators(const model::ExcitonSystem& sys,
                                                 const model::EnvironmentSpec& env,
                                                 const model::CompositeSpace& cs);

class Liouvillian {
public:
    Liouvillian(alg::Space space, const Mat& h, std::vector<DissipatorSpec> dissipators,
                double hbar_ev_fs);

    const alg::Space& space() const { return space_; }
    int dim() const { return space_.dim(); }
    double hbar() const { return hbar_; }

    // dρ/dt; `hermitian` selects the cheaper symmetric evaluation.
    void apply(const Mat& rho, Mat& out, bool hermitian) const;
    Mat apply(const Mat& rho, bool hermitian) const;

    // Column-stacked dense superoperator, for exponential stepping and tests.
    Mat dense_superoperator() const;

private:
    alg::Space space_;
    Eigen::SparseMatrix<alg::cxd> h_;
    struct Channel {
        double rate_ev;
        Eigen::SparseMatrix<alg::cxd> jump;
        Eigen::SparseMatrix<alg::cxd> jump_dag;
        Eigen::SparseMatrix<alg::cxd> jdj;  // J†J
    };
    std::vector<Channel> channels_;
    double hbar_;
};

enum class Stepper { RK4, Expm };

struct PropagateOptions {
    double dt_fs{0.1};
    Stepper stepper{Stepper::RK4};
    double trace_tol{1e-8};      // per-step drift rejection, physical states only
    int expm_max_dim{40};        // dense-superoperator stepping limit
};

class Propagator {
public:
    Propagator(Liouvillian liouvillian, PropagateOptions options);

    const Liouvillian& liouvillian() const { return liou_; }
    const PropagateOptions& options() const { return opt_; }

    // Evolve for t_fs (a multiple of dt). Satisfies the composition property
    // propagate(rho, a + b) == propagate(propagate(rho, a), b).
    DensityMatrix propagate(const DensityMatrix& rho, double t_fs) const;

    void step_inplace(DensityMatrix& rho) const;

private:
    void rk4_step(Mat& rho, bool hermitian) const;
    const Mat& expm_step_matrix() const;

    Liouvillian liou_;
    PropagateOptions opt_;
    mutable std::optional<Mat> expm_step_;
    mutable Mat k1_, k2_, k3_, k4_, tmp_;
};

enum class Side { Ket, Bra };
enum class DipoleSign { Plus, Minus };
inline constexpr int kFullDipole = -1;

// Left- or right-multiply by μ^± (site = kFullDipole) or μ_i σ_i^±. The
// result is flagged non-physical.
DensityMatrix apply_dipole(const DensityMatrix& rho, const model::ExcitonSystem& sys,
                           const model::CompositeSpace& cs, Side side, DipoleSign sign,
                           int site = kFullDipole);

// Ground state ⊗ pseudomode vacuum on the composite space.
DensityMatrix ground_state(const model::CompositeSpace& cs);

// Convergence helper: max |observable| deviation between consecutive
// truncation levels for the same environment, scanning d over `levels`.
std::vector<double> scan_truncation(const model::ExcitonSystem& sys,
                                    model::EnvironmentSpec env,
                                    const std::vector<int>& levels,
                                    const Mat& system_observable,
                                    double t_fs, double dt_fs);

} // namespace exspec::lindblad
