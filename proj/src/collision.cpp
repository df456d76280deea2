#include "exspec/collision.hpp"

#include <cmath>
#include <stdexcept>

#include "exspec/units.hpp"

namespace exspec::collision {

using alg::cxd;

Mat collision_hamiltonian(CollisionKind kind, double rate_ev, double dt_fs,
                          int d_target, double hbar_ev_fs) {
    if (dt_fs <= 0.0) throw std::invalid_argument("collision_hamiltonian: dt must be > 0");
    if (rate_ev < 0.0) throw std::invalid_argument("collision_hamiltonian: rate must be >= 0");
    switch (kind) {
        case CollisionKind::Pseudomode: {
            const double c = std::sqrt(2.0 * rate_ev * hbar_ev_fs / dt_fs);
            const Mat a = alg::boson_annihilation(d_target);
            const Mat adag = a.adjoint();
            return c * (alg::kron(adag, alg::sigma_minus()) + alg::kron(a, alg::sigma_plus()));
        }
        case CollisionKind::Memoryless: {
            const double c = std::sqrt(rate_ev * hbar_ev_fs / (4.0 * dt_fs));
            return c * alg::kron(alg::pauli_z(), alg::pauli_x());
        }
        case CollisionKind::Relaxation: {
            const double c = std::sqrt(rate_ev * hbar_ev_fs / dt_fs);
            return c * (alg::kron(alg::sigma_plus(), alg::sigma_minus()) +
                        alg::kron(alg::sigma_minus(), alg::sigma_plus()));
        }
        case CollisionKind::Trap: {
            const double c = std::sqrt(rate_ev * hbar_ev_fs / dt_fs);
            const Mat j = alg::kron(alg::sigma_minus(), alg::sigma_plus());  // σ_j^- σ_rc^+
            const Mat jdag = j.adjoint();
            return c * (alg::kron(jdag, alg::sigma_minus()) + alg::kron(j, alg::sigma_plus()));
        }
    }
    throw std::logic_error("collision_hamiltonian: unknown kind");
}

std::pair<Mat, Mat> collision_kraus(CollisionKind kind, double rate_ev, double dt_fs,
                                    int d_target, double hbar_ev_fs) {
    const Mat hc = collision_hamiltonian(kind, rate_ev, dt_fs, d_target, hbar_ev_fs);
    const Mat u = alg::expm(Mat(cxd(0.0, -dt_fs / hbar_ev_fs) * hc));
    const int d = static_cast<int>(u.rows()) / 2;  // ancilla is the last factor
    Mat k0(d, d), k1(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            k0(i, j) = u(2 * i + 0, 2 * j + 0);
            k1(i, j) = u(2 * i + 1, 2 * j + 0);
        }
    }
    return {k0, k1};
}

std::vector<Collision> standard_collisions(const model::ExcitonSystem& sys,
                                           const model::EnvironmentSpec& env,
                                           const model::CompositeSpace& cs) {
    std::vector<Collision> out;
    for (std::size_t m = 0; m < cs.modes.size(); ++m) {
        const auto& [sub, term] = cs.modes[m];
        out.push_back({CollisionKind::Pseudomode, term.width_ev, {sub}});
    }
    for (const auto& t : env.memoryless_terms()) {
        for (int i = 0; i < sys.n_sites; ++i) {
            out.push_back({CollisionKind::Memoryless, t.amplitude_ev, {i}});
        }
    }
    for (std::size_t i = 0; i < env.relaxation_rates_ev.size(); ++i) {
        if (env.relaxation_rates_ev[i] <= 0.0) continue;
        out.push_back({CollisionKind::Relaxation, env.relaxation_rates_ev[i], {static_cast<int>(i)}});
    }
    if (env.trap && env.trap->rate_ev > 0.0) {
        out.push_back({CollisionKind::Trap, env.trap->rate_ev, {env.trap->site, *cs.reaction_center}});
    }
    return out;
}

CollisionPropagator::CollisionPropagator(const model::ExcitonSystem& sys,
                                         const model::EnvironmentSpec& env,
                                         const model::CompositeSpace& cs, double dt_fs,
                                         double hbar_ev_fs)
    : space_(cs.space), dt_fs_(dt_fs), hbar_(hbar_ev_fs) {
    build(model::build_total_hamiltonian(sys, env, cs), standard_collisions(sys, env, cs));
}

CollisionPropagator::CollisionPropagator(alg::Space space, const Mat& hamiltonian,
                                         std::vector<Collision> collisions, double dt_fs,
                                         double hbar_ev_fs)
    : space_(std::move(space)), dt_fs_(dt_fs), hbar_(hbar_ev_fs) {
    build(hamiltonian, collisions);
}

void CollisionPropagator::build(const Mat& hamiltonian, const std::vector<Collision>& collisions) {
    if (dt_fs_ <= 0.0) throw std::invalid_argument("CollisionPropagator: dt must be > 0");
    collisions_ = collisions;
    u_h_ = alg::expm(Mat(cxd(0.0, -dt_fs_ / hbar_) * hamiltonian));
    u_h_dag_ = u_h_.adjoint();
    for (const auto& c : collisions_) {
        int d_target = 1;
        for (int t : c.targets) d_target *= space_.dim_of(t);
        auto [k0, k1] = collision_kraus(c.kind, c.rate_ev, dt_fs_, d_target, hbar_);
        kraus_.push_back({alg::LocalOp(space_, k0, c.targets), alg::LocalOp(space_, k1, c.targets)});
    }
}

void CollisionPropagator::step_inplace(Mat& rho) const {
    buf_a_ = u_h_ * rho * u_h_dag_;
    for (const auto& ch : kraus_) {
        ch.k0.conjugate(buf_a_, buf_b_, buf_c_);
        ch.k1.conjugate(buf_a_, rho, buf_c_);
        buf_a_ = buf_b_ + rho;
    }
    rho = buf_a_;
}

DensityMatrix CollisionPropagator::step(const DensityMatrix& rho) const {
    DensityMatrix out = rho;
    step_inplace(out.data);
    return out;
}

DensityMatrix CollisionPropagator::propagate(const DensityMatrix& rho, double t_fs) const {
    const double steps_real = t_fs / dt_fs_;
    const long steps = std::lround(steps_real);
    if (t_fs < 0.0 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9) {
        throw std::invalid_argument("propagate_collisions: t must be a non-negative multiple of dt");
    }
    DensityMatrix out = rho;
    for (long s = 0; s < steps; ++s) step_inplace(out.data);
    return out;
}

Mat CollisionPropagator::step_with_explicit_ancillae(const Mat& rho) const {
    Mat state = u_h_ * rho * u_h_dag_;
    for (std::size_t ci = 0; ci < collisions_.size(); ++ci) {
        const auto& c = collisions_[ci];
        // extend register with one ancilla qubit at the end
        std::vector<int> dims = space_.dims();
        dims.push_back(2);
        alg::Space ext(dims);
        Mat anc = Mat::Zero(2, 2);
        anc(0, 0) = 1.0;
        Mat big = alg::kron(state, anc);
        int d_target = 1;
        for (int t : c.targets) d_target *= space_.dim_of(t);
        const Mat hc = collision_hamiltonian(c.kind, c.rate_ev, dt_fs_, d_target, hbar_);
        std::vector<int> tgts = c.targets;
        tgts.push_back(ext.subsystems() - 1);
        const Mat u = alg::expm(Mat(cxd(0.0, -dt_fs_ / hbar_) * hc));
        alg::LocalOp op(ext, u, tgts);
        Mat out, scratch;
        op.conjugate(big, out, scratch);
        std::vector<int> keep(static_cast<std::size_t>(space_.subsystems()));
        for (int k = 0; k < space_.subsystems(); ++k) keep[static_cast<std::size_t>(k)] = k;
        state = alg::partial_trace_keep(ext, out, keep);
    }
    return state;
}

std::vector<double> scan_timestep(const model::ExcitonSystem& sys,
                                  const model::EnvironmentSpec& env,
                                  const std::vector<double>& dts_fs, double t_fs,
                                  const Mat& system_observable) {
    const auto cs = model::composite_space(sys, env);
    std::vector<int> sites(static_cast<std::size_t>(sys.n_sites));
    for (int i = 0; i < sys.n_sites; ++i) sites[static_cast<std::size_t>(i)] = i;
    const Mat obs = alg::embed(cs.space, system_observable, sites);
    std::vector<double> deviations;
    for (double dt : dts_fs) {
        // sample the observable on a common grid for dt and dt/2 runs
        const long n = std::lround(t_fs / dt);
        auto run = [&](double step, long stride) {
            CollisionPropagator prop(sys, env, cs, step, units::hbar);
            auto rho = lindblad::ground_state(cs);
            rho = lindblad::apply_dipole(rho, sys, cs, lindblad::Side::Ket, lindblad::DipoleSign::Plus);
            rho = lindblad::apply_dipole(rho, sys, cs, lindblad::Side::Bra, lindblad::DipoleSign::Minus);
            rho.data /= rho.data.trace();
            rho.physical = true;
            std::vector<double> trace;
            for (long s = 0; s <= n; ++s) {
                trace.push_back(std::real((obs * rho.data).trace()));
                if (s < n) {
                    for (long k = 0; k < stride; ++k) prop.step_inplace(rho.data);
                }
            }
            return trace;
        };
        const auto coarse = run(dt, 1);
        const auto fine = run(dt / 2.0, 2);
        double dev = 0.0;
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            dev = std::max(dev, std::abs(coarse[k] - fine[k]));
        }
        deviations.push_back(dev);
    }
    return deviations;
}

} // namespace exspec::collision
