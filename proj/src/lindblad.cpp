#include "exspec/lindblad.hpp"

#include <cmath>

#include "exspec/errors.hpp"
#include "exspec/units.hpp"

namespace exspec::lindblad {

using alg::cxd;

bool is_hermitian(const Mat& rho, double tol) {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double trace_error(const Mat& rho) {
    return std::abs(rho.trace() - cxd(1.0, 0.0));
}

double min_eigenvalue(const Mat& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()));
    return es.eigenvalues().minCoeff();
}

void check_physical(const DensityMatrix& rho, double herm_tol, double pos_tol) {
    if (!rho.physical) return;
    if (!is_hermitian(rho.data, herm_tol)) throw NumericalError("density matrix lost Hermiticity");
    if (trace_error(rho.data) > 1e-8) throw NumericalError("density matrix trace drifted from 1");
    if (min_eigenvalue(rho.data) < -pos_tol) throw NumericalError("density matrix lost positivity");
}

std::vector<DissipatorSpec> standard_dissipators(const model::ExcitonSystem& sys,
                                                 const model::EnvironmentSpec& env,
                                                 const model::CompositeSpace& cs) {
    std::vector<DissipatorSpec> out;
    for (std::size_t m = 0; m < cs.modes.size(); ++m) {
        const auto& [sub, term] = cs.modes[m];
        out.push_back({DissipatorKind::PseudomodeDecay, 2.0 * term.width_ev, {sub},
                       alg::boson_annihilation(term.levels)});
    }
    for (const auto& t : env.memoryless_terms()) {
        for (int i = 0; i < sys.n_sites; ++i) {
            out.push_back({DissipatorKind::MemorylessDephasing, t.amplitude_ev / 4.0, {i},
                           alg::pauli_z()});
        }
    }
    for (std::size_t i = 0; i < env.relaxation_rates_ev.size(); ++i) {
        if (env.relaxation_rates_ev[i] <= 0.0) continue;
        out.push_back({DissipatorKind::SiteRelaxation, env.relaxation_rates_ev[i],
                       {static_cast<int>(i)}, alg::sigma_minus()});
    }
    if (env.trap && env.trap->rate_ev > 0.0) {
        if (!cs.reaction_center) throw std::invalid_argument("trap configured without reaction-center subsystem");
        out.push_back({DissipatorKind::Trap, env.trap->rate_ev, {env.trap->site, *cs.reaction_center},
                       alg::kron(alg::sigma_minus(), alg::sigma_plus())});
    }
    return out;
}

namespace {

Eigen::SparseMatrix<cxd> to_sparse(const Mat& m, double tol = 0.0) {
    Eigen::SparseMatrix<cxd> s(m.rows(), m.cols());
    std::vector<Eigen::Triplet<cxd>> trip;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > tol) trip.emplace_back(i, j, m(i, j));
        }
    }
    s.setFromTriplets(trip.begin(), trip.end());
    s.makeCompressed();
    return s;
}

} // namespace

Liouvillian::Liouvillian(alg::Space space, const Mat& h, std::vector<DissipatorSpec> dissipators,
                         double hbar_ev_fs)
    : space_(std::move(space)), hbar_(hbar_ev_fs) {
    if (!is_hermitian(h, 1e-10)) throw std::invalid_argument("Liouvillian: Hamiltonian must be Hermitian");
    if (h.rows() != space_.dim()) throw std::invalid_argument("Liouvillian: dimension mismatch");
    h_ = to_sparse(h, 0.0);
    for (auto& d : dissipators) {
        if (d.rate_ev < 0.0) throw std::invalid_argument("Liouvillian: negative dissipator rate");
        if (d.rate_ev == 0.0) continue;
        const Mat full = alg::embed(space_, d.jump, d.targets);
        Channel ch;
        ch.rate_ev = d.rate_ev;
        ch.jump = to_sparse(full);
        ch.jump_dag = to_sparse(Mat(full.adjoint()));
        ch.jdj = to_sparse(Mat(full.adjoint() * full));
        channels_.push_back(std::move(ch));
    }
}

void Liouvillian::apply(const Mat& rho, Mat& out, bool hermitian) const {
    const cxd minus_i_over_hbar(0.0, -1.0 / hbar_);
    if (hermitian) {
        Mat k = h_ * rho;
        out = minus_i_over_hbar * (k - Mat(k.adjoint()));
        for (const auto& ch : channels_) {
            const double g = ch.rate_ev / hbar_;
            Mat jr = ch.jump * rho;                // J ρ
            Mat jrj = jr * ch.jump_dag;            // J ρ J†  (Hermitian)
            Mat a = ch.jdj * rho;                  // J†J ρ ; {J†J,ρ} = a + a†
            out += g * (jrj - 0.5 * (a + Mat(a.adjoint())));
        }
    } else {
        out = minus_i_over_hbar * (Mat(h_ * rho) - Mat(rho * h_));
        for (const auto& ch : channels_) {
            const double g = ch.rate_ev / hbar_;
            Mat jr = ch.jump * rho;
            out += g * (Mat(jr * ch.jump_dag) - 0.5 * (Mat(ch.jdj * rho) + Mat(rho * ch.jdj)));
        }
    }
}

Mat Liouvillian::apply(const Mat& rho, bool hermitian) const {
    Mat out;
    apply(rho, out, hermitian);
    return out;
}

Mat Liouvillian::dense_superoperator() const {
    const int n = dim();
    const Mat id = Mat::Identity(n, n);
    const Mat h = Mat(h_);
    const cxd minus_i_over_hbar(0.0, -1.0 / hbar_);
    // column stacking: vec(A X B) = (B^T ⊗ A) vec(X)
    Mat sup = minus_i_over_hbar * (alg::kron(id, h) - alg::kron(h.transpose(), id));
    for (const auto& ch : channels_) {
        const double g = ch.rate_ev / hbar_;
        const Mat j = Mat(ch.jump);
        const Mat jdj = Mat(ch.jdj);
        sup += g * (alg::kron(j.conjugate(), j) - 0.5 * alg::kron(id, jdj) -
                    0.5 * alg::kron(jdj.transpose(), id));
    }
    return sup;
}

Propagator::Propagator(Liouvillian liouvillian, PropagateOptions options)
    : liou_(std::move(liouvillian)), opt_(options) {
    if (opt_.dt_fs <= 0.0) throw std::invalid_argument("Propagator: dt must be > 0");
}

const Mat& Propagator::expm_step_matrix() const {
    if (!expm_step_) {
        if (liou_.dim() > opt_.expm_max_dim) {
            throw ResourceError("exponential stepping limited to dimension " +
                                std::to_string(opt_.expm_max_dim) + ", register has " +
                                std::to_string(liou_.dim()));
        }
        expm_step_ = alg::expm(Mat(liou_.dense_superoperator() * opt_.dt_fs));
    }
    return *expm_step_;
}

void Propagator::rk4_step(Mat& rho, bool hermitian) const {
    const double dt = opt_.dt_fs;
    liou_.apply(rho, k1_, hermitian);
    tmp_ = rho + (dt / 2.0) * k1_;
    liou_.apply(tmp_, k2_, hermitian);
    tmp_ = rho + (dt / 2.0) * k2_;
    liou_.apply(tmp_, k3_, hermitian);
    tmp_ = rho + dt * k3_;
    liou_.apply(tmp_, k4_, hermitian);
    rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void Propagator::step_inplace(DensityMatrix& rho) const {
    const double tr_before = rho.physical ? std::abs(rho.data.trace()) : 0.0;
    if (opt_.stepper == Stepper::Expm) {
        const Mat& u = expm_step_matrix();
        const int n = liou_.dim();
        Eigen::Map<const Eigen::VectorXcd> v(rho.data.data(), n * n);
        Eigen::VectorXcd w = u * v;
        rho.data = Eigen::Map<const Mat>(w.data(), n, n);
    } else {
        rk4_step(rho.data, rho.physical);
    }
    if (rho.physical) {
        const double drift = std::abs(std::abs(rho.data.trace()) - tr_before);
        if (!(drift <= opt_.trace_tol)) {  // inverted so NaN is rejected too
            throw NumericalError("propagation step rejected: trace drift " + std::to_string(drift));
        }
    }
}

DensityMatrix Propagator::propagate(const DensityMatrix& rho, double t_fs) const {
    if (t_fs < 0.0) throw std::invalid_argument("propagate: negative time");
    const double steps_real = t_fs / opt_.dt_fs;
    const long steps = std::lround(steps_real);
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9) {
        throw std::invalid_argument("propagate: t must be a multiple of dt");
    }
    DensityMatrix out = rho;
    for (long s = 0; s < steps; ++s) step_inplace(out);
    return out;
}

DensityMatrix apply_dipole(const DensityMatrix& rho, const model::ExcitonSystem& sys,
                           const model::CompositeSpace& cs, Side side, DipoleSign sign,
                           int site) {
    Mat op;
    if (site == kFullDipole) {
        op = (sign == DipoleSign::Plus) ? model::dipole_raising(sys, cs)
                                        : model::dipole_lowering(sys, cs);
    } else {
        const Mat local = (sign == DipoleSign::Plus) ? alg::sigma_plus() : alg::sigma_minus();
        op = sys.dipoles.at(static_cast<std::size_t>(site)) * alg::embed(cs.space, local, {site});
    }
    DensityMatrix out;
    out.physical = false;
    out.data = (side == Side::Ket) ? Mat(op * rho.data) : Mat(rho.data * op);
    return out;
}

DensityMatrix ground_state(const model::CompositeSpace& cs) {
    DensityMatrix rho;
    rho.data = Mat::Zero(cs.space.dim(), cs.space.dim());
    rho.data(0, 0) = 1.0;
    rho.physical = true;
    return rho;
}

std::vector<double> scan_truncation(const model::ExcitonSystem& sys,
                                    model::EnvironmentSpec env,
                                    const std::vector<int>& levels,
                                    const Mat& system_observable,
                                    double t_fs, double dt_fs) {
    std::vector<double> prev_trace;
    std::vector<double> deviations;
    for (int d : levels) {
        for (auto& t : env.terms) {
            if (!t.memoryless()) t.levels = d;
        }
        const auto cs = model::composite_space(sys, env);
        const Mat h = model::build_total_hamiltonian(sys, env, cs);
        Liouvillian liou(cs.space, h, standard_dissipators(sys, env, cs), units::hbar);
        Propagator prop(std::move(liou), {dt_fs, Stepper::RK4, 1e-6, 40});
        DensityMatrix rho = ground_state(cs);
        rho = apply_dipole(rho, sys, cs, Side::Ket, DipoleSign::Plus);
        rho = apply_dipole(rho, sys, cs, Side::Bra, DipoleSign::Minus);
        // normalize to a physical excited-state population for the scan
        rho.data /= rho.data.trace();
        rho.physical = true;
        const Mat obs = alg::embed(cs.space, system_observable,
                                   [&] {
                                       std::vector<int> sites(static_cast<std::size_t>(sys.n_sites));
                                       for (int i = 0; i < sys.n_sites; ++i) sites[static_cast<std::size_t>(i)] = i;
                                       return sites;
                                   }());
        const long n = std::lround(t_fs / dt_fs);
        std::vector<double> trace;
        trace.reserve(static_cast<std::size_t>(n) + 1);
        for (long s = 0; s <= n; ++s) {
            trace.push_back(std::real((obs * rho.data).trace()));
            if (s < n) prop.step_inplace(rho);
        }
        if (!prev_trace.empty()) {
            double dev = 0.0;
            for (std::size_t i = 0; i < trace.size(); ++i) {
                dev = std::max(dev, std::abs(trace[i] - prev_trace[i]));
            }
            deviations.push_back(dev);
        }
        prev_trace = std::move(trace);
    }
    return deviations;
}

} // namespace exspec::lindblad
