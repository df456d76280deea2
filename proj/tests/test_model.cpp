#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "exspec/errors.hpp"
#include "exspec/model.hpp"

using namespace exspec;
using alg::Mat;

namespace {

model::ExcitonSystem single_site(double eps = 1.55, double mu = 1.0) {
    model::ExcitonSystem s;
    s.n_sites = 1;
    s.energies_ev = {eps};
    s.dipoles = {mu};
    s.couplings_ev = Eigen::MatrixXd::Zero(1, 1);
    return s;
}

model::ExcitonSystem dimer(double e1 = 1.55, double e2 = 1.46, double j = -0.01) {
    model::ExcitonSystem s;
    s.n_sites = 2;
    s.energies_ev = {e1, e2};
    s.dipoles = {1.0, 1.0};
    s.couplings_ev = Eigen::MatrixXd::Zero(2, 2);
    s.couplings_ev(0, 1) = s.couplings_ev(1, 0) = j;
    return s;
}

} // namespace

TEST_CASE("single chromophore hamiltonian has the bare gap") {
    const Mat h = model::build_system_hamiltonian(single_site(1.55));
    CHECK(h.rows() == 2);
    CHECK(std::abs(h(1, 1).real() - h(0, 0).real() - 1.55) < 1e-14);
    CHECK(std::abs(h(0, 1)) < 1e-14);

    const Mat h0 = model::build_system_hamiltonian(single_site(0.0));
    CHECK(h0.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dimer single-excitation transitions match the eigenvalue oracle") {
    // independent oracle: diagonalize the one-excitation block directly
    const double e1 = 1.55, e2 = 1.46, j = -0.01;
    Eigen::Matrix2d block;
    block << e1, j, j, e2;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(1);
    CHECK(std::abs(hi - 1.5510981) < 2e-6);
    CHECK(std::abs(lo - 1.4589019) < 2e-6);

    const Mat h = model::build_system_hamiltonian(dimer(e1, e2, j));
    Eigen::SelfAdjointEigenSolver<Mat> full(h);
    const double ground = full.eigenvalues().minCoeff();
    std::vector<double> evs(4);
    for (int k = 0; k < 4; ++k) evs[static_cast<std::size_t>(k)] = full.eigenvalues()(k);
    std::sort(evs.begin(), evs.end());
    CHECK(std::abs((evs[1] - ground) - lo) < 1e-12);
    CHECK(std::abs((evs[2] - ground) - hi) < 1e-12);
}

TEST_CASE("system hamiltonian validation errors") {
    auto s = dimer();
    s.energies_ev.pop_back();
    CHECK_THROWS_AS(model::build_system_hamiltonian(s), ConfigError);
    auto s2 = dimer();
    s2.couplings_ev(0, 1) = 0.5;  // asymmetric
    CHECK_THROWS_AS(model::build_system_hamiltonian(s2), ConfigError);
}

TEST_CASE("pseudomode coupling constant") {
    model::LorentzianTerm t;
    t.amplitude_ev = 0.05908;
    t.width_ev = 0.1;
    CHECK(std::abs(t.coupling_ev() - std::sqrt(0.05908 * 0.1 / 2.0)) < 1e-15);
    CHECK(std::abs(t.coupling_ev() - 0.054351) < 1e-6);
}

TEST_CASE("pseudomode hamiltonians") {
    auto sys = single_site();
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = 0.05908;
    t.width_ev = 0.1;
    t.center_ev = 0.3;
    t.levels = 4;
    env.terms = {t};
    const auto cs = model::composite_space(sys, env);
    const auto [hp, hep] = model::build_pseudomode_hamiltonians(sys, env, cs);
    CHECK((hp - Mat(hp.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((hep - Mat(hep.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
    // mode levels 0..3 at spacing 0.3
    CHECK(std::abs(hp(1, 1).real() - 0.3) < 1e-14);
    CHECK(std::abs(hp(3, 3).real() - 0.9) < 1e-14);

    // decoupled limit: vanishing amplitude removes the coupling
    model::EnvironmentSpec env0 = env;
    env0.terms[0].amplitude_ev = 1e-300;
    const auto cs0 = model::composite_space(sys, env0);
    const auto [hp0, hep0] = model::build_pseudomode_hamiltonians(sys, env0, cs0);
    CHECK(hep0.cwiseAbs().maxCoeff() < 1e-140);

    model::EnvironmentSpec bad;
    model::LorentzianTerm m;
    m.amplitude_ev = 0.1;  // memoryless
    bad.terms = {m};
    const auto csb = model::composite_space(sys, bad);
    CHECK_THROWS(model::build_pseudomode_hamiltonians(sys, bad, csb));
}

TEST_CASE("split replica coupling in the strong-coupling configuration") {
    model::LorentzianTerm t;
    t.amplitude_ev = 20.0;
    t.width_ev = 0.1;
    const auto replicas = model::split_lorentzian(t, 4);
    CHECK(replicas.size() == 4);
    for (const auto& r : replicas) {
        CHECK(std::abs(r.amplitude_ev - 5.0) < 1e-14);
        CHECK(std::abs(r.coupling_ev() - 0.5) < 1e-14);
    }
    // energy-weight conservation: sum of squared couplings preserved
    double sum = 0.0;
    for (const auto& r : replicas) sum += r.coupling_ev() * r.coupling_ev();
    CHECK(std::abs(sum - t.coupling_ev() * t.coupling_ev()) < 1e-14);

    CHECK(model::split_lorentzian(t, 1).size() == 1);
    CHECK(std::abs(model::split_lorentzian(t, 1)[0].amplitude_ev - 20.0) < 1e-15);
    CHECK_THROWS(model::split_lorentzian(t, 0));
}

TEST_CASE("spectral function values and split invariance") {
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = 0.3;
    t.width_ev = 0.05;
    t.center_ev = 1.0;
    env.terms = {t};
    CHECK(std::abs(model::spectral_function(env, 1.0) - 0.3) < 1e-14);
    CHECK(std::abs(model::spectral_function(env, 1.05) - 0.15) < 1e-14);
    CHECK(std::abs(model::spectral_function(env, 0.95) - 0.15) < 1e-14);

    model::EnvironmentSpec split_env;
    split_env.terms = model::split_lorentzian(t, 4);
    for (double w = -2.0; w <= 2.0; w += 0.037) {
        CHECK(std::abs(model::spectral_function(env, w) - model::spectral_function(split_env, w)) <
              1e-12);
    }

    model::EnvironmentSpec mem;
    model::LorentzianTerm m;
    m.amplitude_ev = 0.7;
    mem.terms = {m};
    CHECK(std::abs(model::spectral_function(mem, 123.4) - 0.7) < 1e-14);
}

TEST_CASE("register layouts") {
    // interacting dimer, one two-level pseudomode per chromophore
    auto sys = dimer();
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = 0.05908;
    t.width_ev = 0.1;
    t.levels = 2;
    env.terms = {t};
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    CHECK(lay.total_qubits() == 6);
    CHECK(lay.qubits[0].role == model::QubitRole::ResponseAncilla);
    CHECK(lay.site_qubit(0) == 1);
    CHECK(lay.site_qubit(1) == 2);
    CHECK(lay.mode_qubits(0, 0).first == 3);
    CHECK(lay.mode_qubits(1, 0).first == 4);
    CHECK(lay.collision_ancillae() == std::vector<int>{5});

    // memoryless single chromophore
    model::EnvironmentSpec mem;
    model::LorentzianTerm m;
    m.amplitude_ev = 0.05908;
    mem.terms = {m};
    const auto lay2 = model::layout_register(single_site(), mem, model::AncillaScheme::Single);
    CHECK(lay2.total_qubits() == 3);

    // per-pseudomode ancillae: N=2, W=2
    model::EnvironmentSpec env2;
    env2.terms = {t, t};
    const auto lay3 = model::layout_register(sys, env2, model::AncillaScheme::PerPseudomode);
    CHECK(lay3.collision_ancillae().size() == 4);

    // Q = N(1 + W ceil(log2 d)) + 2 under the single scheme
    for (int n = 1; n <= 3; ++n) {
        for (int w = 0; w <= 2; ++w) {
            for (int d : {2, 4}) {
                model::ExcitonSystem s;
                s.n_sites = n;
                s.energies_ev.assign(static_cast<std::size_t>(n), 1.0);
                s.dipoles.assign(static_cast<std::size_t>(n), 1.0);
                s.couplings_ev = Eigen::MatrixXd::Zero(n, n);
                model::EnvironmentSpec e;
                for (int k = 0; k < w; ++k) {
                    model::LorentzianTerm term;
                    term.amplitude_ev = 0.1;
                    term.width_ev = 0.1;
                    term.levels = d;
                    e.terms.push_back(term);
                }
                const auto l = model::layout_register(s, e, model::AncillaScheme::Single);
                const int logd = (d == 2) ? 1 : 2;
                CHECK(l.total_qubits() == n * (1 + w * logd) + 2);
            }
        }
    }

    // deterministic role ordering along the register
    for (std::size_t q = 1; q < lay.qubits.size(); ++q) {
        CHECK(static_cast<int>(lay.qubits[q - 1].role) <= static_cast<int>(lay.qubits[q].role));
    }
}

TEST_CASE("built hamiltonians are hermitian and conserve excitation number") {
    auto sys = dimer(1.3, 1.1, 0.03);
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = 0.2;
    t.width_ev = 0.07;
    t.center_ev = 0.15;
    t.levels = 3;
    env.terms = {t};
    const auto cs = model::composite_space(sys, env);
    const Mat h = model::build_total_hamiltonian(sys, env, cs);
    CHECK((h - Mat(h.adjoint())).cwiseAbs().maxCoeff() < 1e-12);

    const Mat hs = model::build_system_hamiltonian(sys);
    const alg::Space qs = alg::Space::qubits(2);
    Mat n_op = alg::embed(qs, alg::projector_excited(), {0}) +
               alg::embed(qs, alg::projector_excited(), {1});
    CHECK((hs * n_op - n_op * hs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trap extends the register with a reaction-center qubit") {
    auto sys = dimer();
    model::EnvironmentSpec env;
    env.trap = model::TrapSpec{1, 0.001};
    const auto cs = model::composite_space(sys, env);
    CHECK(cs.reaction_center.has_value());
    CHECK(cs.space.dim() == 8);
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    CHECK(lay.reaction_center().has_value());
}
