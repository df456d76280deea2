#include <doctest.h>

#include <cmath>
#include <random>

#include "exspec/circuit.hpp"
#include "exspec/collision.hpp"
#include "exspec/errors.hpp"
#include "exspec/qasm.hpp"
#include "exspec/rng.hpp"
#include "exspec/units.hpp"

using namespace exspec;
using alg::cxd;
using alg::Mat;

namespace {

model::ExcitonSystem single_site(double eps = 1.55) {
    model::ExcitonSystem s;
    s.n_sites = 1;
    s.energies_ev = {eps};
    s.dipoles = {1.0};
    s.couplings_ev = Eigen::MatrixXd::Zero(1, 1);
    return s;
}

model::ExcitonSystem table_dimer() {
    model::ExcitonSystem s;
    s.n_sites = 2;
    s.energies_ev = {1.55, 1.46};
    s.dipoles = {1.0, 1.0};
    s.couplings_ev = Eigen::MatrixXd::Zero(2, 2);
    s.couplings_ev(0, 1) = s.couplings_ev(1, 0) = -0.01;
    return s;
}

model::EnvironmentSpec finite_env(double gamma = 0.05908, double width = 0.1, int levels = 2) {
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = gamma;
    t.width_ev = width;
    t.levels = levels;
    env.terms = {t};
    return env;
}

model::EnvironmentSpec memoryless_env(double gamma = 0.05908) {
    model::EnvironmentSpec env;
    model::LorentzianTerm t;
    t.amplitude_ev = gamma;
    env.terms = {t};
    return env;
}

// multiply an instruction list into a dense unitary (no resets/measures)
Mat gates_to_unitary(const std::vector<circuit::Gate>& gates, int n_qubits) {
    const alg::Space sp = alg::Space::qubits(n_qubits);
    Mat u = Mat::Identity(sp.dim(), sp.dim());
    for (const auto& g : gates) {
        u = alg::embed(sp, circuit::gate_matrix(g), g.qubits) * u;
    }
    return u;
}

double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(xs[static_cast<std::size_t>(i)]);
        const double ly = std::log(ys[static_cast<std::size_t>(i)]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("collision angle reproduces the analytic value") {
    const double theta = std::sqrt(2.0 * 0.1 * 0.1 / units::hbar);
    CHECK(std::abs(theta - 0.17434) < 1e-4);
    const auto block = circuit::trotter_step_circuit(
        single_site(), finite_env(),
        model::layout_register(single_site(), finite_env(), model::AncillaScheme::Single),
        circuit::TrotterSettings{0.1, 1, 1}, 0);
    bool found = false;
    for (const auto& g : block) {
        if (g.kind == circuit::GateKind::RXX) {
            CHECK(std::abs(g.angle - theta) < 1e-12);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("free-phase evolution step is exact") {
    // no couplings, no channels: the step is a product of RZ gates
    auto sys = table_dimer();
    sys.couplings_ev.setZero();
    model::EnvironmentSpec env;
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    const auto block =
        circuit::trotter_step_circuit(sys, env, lay, circuit::TrotterSettings{0.1, 1, 1}, 0);
    for (const auto& g : block) CHECK(g.kind == circuit::GateKind::RZ);

    const Mat u = gates_to_unitary(block, lay.total_qubits());
    const auto cs = model::composite_space(sys, env);
    const Mat h = model::build_total_hamiltonian(sys, env, cs);
    const Mat u_exact = alg::expm(Mat(cxd(0.0, -0.1 / units::hbar) * h));
    const alg::Space sp = alg::Space::qubits(lay.total_qubits());
    const Mat u_embedded = alg::embed(sp, u_exact, {lay.site_qubit(0), lay.site_qubit(1)});
    // strip the global phase before comparing
    const cxd phase = u(0, 0) / u_embedded(0, 0);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    CHECK((u - phase * u_embedded).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("interaction gates and their polarity") {
    const auto lay = model::layout_register(table_dimer(), memoryless_env(),
                                            model::AncillaScheme::Single);
    const auto ket = circuit::interaction_gates(lay, lindblad::Side::Ket, 'X', 0);
    REQUIRE(ket.size() == 1);
    CHECK(ket[0].kind == circuit::GateKind::CX);
    CHECK(ket[0].polarity == circuit::ControlPolarity::Closed);
    CHECK(ket[0].qubits == std::vector<int>{0, 1});

    const auto bra = circuit::interaction_gates(lay, lindblad::Side::Bra, 'Y', 1);
    REQUIRE(bra.size() == 1);
    CHECK(bra[0].kind == circuit::GateKind::CY);
    CHECK(bra[0].polarity == circuit::ControlPolarity::Open);
    CHECK(bra[0].qubits == std::vector<int>{0, 2});

    // applying the same controlled gate twice is the identity
    const Mat u = gates_to_unitary({ket[0], ket[0]}, lay.total_qubits());
    CHECK((u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS(circuit::interaction_gates(lay, lindblad::Side::Ket, 'Z', 0));
    CHECK_THROWS(circuit::interaction_gates(lay, lindblad::Side::Ket, 'X', 7));
}

TEST_CASE("hadamard then measure returns unit expectation") {
    model::RegisterLayout lay =
        model::layout_register(single_site(), {}, model::AncillaScheme::Single);
    circuit::CircuitIR circ;
    circ.layout = lay;
    circ.instructions.push_back(circuit::Gate::h(0));
    circ.instructions.push_back(circuit::Gate::measure(0, circuit::MeasureBasis::X));
    const auto r = circuit::emulate(circ);
    CHECK(r.shots == 0);
    CHECK(std::abs(r.expectation - 1.0) < 1e-14);
    CHECK(r.variance == 0.0);
}

TEST_CASE("zero-delay pathway circuits evaluate to unit response") {
    auto sys = single_site();
    auto env = memoryless_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    const circuit::TrotterSettings ts{0.1, 1, 1};

    const auto circ = circuit::build_pathway_circuit(
        sys, env, lay, {{lindblad::Side::Ket, 'X', 0}}, {lindblad::Side::Ket, 'X', 0}, {0.0}, ts,
        circuit::MeasureBasis::X);
    const auto [x, y] = circuit::emulate_xy(circ);
    CHECK(std::abs(x.expectation - 1.0) < 1e-12);
    CHECK(std::abs(y.expectation) < 1e-12);

    const auto circ3 = circuit::build_pathway_circuit(
        sys, env, lay,
        {{lindblad::Side::Bra, 'X', 0}, {lindblad::Side::Bra, 'X', 0}, {lindblad::Side::Ket, 'X', 0}},
        {lindblad::Side::Ket, 'X', 0}, {0.0, 0.0, 0.0}, ts, circuit::MeasureBasis::X);
    const auto [x3, y3] = circuit::emulate_xy(circ3);
    CHECK(std::abs(std::hypot(x3.expectation, y3.expectation) - 1.0) < 1e-12);
}

TEST_CASE("trotterized step approaches the collision map with slope one") {
    auto sys = table_dimer();
    auto env = finite_env();
    const auto cs = model::composite_space(sys, env);
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);

    // oracle: exact collision step applied to a cross-site ladder element;
    // the site-symmetrized sum cancels the leading exchange commutator, so
    // the first-order behaviour is probed on sigma_1^+ ... sigma_2^-
    const double dt = 0.1;
    collision::CollisionPropagator oracle(sys, env, cs, dt, units::hbar);
    lindblad::DensityMatrix b0 = lindblad::ground_state(cs);
    b0.physical = false;
    b0.data = alg::embed(cs.space, alg::sigma_plus(), {0}) * b0.data;
    const auto oracle_state = oracle.step(b0);
    const cxd z_ref = (alg::embed(cs.space, alg::sigma_minus(), {1}) * oracle_state.data).trace();

    std::vector<double> invs, errs;
    for (int n_t1 : {1, 2, 4, 8}) {
        circuit::BlockEmulator emu(sys, env, lay, circuit::TrotterSettings{dt, n_t1, 1});
        Mat bx = emu.initial_block();
        emu.apply_event(bx, lindblad::Side::Ket, 'X', 0);
        emu.apply_step(bx);
        Mat by = emu.initial_block();
        emu.apply_event(by, lindblad::Side::Ket, 'Y', 0);
        emu.apply_step(by);
        const Mat bplus = 0.5 * (bx - cxd(0, 1) * by);  // sigma^+ event component
        // emission sigma^-: (X + iY)/2 via the complex readout
        const cxd z = 0.5 * (emu.readout(bplus, 'X', 1) + cxd(0, 1) * emu.readout(bplus, 'Y', 1));
        invs.push_back(1.0 / n_t1);
        errs.push_back(std::abs(z - z_ref));
    }
    const double slope = fit_log_slope(invs, errs);
    CHECK(slope > 0.8);
    CHECK(slope < 1.2);
}

TEST_CASE("block emulator matches the full density-matrix emulator") {
    auto sys = table_dimer();
    auto env = finite_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    const circuit::TrotterSettings ts{0.1, 1, 1};

    const std::vector<circuit::PathwayCircuitEvent> events{{lindblad::Side::Bra, 'Y', 0},
                                                           {lindblad::Side::Ket, 'X', 1}};
    const circuit::PathwayCircuitEvent emission{lindblad::Side::Ket, 'X', 0};
    const std::vector<double> delays{0.3, 0.2};

    circuit::CircuitIR circ = circuit::build_pathway_circuit(sys, env, lay, events, emission,
                                                             delays, ts, circuit::MeasureBasis::X);
    const auto [ex, ey] = circuit::emulate_xy(circ);

    circuit::BlockEmulator emu(sys, env, lay, ts);
    Mat block = emu.initial_block();
    emu.apply_event(block, events[0].side, events[0].pauli, events[0].site);
    for (int s = 0; s < 3; ++s) emu.apply_step(block);
    emu.apply_event(block, events[1].side, events[1].pauli, events[1].site);
    for (int s = 0; s < 2; ++s) emu.apply_step(block);
    const cxd z = emu.readout(block, emission.pauli, emission.site);

    CHECK(std::abs(z.real() - ex.expectation) < 1e-11);
    CHECK(std::abs(z.imag() - ey.expectation) < 1e-11);
}

TEST_CASE("reset-free circuits preserve purity") {
    auto sys = table_dimer();
    model::EnvironmentSpec env;  // no channels, so no resets
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    circuit::CircuitIR circ;
    circ.layout = lay;
    circ.instructions.push_back(circuit::Gate::h(0));
    circ.instructions.push_back(circuit::Gate::cx(0, 1));
    circ.instructions.push_back(circuit::Gate::cy(0, 2, circuit::ControlPolarity::Open));
    const auto block =
        circuit::trotter_step_circuit(sys, env, lay, circuit::TrotterSettings{0.1, 2, 1}, 0);
    circ.instructions.insert(circ.instructions.end(), block.begin(), block.end());
    const Mat rho = circuit::emulate_density_matrix(circ);
    CHECK(std::abs((rho * rho).trace() - cxd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("ancilla schemes agree in exact mode") {
    auto sys = single_site();
    auto env = finite_env();
    const circuit::TrotterSettings ts{0.1, 1, 1};
    const std::vector<circuit::PathwayCircuitEvent> events{{lindblad::Side::Ket, 'X', 0}};
    const circuit::PathwayCircuitEvent emission{lindblad::Side::Ket, 'X', 0};
    const std::vector<double> delays{0.3};  // three steps

    std::vector<cxd> values;
    for (auto scheme : {model::AncillaScheme::Single, model::AncillaScheme::PerPseudomode,
                        model::AncillaScheme::PerCollision}) {
        const auto lay = model::layout_register(sys, env, scheme, 3);
        const auto circ = circuit::build_pathway_circuit(sys, env, lay, events, emission, delays,
                                                         ts, circuit::MeasureBasis::X);
        const auto [x, y] = circuit::emulate_xy(circ);
        values.emplace_back(x.expectation, y.expectation);
    }
    CHECK(std::abs(values[0] - values[1]) < 1e-10);
    CHECK(std::abs(values[0] - values[2]) < 1e-10);
}

TEST_CASE("shot sampling is an unbiased estimate of the exact marginal") {
    auto sys = single_site();
    auto env = memoryless_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    const circuit::TrotterSettings ts{0.1, 1, 1};
    const auto circ = circuit::build_pathway_circuit(
        sys, env, lay, {{lindblad::Side::Ket, 'X', 0}}, {lindblad::Side::Ket, 'X', 0}, {20.0}, ts,
        circuit::MeasureBasis::X);
    const auto exact = circuit::emulate(circ).expectation;

    const long shots = 1000;
    const int reps = 400;
    double mean = 0.0, var = 0.0;
    std::vector<double> estimates;
    for (int r = 0; r < reps; ++r) {
        circuit::EmulateOptions opt;
        opt.shots = shots;
        opt.seed = rng::derive_seed(42, {static_cast<std::uint64_t>(r)});
        const auto est = circuit::emulate(circ, opt);
        estimates.push_back(est.expectation);
        mean += est.expectation;
    }
    mean /= reps;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= (reps - 1);

    const double p = 0.5 * (1.0 + exact);
    const double true_var = 4.0 * p * (1.0 - p) / static_cast<double>(shots);
    CHECK(std::abs(mean - exact) < 4.0 * std::sqrt(true_var / reps));
    CHECK(std::sqrt(var) <= 1.0 / std::sqrt(static_cast<double>(shots)));
    CHECK(var / true_var > 0.7);
    CHECK(var / true_var < 1.4);
}

TEST_CASE("gate census fixtures and scaling") {
    auto sys1 = single_site();
    model::EnvironmentSpec none;
    CHECK(circuit::system_block_two_qubit_count(sys1, none) == 0);

    // golden census of the interacting-dimer step (one mode per chromophore)
    const auto lay = model::layout_register(table_dimer(), finite_env(),
                                            model::AncillaScheme::Single);
    circuit::CircuitIR circ;
    circ.layout = lay;
    circ.instructions = circuit::trotter_step_circuit(table_dimer(), finite_env(), lay,
                                                      circuit::TrotterSettings{0.1, 1, 1}, 0);
    const auto census = circuit::gate_census(circ);
    CHECK(census.total == 14);
    CHECK(census.two_qubit == 8);
    CHECK(census.counts.at("rz") == 2);
    CHECK(census.counts.at("rx") == 2);
    CHECK(census.counts.at("rxx") == 3);
    CHECK(census.counts.at("ryy") == 3);
    CHECK(census.counts.at("rzx") == 2);
    CHECK(census.counts.at("reset") == 2);
    CHECK(census.depth == 10);

    auto all_to_all = [](int n) {
        model::ExcitonSystem s;
        s.n_sites = n;
        s.energies_ev.assign(static_cast<std::size_t>(n), 1.0);
        s.dipoles.assign(static_cast<std::size_t>(n), 1.0);
        s.couplings_ev = Eigen::MatrixXd::Constant(n, n, 0.01);
        s.couplings_ev.diagonal().setZero();
        return s;
    };
    model::EnvironmentSpec no_env;
    const long c16 = circuit::system_block_two_qubit_count(all_to_all(16), no_env);
    const long c32 = circuit::system_block_two_qubit_count(all_to_all(32), no_env);
    const long c64 = circuit::system_block_two_qubit_count(all_to_all(64), no_env);
    CHECK(std::abs(static_cast<double>(c32) / c16 - 4.0) < 0.25);
    CHECK(std::abs(static_cast<double>(c64) / c32 - 4.0) < 0.15);
}

TEST_CASE("qasm export round trip") {
    auto sys = table_dimer();
    auto env = finite_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    const circuit::TrotterSettings ts{0.1, 1, 1};
    auto circ = circuit::build_pathway_circuit(
        sys, env, lay, {{lindblad::Side::Bra, 'Y', 1}}, {lindblad::Side::Ket, 'X', 0}, {0.2}, ts,
        circuit::MeasureBasis::Y);
    circ.metadata.pathway = "R1";
    circ.metadata.shots = 4000;
    circ.metadata.seed = 7;

    const std::string text = qasm::export_qasm(circ);
    CHECK(text.find("EXSPEC-CIRCUIT 1") == 0);
    CHECK(text.find("ocy") != std::string::npos);  // open-control token survives

    const auto parsed = qasm::parse_qasm(text);
    CHECK(parsed.layout.total_qubits() == 6);
    REQUIRE(parsed.instructions.size() == circ.instructions.size());
    for (std::size_t k = 0; k < circ.instructions.size(); ++k) {
        CHECK(parsed.instructions[k] == circ.instructions[k]);
    }
    CHECK(parsed.metadata.pathway == "R1");
    CHECK(parsed.metadata.shots == 4000);
    CHECK(parsed.metadata.seed == 7);
    CHECK(qasm::export_qasm(parsed) == text);

    circuit::CircuitIR empty;
    empty.layout = lay;
    const std::string etext = qasm::export_qasm(empty);
    const auto eparsed = qasm::parse_qasm(etext);
    CHECK(eparsed.instructions.empty());
    CHECK(eparsed.layout.total_qubits() == 6);

    // lowering realizes open controls as X-conjugated closed controls
    // (checked on a reset-free slice: the event gates of a zero-delay circuit)
    auto circ0 = circuit::build_pathway_circuit(
        sys, env, lay, {{lindblad::Side::Bra, 'Y', 1}}, {lindblad::Side::Ket, 'X', 0}, {0.0}, ts,
        circuit::MeasureBasis::Y);
    const auto lowered = qasm::realize_open_controls(circ0);
    const Mat u1 = gates_to_unitary(
        std::vector<circuit::Gate>(circ0.instructions.begin() + 1, circ0.instructions.end() - 1),
        lay.total_qubits());
    const Mat u2 = gates_to_unitary(
        std::vector<circuit::Gate>(lowered.instructions.begin() + 1,
                                   lowered.instructions.end() - 1),
        lay.total_qubits());
    CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pauli exponential staircase reproduces the dense exponential") {
    for (const std::string ops : {"XZY", "ZZI", "YXI", "IZY"}) {
        const double theta = 0.37;
        const auto gates = circuit::pauli_exponential_gates(ops, {0, 1, 2}, theta);
        const Mat u = gates_to_unitary(gates, 3);
        const Mat p = alg::pauli_string_matrix(ops);
        const Mat expd = alg::expm(Mat(cxd(0.0, -theta / 2.0) * p));
        CHECK((u - expd).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(circuit::pauli_exponential_gates("III", {0, 1, 2}, 0.5).empty());
}

TEST_CASE("gray-coded collision block converges to its generator") {
    const int d = 4;
    const Mat a = alg::gray_lift(alg::boson_annihilation(d), d);
    const double width = 0.1, dt = 0.1;
    const Mat hc = std::sqrt(2.0 * width * units::hbar / dt) *
                   (alg::kron(Mat(a.adjoint()), alg::sigma_minus()) +
                    alg::kron(a, alg::sigma_plus()));
    double prev = 1.0;
    for (int n_t2 : {1, 4, 16}) {
        std::vector<circuit::Gate> gates;
        const auto terms = alg::pauli_decompose(hc);
        for (int r = 0; r < n_t2; ++r) {
            for (const auto& t : terms) {
                auto g = circuit::pauli_exponential_gates(
                    t.ops, {0, 1, 2}, 2.0 * t.coeff.real() * (dt / units::hbar) / n_t2);
                gates.insert(gates.end(), g.begin(), g.end());
            }
        }
        const Mat u = gates_to_unitary(gates, 3);
        const Mat expd = alg::expm(Mat(cxd(0.0, -dt / units::hbar) * hc));
        const double err = (u - expd).cwiseAbs().maxCoeff();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 3e-3);  // measured remainder at n_t2 = 16
}

TEST_CASE("memory budget fails fast with the required bytes") {
    auto sys = table_dimer();
    auto env = finite_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    circuit::CircuitIR circ;
    circ.layout = lay;
    circ.instructions.push_back(circuit::Gate::h(0));
    circ.instructions.push_back(circuit::Gate::measure(0, circuit::MeasureBasis::X));
    circuit::EmulateOptions opt;
    opt.memory_budget_bytes = 1024;
    try {
        circuit::emulate(circ, opt);
        CHECK(false);
    } catch (const ResourceError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("65536") != std::string::npos);  // 16 * 4^6 bytes
    }
}

TEST_CASE("circuit validation rules") {
    auto sys = single_site();
    auto env = finite_env();
    const auto lay = model::layout_register(sys, env, model::AncillaScheme::Single);
    circuit::CircuitIR circ;
    circ.layout = lay;
    circ.instructions.push_back(circuit::Gate::reset(1));  // site qubit: invalid
    CHECK_THROWS(circ.validate());

    circuit::CircuitIR circ2;
    circ2.layout = lay;
    circ2.instructions.push_back(circuit::Gate::measure(1, circuit::MeasureBasis::X));
    CHECK_THROWS(circ2.validate());
}
