#include "exspec/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

#include "exspec/errors.hpp"
#include "exspec/rng.hpp"
#include "exspec/units.hpp"

namespace exspec::circuit {

namespace {

constexpr double kPi = 3.14159265358979323846;

int checked_steps(double t_fs, double dt_fs) {
    const double real = t_fs / dt_fs;
    const long n = std::lround(real);
    if (t_fs < 0.0 || std::abs(real - static_cast<double>(n)) > 1e-9) {
        throw std::invalid_argument("delay time must be a non-negative multiple of dt");
    }
    return static_cast<int>(n);
}

} // namespace

bool Gate::operator==(const Gate& o) const {
    return kind == o.kind && qubits == o.qubits && angle == o.angle && polarity == o.polarity &&
           basis == o.basis;
}

const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "h";
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::CX: return "cx";
        case GateKind::CY: return "cy";
        case GateKind::RZ: return "rz";
        case GateKind::RX: return "rx";
        case GateKind::RXX: return "rxx";
        case GateKind::RYY: return "ryy";
        case GateKind::RZX: return "rzx";
        case GateKind::Reset: return "reset";
        case GateKind::Measure: return "measure";
    }
    return "?";
}

Mat gate_matrix(const Gate& g) {
    using alg::kron;
    const cxd i_unit(0.0, 1.0);
    switch (g.kind) {
        case GateKind::H: {
            Mat m(2, 2);
            m << 1, 1, 1, -1;
            return m / std::sqrt(2.0);
        }
        case GateKind::X: return alg::pauli_x();
        case GateKind::Y: return alg::pauli_y();
        case GateKind::CX:
        case GateKind::CY: {
            const Mat p_act = (g.polarity == ControlPolarity::Closed)
                                  ? alg::projector_excited()
                                  : Mat(alg::identity(2) - alg::projector_excited());
            const Mat p_idle = alg::identity(2) - p_act;
            const Mat target = (g.kind == GateKind::CX) ? alg::pauli_x() : alg::pauli_y();
            return kron(p_act, target) + kron(p_idle, alg::identity(2));
        }
        case GateKind::RZ: {
            Mat m = Mat::Zero(2, 2);
            m(0, 0) = std::exp(-i_unit * (g.angle / 2.0));
            m(1, 1) = std::exp(i_unit * (g.angle / 2.0));
            return m;
        }
        case GateKind::RX: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            return c * alg::identity(2) - i_unit * s * alg::pauli_x();
        }
        case GateKind::RXX: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            return c * alg::identity(4) - i_unit * s * kron(alg::pauli_x(), alg::pauli_x());
        }
        case GateKind::RYY: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            return c * alg::identity(4) - i_unit * s * kron(alg::pauli_y(), alg::pauli_y());
        }
        case GateKind::RZX: {
            const double c = std::cos(g.angle / 2.0);
            const double s = std::sin(g.angle / 2.0);
            return c * alg::identity(4) - i_unit * s * kron(alg::pauli_z(), alg::pauli_x());
        }
        case GateKind::Reset:
        case GateKind::Measure:
            throw std::invalid_argument("gate_matrix: non-unitary instruction");
    }
    throw std::logic_error("gate_matrix: unknown gate");
}

void CircuitIR::validate() const {
    const int nq = n_qubits();
    int measures = 0;
    for (const auto& g : instructions) {
        for (int q : g.qubits) {
            if (q < 0 || q >= nq) throw std::invalid_argument("circuit: qubit index out of range");
        }
        if (g.kind == GateKind::Reset) {
            const auto role = layout.qubits[static_cast<std::size_t>(g.qubits[0])].role;
            if (role != model::QubitRole::CollisionAncilla) {
                throw std::invalid_argument("circuit: reset must target a collision ancilla");
            }
        }
        if (g.kind == GateKind::Measure) {
            ++measures;
            if (g.qubits[0] != layout.response_ancilla()) {
                throw std::invalid_argument("circuit: measurement must target the response ancilla");
            }
        }
    }
    if (measures > 1) throw std::invalid_argument("circuit: more than one measurement");
}

// --------------------------- circuit synthesis ------------------------------

std::vector<Gate> pauli_exponential_gates(const std::string& ops, const std::vector<int>& qubits,
                                          double angle) {
    if (ops.size() != qubits.size()) {
        throw std::invalid_argument("pauli_exponential_gates: label/qubit length mismatch");
    }
    std::vector<int> active;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (ops[k] != 'I') active.push_back(static_cast<int>(k));
    }
    std::vector<Gate> gates;
    if (active.empty()) return gates;  // global phase

    auto emit_basis = [&](bool inverse) {
        for (int k : active) {
            const int q = qubits[static_cast<std::size_t>(k)];
            if (ops[static_cast<std::size_t>(k)] == 'X') {
                gates.push_back(Gate::h(q));
            } else if (ops[static_cast<std::size_t>(k)] == 'Y') {
                gates.push_back(Gate::rx(q, inverse ? -kPi / 2.0 : kPi / 2.0));
            }
        }
    };
    emit_basis(false);
    for (std::size_t k = 0; k + 1 < active.size(); ++k) {
        gates.push_back(Gate::cx(qubits[static_cast<std::size_t>(active[k])],
                                 qubits[static_cast<std::size_t>(active[k + 1])]));
    }
    gates.push_back(Gate::rz(qubits[static_cast<std::size_t>(active.back())], angle));
    for (std::size_t k = active.size() - 1; k-- > 0;) {
        gates.push_back(Gate::cx(qubits[static_cast<std::size_t>(active[k])],
                                 qubits[static_cast<std::size_t>(active[k + 1])]));
    }
    emit_basis(true);
    return gates;
}

namespace {

// Pauli-exponential expansion of exp(-i dt/hbar · op) over the given qubits,
// Trotterized into `reps` repetitions.
void emit_operator_exponential(std::vector<Gate>& out, const Mat& op,
                               const std::vector<int>& qubits, double dt_over_hbar, int reps) {
    const auto terms = alg::pauli_decompose(op);
    for (int r = 0; r < reps; ++r) {
        for (const auto& t : terms) {
            if (std::all_of(t.ops.begin(), t.ops.end(), [](char c) { return c == 'I'; })) continue;
            if (std::abs(t.coeff.imag()) > 1e-12) {
                throw std::logic_error("operator exponential: non-real Pauli coefficient");
            }
            const double angle = 2.0 * t.coeff.real() * dt_over_hbar / static_cast<double>(reps);
            auto g = pauli_exponential_gates(t.ops, qubits, angle);
            out.insert(out.end(), g.begin(), g.end());
        }
    }
}

std::vector<int> mode_qubit_list(const model::RegisterLayout& layout, int site, int k) {
    const auto [first, width] = layout.mode_qubits(site, k);
    std::vector<int> qs(static_cast<std::size_t>(width));
    for (int b = 0; b < width; ++b) qs[static_cast<std::size_t>(b)] = first + b;
    return qs;
}

} // namespace

std::vector<Gate> trotter_step_circuit(const model::ExcitonSystem& sys,
                                       const model::EnvironmentSpec& env,
                                       const model::RegisterLayout& layout,
                                       const TrotterSettings& ts, int step_index) {
    if (ts.n_t1 < 1 || ts.n_t2 < 1) throw std::invalid_argument("trotter: repetition counts must be >= 1");
    if (env.trap) throw std::invalid_argument("trotter: trap channel has no circuit realization");
    const double hbar = units::hbar;
    const double dtn = ts.dt_fs / (hbar * static_cast<double>(ts.n_t1));
    const auto replicas = env.pseudomode_terms();

    std::vector<Gate> out;

    // Hamiltonian block, n_t1 repetitions
    for (int rep = 0; rep < ts.n_t1; ++rep) {
        // site phases
        for (int i = 0; i < sys.n_sites; ++i) {
            const double eps = sys.energies_ev[static_cast<std::size_t>(i)];
            if (eps != 0.0) out.push_back(Gate::rz(layout.site_qubit(i), -eps * dtn));
        }
        // pseudomode phases
        for (int i = 0; i < sys.n_sites; ++i) {
            for (std::size_t k = 0; k < replicas.size(); ++k) {
                const auto& term = replicas[k];
                if (term.center_ev == 0.0) continue;
                const auto qs = mode_qubit_list(layout, i, static_cast<int>(k));
                if (term.levels == 2) {
                    out.push_back(Gate::rz(qs[0], -term.center_ev * dtn));
                } else {
                    const Mat n_op = alg::gray_lift(alg::boson_number(term.levels), term.levels);
                    emit_operator_exponential(out, Mat(term.center_ev * n_op), qs,
                                              ts.dt_fs / hbar / ts.n_t1, 1);
                }
            }
        }
        // exciton exchange
        for (int i = 0; i < sys.n_sites; ++i) {
            for (int j = i + 1; j < sys.n_sites; ++j) {
                const double jij = sys.couplings_ev(i, j);
                if (jij == 0.0) continue;
                const double theta = jij * dtn;
                out.push_back(Gate::rxx(layout.site_qubit(i), layout.site_qubit(j), theta));
                out.push_back(Gate::ryy(layout.site_qubit(i), layout.site_qubit(j), theta));
            }
        }
        // chromophore-pseudomode coupling
        for (int i = 0; i < sys.n_sites; ++i) {
            for (std::size_t k = 0; k < replicas.size(); ++k) {
                const auto& term = replicas[k];
                const double g = term.coupling_ev();
                if (g == 0.0) continue;
                const auto qs = mode_qubit_list(layout, i, static_cast<int>(k));
                if (term.levels == 2) {
                    out.push_back(Gate::rx(qs[0], g * dtn));
                    out.push_back(Gate::rzx(layout.site_qubit(i), qs[0], -g * dtn));
                } else {
                    const Mat a = alg::boson_annihilation(term.levels);
                    const Mat x_lift = alg::gray_lift(Mat(a + Mat(a.adjoint())), term.levels);
                    Mat op = alg::kron(Mat(alg::projector_excited()), Mat(g * x_lift));
                    std::vector<int> all{layout.site_qubit(i)};
                    all.insert(all.end(), qs.begin(), qs.end());
                    emit_operator_exponential(out, op, all, ts.dt_fs / hbar / ts.n_t1, 1);
                }
            }
        }
    }

    // collision block with resets
    const auto ancillae = layout.collision_ancillae();

    // channel enumeration, site-major, matching standard_collisions
    struct Channel {
        enum class Kind { Mode, Dephase, Relax } kind;
        int site;
        int mode;       // replica index for Kind::Mode
        double rate_ev; // Ω, Γ or γ
    };
    std::vector<Channel> channels;
    for (int i = 0; i < sys.n_sites; ++i) {
        for (std::size_t k = 0; k < replicas.size(); ++k) {
            channels.push_back({Channel::Kind::Mode, i, static_cast<int>(k),
                                replicas[k].width_ev});
        }
    }
    for (const auto& t : env.memoryless_terms()) {
        for (int i = 0; i < sys.n_sites; ++i) {
            channels.push_back({Channel::Kind::Dephase, i, -1, t.amplitude_ev});
        }
    }
    for (std::size_t i = 0; i < env.relaxation_rates_ev.size(); ++i) {
        if (env.relaxation_rates_ev[i] > 0.0) {
            channels.push_back({Channel::Kind::Relax, static_cast<int>(i), -1,
                                env.relaxation_rates_ev[i]});
        }
    }

    const int n_channels = static_cast<int>(channels.size());
    for (int c = 0; c < n_channels; ++c) {
        int anc = ancillae.at(0);
        if (layout.scheme == model::AncillaScheme::PerPseudomode) {
            anc = ancillae.at(static_cast<std::size_t>(c));
        } else if (layout.scheme == model::AncillaScheme::PerCollision) {
            anc = ancillae.at(static_cast<std::size_t>(step_index * n_channels + c));
        }
        const auto& ch = channels[static_cast<std::size_t>(c)];
        switch (ch.kind) {
            case Channel::Kind::Mode: {
                const auto& term = replicas[static_cast<std::size_t>(ch.mode)];
                if (term.levels == 2) {
                    const double theta = std::sqrt(2.0 * ch.rate_ev * ts.dt_fs / hbar) /
                                         static_cast<double>(ts.n_t2);
                    const int pq = mode_qubit_list(layout, ch.site, ch.mode)[0];
                    for (int r = 0; r < ts.n_t2; ++r) {
                        out.push_back(Gate::rxx(pq, anc, theta));
                        out.push_back(Gate::ryy(pq, anc, theta));
                    }
                } else {
                    const Mat a = alg::gray_lift(alg::boson_annihilation(term.levels), term.levels);
                    const Mat hc = std::sqrt(2.0 * ch.rate_ev * hbar / ts.dt_fs) *
                                   (alg::kron(Mat(a.adjoint()), alg::sigma_minus()) +
                                    alg::kron(a, alg::sigma_plus()));
                    auto qs = mode_qubit_list(layout, ch.site, ch.mode);
                    qs.push_back(anc);
                    emit_operator_exponential(out, hc, qs, ts.dt_fs / hbar, ts.n_t2);
                }
                break;
            }
            case Channel::Kind::Dephase: {
                const double theta = std::sqrt(ch.rate_ev * ts.dt_fs / hbar) /
                                     static_cast<double>(ts.n_t2);
                for (int r = 0; r < ts.n_t2; ++r) {
                    out.push_back(Gate::rzx(layout.site_qubit(ch.site), anc, theta));
                }
                break;
            }
            case Channel::Kind::Relax: {
                const double theta = std::sqrt(ch.rate_ev * ts.dt_fs / hbar) /
                                     static_cast<double>(ts.n_t2);
                for (int r = 0; r < ts.n_t2; ++r) {
                    out.push_back(Gate::rxx(layout.site_qubit(ch.site), anc, theta));
                    out.push_back(Gate::ryy(layout.site_qubit(ch.site), anc, theta));
                }
                break;
            }
        }
        if (layout.scheme != model::AncillaScheme::PerCollision) {
            out.push_back(Gate::reset(anc));
        }
    }
    return out;
}

std::vector<Gate> interaction_gates(const model::RegisterLayout& layout, lindblad::Side side,
                                    char pauli, int site) {
    if (site < 0 || site >= layout.n_sites) {
        throw std::invalid_argument("interaction_gates: site out of range");
    }
    const ControlPolarity pol =
        (side == lindblad::Side::Ket) ? ControlPolarity::Closed : ControlPolarity::Open;
    const int a = layout.response_ancilla();
    const int s = layout.site_qubit(site);
    if (pauli == 'X') return {Gate::cx(a, s, pol)};
    if (pauli == 'Y') return {Gate::cy(a, s, pol)};
    throw std::invalid_argument("interaction_gates: pauli must be X or Y");
}

CircuitIR build_pathway_circuit(const model::ExcitonSystem& sys,
                                const model::EnvironmentSpec& env,
                                const model::RegisterLayout& layout,
                                const std::vector<PathwayCircuitEvent>& events,
                                const PathwayCircuitEvent& emission,
                                const std::vector<double>& delays_fs,
                                const TrotterSettings& ts, MeasureBasis basis) {
    if (delays_fs.size() != events.size()) {
        throw std::invalid_argument("build_pathway_circuit: one delay per interaction event required");
    }
    CircuitIR circ;
    circ.layout = layout;
    circ.metadata.delays_fs = delays_fs;
    circ.instructions.push_back(Gate::h(layout.response_ancilla()));
    int step_counter = 0;
    for (std::size_t m = 0; m < events.size(); ++m) {
        const auto& ev = events[m];
        auto ig = interaction_gates(layout, ev.side, ev.pauli, ev.site);
        circ.instructions.insert(circ.instructions.end(), ig.begin(), ig.end());
        const int steps = checked_steps(delays_fs[m], ts.dt_fs);
        for (int s = 0; s < steps; ++s) {
            auto block = trotter_step_circuit(sys, env, layout, ts, step_counter++);
            circ.instructions.insert(circ.instructions.end(), block.begin(), block.end());
        }
    }
    auto eg = interaction_gates(layout, lindblad::Side::Ket, emission.pauli, emission.site);
    circ.instructions.insert(circ.instructions.end(), eg.begin(), eg.end());
    circ.instructions.push_back(Gate::measure(layout.response_ancilla(), basis));
    circ.validate();
    return circ;
}

// ------------------------------- emulation ----------------------------------

std::uint64_t default_memory_budget() {
    if (const char* env = std::getenv("EXSPEC_MEM_BUDGET_BYTES")) {
        const unsigned long long v = std::strtoull(env, nullptr, 10);
        if (v > 0) return static_cast<std::uint64_t>(v);
    }
    return 2ULL << 30;
}

namespace {

void check_budget(int n_qubits, std::uint64_t budget) {
    if (budget == 0) budget = default_memory_budget();
    // density matrix footprint: 16 bytes per amplitude, 4^Q amplitudes
    const std::uint64_t required = 16ULL << (2 * n_qubits);
    if (required > budget) {
        throw ResourceError("register of " + std::to_string(n_qubits) + " qubits requires " +
                            std::to_string(required) + " bytes, budget is " +
                            std::to_string(budget));
    }
}

struct GateKey {
    GateKind kind;
    std::vector<int> qubits;
    double angle;
    ControlPolarity polarity;
    bool operator<(const GateKey& o) const {
        return std::tie(kind, qubits, angle, polarity) <
               std::tie(o.kind, o.qubits, o.angle, o.polarity);
    }
};

cxd pauli_trace(const alg::Space& space, const Mat& rho, int qubit, char pauli) {
    // Tr{P_q ρ} for P in {X, Y}
    const int s = space.stride(qubit);
    const int dim = space.dim();
    cxd acc(0.0, 0.0);
    for (int i = 0; i < dim; ++i) {
        const int bit = (i / s) % 2;
        const int j = bit ? i - s : i + s;  // flip qubit
        if (pauli == 'X') {
            acc += rho(j, i);
        } else {
            acc += (bit == 0 ? cxd(0.0, -1.0) : cxd(0.0, 1.0)) * rho(j, i);
        }
    }
    return acc;
}

} // namespace

Mat emulate_density_matrix(const CircuitIR& circuit, std::uint64_t memory_budget_bytes) {
    circuit.validate();
    check_budget(circuit.n_qubits(), memory_budget_bytes);
    const alg::Space space = alg::Space::qubits(circuit.n_qubits());
    Mat rho = Mat::Zero(space.dim(), space.dim());
    rho(0, 0) = 1.0;
    Mat out, scratch;
    std::map<GateKey, alg::LocalOp> cache;
    for (const auto& g : circuit.instructions) {
        if (g.kind == GateKind::Measure) break;
        if (g.kind == GateKind::Reset) {
            alg::reset_subsystem(space, rho, g.qubits[0], out);
            std::swap(rho, out);
            continue;
        }
        GateKey key{g.kind, g.qubits, g.angle, g.polarity};
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, alg::LocalOp(space, gate_matrix(g), g.qubits)).first;
        }
        it->second.conjugate(rho, out, scratch);
        std::swap(rho, out);
    }
    return rho;
}

namespace {

EmulationResult sample_or_exact(double exact, long shots, std::uint64_t seed) {
    EmulationResult r;
    if (shots <= 0) {
        r.expectation = exact;
        r.variance = 0.0;
        r.shots = 0;
        return r;
    }
    const double p = std::clamp(0.5 * (1.0 + exact), 0.0, 1.0);
    auto eng = rng::make_engine(seed);
    std::binomial_distribution<long> dist(shots, p);
    const long ones = dist(eng);
    const double phat = static_cast<double>(ones) / static_cast<double>(shots);
    r.expectation = 2.0 * phat - 1.0;
    r.variance = 4.0 * phat * (1.0 - phat) / static_cast<double>(shots);
    r.shots = shots;
    return r;
}

} // namespace

EmulationResult emulate(const CircuitIR& circuit, const EmulateOptions& opts) {
    const Mat rho = emulate_density_matrix(circuit, opts.memory_budget_bytes);
    const alg::Space space = alg::Space::qubits(circuit.n_qubits());
    MeasureBasis basis = MeasureBasis::X;
    bool found = false;
    for (const auto& g : circuit.instructions) {
        if (g.kind == GateKind::Measure) {
            basis = g.basis;
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("emulate: circuit has no measurement");
    const char pl = (basis == MeasureBasis::X) ? 'X' : 'Y';
    const double exact = pauli_trace(space, rho, circuit.layout.response_ancilla(), pl).real();
    return sample_or_exact(exact, opts.shots, opts.seed);
}

std::pair<EmulationResult, EmulationResult> emulate_xy(const CircuitIR& circuit,
                                                       const EmulateOptions& opts) {
    const Mat rho = emulate_density_matrix(circuit, opts.memory_budget_bytes);
    const alg::Space space = alg::Space::qubits(circuit.n_qubits());
    const int a = circuit.layout.response_ancilla();
    const double ex = pauli_trace(space, rho, a, 'X').real();
    const double ey = pauli_trace(space, rho, a, 'Y').real();
    return {sample_or_exact(ex, opts.shots, rng::derive_seed(opts.seed, {0x58})),
            sample_or_exact(ey, opts.shots, rng::derive_seed(opts.seed, {0x59}))};
}

// ------------------------------ block engine --------------------------------

BlockEmulator::BlockEmulator(const model::ExcitonSystem& sys, const model::EnvironmentSpec& env,
                             const model::RegisterLayout& layout, const TrotterSettings& ts)
    : layout_(layout) {
    if (layout.scheme == model::AncillaScheme::PerCollision) {
        throw std::invalid_argument("BlockEmulator: PerCollision scheme needs step-indexed ancillae; "
                                    "use Single or PerPseudomode");
    }
    space_ = alg::Space::qubits(layout.total_qubits() - 1);
    const auto block = trotter_step_circuit(sys, env, layout, ts, 0);
    for (const auto& g : block) {
        if (g.kind == GateKind::Reset) {
            Prepared p{Prepared::Action::Reset, std::nullopt, g.qubits[0] - 1};
            step_ops_.push_back(std::move(p));
            continue;
        }
        std::vector<int> shifted;
        for (int q : g.qubits) {
            if (q == 0) throw std::logic_error("BlockEmulator: evolution gate touches the response ancilla");
            shifted.push_back(q - 1);
        }
        Prepared p{Prepared::Action::Conjugate,
                   alg::LocalOp(space_, gate_matrix(g), shifted), -1};
        step_ops_.push_back(std::move(p));
    }
}

Mat BlockEmulator::initial_block() const {
    Mat b = Mat::Zero(space_.dim(), space_.dim());
    b(0, 0) = 1.0;
    return b;
}

void BlockEmulator::apply_step(Mat& block) const {
    for (const auto& p : step_ops_) {
        if (p.action == Prepared::Action::Reset) {
            alg::reset_subsystem(space_, block, p.reset_subsystem, buf_);
            std::swap(block, buf_);
        } else {
            p.op->conjugate(block, buf_, buf2_);
            std::swap(block, buf_);
        }
    }
}

void BlockEmulator::apply_event(Mat& block, lindblad::Side side, char pauli, int site) const {
    const int q = layout_.site_qubit(site) - 1;
    const Mat p = (pauli == 'X') ? alg::pauli_x() : alg::pauli_y();
    alg::LocalOp op(space_, p, {q});
    if (side == lindblad::Side::Ket) {
        op.apply_left(block, buf_);
    } else {
        op.apply_right(block, buf_);
    }
    std::swap(block, buf_);
}

cxd BlockEmulator::readout(const Mat& block, char pauli, int site) const {
    return pauli_trace(space_, block, layout_.site_qubit(site) - 1, pauli);
}

// -------------------------------- census ------------------------------------

GateCensus gate_census(const CircuitIR& circuit) {
    GateCensus c;
    std::vector<int> clock(static_cast<std::size_t>(circuit.n_qubits()), 0);
    for (const auto& g : circuit.instructions) {
        ++c.counts[gate_name(g.kind)];
        ++c.total;
        if (g.kind == GateKind::CX || g.kind == GateKind::CY || g.kind == GateKind::RXX ||
            g.kind == GateKind::RYY || g.kind == GateKind::RZX) {
            ++c.two_qubit;
        }
        int t = 0;
        for (int q : g.qubits) t = std::max(t, clock[static_cast<std::size_t>(q)]);
        ++t;
        for (int q : g.qubits) clock[static_cast<std::size_t>(q)] = t;
        c.depth = std::max(c.depth, t);
    }
    return c;
}

long system_block_two_qubit_count(const model::ExcitonSystem& sys,
                                  const model::EnvironmentSpec& env) {
    const auto layout = model::layout_register(sys, env, model::AncillaScheme::Single);
    const auto block = trotter_step_circuit(sys, env, layout, TrotterSettings{0.1, 1, 1}, 0);
    long n = 0;
    for (const auto& g : block) {
        if (g.qubits.size() != 2) continue;
        bool all_sites = true;
        for (int q : g.qubits) {
            all_sites &= layout.qubits[static_cast<std::size_t>(q)].role == model::QubitRole::Site;
        }
        if (all_sites) ++n;
    }
    return n;
}

} // namespace exspec::circuit
