#include "exspec/response.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "exspec/errors.hpp"
#include "exspec/rng.hpp"
#include "exspec/threading.hpp"
#include "exspec/units.hpp"

namespace exspec::response {

using alg::Mat;

namespace {

cxd order_prefactor(int order) {
    // i^M
    switch (order % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// ladder decomposition σ^± = (X ∓ iY)/2
cxd pauli_coefficient(DipoleSign sign, char pauli) {
    if (pauli == 'X') return {0.5, 0.0};
    return (sign == DipoleSign::Plus) ? cxd(0.0, -0.5) : cxd(0.0, 0.5);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string PathwaySpec::name() const {
    switch (label) {
        case PathwayLabel::Linear: return emission == DipoleSign::Minus ? "R1" : "R2";
        case PathwayLabel::GSB: return "GSB";
        case PathwayLabel::SE: return "SE";
        case PathwayLabel::ESA: return "ESA";
        case PathwayLabel::Custom: return "CUSTOM";
    }
    return "?";
}

void PathwaySpec::validate() const {
    if (order < 1) throw std::invalid_argument("pathway: order must be >= 1");
    if (static_cast<int>(events.size()) != order) {
        throw std::invalid_argument("pathway: expected one event per interaction order");
    }
    if (overall_sign != 1 && overall_sign != -1) {
        throw std::invalid_argument("pathway: overall sign must be ±1");
    }
}

int PathwaySpec::coherence_sense(int axis) const {
    int ket = 0;
    int bra = 0;
    for (int m = 0; m <= axis && m < static_cast<int>(events.size()); ++m) {
        const int delta = (events[static_cast<std::size_t>(m)].sign == DipoleSign::Plus) ? 1 : -1;
        if (events[static_cast<std::size_t>(m)].side == Side::Ket) {
            ket += delta;
        } else {
            bra += delta;
        }
    }
    return ket - bra;
}

bool PathwaySpec::structurally_allowed() const {
    bool ket_seen = false;
    bool bra_seen = false;
    for (const auto& ev : events) {
        if (ev.side == Side::Ket && !ket_seen) {
            ket_seen = true;
            if (ev.sign != DipoleSign::Plus) return false;
        }
        if (ev.side == Side::Bra && !bra_seen) {
            bra_seen = true;
            if (ev.sign != DipoleSign::Minus) return false;
        }
    }
    // emission must close the ket/bra excitation imbalance
    const int sense = coherence_sense(order - 1);
    const int required = (emission == DipoleSign::Minus) ? 1 : -1;
    return sense == required;
}

std::vector<PathwaySpec> enumerate_pathways(int order, PhaseMatching pm) {
    if (order < 1) throw std::invalid_argument("enumerate_pathways: order must be >= 1");
    if (pm == PhaseMatching::Linear) {
        if (order != 1) throw std::invalid_argument("enumerate_pathways: linear set requires M=1");
        PathwaySpec r1;
        r1.order = 1;
        r1.events = {{Side::Ket, DipoleSign::Plus}};
        r1.emission = DipoleSign::Minus;
        r1.overall_sign = 1;
        r1.label = PathwayLabel::Linear;
        PathwaySpec r2;
        r2.order = 1;
        r2.events = {{Side::Bra, DipoleSign::Minus}};
        r2.emission = DipoleSign::Plus;
        r2.overall_sign = -1;
        r2.label = PathwayLabel::Linear;
        return {r1, r2};
    }
    if (pm == PhaseMatching::Rephasing) {
        if (order != 3) {
            throw std::invalid_argument("enumerate_pathways: rephasing set requires M=3");
        }
        PathwaySpec gsb;
        gsb.order = 3;
        gsb.events = {{Side::Bra, DipoleSign::Minus},
                      {Side::Bra, DipoleSign::Plus},
                      {Side::Ket, DipoleSign::Plus}};
        gsb.overall_sign = 1;
        gsb.label = PathwayLabel::GSB;
        PathwaySpec se;
        se.order = 3;
        se.events = {{Side::Bra, DipoleSign::Minus},
                     {Side::Ket, DipoleSign::Plus},
                     {Side::Bra, DipoleSign::Plus}};
        se.overall_sign = 1;
        se.label = PathwayLabel::SE;
        PathwaySpec esa;
        esa.order = 3;
        esa.events = {{Side::Bra, DipoleSign::Minus},
                      {Side::Ket, DipoleSign::Plus},
                      {Side::Ket, DipoleSign::Plus}};
        esa.overall_sign = -1;
        esa.label = PathwayLabel::ESA;
        return {gsb, se, esa};
    }
    throw std::invalid_argument("enumerate_pathways: unsupported phase matching");
}

namespace {

struct FullEvent {
    Side side;
    DipoleSign sign;
};

std::vector<FullEvent> events_with_emission(const PathwaySpec& p) {
    std::vector<FullEvent> evs;
    for (const auto& e : p.events) evs.push_back({e.side, e.sign});
    evs.push_back({Side::Ket, p.emission});
    return evs;
}

} // namespace

std::vector<SiteBasisPathway> decompose_site_basis(const PathwaySpec& pathway,
                                                   const model::ExcitonSystem& sys,
                                                   Pruning pruning) {
    pathway.validate();
    sys.validate();
    const int n = sys.n_sites;
    const int m1 = pathway.order + 1;
    const auto evs = events_with_emission(pathway);
    std::vector<SiteBasisPathway> out;
    if (!pathway.structurally_allowed()) return out;

    auto weight_of = [&](const std::vector<int>& sites) {
        double w = 1.0;
        for (int s : sites) w *= sys.dipoles[static_cast<std::size_t>(s)];
        return w;
    };

    if (pruning == Pruning::None) {
        // all (2N)^(M+1) site/Pauli combinations
        std::vector<int> sites(static_cast<std::size_t>(m1), 0);
        std::vector<int> paulis(static_cast<std::size_t>(m1), 0);
        const long total = static_cast<long>(std::pow(2.0 * n, m1));
        for (long code = 0; code < total; ++code) {
            long rem = code;
            for (int k = 0; k < m1; ++k) {
                const int pick = static_cast<int>(rem % (2 * n));
                rem /= 2 * n;
                sites[static_cast<std::size_t>(k)] = pick % n;
                paulis[static_cast<std::size_t>(k)] = pick / n;
            }
            SiteBasisPathway sbp;
            sbp.weight = weight_of(sites);
            sbp.phase = {1.0, 0.0};
            for (int k = 0; k < m1; ++k) {
                const char pl = paulis[static_cast<std::size_t>(k)] ? 'Y' : 'X';
                sbp.events.push_back({sites[static_cast<std::size_t>(k)], pl});
                sbp.phase *= pauli_coefficient(evs[static_cast<std::size_t>(k)].sign, pl);
            }
            out.push_back(std::move(sbp));
        }
        return out;
    }

    // excitation-conserving pruning
    if (n == 1) {
        // single chromophore: the ladder path is fully forced; drop the
        // pathway when two-level saturation annihilates it
        int ket = 0;
        int bra = 0;
        for (const auto& ev : evs) {
            int& exc = (ev.side == Side::Ket) ? ket : bra;
            const int delta = (ev.sign == DipoleSign::Plus) ? 1 : -1;
            exc += delta;
            if (exc < 0 || exc > 1) return out;  // annihilated
        }
        if (ket != bra) return out;
        SiteBasisPathway sbp;
        sbp.events.assign(static_cast<std::size_t>(m1), SiteEvent{0, 'X'});
        sbp.weight = std::pow(sys.dipoles[0], m1);
        sbp.phase = {1.0, 0.0};
        out.push_back(std::move(sbp));
        return out;
    }

    // Pauli variants are needed only at events whose ladder component is not
    // forced: the first ket-side and first bra-side events act on a ground
    // half, and the emission is resolved by the complex readout itself.
    std::vector<int> designated;
    {
        int first_ket = -1;
        int first_bra = -1;
        for (int k = 0; k < m1; ++k) {
            if (evs[static_cast<std::size_t>(k)].side == Side::Ket && first_ket < 0) first_ket = k;
            if (evs[static_cast<std::size_t>(k)].side == Side::Bra && first_bra < 0) first_bra = k;
        }
        for (int k = 1; k + 1 < m1; ++k) {
            if (k != first_ket && k != first_bra) designated.push_back(k);
        }
    }

    const long site_total = static_cast<long>(std::pow(n, m1));
    const long variant_total = 1L << designated.size();
    std::vector<int> sites(static_cast<std::size_t>(m1), 0);
    for (long sc = 0; sc < site_total; ++sc) {
        long rem = sc;
        for (int k = 0; k < m1; ++k) {
            sites[static_cast<std::size_t>(k)] = static_cast<int>(rem % n);
            rem /= n;
        }
        const double w = weight_of(sites);
        for (long vc = 0; vc < variant_total; ++vc) {
            SiteBasisPathway sbp;
            sbp.weight = w;
            sbp.phase = {1.0, 0.0};
            for (int k = 0; k < m1; ++k) sbp.events.push_back({sites[static_cast<std::size_t>(k)], 'X'});
            // forced events carry unit weight; designated ones carry the
            // ladder-decomposition coefficient of their Pauli choice
            for (std::size_t dk = 0; dk < designated.size(); ++dk) {
                const char pl = ((vc >> dk) & 1) ? 'Y' : 'X';
                const int k = designated[dk];
                sbp.events[static_cast<std::size_t>(k)].pauli = pl;
                sbp.phase *= pauli_coefficient(evs[static_cast<std::size_t>(k)].sign, pl);
            }
            out.push_back(std::move(sbp));
        }
    }
    return out;
}

long GridSpec::points() const {
    long p = 1;
    for (const auto& a : axes) p *= a.count;
    return p;
}

long ResponseGrid::points() const {
    long p = 1;
    for (const auto& a : axes) p *= a.count;
    return p;
}

long ResponseGrid::index(const std::vector<int>& idx) const {
    long lin = 0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        lin = lin * axes[k].count + idx[k];
    }
    return lin;
}

namespace {

void check_axes(const PathwaySpec& pathway, const GridSpec& grid) {
    if (static_cast<int>(grid.axes.size()) != pathway.order) {
        throw std::invalid_argument("response grid needs one delay axis per interaction");
    }
    for (const auto& a : grid.axes) {
        if (a.count < 1 || a.step_fs < 0.0 || a.start_fs < 0.0) {
            throw std::invalid_argument("response grid axis is malformed");
        }
    }
}

} // namespace

ResponseGrid evaluate_classical(const PathwaySpec& pathway, const GridSpec& grid,
                                const model::ExcitonSystem& sys,
                                const model::EnvironmentSpec& env,
                                const ClassicalOptions& opts) {
    pathway.validate();
    check_axes(pathway, grid);
    const auto cs = model::composite_space(sys, env);
    const Mat h = model::build_total_hamiltonian(sys, env, cs);

    std::function<lindblad::DensityMatrix(const lindblad::DensityMatrix&, double)> evolve;
    std::shared_ptr<lindblad::Propagator> lprop;
    std::shared_ptr<collision::CollisionPropagator> cprop;
    if (opts.backend == ClassicalBackend::Lindblad) {
        lindblad::Liouvillian liou(cs.space, h, lindblad::standard_dissipators(sys, env, cs),
                                   units::hbar);
        lindblad::PropagateOptions popt;
        popt.dt_fs = opts.dt_fs;
        popt.stepper = opts.stepper;
        lprop = std::make_shared<lindblad::Propagator>(std::move(liou), popt);
        evolve = [lprop](const lindblad::DensityMatrix& r, double t) {
            return lprop->propagate(r, t);
        };
    } else {
        cprop = std::make_shared<collision::CollisionPropagator>(sys, env, cs, opts.dt_fs,
                                                                 units::hbar);
        evolve = [cprop](const lindblad::DensityMatrix& r, double t) {
            return cprop->propagate(r, t);
        };
    }

    const Mat mu_emission = (pathway.emission == DipoleSign::Minus)
                                ? model::dipole_lowering(sys, cs)
                                : model::dipole_raising(sys, cs);
    const cxd prefactor =
        static_cast<double>(pathway.overall_sign) * order_prefactor(pathway.order);

    ResponseGrid out;
    out.pathway = pathway.name();
    out.axes = grid.axes;
    for (int m = 0; m < pathway.order; ++m) out.senses.push_back(pathway.coherence_sense(m));
    out.values.assign(static_cast<std::size_t>(grid.points()), cxd(0.0, 0.0));
    out.provenance.engine = Engine::Classical;
    out.provenance.backend = opts.backend;
    out.provenance.dt_fs = opts.dt_fs;

    std::vector<int> idx(static_cast<std::size_t>(pathway.order), 0);
    const int order = pathway.order;

    std::function<void(int, const lindblad::DensityMatrix&)> walk =
        [&](int m, const lindblad::DensityMatrix& state) {
            const auto& ev = pathway.events[static_cast<std::size_t>(m)];
            lindblad::DensityMatrix cur = lindblad::apply_dipole(state, sys, cs, ev.side, ev.sign);
            const auto& axis = grid.axes[static_cast<std::size_t>(m)];
            if (axis.start_fs > 0.0) cur = evolve(cur, axis.start_fs);
            for (int i = 0; i < axis.count; ++i) {
                if (i > 0) cur = evolve(cur, axis.step_fs);
                idx[static_cast<std::size_t>(m)] = i;
                if (m == order - 1) {
                    const cxd tr = (mu_emission * cur.data).trace();
                    out.values[static_cast<std::size_t>(out.index(idx))] = prefactor * tr;
                } else {
                    walk(m + 1, cur);
                }
            }
        };

    walk(0, lindblad::ground_state(cs));
    return out;
}

std::vector<cxd> evaluate_pauli_chain_classical(const PathwaySpec& pathway,
                                                const SiteBasisPathway& sbp,
                                                const GridSpec& grid,
                                                const model::ExcitonSystem& sys,
                                                const model::EnvironmentSpec& env,
                                                const ClassicalOptions& opts) {
    pathway.validate();
    check_axes(pathway, grid);
    if (static_cast<int>(sbp.events.size()) != pathway.order + 1) {
        throw std::invalid_argument("site-basis pathway event count mismatch");
    }
    const auto cs = model::composite_space(sys, env);
    const Mat h = model::build_total_hamiltonian(sys, env, cs);
    lindblad::Liouvillian liou(cs.space, h, lindblad::standard_dissipators(sys, env, cs),
                               units::hbar);
    lindblad::PropagateOptions popt;
    popt.dt_fs = opts.dt_fs;
    popt.stepper = opts.stepper;
    lindblad::Propagator prop(std::move(liou), popt);

    auto pauli_op = [&](const SiteEvent& se) {
        const Mat p = (se.pauli == 'X') ? alg::pauli_x() : alg::pauli_y();
        return alg::embed(cs.space, p, {se.site});
    };

    std::vector<cxd> values(static_cast<std::size_t>(grid.points()), cxd(0.0, 0.0));
    std::vector<int> idx(static_cast<std::size_t>(pathway.order), 0);
    const Mat p_emit = pauli_op(sbp.events.back());

    std::function<void(int, const lindblad::DensityMatrix&)> walk =
        [&](int m, const lindblad::DensityMatrix& state) {
            const auto& ev = pathway.events[static_cast<std::size_t>(m)];
            lindblad::DensityMatrix cur;
            cur.physical = false;
            const Mat p = pauli_op(sbp.events[static_cast<std::size_t>(m)]);
            cur.data = (ev.side == Side::Ket) ? Mat(p * state.data) : Mat(state.data * p);
            const auto& axis = grid.axes[static_cast<std::size_t>(m)];
            if (axis.start_fs > 0.0) cur = prop.propagate(cur, axis.start_fs);
            for (int i = 0; i < axis.count; ++i) {
                if (i > 0) cur = prop.propagate(cur, axis.step_fs);
                idx[static_cast<std::size_t>(m)] = i;
                if (m == pathway.order - 1) {
                    long lin = 0;
                    for (std::size_t k = 0; k < idx.size(); ++k) {
                        lin = lin * grid.axes[k].count + idx[k];
                    }
                    values[static_cast<std::size_t>(lin)] = (p_emit * cur.data).trace();
                } else {
                    walk(m + 1, cur);
                }
            }
        };
    walk(0, lindblad::ground_state(cs));
    return values;
}

ResponseGrid evaluate_quantum(const PathwaySpec& pathway, const GridSpec& grid,
                              const model::ExcitonSystem& sys,
                              const model::EnvironmentSpec& env,
                              const QuantumOptions& opts) {
    pathway.validate();
    check_axes(pathway, grid);
    if (opts.scheme == model::AncillaScheme::PerCollision) {
        throw std::invalid_argument(
            "evaluate_quantum: PerCollision ancillae grow with the step count; "
            "use Single or PerPseudomode");
    }
    if (opts.pruning == Pruning::ExcitationConserving) {
        bool relax = false;
        for (double r : env.relaxation_rates_ev) relax |= (r > 0.0);
        if (relax || env.trap) {
            throw ConfigError(
                "excitation-conserving pruning is invalid with relaxation or trapping channels");
        }
    }

    const auto layout = model::layout_register(sys, env, opts.scheme);
    {
        // fail fast against the memory budget: coherence block of Q-1 qubits
        const std::uint64_t budget =
            opts.memory_budget_bytes ? opts.memory_budget_bytes : circuit::default_memory_budget();
        const std::uint64_t required = 16ULL << (2 * layout.total_qubits());
        if (required > budget) {
            throw ResourceError("register of " + std::to_string(layout.total_qubits()) +
                                " qubits requires " + std::to_string(required) +
                                " bytes, budget is " + std::to_string(budget));
        }
    }

    const auto sbps = decompose_site_basis(pathway, sys, opts.pruning);
    const circuit::TrotterSettings ts{opts.dt_fs, opts.n_t1, opts.n_t2};

    ResponseGrid out;
    out.pathway = pathway.name();
    out.axes = grid.axes;
    for (int m = 0; m < pathway.order; ++m) out.senses.push_back(pathway.coherence_sense(m));
    const long npts = grid.points();
    out.values.assign(static_cast<std::size_t>(npts), cxd(0.0, 0.0));
    out.provenance.engine = (opts.shots > 0) ? Engine::QuantumShots : Engine::QuantumExact;
    out.provenance.dt_fs = opts.dt_fs;
    out.provenance.n_t1 = opts.n_t1;
    out.provenance.n_t2 = opts.n_t2;
    out.provenance.shots = opts.shots;
    out.provenance.seed = opts.seed;
    out.provenance.pruning = (opts.pruning == Pruning::None) ? "none" : "excitation";
    if (opts.shots > 0) out.variance.assign(static_cast<std::size_t>(npts), 0.0);
    if (sbps.empty()) return out;

    const cxd prefactor =
        static_cast<double>(pathway.overall_sign) * order_prefactor(pathway.order);
    const std::uint64_t path_tag = fnv1a(pathway.name());

    struct SbpResult {
        std::vector<cxd> values;
        std::vector<double> variance;
    };
    std::vector<SbpResult> results(sbps.size());

    auto eval_one = [&](int si) {
        const auto& sbp = sbps[static_cast<std::size_t>(si)];
        circuit::BlockEmulator emu(sys, env, layout, ts);
        SbpResult res;
        res.values.assign(static_cast<std::size_t>(npts), cxd(0.0, 0.0));
        if (opts.shots > 0) res.variance.assign(static_cast<std::size_t>(npts), 0.0);
        std::vector<int> idx(static_cast<std::size_t>(pathway.order), 0);

        auto steps_of = [&](double t) {
            const double real = t / opts.dt_fs;
            const long s = std::lround(real);
            if (std::abs(real - static_cast<double>(s)) > 1e-9) {
                throw std::invalid_argument("grid delay is not a multiple of dt");
            }
            return s;
        };

        std::function<void(int, Mat&)> walk = [&](int m, Mat& block) {
            const auto& ev = pathway.events[static_cast<std::size_t>(m)];
            emu.apply_event(block, ev.side, sbp.events[static_cast<std::size_t>(m)].pauli,
                            sbp.events[static_cast<std::size_t>(m)].site);
            const auto& axis = grid.axes[static_cast<std::size_t>(m)];
            for (long s = 0; s < steps_of(axis.start_fs); ++s) emu.apply_step(block);
            for (int i = 0; i < axis.count; ++i) {
                if (i > 0) {
                    for (long s = 0; s < steps_of(axis.step_fs); ++s) emu.apply_step(block);
                }
                idx[static_cast<std::size_t>(m)] = i;
                long lin = 0;
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    lin = lin * grid.axes[k].count + idx[k];
                }
                if (m == pathway.order - 1) {
                    const cxd z = emu.readout(block, sbp.events.back().pauli,
                                              sbp.events.back().site);
                    if (opts.shots <= 0) {
                        res.values[static_cast<std::size_t>(lin)] = z;
                    } else {
                        const double px = std::clamp(0.5 * (1.0 + z.real()), 0.0, 1.0);
                        const double py = std::clamp(0.5 * (1.0 + z.imag()), 0.0, 1.0);
                        auto draw = [&](double p, std::uint64_t basis) {
                            auto eng = rng::make_engine(rng::derive_seed(
                                opts.seed, {path_tag, static_cast<std::uint64_t>(si),
                                            static_cast<std::uint64_t>(lin), basis}));
                            std::binomial_distribution<long> dist(opts.shots, p);
                            const double phat =
                                static_cast<double>(dist(eng)) / static_cast<double>(opts.shots);
                            return std::pair<double, double>(
                                2.0 * phat - 1.0,
                                4.0 * phat * (1.0 - phat) / static_cast<double>(opts.shots));
                        };
                        const auto [ex, vx] = draw(px, 0x58);
                        const auto [ey, vy] = draw(py, 0x59);
                        res.values[static_cast<std::size_t>(lin)] = cxd(ex, ey);
                        res.variance[static_cast<std::size_t>(lin)] = vx + vy;
                    }
                } else {
                    Mat branch = block;
                    walk(m + 1, branch);
                }
            }
        };

        Mat block = emu.initial_block();
        walk(0, block);
        results[static_cast<std::size_t>(si)] = std::move(res);
    };

    threading::parallel_for(std::max(1, opts.threads), static_cast<int>(sbps.size()), eval_one);

    for (std::size_t si = 0; si < sbps.size(); ++si) {
        const cxd w = prefactor * sbps[si].weight * sbps[si].phase;
        for (long p = 0; p < npts; ++p) {
            out.values[static_cast<std::size_t>(p)] += w * results[si].values[static_cast<std::size_t>(p)];
            if (opts.shots > 0) {
                out.variance[static_cast<std::size_t>(p)] +=
                    std::norm(w) * results[si].variance[static_cast<std::size_t>(p)];
            }
        }
    }
    return out;
}

} // namespace exspec::response
