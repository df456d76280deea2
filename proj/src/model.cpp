#include "exspec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "exspec/errors.hpp"

namespace exspec::model {

void ExcitonSystem::validate() const {
    if (n_sites < 1) throw ConfigError("system: n_sites must be >= 1");
    if (static_cast<int>(energies_ev.size()) != n_sites) {
        throw ConfigError("system: energies must have one entry per site");
    }
    for (double e : energies_ev) {
        if (e < 0.0) throw ConfigError("system: site energies must be >= 0");
    }
    if (static_cast<int>(dipoles.size()) != n_sites) {
        throw ConfigError("system: dipoles must have one entry per site");
    }
    if (couplings_ev.rows() != n_sites || couplings_ev.cols() != n_sites) {
        throw ConfigError("system: coupling matrix must be N x N");
    }
    for (int i = 0; i < n_sites; ++i) {
        if (couplings_ev(i, i) != 0.0) throw ConfigError("system: coupling diagonal must be zero");
        for (int j = 0; j < n_sites; ++j) {
            if (couplings_ev(i, j) != couplings_ev(j, i)) {
                throw ConfigError("system: coupling matrix must be symmetric");
            }
        }
    }
}

double LorentzianTerm::coupling_ev() const {
    if (memoryless()) throw std::invalid_argument("coupling_ev: memoryless term has no pseudomode");
    return std::sqrt(amplitude_ev * width_ev / 2.0);
}

void LorentzianTerm::validate() const {
    if (amplitude_ev <= 0.0) throw ConfigError("environment: Lorentzian amplitude must be > 0");
    if (!memoryless()) {
        if (width_ev <= 0.0) throw ConfigError("environment: Lorentzian width must be > 0");
        if (levels < 2) throw ConfigError("environment: pseudomode levels must be >= 2");
        if (split_count < 1) throw ConfigError("environment: split count must be >= 1");
    }
}

void EnvironmentSpec::validate(int n_sites) const {
    for (const auto& t : terms) t.validate();
    if (!relaxation_rates_ev.empty() && static_cast<int>(relaxation_rates_ev.size()) != n_sites) {
        throw ConfigError("environment: relaxation rates must have one entry per site");
    }
    for (double r : relaxation_rates_ev) {
        if (r < 0.0) throw ConfigError("environment: relaxation rates must be >= 0");
    }
    if (trap) {
        if (trap->site < 0 || trap->site >= n_sites) throw ConfigError("environment: trap site out of range");
        if (trap->rate_ev < 0.0) throw ConfigError("environment: trap rate must be >= 0");
    }
}

std::vector<LorentzianTerm> EnvironmentSpec::pseudomode_terms() const {
    std::vector<LorentzianTerm> out;
    for (const auto& t : terms) {
        if (t.memoryless()) continue;
        auto replicas = split_lorentzian(t, t.split_count);
        out.insert(out.end(), replicas.begin(), replicas.end());
    }
    return out;
}

std::vector<LorentzianTerm> EnvironmentSpec::memoryless_terms() const {
    std::vector<LorentzianTerm> out;
    for (const auto& t : terms) {
        if (t.memoryless()) out.push_back(t);
    }
    return out;
}

double spectral_function(const EnvironmentSpec& env, double omega_ev) {
    double c = 0.0;
    for (const auto& t : env.terms) {
        if (t.memoryless()) {
            c += t.amplitude_ev;
        } else {
            const double d = omega_ev - t.center_ev;
            c += t.amplitude_ev * t.width_ev * t.width_ev / (d * d + t.width_ev * t.width_ev);
        }
    }
    return c;
}

std::vector<LorentzianTerm> split_lorentzian(const LorentzianTerm& term, int w) {
    if (w < 1) throw std::invalid_argument("split_lorentzian: split count must be >= 1");
    if (term.memoryless()) throw std::invalid_argument("split_lorentzian: cannot split a memoryless term");
    LorentzianTerm replica = term;
    replica.amplitude_ev = term.amplitude_ev / static_cast<double>(w);
    replica.split_count = 1;
    return std::vector<LorentzianTerm>(static_cast<std::size_t>(w), replica);
}

int RegisterLayout::site_qubit(int i) const {
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        if (qubits[q].role == QubitRole::Site && qubits[q].site == i) return static_cast<int>(q);
    }
    throw std::out_of_range("RegisterLayout: no such site qubit");
}

std::pair<int, int> RegisterLayout::mode_qubits(int i, int k) const {
    int first = -1;
    int width = 0;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        const auto& info = qubits[q];
        if (info.role == QubitRole::Pseudomode && info.site == i && info.mode == k) {
            if (first < 0) first = static_cast<int>(q);
            ++width;
        }
    }
    if (first < 0) throw std::out_of_range("RegisterLayout: no such pseudomode");
    return {first, width};
}

std::vector<int> RegisterLayout::collision_ancillae() const {
    std::vector<int> out;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        if (qubits[q].role == QubitRole::CollisionAncilla) out.push_back(static_cast<int>(q));
    }
    return out;
}

std::optional<int> RegisterLayout::reaction_center() const {
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        if (qubits[q].role == QubitRole::ReactionCenter) return static_cast<int>(q);
    }
    return std::nullopt;
}

RegisterLayout layout_register(const ExcitonSystem& sys, const EnvironmentSpec& env,
                               AncillaScheme scheme, int n_steps) {
    sys.validate();
    env.validate(sys.n_sites);
    RegisterLayout lay;
    lay.scheme = scheme;
    lay.n_sites = sys.n_sites;

    lay.qubits.push_back({QubitRole::ResponseAncilla, "a", -1, -1, 0});
    for (int i = 0; i < sys.n_sites; ++i) {
        lay.qubits.push_back({QubitRole::Site, "s" + std::to_string(i + 1), i, -1, 0});
    }
    const auto replicas = env.pseudomode_terms();
    lay.n_modes_per_site = static_cast<int>(replicas.size());
    for (int i = 0; i < sys.n_sites; ++i) {
        for (int k = 0; k < lay.n_modes_per_site; ++k) {
            const int nq = alg::qubits_for_levels(replicas[static_cast<std::size_t>(k)].levels);
            for (int b = 0; b < nq; ++b) {
                lay.qubits.push_back({QubitRole::Pseudomode,
                                      "p" + std::to_string(i + 1) + "." + std::to_string(k + 1),
                                      i, k, b});
            }
        }
    }

    // collision channels per step: one per pseudomode replica, plus one per
    // site if any memoryless term or relaxation is present, plus trap
    int per_step = sys.n_sites * lay.n_modes_per_site;
    if (!env.memoryless_terms().empty()) per_step += sys.n_sites;
    bool any_relax = false;
    for (double r : env.relaxation_rates_ev) any_relax |= (r > 0.0);
    if (any_relax) per_step += sys.n_sites;
    if (env.trap) per_step += 1;

    int n_anc = 1;
    switch (scheme) {
        case AncillaScheme::Single: n_anc = 1; break;
        case AncillaScheme::PerPseudomode: n_anc = std::max(1, per_step); break;
        case AncillaScheme::PerCollision: n_anc = std::max(1, per_step * std::max(1, n_steps)); break;
    }
    for (int c = 0; c < n_anc; ++c) {
        lay.qubits.push_back({QubitRole::CollisionAncilla,
                              n_anc == 1 ? "ac" : "ac" + std::to_string(c + 1), -1, -1, 0});
    }
    if (env.trap) {
        lay.qubits.push_back({QubitRole::ReactionCenter, "rc", -1, -1, 0});
    }
    return lay;
}

CompositeSpace composite_space(const ExcitonSystem& sys, const EnvironmentSpec& env) {
    sys.validate();
    env.validate(sys.n_sites);
    CompositeSpace cs;
    cs.n_sites = sys.n_sites;
    std::vector<int> dims(static_cast<std::size_t>(sys.n_sites), 2);
    const auto replicas = env.pseudomode_terms();
    for (int i = 0; i < sys.n_sites; ++i) {
        for (const auto& t : replicas) {
            cs.modes.emplace_back(static_cast<int>(dims.size()), t);
            cs.mode_site.push_back(i);
            dims.push_back(t.levels);
        }
    }
    if (env.trap) {
        cs.reaction_center = static_cast<int>(dims.size());
        dims.push_back(2);
    }
    cs.space = alg::Space(std::move(dims));
    return cs;
}

Mat build_system_hamiltonian(const ExcitonSystem& sys) {
    sys.validate();
    const alg::Space sp = alg::Space::qubits(sys.n_sites);
    Mat h = Mat::Zero(sp.dim(), sp.dim());
    for (int i = 0; i < sys.n_sites; ++i) {
        h -= 0.5 * sys.energies_ev[static_cast<std::size_t>(i)] * alg::embed(sp, alg::pauli_z(), {i});
    }
    for (int i = 0; i < sys.n_sites; ++i) {
        for (int j = i + 1; j < sys.n_sites; ++j) {
            const double jij = sys.couplings_ev(i, j);
            if (jij == 0.0) continue;
            h += jij * alg::embed(sp, alg::kron(alg::sigma_plus(), alg::sigma_minus()), {i, j});
            h += jij * alg::embed(sp, alg::kron(alg::sigma_minus(), alg::sigma_plus()), {i, j});
        }
    }
    return h;
}

PseudomodeHamiltonians build_pseudomode_hamiltonians(const ExcitonSystem& sys,
                                                     const EnvironmentSpec& env,
                                                     const CompositeSpace& cs) {
    for (const auto& t : env.terms) {
        if (t.memoryless()) {
            throw std::invalid_argument("build_pseudomode_hamiltonians: memoryless term present");
        }
    }
    const auto& sp = cs.space;
    Mat h_modes = Mat::Zero(sp.dim(), sp.dim());
    Mat h_coupling = Mat::Zero(sp.dim(), sp.dim());
    for (std::size_t m = 0; m < cs.modes.size(); ++m) {
        const auto& [sub, term] = cs.modes[m];
        const int site = cs.mode_site[m];
        const int d = term.levels;
        if (term.center_ev != 0.0) {
            h_modes += term.center_ev * alg::embed(sp, alg::boson_number(d), {sub});
        }
        const Mat a = alg::boson_annihilation(d);
        const Mat x = a + Mat(a.adjoint());
        h_coupling += term.coupling_ev() *
                      alg::embed(sp, alg::kron(alg::projector_excited(), x), {site, sub});
    }
    return {h_modes, h_coupling};
}

Mat build_total_hamiltonian(const ExcitonSystem& sys, const EnvironmentSpec& env,
                            const CompositeSpace& cs) {
    const auto& sp = cs.space;
    Mat h = Mat::Zero(sp.dim(), sp.dim());
    // system part embedded site by site
    for (int i = 0; i < sys.n_sites; ++i) {
        h -= 0.5 * sys.energies_ev[static_cast<std::size_t>(i)] * alg::embed(sp, alg::pauli_z(), {i});
    }
    for (int i = 0; i < sys.n_sites; ++i) {
        for (int j = i + 1; j < sys.n_sites; ++j) {
            const double jij = sys.couplings_ev(i, j);
            if (jij == 0.0) continue;
            h += jij * alg::embed(sp, alg::kron(alg::sigma_plus(), alg::sigma_minus()), {i, j});
            h += jij * alg::embed(sp, alg::kron(alg::sigma_minus(), alg::sigma_plus()), {i, j});
        }
    }
    for (std::size_t m = 0; m < cs.modes.size(); ++m) {
        const auto& [sub, term] = cs.modes[m];
        const int site = cs.mode_site[m];
        const int d = term.levels;
        if (term.center_ev != 0.0) {
            h += term.center_ev * alg::embed(sp, alg::boson_number(d), {sub});
        }
        const Mat a = alg::boson_annihilation(d);
        const Mat x = a + Mat(a.adjoint());
        h += term.coupling_ev() * alg::embed(sp, alg::kron(alg::projector_excited(), x), {site, sub});
    }
    return h;
}

Mat dipole_raising(const ExcitonSystem& sys, const CompositeSpace& cs) {
    Mat mu = Mat::Zero(cs.space.dim(), cs.space.dim());
    for (int i = 0; i < sys.n_sites; ++i) {
        mu += sys.dipoles[static_cast<std::size_t>(i)] * alg::embed(cs.space, alg::sigma_plus(), {i});
    }
    return mu;
}

Mat dipole_lowering(const ExcitonSystem& sys, const CompositeSpace& cs) {
    Mat mu = Mat::Zero(cs.space.dim(), cs.space.dim());
    for (int i = 0; i < sys.n_sites; ++i) {
        mu += sys.dipoles[static_cast<std::size_t>(i)] * alg::embed(cs.space, alg::sigma_minus(), {i});
    }
    return mu;
}

Mat excitation_number(const ExcitonSystem& sys, const CompositeSpace& cs) {
    Mat n = Mat::Zero(cs.space.dim(), cs.space.dim());
    for (int i = 0; i < sys.n_sites; ++i) {
        n += alg::embed(cs.space, alg::projector_excited(), {i});
    }
    return n;
}

} // namespace exspec::model
