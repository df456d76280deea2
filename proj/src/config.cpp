#include "exspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "exspec/errors.hpp"
#include "exspec/threading.hpp"

namespace exspec::cli {

namespace {

struct IniFile {
    // section -> ordered (key, value) pairs; keys may repeat
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

    std::vector<std::string> values(const std::string& sec, const std::string& key) const {
        std::vector<std::string> out;
        auto it = sections.find(sec);
        if (it == sections.end()) return out;
        for (const auto& [k, v] : it->second) {
            if (k == key) out.push_back(v);
        }
        return out;
    }
    std::optional<std::string> value(const std::string& sec, const std::string& key) const {
        auto vs = values(sec, key);
        if (vs.empty()) return std::nullopt;
        if (vs.size() > 1) throw ConfigError("[" + sec + "] " + key + ": key given more than once");
        return vs.front();
    }
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

IniFile parse_ini(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            ini.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
        ini.sections[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return ini;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("[" + sec + "] " + key + ": '" + v + "' is not a number");
    }
}

long parse_long(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("[" + sec + "] " + key + ": '" + v + "' is not an integer");
    }
}

std::vector<double> parse_doubles(const std::string& sec, const std::string& key,
                                  const std::string& v) {
    std::vector<double> out;
    for (const auto& tok : split_ws(v)) out.push_back(parse_double(sec, key, tok));
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    const IniFile ini = parse_ini(text);
    RunConfig cfg;

    // ---- [system]
    const std::string sys = "system";
    if (!ini.sections.count(sys)) throw ConfigError("missing [system] section");
    const long n = ini.value(sys, "sites") ? parse_long(sys, "sites", *ini.value(sys, "sites")) : 1;
    cfg.system.n_sites = static_cast<int>(n);
    if (auto v = ini.value(sys, "energies_ev")) {
        cfg.system.energies_ev = parse_doubles(sys, "energies_ev", *v);
    }
    if (auto v = ini.value(sys, "dipoles")) {
        cfg.system.dipoles = parse_doubles(sys, "dipoles", *v);
    } else {
        cfg.system.dipoles.assign(static_cast<std::size_t>(cfg.system.n_sites), 1.0);
    }
    cfg.system.couplings_ev = Eigen::MatrixXd::Zero(cfg.system.n_sites, cfg.system.n_sites);
    for (const auto& v : ini.values(sys, "coupling_ev")) {
        const auto toks = split_ws(v);
        if (toks.size() != 3) {
            throw ConfigError("[system] coupling_ev: expected 'i j value' (1-based sites)");
        }
        const long i = parse_long(sys, "coupling_ev", toks[0]) - 1;
        const long j = parse_long(sys, "coupling_ev", toks[1]) - 1;
        const double val = parse_double(sys, "coupling_ev", toks[2]);
        if (i < 0 || j < 0 || i >= cfg.system.n_sites || j >= cfg.system.n_sites || i == j) {
            throw ConfigError("[system] coupling_ev: site pair out of range");
        }
        cfg.system.couplings_ev(i, j) = val;
        cfg.system.couplings_ev(j, i) = val;
    }

    // ---- [environment]
    const std::string env = "environment";
    if (ini.sections.count(env)) {
        for (const auto& v : ini.values(env, "lorentzian_ev")) {
            const auto toks = split_ws(v);
            if (toks.size() < 3 || toks.size() > 5) {
                throw ConfigError(
                    "[environment] lorentzian_ev: expected 'amplitude width center [levels] [split]'");
            }
            model::LorentzianTerm t;
            t.amplitude_ev = parse_double(env, "lorentzian_ev", toks[0]);
            t.width_ev = parse_double(env, "lorentzian_ev", toks[1]);
            t.center_ev = parse_double(env, "lorentzian_ev", toks[2]);
            if (toks.size() >= 4) t.levels = static_cast<int>(parse_long(env, "lorentzian_ev", toks[3]));
            if (toks.size() >= 5) t.split_count = static_cast<int>(parse_long(env, "lorentzian_ev", toks[4]));
            cfg.environment.terms.push_back(t);
        }
        for (const auto& v : ini.values(env, "memoryless_ev")) {
            model::LorentzianTerm t;
            t.amplitude_ev = parse_double(env, "memoryless_ev", v);
            t.width_ev = model::kInfiniteWidth;
            cfg.environment.terms.push_back(t);
        }
        if (auto v = ini.value(env, "relaxation_ev")) {
            cfg.environment.relaxation_rates_ev = parse_doubles(env, "relaxation_ev", *v);
        }
        const auto ts = ini.value(env, "trap_site");
        const auto tr = ini.value(env, "trap_rate_ev");
        if (ts.has_value() != tr.has_value()) {
            throw ConfigError("[environment] trap_site and trap_rate_ev must be given together");
        }
        if (ts) {
            model::TrapSpec trap;
            trap.site = static_cast<int>(parse_long(env, "trap_site", *ts)) - 1;
            trap.rate_ev = parse_double(env, "trap_rate_ev", *tr);
            cfg.environment.trap = trap;
        }
    }

    // ---- [simulation]
    const std::string sim = "simulation";
    auto& s = cfg.simulation;
    if (ini.sections.count(sim)) {
        auto dget = [&](const char* key, double& slot) {
            if (auto v = ini.value(sim, key)) slot = parse_double(sim, key, *v);
        };
        auto iget = [&](const char* key, int& slot) {
            if (auto v = ini.value(sim, key)) slot = static_cast<int>(parse_long(sim, key, *v));
        };
        dget("dt_fs", s.dt_fs);
        dget("t_max_fs", s.t_max_fs);
        dget("scan_step_fs", s.scan_step_fs);
        dget("t1_max_fs", s.t1_max_fs);
        dget("t3_max_fs", s.t3_max_fs);
        dget("rotating_frame_ev", s.rotating_frame_ev);
        dget("noise_floor", s.noise_floor);
        if (auto v = ini.value(sim, "t2_list_fs")) s.t2_list_fs = parse_doubles(sim, "t2_list_fs", *v);
        if (auto v = ini.value(sim, "engine")) s.engine = *v;
        if (auto v = ini.value(sim, "shots")) s.shots = parse_long(sim, "shots", *v);
        if (auto v = ini.value(sim, "seed")) s.seed = static_cast<std::uint64_t>(parse_long(sim, "seed", *v));
        if (auto v = ini.value(sim, "ancilla_scheme")) s.ancilla_scheme = *v;
        iget("n_t1", s.n_t1);
        iget("n_t2", s.n_t2);
        iget("pad_factor", s.pad_factor);
        iget("threads", s.threads);
        if (auto v = ini.value(sim, "pathways")) s.pathways = split_ws(*v);
        if (auto v = ini.value(sim, "pruning")) s.pruning = *v;
        if (auto v = ini.value(sim, "stepper")) s.stepper = *v;
        if (auto v = ini.value(sim, "window")) s.window = *v;
    }

    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void RunConfig::validate() const {
    system.validate();
    environment.validate(system.n_sites);
    const auto& s = simulation;
    if (s.dt_fs <= 0.0) throw ConfigError("[simulation] dt_fs must be > 0");
    auto divisible = [&](double t, const char* what) {
        const double r = t / s.dt_fs;
        if (std::abs(r - std::round(r)) > 1e-9) {
            throw ConfigError(std::string("[simulation] ") + what +
                              " must be a multiple of dt_fs");
        }
    };
    divisible(s.scan_step_fs, "scan_step_fs");
    divisible(s.t_max_fs, "t_max_fs");
    divisible(s.t1_max_fs, "t1_max_fs");
    divisible(s.t3_max_fs, "t3_max_fs");
    for (double t2 : s.t2_list_fs) divisible(t2, "each t2_list_fs entry");
    if (s.engine != "classical" && s.engine != "quantum-exact" && s.engine != "quantum-shots") {
        throw ConfigError("[simulation] engine must be classical, quantum-exact or quantum-shots");
    }
    if (s.ancilla_scheme != "single" && s.ancilla_scheme != "per-pseudomode" &&
        s.ancilla_scheme != "per-collision") {
        throw ConfigError("[simulation] ancilla_scheme must be single, per-pseudomode or per-collision");
    }
    if (s.pruning != "none" && s.pruning != "excitation") {
        throw ConfigError("[simulation] pruning must be none or excitation");
    }
    if (s.stepper != "rk4" && s.stepper != "expm") {
        throw ConfigError("[simulation] stepper must be rk4 or expm");
    }
    if (s.window != "none" && s.window != "hann") {
        throw ConfigError("[simulation] window must be none or hann");
    }
    if (s.n_t1 < 1 || s.n_t2 < 1) throw ConfigError("[simulation] n_t1 and n_t2 must be >= 1");
    if (s.pad_factor < 1) throw ConfigError("[simulation] pad_factor must be >= 1");
    if (s.shots < 0) throw ConfigError("[simulation] shots must be >= 0");
    for (const auto& p : s.pathways) {
        if (p != "gsb" && p != "se" && p != "esa") {
            throw ConfigError("[simulation] pathways entries must be gsb, se or esa");
        }
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "[system]\nsites = " << system.n_sites << "\nenergies_ev =";
    for (double e : system.energies_ev) out << " " << e;
    out << "\ndipoles =";
    for (double d : system.dipoles) out << " " << d;
    out << "\n";
    for (int i = 0; i < system.n_sites; ++i) {
        for (int j = i + 1; j < system.n_sites; ++j) {
            if (system.couplings_ev(i, j) != 0.0) {
                out << "coupling_ev = " << (i + 1) << " " << (j + 1) << " "
                    << system.couplings_ev(i, j) << "\n";
            }
        }
    }
    out << "[environment]\n";
    for (const auto& t : environment.terms) {
        if (t.memoryless()) {
            out << "memoryless_ev = " << t.amplitude_ev << "\n";
        } else {
            out << "lorentzian_ev = " << t.amplitude_ev << " " << t.width_ev << " " << t.center_ev
                << " " << t.levels << " " << t.split_count << "\n";
        }
    }
    if (!environment.relaxation_rates_ev.empty()) {
        out << "relaxation_ev =";
        for (double r : environment.relaxation_rates_ev) out << " " << r;
        out << "\n";
    }
    if (environment.trap) {
        out << "trap_site = " << (environment.trap->site + 1)
            << "\ntrap_rate_ev = " << environment.trap->rate_ev << "\n";
    }
    const auto& s = simulation;
    out << "[simulation]\n"
        << "dt_fs = " << s.dt_fs << "\nt_max_fs = " << s.t_max_fs
        << "\nscan_step_fs = " << s.scan_step_fs << "\nt1_max_fs = " << s.t1_max_fs
        << "\nt3_max_fs = " << s.t3_max_fs << "\nt2_list_fs =";
    for (double t : s.t2_list_fs) out << " " << t;
    out << "\nrotating_frame_ev = " << s.rotating_frame_ev << "\nengine = " << s.engine
        << "\nshots = " << s.shots << "\nseed = " << s.seed
        << "\nancilla_scheme = " << s.ancilla_scheme << "\nn_t1 = " << s.n_t1
        << "\nn_t2 = " << s.n_t2 << "\npad_factor = " << s.pad_factor << "\npathways =";
    for (const auto& p : s.pathways) out << " " << p;
    out << "\npruning = " << s.pruning << "\nstepper = " << s.stepper
        << "\nwindow = " << s.window << "\nnoise_floor = " << s.noise_floor
        << "\nthreads = " << s.threads << "\n";
    return out.str();
}

std::uint64_t RunConfig::hash() const {
    const std::string c = canonical();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

response::Engine RunConfig::engine() const {
    if (simulation.engine == "classical") return response::Engine::Classical;
    if (simulation.engine == "quantum-exact") return response::Engine::QuantumExact;
    return response::Engine::QuantumShots;
}

model::AncillaScheme RunConfig::scheme() const {
    if (simulation.ancilla_scheme == "single") return model::AncillaScheme::Single;
    if (simulation.ancilla_scheme == "per-pseudomode") return model::AncillaScheme::PerPseudomode;
    return model::AncillaScheme::PerCollision;
}

response::Pruning RunConfig::pruning_mode() const {
    return simulation.pruning == "none" ? response::Pruning::None
                                        : response::Pruning::ExcitationConserving;
}

lindblad::Stepper RunConfig::stepper_mode() const {
    return simulation.stepper == "expm" ? lindblad::Stepper::Expm : lindblad::Stepper::RK4;
}

long RunConfig::effective_shots(int order) const {
    if (simulation.shots > 0) return simulation.shots;
    return order >= 3 ? 4000 : 20000;
}

int RunConfig::effective_threads() const {
    return simulation.threads > 0 ? simulation.threads : threading::hardware_threads();
}

} // namespace exspec::cli
