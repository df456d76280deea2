#include "exspec/qasm.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace exspec::qasm {

using circuit::CircuitIR;
using circuit::ControlPolarity;
using circuit::Gate;
using circuit::GateKind;
using circuit::MeasureBasis;

namespace {

std::string format_angle(double a) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", a);
    return buf;
}

const char* role_name(model::QubitRole r) {
    switch (r) {
        case model::QubitRole::ResponseAncilla: return "response";
        case model::QubitRole::Site: return "site";
        case model::QubitRole::Pseudomode: return "pseudomode";
        case model::QubitRole::CollisionAncilla: return "collision";
        case model::QubitRole::ReactionCenter: return "reaction_center";
    }
    return "?";
}

model::QubitRole role_from(const std::string& s) {
    if (s == "response") return model::QubitRole::ResponseAncilla;
    if (s == "site") return model::QubitRole::Site;
    if (s == "pseudomode") return model::QubitRole::Pseudomode;
    if (s == "collision") return model::QubitRole::CollisionAncilla;
    if (s == "reaction_center") return model::QubitRole::ReactionCenter;
    throw std::invalid_argument("qasm: unknown register role '" + s + "'");
}

} // namespace

std::string export_qasm(const CircuitIR& circ) {
    std::ostringstream out;
    out << "EXSPEC-CIRCUIT 1\n";
    if (!circ.metadata.pathway.empty()) out << "meta pathway " << circ.metadata.pathway << "\n";
    if (!circ.metadata.delays_fs.empty()) {
        out << "meta delays_fs";
        for (double d : circ.metadata.delays_fs) out << " " << format_angle(d);
        out << "\n";
    }
    if (circ.metadata.shots > 0) out << "meta shots " << circ.metadata.shots << "\n";
    if (circ.metadata.seed != 0) out << "meta seed " << circ.metadata.seed << "\n";

    // contiguous runs of identically-named qubits become one register
    const auto& qs = circ.layout.qubits;
    for (std::size_t i = 0; i < qs.size();) {
        std::size_t j = i;
        while (j < qs.size() && qs[j].name == qs[i].name && qs[j].role == qs[i].role &&
               qs[j].site == qs[i].site && qs[j].mode == qs[i].mode) {
            ++j;
        }
        out << "qreg " << qs[i].name << "[" << (j - i) << "] role=" << role_name(qs[i].role);
        if (qs[i].site >= 0) out << " site=" << qs[i].site;
        if (qs[i].mode >= 0) out << " mode=" << qs[i].mode;
        out << "\n";
        i = j;
    }

    for (const auto& g : circ.instructions) {
        switch (g.kind) {
            case GateKind::H:
            case GateKind::X:
            case GateKind::Y:
                out << circuit::gate_name(g.kind) << " " << g.qubits[0] << "\n";
                break;
            case GateKind::CX:
            case GateKind::CY: {
                const bool open = g.polarity == ControlPolarity::Open;
                out << (open ? "o" : "") << circuit::gate_name(g.kind) << " " << g.qubits[0]
                    << " " << g.qubits[1] << "\n";
                break;
            }
            case GateKind::RZ:
            case GateKind::RX:
                out << circuit::gate_name(g.kind) << " " << format_angle(g.angle) << " "
                    << g.qubits[0] << "\n";
                break;
            case GateKind::RXX:
            case GateKind::RYY:
            case GateKind::RZX:
                out << circuit::gate_name(g.kind) << " " << format_angle(g.angle) << " "
                    << g.qubits[0] << " " << g.qubits[1] << "\n";
                break;
            case GateKind::Reset:
                out << "reset " << g.qubits[0] << "\n";
                break;
            case GateKind::Measure:
                out << (g.basis == MeasureBasis::X ? "measure_x " : "measure_y ") << g.qubits[0]
                    << "\n";
                break;
        }
    }
    return out.str();
}

CircuitIR parse_qasm(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CircuitIR circ;
    bool header = false;
    int qubit_cursor = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (!header) {
            int version = 0;
            if (tok != "EXSPEC-CIRCUIT" || !(ls >> version) || version != 1) {
                throw std::invalid_argument("qasm: expected header 'EXSPEC-CIRCUIT 1'");
            }
            header = true;
            continue;
        }
        if (tok == "meta") {
            std::string key;
            ls >> key;
            if (key == "pathway") {
                ls >> circ.metadata.pathway;
            } else if (key == "delays_fs") {
                double v;
                while (ls >> v) circ.metadata.delays_fs.push_back(v);
            } else if (key == "shots") {
                ls >> circ.metadata.shots;
            } else if (key == "seed") {
                ls >> circ.metadata.seed;
            }
            continue;
        }
        if (tok == "qreg") {
            std::string decl;
            ls >> decl;
            const auto lb = decl.find('[');
            const auto rb = decl.find(']');
            if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
                throw std::invalid_argument("qasm: malformed qreg declaration '" + line + "'");
            }
            const std::string name = decl.substr(0, lb);
            const int width = std::stoi(decl.substr(lb + 1, rb - lb - 1));
            model::QubitInfo info;
            info.name = name;
            info.role = model::QubitRole::Site;
            bool have_role = false;
            std::string attr;
            while (ls >> attr) {
                const auto eq = attr.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = attr.substr(0, eq);
                const std::string v = attr.substr(eq + 1);
                if (k == "role") {
                    info.role = role_from(v);
                    have_role = true;
                } else if (k == "site") {
                    info.site = std::stoi(v);
                } else if (k == "mode") {
                    info.mode = std::stoi(v);
                }
            }
            if (!have_role) throw std::invalid_argument("qasm: qreg missing role attribute");
            for (int b = 0; b < width; ++b) {
                model::QubitInfo q = info;
                q.bit = b;
                circ.layout.qubits.push_back(q);
                ++qubit_cursor;
            }
            if (info.role == model::QubitRole::Site) {
                circ.layout.n_sites = std::max(circ.layout.n_sites, info.site + 1);
            }
            if (info.role == model::QubitRole::Pseudomode) {
                circ.layout.n_modes_per_site = std::max(circ.layout.n_modes_per_site, info.mode + 1);
            }
            continue;
        }

        auto read_qubit = [&]() {
            int q;
            if (!(ls >> q)) throw std::invalid_argument("qasm: missing qubit index in '" + line + "'");
            return q;
        };
        auto read_angle = [&]() {
            double a;
            if (!(ls >> a)) throw std::invalid_argument("qasm: missing angle in '" + line + "'");
            return a;
        };

        if (tok == "h") {
            circ.instructions.push_back(Gate::h(read_qubit()));
        } else if (tok == "x") {
            circ.instructions.push_back(Gate::x(read_qubit()));
        } else if (tok == "y") {
            circ.instructions.push_back(Gate::y(read_qubit()));
        } else if (tok == "cx" || tok == "ocx" || tok == "cy" || tok == "ocy") {
            const bool open = tok[0] == 'o';
            const bool is_x = tok.back() == 'x';
            const int c = read_qubit();
            const int t = read_qubit();
            const auto pol = open ? ControlPolarity::Open : ControlPolarity::Closed;
            circ.instructions.push_back(is_x ? Gate::cx(c, t, pol) : Gate::cy(c, t, pol));
        } else if (tok == "rz") {
            const double a = read_angle();
            circ.instructions.push_back(Gate::rz(read_qubit(), a));
        } else if (tok == "rx") {
            const double a = read_angle();
            circ.instructions.push_back(Gate::rx(read_qubit(), a));
        } else if (tok == "rxx" || tok == "ryy" || tok == "rzx") {
            const double a = read_angle();
            const int q1 = read_qubit();
            const int q2 = read_qubit();
            if (tok == "rxx") circ.instructions.push_back(Gate::rxx(q1, q2, a));
            if (tok == "ryy") circ.instructions.push_back(Gate::ryy(q1, q2, a));
            if (tok == "rzx") circ.instructions.push_back(Gate::rzx(q1, q2, a));
        } else if (tok == "reset") {
            circ.instructions.push_back(Gate::reset(read_qubit()));
        } else if (tok == "measure_x" || tok == "measure_y") {
            circ.instructions.push_back(Gate::measure(
                read_qubit(), tok == "measure_x" ? MeasureBasis::X : MeasureBasis::Y));
        } else {
            throw std::invalid_argument("qasm: unknown instruction '" + tok + "'");
        }
    }
    if (!header) throw std::invalid_argument("qasm: missing header");
    circ.validate();
    return circ;
}

CircuitIR realize_open_controls(const CircuitIR& circ) {
    CircuitIR out;
    out.layout = circ.layout;
    out.metadata = circ.metadata;
    for (const auto& g : circ.instructions) {
        if ((g.kind == GateKind::CX || g.kind == GateKind::CY) &&
            g.polarity == ControlPolarity::Open) {
            out.instructions.push_back(Gate::x(g.qubits[0]));
            Gate closed = g;
            closed.polarity = ControlPolarity::Closed;
            out.instructions.push_back(closed);
            out.instructions.push_back(Gate::x(g.qubits[0]));
        } else {
            out.instructions.push_back(g);
        }
    }
    return out;
}

} // namespace exspec::qasm
