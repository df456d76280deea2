// qasm.hpp — Versioned text serialization of circuits, with a parser that
// round-trips instruction lists exactly. Open-control gates keep dedicated
// tokens (ocx/ocy) so polarity survives the round trip; realize_open_controls
// lowers them to X-conjugated closed-control gates.

#pragma once

#include <string>

#include "exspec/circuit.hpp"

namespace exspec::qasm {

// Grammar v1 (one instruction per line, 0-based global qubit indices):
//   EXSPEC-CIRCUIT 1
//   meta <key> <value...>          (optional: pathway, delays_fs, shots, seed)
//   qreg <name>[<width>] role=<role> [site=<i>] [mode=<k>]
//   h|x|y <q>
//   cx|cy|ocx|ocy <control> <target>
//   rz|rx <theta> <q>
//   rxx|ryy|rzx <theta> <q1> <q2>
//   reset <q>
//   measure_x|measure_y <q>
std::string export_qasm(const circuit::CircuitIR& circuit);
circuit::CircuitIR parse_qasm(const std::string& text);

// Replace open-control gates by X-conjugated closed-control ones.
circuit::CircuitIR realize_open_controls(const circuit::CircuitIR& circuit);

} // namespace exspec::qasm
