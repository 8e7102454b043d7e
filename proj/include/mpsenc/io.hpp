#pragma once

#include <string>

#include "mpsenc/circuit.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

/// MPS document:
///   {"format": "mpsenc.mps", "version": 1, "n_sites": N, "bond_dims": [...],
///    "sites": [ A_0, ..., A_{N-1} ]}
/// with A_i[left][phys][right] = [re, im]. Loading checks all shape
/// invariants and that the state is normalized to 1e-8.
std::string mps_to_json(const Mps& mps);
Mps mps_from_json(const std::string& text);

/// Circuit document:
///   {"format": "mpsenc.circuit", "version": 1, "n_qubits": N, "n_layers": L,
///    "gates": [ {"layer": l, "site": i, "matrix": [[[re, im] x4] x4]}, ... ]}
/// Gates are listed in sweep order; matrices are row-major. Doubles are
/// written with round-trip precision, so save/load is bit exact.
std::string circuit_to_json(const StaircaseCircuit& circuit);
StaircaseCircuit circuit_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mpsenc
