#pragma once

#include "mpsenc/circuit.hpp"
#include "mpsenc/types.hpp"

namespace mpsenc::dense {

/// Dense statevector kernels. Qubit 0 is the most significant index bit.

Vec zero_state(int n_qubits);

/// psi <- (op on qubits site, site+1) psi, op indexed (bit_site*2 + bit_site+1).
void apply_gate(cplx* psi, int n_qubits, int site, const Mat4& op);
inline void apply_gate(Vec& psi, int n_qubits, int site, const Mat4& op) {
  apply_gate(psi.data(), n_qubits, site, op);
}

void apply_circuit(const StaircaseCircuit& circuit, Vec& psi);
/// psi <- U^dagger psi.
void apply_circuit_adjoint(const StaircaseCircuit& circuit, Vec& psi);

/// Sum over the remaining qubits of a[in, r] * conj(b[out, r]), where in/out
/// index the pair (site, site+1). For f = <b|G|a> this is the matrix M with
/// f = Tr(M G).
Mat4 pair_correlation(const Vec& a, const Vec& b, int n_qubits, int site);

/// Number of qubits in |0> for each basis index.
RealVec zero_counts(int n_qubits);

/// Probability of qubit n being 0, for every n.
RealVec zero_probabilities(const Vec& psi, int n_qubits);

int qubit_count(Eigen::Index dim);

}  // namespace mpsenc::dense
