#include "mpsenc/statevector.hpp"

namespace mpsenc::dense {

namespace {

using Block = Eigen::Matrix<cplx, Eigen::Dynamic, 4>;

}  // namespace

int qubit_count(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw Error(ErrorCode::size_mismatch, "statevector length is not a power of two");
  return n;
}

Vec zero_state(int n_qubits) {
  Vec v = Vec::Zero(Eigen::Index{1} << n_qubits);
  v[0] = 1.0;
  return v;
}

void apply_gate(cplx* psi, int n_qubits, int site, const Mat4& op) {
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - 2 - site);
  const Eigen::Index high = Eigen::Index{1} << site;
  const Mat4 opt = op.transpose();
  Block tmp(low, 4);
  for (Eigen::Index h = 0; h < high; ++h) {
    Eigen::Map<Block> blk(psi + h * 4 * low, low, 4);
    tmp.noalias() = blk * opt;
    blk = tmp;
  }
}

void apply_circuit(const StaircaseCircuit& circuit, Vec& psi) {
  for (int l = 0; l < circuit.n_layers(); ++l)
    for (int i = 0; i < circuit.gates_per_layer(); ++i) apply_gate(psi, circuit.n_qubits(), i, circuit.gate(l, i));
}

void apply_circuit_adjoint(const StaircaseCircuit& circuit, Vec& psi) {
  for (int l = circuit.n_layers() - 1; l >= 0; --l)
    for (int i = circuit.gates_per_layer() - 1; i >= 0; --i)
      apply_gate(psi, circuit.n_qubits(), i, circuit.gate(l, i).adjoint());
}

Mat4 pair_correlation(const Vec& a, const Vec& b, int n_qubits, int site) {
  const Eigen::Index low = Eigen::Index{1} << (n_qubits - 2 - site);
  const Eigen::Index high = Eigen::Index{1} << site;
  Mat4 m = Mat4::Zero();
  for (Eigen::Index h = 0; h < high; ++h) {
    Eigen::Map<const Block> ba(a.data() + h * 4 * low, low, 4);
    Eigen::Map<const Block> bb(b.data() + h * 4 * low, low, 4);
    m.noalias() += ba.transpose() * bb.conjugate();
  }
  return m;
}

RealVec zero_counts(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  RealVec d(dim);
  for (Eigen::Index j = 0; j < dim; ++j) d[j] = n_qubits - __builtin_popcountll(static_cast<unsigned long long>(j));
  return d;
}

RealVec zero_probabilities(const Vec& psi, int n_qubits) {
  RealVec p = RealVec::Zero(n_qubits);
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const double w = std::norm(psi[j]);
    for (int q = 0; q < n_qubits; ++q)
      if (((j >> (n_qubits - 1 - q)) & 1) == 0) p[q] += w;
  }
  return p;
}

}  // namespace mpsenc::dense
