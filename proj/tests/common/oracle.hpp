#pragma once

// Brute-force references built from explicit 2^N x 2^N matrices.

#include <mpsenc/circuit.hpp>
#include <mpsenc/types.hpp>

namespace oracle {

using mpsenc::cplx;
using mpsenc::Mat;
using mpsenc::Mat4;
using mpsenc::Vec;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat identity(int qubits) { return Mat::Identity(1 << qubits, 1 << qubits); }

/// Full matrix of a two-qubit operator on (site, site+1), qubit 0 most significant.
inline Mat embed(int n, int site, const Mat4& g) {
  return kron(identity(site), kron(Mat(g), identity(n - 2 - site)));
}

inline Mat circuit_unitary(const mpsenc::StaircaseCircuit& c) {
  const int n = c.n_qubits();
  Mat u = identity(n);
  for (int l = 0; l < c.n_layers(); ++l)
    for (int i = 0; i < n - 1; ++i) u = embed(n, i, c.gate(l, i)) * u;
  return u;
}

inline Vec basis(int n, long index) {
  Vec v = Vec::Zero(1L << n);
  v[index] = 1.0;
  return v;
}

inline cplx overlap(const mpsenc::StaircaseCircuit& c, const Vec& target) {
  return target.dot(circuit_unitary(c) * basis(c.n_qubits(), 0));
}

/// Projector onto |0> of qubit q.
inline Mat zero_projector(int n, int q) {
  Mat p = Mat::Zero(2, 2);
  p(0, 0) = 1.0;
  return kron(identity(q), kron(p, identity(n - 1 - q)));
}

inline double local_fidelity(const mpsenc::StaircaseCircuit& c, const Vec& target, int q) {
  const Mat u = circuit_unitary(c);
  return (target.adjoint() * u * zero_projector(c.n_qubits(), q) * u.adjoint() * target)(0, 0).real();
}

inline Mat4 unit(int row, int col) {
  Mat4 e = Mat4::Zero();
  e(row, col) = 1.0;
  return e;
}

/// M(in, out) = f with the gate replaced by |out><in|.
inline Mat4 environment_global(const mpsenc::StaircaseCircuit& c, const Vec& target, mpsenc::GateRef g) {
  Mat4 m;
  mpsenc::StaircaseCircuit s = c;
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out) {
      s.set_gate(g, unit(out, in));
      m(in, out) = overlap(s, target);
    }
  return m;
}

/// T(a, b) = <u_a| D |u_b> / N with u_(i,o) = U(gate = |o><i|)^dagger target.
inline Mat environment_local(const mpsenc::StaircaseCircuit& c, const Vec& target, mpsenc::GateRef g) {
  const int n = c.n_qubits();
  Mat d = Mat::Zero(1 << n, 1 << n);
  for (int q = 0; q < n; ++q) d += zero_projector(n, q);
  Mat u(1 << n, 16);
  mpsenc::StaircaseCircuit s = c;
  for (int i = 0; i < 4; ++i)
    for (int o = 0; o < 4; ++o) {
      s.set_gate(g, unit(o, i));
      u.col(i * 4 + o) = circuit_unitary(s).adjoint() * target;
    }
  return u.adjoint() * d * u / static_cast<double>(n);
}

}  // namespace oracle
