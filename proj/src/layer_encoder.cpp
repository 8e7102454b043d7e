#include "mpsenc/layer_encoder.hpp"

#include "mpsenc/linalg.hpp"

namespace mpsenc {

std::vector<Gate2Q> chi2_layer_from_mps(const Mps& mps, std::uint64_t kernel_seed) {
  mps.validate();
  const int n = mps.n_sites();
  const Mps b = canonicalize(truncate(mps, 2).mps, 0);
  const cplx norm0 = std::sqrt(inner(b, b));

  std::vector<Gate2Q> gates(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const SiteTensor& s = b.sites[i];
    Mat4 m = Mat4::Zero();
    std::vector<int> fixed;
    if (i == 0) {
      for (int j = 0; j < 2; ++j)
        for (int r = 0; r < s.right_dim(); ++r) m(j * 2 + r, 0) = s(0, j, r) / norm0;
      fixed = {0};
    } else {
      for (int a = 0; a < s.left_dim(); ++a) {
        for (int j = 0; j < 2; ++j)
          for (int r = 0; r < s.right_dim(); ++r) m(j * 2 + r, a * 2) = s(a, j, r);
        fixed.push_back(a * 2);
      }
    }
    gates[i] = {complete_unitary(m, fixed, split_seed(kernel_seed, i)), i, 0};
  }
  // The last site maps its left bond onto the physical qubit.
  const SiteTensor& last = b.sites[n - 1];
  Mat2 u = Mat2::Zero();
  std::vector<int> fixed;
  for (int a = 0; a < last.left_dim(); ++a) {
    for (int j = 0; j < 2; ++j) u(j, a) = last(a, j, 0);
    fixed.push_back(a);
  }
  const Mat2 closed = complete_unitary(u, fixed, split_seed(kernel_seed, n));
  gates[n - 2].matrix = kron(Mat2::Identity(), closed) * gates[n - 2].matrix;
  return gates;
}

std::vector<Mat4> gate_matrices(const std::vector<Gate2Q>& gates) {
  std::vector<Mat4> out;
  out.reserve(gates.size());
  for (const Gate2Q& g : gates) out.push_back(g.matrix);
  return out;
}

LayerEncoding layer_by_layer_encode(const Mps& target, int n_layers, int chi_work, const EngineOptions& options) {
  if (n_layers < 1) throw Error(ErrorCode::invalid_argument, "layer_by_layer_encode needs at least one layer");
  const int n = target.n_sites();
  LayerEncoding out{StaircaseCircuit(n, 0), {}};
  Mps residual = normalized(target);
  for (int k = 0; k < n_layers; ++k) {
    std::vector<Mat4> layer = gate_matrices(chi2_layer_from_mps(residual));
    StaircaseCircuit single(n, 0);
    single.append_layer(layer);
    out.circuit.prepend_layer(std::move(layer));
    out.infidelity.push_back(infidelity(out.circuit, target, options));
    if (k + 1 < n_layers) residual = apply_circuit_adjoint(single, residual, chi_work).state;
  }
  return out;
}

}  // namespace mpsenc
