#pragma once

#include <cstdint>
#include <vector>

#include "mpsenc/types.hpp"

namespace mpsenc {

/// Position of a gate in a staircase circuit. `site` i means the gate acts on
/// qubits (i, i+1).
struct GateRef {
  int layer = 0;
  int site = 0;
  bool operator==(const GateRef&) const = default;
};

/// Two-qubit gate. Matrix rows index outputs and columns inputs, each as
/// (bit of qubit i) * 2 + (bit of qubit i+1).
struct Gate2Q {
  Mat4 matrix = Mat4::Identity();
  int site = 0;
  int layer = 0;
};

/// L layers of N-1 nearest-neighbour gates. Layers are stored in application
/// order (layer 0 acts first on |0...0>); within a layer the gate on (0,1)
/// acts first and the gate on (N-2,N-1) last. The encoded state is
/// U|0...0> with U = layer[L-1] ... layer[0].
class StaircaseCircuit {
 public:
  StaircaseCircuit() = default;
  StaircaseCircuit(int n_qubits, int n_layers);

  static StaircaseCircuit identity(int n_qubits, int n_layers);
  static StaircaseCircuit random(int n_qubits, int n_layers, std::uint64_t seed);

  int n_qubits() const { return n_qubits_; }
  int n_layers() const { return static_cast<int>(layers_.size()); }
  int gates_per_layer() const { return n_qubits_ - 1; }
  int n_gates() const { return n_layers() * gates_per_layer(); }

  const Mat4& gate(GateRef ref) const { return layers_.at(ref.layer).at(ref.site); }
  const Mat4& gate(int layer, int site) const { return layers_.at(layer).at(site); }
  void set_gate(GateRef ref, const Mat4& m) { layers_.at(ref.layer).at(ref.site) = m; }

  const std::vector<Mat4>& layer(int l) const { return layers_.at(l); }
  /// Inserts a layer so that it acts first (closest to |0...0>).
  void prepend_layer(std::vector<Mat4> gates);
  /// Inserts a layer so that it acts last.
  void append_layer(std::vector<Mat4> gates);

  /// Gate references in sweep order: layer-major, site ascending.
  std::vector<GateRef> sweep_order() const;
  std::vector<Gate2Q> gates() const;

  void check_valid(GateRef ref) const;
  /// Max over gates of the unitarity error.
  double max_unitarity_error() const;
  /// Throws if any gate deviates from unitarity by more than `tol`.
  void validate(double tol = 1e-10) const;

  bool operator==(const StaircaseCircuit& other) const;

 private:
  int n_qubits_ = 2;
  std::vector<std::vector<Mat4>> layers_;
};

/// Kronecker product a (x) b, with `a` on the higher bit.
Mat4 kron(const Mat2& a, const Mat2& b);

}  // namespace mpsenc
