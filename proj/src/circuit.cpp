#include "mpsenc/circuit.hpp"

#include <random>

#include "mpsenc/linalg.hpp"

namespace mpsenc {

StaircaseCircuit::StaircaseCircuit(int n_qubits, int n_layers) : n_qubits_(n_qubits) {
  if (n_qubits < 2) throw Error(ErrorCode::invalid_argument, "circuit needs at least 2 qubits");
  if (n_layers < 0) throw Error(ErrorCode::invalid_argument, "negative layer count");
  layers_.assign(n_layers, std::vector<Mat4>(n_qubits - 1, Mat4::Identity()));
}

StaircaseCircuit StaircaseCircuit::identity(int n_qubits, int n_layers) {
  return StaircaseCircuit(n_qubits, n_layers);
}

StaircaseCircuit StaircaseCircuit::random(int n_qubits, int n_layers, std::uint64_t seed) {
  StaircaseCircuit c(n_qubits, n_layers);
  std::mt19937_64 rng(seed);
  for (auto& layer : c.layers_)
    for (auto& g : layer) g = haar_unitary(4, rng);
  return c;
}

void StaircaseCircuit::prepend_layer(std::vector<Mat4> gates) {
  if (static_cast<int>(gates.size()) != gates_per_layer())
    throw Error(ErrorCode::size_mismatch, "layer must have N-1 gates");
  layers_.insert(layers_.begin(), std::move(gates));
}

void StaircaseCircuit::append_layer(std::vector<Mat4> gates) {
  if (static_cast<int>(gates.size()) != gates_per_layer())
    throw Error(ErrorCode::size_mismatch, "layer must have N-1 gates");
  layers_.push_back(std::move(gates));
}

std::vector<GateRef> StaircaseCircuit::sweep_order() const {
  std::vector<GateRef> order;
  for (int l = 0; l < n_layers(); ++l)
    for (int i = 0; i < gates_per_layer(); ++i) order.push_back({l, i});
  return order;
}

std::vector<Gate2Q> StaircaseCircuit::gates() const {
  std::vector<Gate2Q> out;
  for (GateRef r : sweep_order()) out.push_back({gate(r), r.site, r.layer});
  return out;
}

void StaircaseCircuit::check_valid(GateRef ref) const {
  if (ref.layer < 0 || ref.layer >= n_layers() || ref.site < 0 || ref.site >= gates_per_layer())
    throw Error(ErrorCode::out_of_range, "gate (layer " + std::to_string(ref.layer) + ", site " +
                                             std::to_string(ref.site) + ") does not exist");
}

double StaircaseCircuit::max_unitarity_error() const {
  double err = 0;
  for (const auto& layer : layers_)
    for (const auto& g : layer) err = std::max(err, unitarity_error(g));
  return err;
}

void StaircaseCircuit::validate(double tol) const {
  for (int l = 0; l < n_layers(); ++l)
    for (int i = 0; i < gates_per_layer(); ++i)
      if (unitarity_error(layers_[l][i]) > tol)
        throw Error(ErrorCode::invalid_argument,
                    "gate (layer " + std::to_string(l) + ", site " + std::to_string(i) + ") is not unitary");
}

bool StaircaseCircuit::operator==(const StaircaseCircuit& other) const {
  if (n_qubits_ != other.n_qubits_ || n_layers() != other.n_layers()) return false;
  for (int l = 0; l < n_layers(); ++l)
    for (int i = 0; i < gates_per_layer(); ++i)
      if (layers_[l][i] != other.layers_[l][i]) return false;
  return true;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(i * 2 + k, j * 2 + l) = a(i, j) * b(k, l);
  return out;
}

}  // namespace mpsenc
