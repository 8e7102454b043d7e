#pragma once

#include <functional>
#include <vector>

#include "mpsenc/circuit.hpp"
#include "mpsenc/mps.hpp"

namespace mpsenc {

/// Contraction backend. `dense` holds 2^N amplitudes; `mps` contracts exactly
/// with bond dimensions up to `max_bond`.
enum class Backend { automatic, dense, mps };

struct EngineOptions {
  Backend backend = Backend::automatic;
  /// MPS backend: exceeding this bond dimension raises resource_limit
  /// instead of truncating.
  int max_bond = 4096;
  int dense_max_qubits = 24;
};

Backend resolve_backend(const EngineOptions& options, const StaircaseCircuit& circuit, const Mps& target);

/// Gradient of f = <target| U |0...0> with respect to one gate.
///
/// `matrix(in, out)` with in = ia*2 + ib and out = oa*2 + ob, where a is the
/// upper qubit (site) and b the lower one (site + 1); equivalently the rank-4
/// tensor is ordered (in_a, in_b, out_a, out_b). For any replacement G' of the
/// gate, f(G') = Tr(matrix * G').
struct EnvironmentTensor {
  GateRef gate;
  Mat4 matrix = Mat4::Zero();

  cplx operator()(int ia, int ib, int oa, int ob) const { return matrix(ia * 2 + ib, oa * 2 + ob); }
  cplx contract(const Mat4& g) const { return (matrix * g).trace(); }
};

/// Quadratic form of the mean local fidelity in one gate.
///
/// `matrix(i1*4 + o1, i2*4 + o2)` with i/o two-qubit input/output indices;
/// the mean local fidelity is sum G(o1,i1) * matrix(..) * conj(G(o2,i2)).
/// The matrix is Hermitian and positive semidefinite.
struct BilinearEnvironment {
  GateRef gate;
  Mat16 matrix = Mat16::Zero();

  cplx operator()(int i1, int i2, int o1, int o2) const { return matrix(i1 * 4 + o1, i2 * 4 + o2); }
  double contract(const Mat4& g) const;
  /// C with contract(G') ~ Re Tr(C G') + const to first order around `g`;
  /// C(i, o) = sum_b matrix(i*4+o, b) conj(g_b).
  Mat4 linear_part(const Mat4& g) const;
  double hermiticity_error() const;
};

struct AppliedCircuit {
  Mps state;
  /// 1 - product of kept weights over all SVD splits.
  double discarded_weight = 0.0;
};

/// U|input>, absorbing each gate by a two-site SVD. chi_work <= 0 keeps every
/// nonzero singular value.
AppliedCircuit apply_circuit(const StaircaseCircuit& circuit, const Mps& input, int chi_work = 0);
/// U^dagger|input>, same truncation policy.
AppliedCircuit apply_circuit_adjoint(const StaircaseCircuit& circuit, const Mps& input, int chi_work = 0);

cplx overlap(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options = {});
double infidelity(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options = {});

/// <target| U P_n U^dagger |target> for every qubit n.
RealVec local_fidelities(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options = {});
double local_fidelity(const StaircaseCircuit& circuit, const Mps& target, int n, const EngineOptions& options = {});
double mean_local_fidelity(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options = {});

EnvironmentTensor environment_global(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                     const EngineOptions& options = {});
BilinearEnvironment environment_local(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                      const EngineOptions& options = {});

/// Visit every gate in sweep order, handing the callback the environment of
/// that gate in the circuit as it stands (earlier gates already updated). The
/// callback may overwrite the gate; later environments see the new value.
using GlobalVisitor = std::function<void(const EnvironmentTensor&, Mat4& gate)>;
using LocalVisitor = std::function<void(const BilinearEnvironment&, Mat4& gate)>;

void sweep_environments_global(StaircaseCircuit& circuit, const Mps& target, const GlobalVisitor& visit,
                               const EngineOptions& options = {});
void sweep_environments_local(StaircaseCircuit& circuit, const Mps& target, const LocalVisitor& visit,
                              const EngineOptions& options = {});

/// Unconstrained gradients, in sweep order, of |f|^2 (global) or of the mean
/// local fidelity (local), in the convention dF = Re Tr(grad^dagger dG).
std::vector<Mat4> global_cost_gradients(const StaircaseCircuit& circuit, const Mps& target,
                                        const EngineOptions& options = {});
std::vector<Mat4> local_cost_gradients(const StaircaseCircuit& circuit, const Mps& target,
                                       const EngineOptions& options = {});

}  // namespace mpsenc
