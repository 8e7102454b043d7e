#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpsenc/engine.hpp"
#include "mpsenc/shot_noise.hpp"

namespace mpsenc {

enum class CostKind { global, local };
enum class InitKind { random, layer_by_layer_1, layer_by_layer_full };
enum class UpdateRule { element_wise, descent };

const char* to_string(CostKind kind);
const char* to_string(InitKind kind);
const char* to_string(UpdateRule rule);
CostKind parse_cost(const std::string& text);
InitKind parse_init(const std::string& text);
UpdateRule parse_update(const std::string& text);

/// UV^dagger from T = U S V^dagger: the unitary maximizing Re Tr(T^dagger G).
Mat closest_unitary(const Mat& t);

/// Maximizer of Re Tr(T^dagger G) that, on the null space of T, stays as
/// close as possible to `reference`. Singular values below
/// `null_tol` * largest count as null.
Mat closest_unitary_near(const Mat& t, const Mat& reference, double null_tol = 1e-13);

/// Tangent-space projection 1/2 (nabla - G nabla^dagger G).
Mat riemannian_gradient(const Mat& g, const Mat& nabla);

struct SweepResult {
  /// |f|^2 (global) or mean local fidelity (local) after the sweep.
  double fidelity = 0.0;
  /// Smallest change of the tracked fidelity over single-gate updates
  /// (negative means a decrease).
  double min_step_change = 0.0;
};

/// Replaces every gate, in sweep order, by the closest unitary to the
/// conjugate transpose of its environment. Without noise |f| never decreases.
SweepResult sweep_global(StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options = {},
                         const std::optional<ShotNoiseModel>& noise = std::nullopt,
                         std::mt19937_64* rng = nullptr);

inline constexpr int kDefaultInnerIters = 20;
inline constexpr double kDefaultInnerTol = 1e-10;

/// Local-cost counterpart: for each gate, iterates G <- closest_unitary(C^dagger)
/// with C the linearization of the bilinear environment at the current G.
SweepResult sweep_local(StaircaseCircuit& circuit, const Mps& target, int inner_iters = kDefaultInnerIters,
                        double inner_tol = kDefaultInnerTol, const EngineOptions& options = {},
                        const std::optional<ShotNoiseModel>& noise = std::nullopt,
                        std::mt19937_64* rng = nullptr);

/// Riemannian gradients of the fidelity (|f|^2 or mean local fidelity) at
/// every gate, in sweep order.
std::vector<Mat4> riemannian_gradients(const StaircaseCircuit& circuit, const Mps& target, CostKind cost,
                                       const EngineOptions& options = {});

/// Root mean square over gates of the Frobenius norm.
double rms_norm(const std::vector<Mat4>& grads);

/// One step of simultaneous descent on the cost 1 - fidelity:
/// G <- closest_unitary(G - eta * grad(cost)) at every gate.
StaircaseCircuit descent_step(const StaircaseCircuit& circuit, const Mps& target, double eta, CostKind cost,
                              const EngineOptions& options = {});

struct OptimizerConfig {
  CostKind cost = CostKind::global;
  UpdateRule update = UpdateRule::element_wise;
  InitKind init = InitKind::layer_by_layer_full;
  int max_sweeps = 200;
  /// Stop once |change of the optimized infidelity| <= rel_tol * previous
  /// value. Zero runs exactly max_sweeps.
  double rel_tol = 1e-9;
  int inner_bilinear_iters = kDefaultInnerIters;
  double inner_tol = kDefaultInnerTol;
  double step_size = 0.1;
  std::uint64_t seed = 1;
  std::optional<long long> shots;
  ShotScale shot_scale = ShotScale::absolute;
  /// s for ShotScale::absolute.
  double shot_absolute_scale = 1.0;
  /// Working bond for the layer-by-layer initialization.
  int chi_work = 256;
  /// Record the per-sweep gradient norm (one extra gradient evaluation).
  bool record_gradient = true;
  bool record_timing = false;
  EngineOptions engine;

  void validate() const;
};

struct SweepRecord {
  int sweep = 0;
  double infidelity = 0.0;
  double local_infidelity = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
};

/// Row 0 describes the initial circuit; row k the state after sweep k.
struct OptimizationTrace {
  std::vector<SweepRecord> records;

  int sweeps() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
  double final_infidelity() const { return records.empty() ? 1.0 : records.back().infidelity; }
  std::string to_csv() const;
};

struct OptimizationResult {
  StaircaseCircuit circuit;
  OptimizationTrace trace;
};

StaircaseCircuit initial_circuit(const Mps& target, int n_layers, InitKind init, std::uint64_t seed,
                                 int chi_work = 256, const EngineOptions& options = {});

OptimizationResult optimize(const Mps& target, int n_layers, const OptimizerConfig& config);
/// Continues from a given circuit instead of config.init.
OptimizationResult optimize_from(const Mps& target, StaircaseCircuit circuit, const OptimizerConfig& config);

struct GradientPoint {
  int n_qubits = 0;
  /// Mean over seeds of the RMS Riemannian gradient norm.
  double magnitude = 0.0;
  std::vector<double> per_seed;
};

using TargetFactory = std::function<Mps(int n_qubits, std::uint64_t seed)>;

/// Gradient magnitude at initialization for each N.
std::vector<GradientPoint> gradient_diagnostic(const TargetFactory& target, const std::vector<int>& n_values,
                                               int n_layers, InitKind init, CostKind cost,
                                               const std::vector<std::uint64_t>& seeds,
                                               const EngineOptions& options = {});

}  // namespace mpsenc
