#include "mpsenc/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "mpsenc/layer_encoder.hpp"
#include "mpsenc/linalg.hpp"

namespace mpsenc {

namespace {

constexpr double kDegenerateNorm = 1e-14;

// Update toward the maximizer of Re Tr(t^dagger G); keeps the gate on a
// vanishing environment.
bool try_update(const Mat4& t, Mat4& gate) {
  if (t.norm() < kDegenerateNorm) return false;
  gate = closest_unitary_near(t, gate);
  return true;
}

std::mt19937_64& fallback_rng() {
  thread_local std::mt19937_64 rng(0);
  return rng;
}

}  // namespace

const char* to_string(CostKind kind) { return kind == CostKind::global ? "global" : "local"; }

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::random: return "random";
    case InitKind::layer_by_layer_1: return "layer_by_layer_1";
    default: return "layer_by_layer_full";
  }
}

const char* to_string(UpdateRule rule) { return rule == UpdateRule::element_wise ? "element_wise" : "descent"; }

CostKind parse_cost(const std::string& text) {
  if (text == "global") return CostKind::global;
  if (text == "local") return CostKind::local;
  throw Error(ErrorCode::invalid_argument, "unknown cost '" + text + "' (expected global|local)");
}

InitKind parse_init(const std::string& text) {
  if (text == "random") return InitKind::random;
  if (text == "layer_by_layer_1") return InitKind::layer_by_layer_1;
  if (text == "layer_by_layer_full") return InitKind::layer_by_layer_full;
  throw Error(ErrorCode::invalid_argument,
              "unknown init '" + text + "' (expected random|layer_by_layer_1|layer_by_layer_full)");
}

UpdateRule parse_update(const std::string& text) {
  if (text == "element_wise") return UpdateRule::element_wise;
  if (text == "descent") return UpdateRule::descent;
  throw Error(ErrorCode::invalid_argument, "unknown update rule '" + text + "' (expected element_wise|descent)");
}

Mat closest_unitary(const Mat& t) {
  if (t.rows() != t.cols()) throw Error(ErrorCode::size_mismatch, "closest_unitary needs a square matrix");
  if (t.norm() < kDegenerateNorm) throw Error(ErrorCode::degenerate_input, "closest_unitary of a vanishing matrix");
  const Svd f = svd(t);
  return f.u * f.v.adjoint();
}

Mat closest_unitary_near(const Mat& t, const Mat& reference, double null_tol) {
  if (reference.rows() != t.rows() || reference.cols() != t.cols())
    throw Error(ErrorCode::size_mismatch, "closest_unitary_near: shape mismatch");
  if (t.norm() < kDegenerateNorm) throw Error(ErrorCode::degenerate_input, "closest_unitary of a vanishing matrix");
  const Svd f = svd(t);
  const int n = static_cast<int>(t.rows());
  int rank = 0;
  while (rank < n && f.s[rank] > null_tol * f.s[0]) ++rank;
  Mat out = f.u.leftCols(rank) * f.v.leftCols(rank).adjoint();
  if (rank < n) {
    const Mat un = f.u.rightCols(n - rank), vn = f.v.rightCols(n - rank);
    const Svd w = svd(un.adjoint() * reference * vn);
    Mat inner = w.u * w.v.adjoint();
    if (w.s.size() > 0 && w.s[0] < kDegenerateNorm) inner = Mat::Identity(n - rank, n - rank);
    out += un * inner * vn.adjoint();
  }
  return out;
}

Mat riemannian_gradient(const Mat& g, const Mat& nabla) {
  if (g.rows() != g.cols() || nabla.rows() != g.rows() || nabla.cols() != g.cols())
    throw Error(ErrorCode::size_mismatch, "riemannian_gradient: shape mismatch");
  if (unitarity_error(g) > 1e-8) throw Error(ErrorCode::invalid_argument, "riemannian_gradient: G is not unitary");
  return 0.5 * (nabla - g * nabla.adjoint() * g);
}

SweepResult sweep_global(StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options,
                         const std::optional<ShotNoiseModel>& noise, std::mt19937_64* rng) {
  SweepResult result;
  result.min_step_change = std::numeric_limits<double>::infinity();
  std::mt19937_64& gen = rng ? *rng : fallback_rng();
  sweep_environments_global(circuit, target, [&](const EnvironmentTensor& env, Mat4& gate) {
    const double before = std::norm(env.contract(gate));
    const Mat4 m = noise ? perturb_with_shots(env, *noise, gen).matrix : env.matrix;
    try_update(m.adjoint(), gate);
    result.fidelity = std::norm(env.contract(gate));
    result.min_step_change = std::min(result.min_step_change, result.fidelity - before);
  }, options);
  return result;
}

SweepResult sweep_local(StaircaseCircuit& circuit, const Mps& target, int inner_iters, double inner_tol,
                        const EngineOptions& options, const std::optional<ShotNoiseModel>& noise,
                        std::mt19937_64* rng) {
  if (inner_iters < 1) throw Error(ErrorCode::invalid_argument, "inner_iters must be >= 1");
  SweepResult result;
  result.min_step_change = std::numeric_limits<double>::infinity();
  std::mt19937_64& gen = rng ? *rng : fallback_rng();
  sweep_environments_local(circuit, target, [&](const BilinearEnvironment& env, Mat4& gate) {
    const double before = env.contract(gate);
    const BilinearEnvironment used = noise ? perturb_with_shots(env, *noise, gen) : env;
    double value = used.contract(gate);
    for (int it = 0; it < inner_iters; ++it) {
      if (!try_update(used.linear_part(gate).adjoint(), gate)) break;
      const double updated = used.contract(gate);
      const bool settled = std::abs(updated - value) <= inner_tol * std::abs(value);
      value = updated;
      if (settled) break;
    }
    result.fidelity = env.contract(gate);
    result.min_step_change = std::min(result.min_step_change, result.fidelity - before);
  }, options);
  return result;
}

std::vector<Mat4> riemannian_gradients(const StaircaseCircuit& circuit, const Mps& target, CostKind cost,
                                       const EngineOptions& options) {
  std::vector<Mat4> grads = cost == CostKind::global ? global_cost_gradients(circuit, target, options)
                                                     : local_cost_gradients(circuit, target, options);
  const auto order = circuit.sweep_order();
  for (std::size_t k = 0; k < grads.size(); ++k) grads[k] = riemannian_gradient(circuit.gate(order[k]), grads[k]);
  return grads;
}

double rms_norm(const std::vector<Mat4>& grads) {
  if (grads.empty()) return 0.0;
  double acc = 0;
  for (const Mat4& g : grads) acc += g.squaredNorm();
  return std::sqrt(acc / static_cast<double>(grads.size()));
}

StaircaseCircuit descent_step(const StaircaseCircuit& circuit, const Mps& target, double eta, CostKind cost,
                              const EngineOptions& options) {
  if (eta < 0) throw Error(ErrorCode::invalid_argument, "step size must be non-negative");
  StaircaseCircuit next = circuit;
  if (eta == 0) return next;
  const std::vector<Mat4> grads = riemannian_gradients(circuit, target, cost, options);
  const auto order = circuit.sweep_order();
  for (std::size_t k = 0; k < grads.size(); ++k) {
    // the cost is 1 - fidelity, so its gradient is -grads[k]
    next.set_gate(order[k], closest_unitary(circuit.gate(order[k]) + eta * grads[k]));
  }
  return next;
}

void OptimizerConfig::validate() const {
  if (max_sweeps < 1) throw Error(ErrorCode::invalid_argument, "max_sweeps must be >= 1");
  if (rel_tol < 0) throw Error(ErrorCode::invalid_argument, "rel_tol must be >= 0");
  if (inner_bilinear_iters < 1) throw Error(ErrorCode::invalid_argument, "inner_bilinear_iters must be >= 1");
  if (update == UpdateRule::descent && !(step_size > 0))
    throw Error(ErrorCode::invalid_argument, "descent needs step_size > 0");
  if (shots && *shots < 1) throw Error(ErrorCode::invalid_argument, "shots must be >= 1");
  if (!(shot_absolute_scale > 0)) throw Error(ErrorCode::invalid_argument, "shot_absolute_scale must be > 0");
  if (chi_work < 2) throw Error(ErrorCode::invalid_argument, "chi_work must be >= 2");
}

std::string OptimizationTrace::to_csv() const {
  std::string out = "sweep,infidelity,local_infidelity,grad_norm,seconds\n";
  char line[160];
  for (const SweepRecord& r : records) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g\n", r.sweep, r.infidelity, r.local_infidelity,
                  r.grad_norm, r.seconds);
    out += line;
  }
  return out;
}

StaircaseCircuit initial_circuit(const Mps& target, int n_layers, InitKind init, std::uint64_t seed, int chi_work,
                                 const EngineOptions& options) {
  if (n_layers < 1) throw Error(ErrorCode::invalid_argument, "need at least one layer");
  const int n = target.n_sites();
  switch (init) {
    case InitKind::random:
      return StaircaseCircuit::random(n, n_layers, seed);
    case InitKind::layer_by_layer_1: {
      StaircaseCircuit c(n, 0);
      c.append_layer(gate_matrices(chi2_layer_from_mps(target)));
      for (int l = 1; l < n_layers; ++l) c.append_layer(std::vector<Mat4>(n - 1, Mat4::Identity()));
      return c;
    }
    default:
      return layer_by_layer_encode(target, n_layers, chi_work, options).circuit;
  }
}

OptimizationResult optimize(const Mps& target, int n_layers, const OptimizerConfig& config) {
  config.validate();
  return optimize_from(target,
                       initial_circuit(target, n_layers, config.init, split_seed(config.seed, 1), config.chi_work,
                                       config.engine),
                       config);
}

OptimizationResult optimize_from(const Mps& target, StaircaseCircuit circuit, const OptimizerConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  std::optional<ShotNoiseModel> noise;
  if (config.shots) noise = ShotNoiseModel{*config.shots, config.shot_scale, config.shot_absolute_scale};
  std::mt19937_64 rng(split_seed(config.seed, 2));

  OptimizationResult result{std::move(circuit), {}};
  auto record = [&](int sweep, double seconds) {
    SweepRecord r;
    r.sweep = sweep;
    r.infidelity = infidelity(result.circuit, target, config.engine);
    r.local_infidelity = std::max(0.0, 1.0 - mean_local_fidelity(result.circuit, target, config.engine));
    if (config.record_gradient)
      r.grad_norm = rms_norm(riemannian_gradients(result.circuit, target, config.cost, config.engine));
    r.seconds = config.record_timing ? seconds : 0.0;
    result.trace.records.push_back(r);
    return config.cost == CostKind::global ? r.infidelity : r.local_infidelity;
  };

  double previous = record(0, 0.0);
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const auto start = clock::now();
    if (config.update == UpdateRule::descent) {
      result.circuit = descent_step(result.circuit, target, config.step_size, config.cost, config.engine);
    } else if (config.cost == CostKind::global) {
      sweep_global(result.circuit, target, config.engine, noise, &rng);
    } else {
      sweep_local(result.circuit, target, config.inner_bilinear_iters, config.inner_tol, config.engine, noise, &rng);
    }
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();
    const double current = record(sweep, seconds);
    if (config.rel_tol > 0 && (std::abs(previous - current) <= config.rel_tol * previous || current <= 1e-15)) break;
    previous = current;
  }
  return result;
}

std::vector<GradientPoint> gradient_diagnostic(const TargetFactory& target, const std::vector<int>& n_values,
                                               int n_layers, InitKind init, CostKind cost,
                                               const std::vector<std::uint64_t>& seeds,
                                               const EngineOptions& options) {
  if (seeds.empty()) throw Error(ErrorCode::invalid_argument, "gradient_diagnostic needs at least one seed");
  std::vector<GradientPoint> out;
  for (int n : n_values) {
    GradientPoint p;
    p.n_qubits = n;
    for (std::uint64_t seed : seeds) {
      const Mps t = target(n, seed);
      const StaircaseCircuit c = initial_circuit(t, n_layers, init, split_seed(seed, 1), kDefaultWorkingBond, options);
      p.per_seed.push_back(rms_norm(riemannian_gradients(c, t, cost, options)));
    }
    double sum = 0;
    for (double v : p.per_seed) sum += v;
    p.magnitude = sum / static_cast<double>(p.per_seed.size());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace mpsenc
