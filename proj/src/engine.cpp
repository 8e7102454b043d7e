#include "mpsenc/engine.hpp"

#include <cmath>

#include "mpsenc/statevector.hpp"

namespace mpsenc {

namespace {

constexpr int kDenseConversionLimit = 30;
constexpr double kSplitCutoff = 1e-14;

void check_pair(const StaircaseCircuit& circuit, const Mps& target) {
  if (circuit.n_qubits() != target.n_sites())
    throw Error(ErrorCode::size_mismatch, "circuit acts on " + std::to_string(circuit.n_qubits()) +
                                              " qubits but target has " + std::to_string(target.n_sites()) + " sites");
}

Mat4 unit_operator(int row, int col) {
  Mat4 e = Mat4::Zero();
  e(row, col) = 1.0;
  return e;
}

// ---------------------------------------------------------------- MPS helpers

void apply_exact(Mps& m, int site, const Mat4& op, bool move_right, int max_bond) {
  apply_two_site(m, site, op, move_right, 0, kSplitCutoff);
  const int d = m.bond_dim(site);
  if (d > max_bond)
    throw Error(ErrorCode::resource_limit, "exact contraction needs bond dimension " + std::to_string(d) +
                                               " > max_bond " + std::to_string(max_bond));
}

// State <- layer state, gates applied top to bottom.
void apply_layer(Mps& m, const std::vector<Mat4>& layer, int max_bond) {
  m = canonicalize(m, 0);
  for (int i = 0; i < static_cast<int>(layer.size()); ++i) apply_exact(m, i, layer[i], true, max_bond);
}

// State <- layer^dagger state.
void apply_layer_adjoint(Mps& m, const std::vector<Mat4>& layer, int max_bond) {
  m = canonicalize(m, m.n_sites() - 1);
  for (int i = static_cast<int>(layer.size()) - 1; i >= 0; --i)
    apply_exact(m, i, layer[i].adjoint(), false, max_bond);
}

Mps back_evolved(const StaircaseCircuit& circuit, const Mps& target, int max_bond) {
  Mps m = target;
  for (int l = circuit.n_layers() - 1; l >= 0; --l) apply_layer_adjoint(m, circuit.layer(l), max_bond);
  return m;
}

// Transfer of <bra|ket> over sites [0, j) extended by site j.
Mat grow_left(const Mat& env, const SiteTensor& bra, const SiteTensor& ket) {
  return bra.slice(0).adjoint() * env * ket.slice(0) + bra.slice(1).adjoint() * env * ket.slice(1);
}

// Transfer over sites [j+1, N) extended by site j; indices (bra left, ket left).
Mat grow_right(const Mat& env, const SiteTensor& bra, const SiteTensor& ket) {
  return bra.slice(0).conjugate() * env * ket.slice(0).transpose() +
         bra.slice(1).conjugate() * env * ket.slice(1).transpose();
}

// M(in, out) for the pair (site, site+1), given transfers around it.
Mat4 pair_environment(const Mat& left, const Mat& right, const Mps& ket, const Mps& bra, int site) {
  Mat4 m;
  Mat ket_pair[4], bra_pair[4];
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      ket_pair[p * 2 + q] = left * ket.sites[site].slice(p) * ket.sites[site + 1].slice(q) * right.transpose();
      bra_pair[p * 2 + q] = bra.sites[site].slice(p) * bra.sites[site + 1].slice(q);
    }
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out) m(in, out) = (bra_pair[out].conjugate().cwiseProduct(ket_pair[in])).sum();
  return m;
}

// Probability of each site being |0>, normalized state assumed.
RealVec site_zero_probabilities(const Mps& state) {
  const int n = state.n_sites();
  const Mps m = canonicalize(state, n - 1);
  // left-canonical up to n-1, so only right transfers are needed
  std::vector<Mat> right(n + 1);
  right[n] = Mat::Ones(1, 1);
  for (int j = n - 1; j >= 0; --j) {
    const Mat a0 = m.sites[j].slice(0), a1 = m.sites[j].slice(1);
    right[j] = a0 * right[j + 1] * a0.adjoint() + a1 * right[j + 1] * a1.adjoint();
  }
  RealVec p(n);
  for (int j = 0; j < n; ++j) {
    const Mat a0 = m.sites[j].slice(0);
    p[j] = (a0 * right[j + 1] * a0.adjoint()).trace().real();
  }
  return p;
}

// Gates before `g` in sweep order, applied as B^dagger to an MPS whose center
// sits on g.site.
void apply_prefix_adjoint(const StaircaseCircuit& c, GateRef g, Mps& m, int max_bond) {
  for (int i = g.site - 1; i >= 0; --i) apply_exact(m, i, c.gate(g.layer, i).adjoint(), false, max_bond);
  for (int l = g.layer - 1; l >= 0; --l) apply_layer_adjoint(m, c.layer(l), max_bond);
}

// ------------------------------------------------------------ dense helpers

Vec dense_target(const Mps& target) { return to_statevector(target, kDenseConversionLimit); }

// B^dagger applied to each column of x, B = gates before g.
void apply_prefix_adjoint_dense(const StaircaseCircuit& c, GateRef g, Mat& x) {
  const int n = c.n_qubits();
  auto apply_all = [&](const Mat4& op, int site) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) dense::apply_gate(x.col(k).data(), n, site, op);
  };
  for (int i = g.site - 1; i >= 0; --i) apply_all(c.gate(g.layer, i).adjoint(), i);
  for (int l = g.layer - 1; l >= 0; --l)
    for (int i = c.gates_per_layer() - 1; i >= 0; --i) apply_all(c.gate(l, i).adjoint(), i);
}

// Columns (i*4 + o) hold |i><o| y on the pair (site, site+1).
Mat pair_substitutions(const Vec& y, int n, int site) {
  const Eigen::Index low = Eigen::Index{1} << (n - 2 - site);
  const Eigen::Index high = Eigen::Index{1} << site;
  Mat x = Mat::Zero(y.size(), 16);
  for (int i = 0; i < 4; ++i)
    for (int o = 0; o < 4; ++o)
      for (Eigen::Index h = 0; h < high; ++h)
        x.col(i * 4 + o).segment(h * 4 * low + i * low, low) = y.segment(h * 4 * low + o * low, low);
  return x;
}

void sweep_global_dense(StaircaseCircuit& c, const Mps& target, const GlobalVisitor& visit) {
  const int n = c.n_qubits();
  Vec a = dense::zero_state(n);
  Vec t = dense_target(target);
  dense::apply_circuit_adjoint(c, t);
  for (GateRef g : c.sweep_order()) {
    Mat4 gate = c.gate(g);
    dense::apply_gate(t, n, g.site, gate);
    EnvironmentTensor env{g, dense::pair_correlation(a, t, n, g.site)};
    visit(env, gate);
    c.set_gate(g, gate);
    dense::apply_gate(a, n, g.site, gate);
  }
}

void sweep_global_mps(StaircaseCircuit& c, const Mps& target, const GlobalVisitor& visit, int max_bond) {
  const int n = c.n_qubits();
  Mps phi = zero_state(n);
  Mps chi = back_evolved(c, target, max_bond);
  std::vector<Mat> left(n + 1), right(n + 1);
  for (int l = 0; l < c.n_layers(); ++l) {
    phi = canonicalize(phi, 0);
    chi = canonicalize(chi, 0);
    apply_exact(chi, 0, c.gate(l, 0), true, max_bond);
    right[n] = Mat::Ones(1, 1);
    for (int j = n - 1; j >= 2; --j) right[j] = grow_right(right[j + 1], chi.sites[j], phi.sites[j]);
    left[0] = Mat::Ones(1, 1);
    for (int i = 0; i < c.gates_per_layer(); ++i) {
      const GateRef g{l, i};
      Mat4 gate = c.gate(g);
      if (i > 0) apply_exact(chi, i, gate, true, max_bond);
      EnvironmentTensor env{g, pair_environment(left[i], right[i + 2], phi, chi, i)};
      visit(env, gate);
      c.set_gate(g, gate);
      apply_exact(phi, i, gate, true, max_bond);
      left[i + 1] = grow_left(left[i], chi.sites[i], phi.sites[i]);
    }
  }
}

void sweep_local_dense(StaircaseCircuit& c, const Mps& target, const LocalVisitor& visit) {
  const int n = c.n_qubits();
  const RealVec counts = dense::zero_counts(n) / static_cast<double>(n);
  Vec t = dense_target(target);
  dense::apply_circuit_adjoint(c, t);
  for (GateRef g : c.sweep_order()) {
    Mat4 gate = c.gate(g);
    dense::apply_gate(t, n, g.site, gate);
    Mat x = pair_substitutions(t, n, g.site);
    apply_prefix_adjoint_dense(c, g, x);
    BilinearEnvironment env{g, x.adjoint() * (counts.asDiagonal() * x)};
    visit(env, gate);
    c.set_gate(g, gate);
  }
}

void sweep_local_mps(StaircaseCircuit& c, const Mps& target, const LocalVisitor& visit, int max_bond) {
  const int n = c.n_qubits();
  Mps chi = back_evolved(c, target, max_bond);
  for (int l = 0; l < c.n_layers(); ++l) {
    chi = canonicalize(chi, 0);
    for (int i = 0; i < c.gates_per_layer(); ++i) {
      const GateRef g{l, i};
      Mat4 gate = c.gate(g);
      apply_exact(chi, i, gate, true, max_bond);
      // chi has its center on i+1; move it to i so the substitution split
      // leaves a canonical state for the prefix.
      Mps centered = canonicalize(chi, i);
      std::vector<Mps> u(16);
      for (int a = 0; a < 16; ++a) {
        u[a] = centered;
        apply_two_site(u[a], i, unit_operator(a / 4, a % 4), false, 0, 0.0);
        apply_prefix_adjoint(c, g, u[a], max_bond);
      }
      BilinearEnvironment env{g};
      for (int a = 0; a < 16; ++a)
        for (int b = a; b < 16; ++b) {
          const cplx v = zero_count_expectation(u[a], u[b]) / static_cast<double>(n);
          env.matrix(a, b) = v;
          env.matrix(b, a) = std::conj(v);
        }
      visit(env, gate);
      c.set_gate(g, gate);
    }
  }
}

template <class Env, class Visitor>
Env capture(StaircaseCircuit c, const Mps& target, GateRef gate, const EngineOptions& options,
            void (*sweep)(StaircaseCircuit&, const Mps&, const Visitor&, const EngineOptions&)) {
  c.check_valid(gate);
  Env found;
  sweep(c, target, [&](const Env& env, Mat4&) {
    if (env.gate == gate) found = env;
  }, options);
  return found;
}

}  // namespace

double BilinearEnvironment::contract(const Mat4& g) const {
  Eigen::Matrix<cplx, 16, 1> v;
  for (int i = 0; i < 4; ++i)
    for (int o = 0; o < 4; ++o) v[i * 4 + o] = g(o, i);
  return (v.transpose() * matrix * v.conjugate())(0, 0).real();
}

Mat4 BilinearEnvironment::linear_part(const Mat4& g) const {
  Eigen::Matrix<cplx, 16, 1> v;
  for (int i = 0; i < 4; ++i)
    for (int o = 0; o < 4; ++o) v[i * 4 + o] = std::conj(g(o, i));
  const Eigen::Matrix<cplx, 16, 1> w = matrix * v;
  Mat4 c;
  for (int i = 0; i < 4; ++i)
    for (int o = 0; o < 4; ++o) c(i, o) = w[i * 4 + o];
  return c;
}

double BilinearEnvironment::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

Backend resolve_backend(const EngineOptions& options, const StaircaseCircuit& circuit, const Mps& target) {
  if (options.backend != Backend::automatic) return options.backend;
  const int n = circuit.n_qubits();
  if (n > options.dense_max_qubits) return Backend::mps;
  // Compare 2^N amplitudes against the cube of the largest bond the exact
  // MPS contraction can reach.
  const double half_chain = std::pow(2.0, n / 2);
  const double grown = target.chi_max_attained() * std::pow(2.0, circuit.n_layers());
  const double dmax = std::min(half_chain, grown);
  return 16.0 * std::pow(2.0, n) <= dmax * dmax * dmax ? Backend::dense : Backend::mps;
}

AppliedCircuit apply_circuit(const StaircaseCircuit& circuit, const Mps& input, int chi_work) {
  check_pair(circuit, input);
  AppliedCircuit out{input, 0.0};
  double kept = 1.0;
  for (int l = 0; l < circuit.n_layers(); ++l) {
    out.state = canonicalize(out.state, 0);
    for (int i = 0; i < circuit.gates_per_layer(); ++i)
      kept *= 1.0 - apply_two_site(out.state, i, circuit.gate(l, i), true, chi_work, kSplitCutoff);
  }
  out.discarded_weight = 1.0 - kept;
  if (out.discarded_weight > 0) out.state = normalized(out.state);
  return out;
}

AppliedCircuit apply_circuit_adjoint(const StaircaseCircuit& circuit, const Mps& input, int chi_work) {
  check_pair(circuit, input);
  AppliedCircuit out{input, 0.0};
  double kept = 1.0;
  for (int l = circuit.n_layers() - 1; l >= 0; --l) {
    out.state = canonicalize(out.state, out.state.n_sites() - 1);
    for (int i = circuit.gates_per_layer() - 1; i >= 0; --i)
      kept *= 1.0 - apply_two_site(out.state, i, circuit.gate(l, i).adjoint(), false, chi_work, kSplitCutoff);
  }
  out.discarded_weight = 1.0 - kept;
  if (out.discarded_weight > 0) out.state = normalized(out.state);
  return out;
}

cplx overlap(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options) {
  check_pair(circuit, target);
  if (resolve_backend(options, circuit, target) == Backend::dense) {
    Vec a = dense::zero_state(circuit.n_qubits());
    dense::apply_circuit(circuit, a);
    return dense_target(target).dot(a);
  }
  Mps state = zero_state(circuit.n_qubits());
  for (int l = 0; l < circuit.n_layers(); ++l) apply_layer(state, circuit.layer(l), options.max_bond);
  return inner(target, state);
}

double infidelity(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options) {
  return std::clamp(1.0 - std::norm(overlap(circuit, target, options)), 0.0, 1.0);
}

RealVec local_fidelities(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options) {
  check_pair(circuit, target);
  RealVec p;
  if (resolve_backend(options, circuit, target) == Backend::dense) {
    Vec t = dense_target(target);
    dense::apply_circuit_adjoint(circuit, t);
    p = dense::zero_probabilities(t, circuit.n_qubits());
  } else {
    p = site_zero_probabilities(back_evolved(circuit, target, options.max_bond));
  }
  return p.cwiseMax(0.0).cwiseMin(1.0);
}

double local_fidelity(const StaircaseCircuit& circuit, const Mps& target, int n, const EngineOptions& options) {
  if (n < 0 || n >= circuit.n_qubits()) throw Error(ErrorCode::out_of_range, "qubit index out of range");
  return local_fidelities(circuit, target, options)[n];
}

double mean_local_fidelity(const StaircaseCircuit& circuit, const Mps& target, const EngineOptions& options) {
  return local_fidelities(circuit, target, options).mean();
}

void sweep_environments_global(StaircaseCircuit& circuit, const Mps& target, const GlobalVisitor& visit,
                               const EngineOptions& options) {
  check_pair(circuit, target);
  if (resolve_backend(options, circuit, target) == Backend::dense)
    sweep_global_dense(circuit, target, visit);
  else
    sweep_global_mps(circuit, target, visit, options.max_bond);
}

void sweep_environments_local(StaircaseCircuit& circuit, const Mps& target, const LocalVisitor& visit,
                              const EngineOptions& options) {
  check_pair(circuit, target);
  if (resolve_backend(options, circuit, target) == Backend::dense)
    sweep_local_dense(circuit, target, visit);
  else
    sweep_local_mps(circuit, target, visit, options.max_bond);
}

EnvironmentTensor environment_global(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                     const EngineOptions& options) {
  return capture<EnvironmentTensor, GlobalVisitor>(circuit, target, gate, options, &sweep_environments_global);
}

BilinearEnvironment environment_local(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                      const EngineOptions& options) {
  return capture<BilinearEnvironment, LocalVisitor>(circuit, target, gate, options, &sweep_environments_local);
}

std::vector<Mat4> global_cost_gradients(const StaircaseCircuit& circuit, const Mps& target,
                                        const EngineOptions& options) {
  StaircaseCircuit c = circuit;
  std::vector<Mat4> envs;
  sweep_environments_global(c, target, [&](const EnvironmentTensor& e, Mat4&) { envs.push_back(e.matrix); }, options);
  std::vector<Mat4> grads;
  if (envs.empty()) return grads;
  const cplx f = (envs.front() * circuit.gate(0, 0)).trace();
  for (const Mat4& m : envs) grads.push_back(2.0 * f * m.adjoint());
  return grads;
}

std::vector<Mat4> local_cost_gradients(const StaircaseCircuit& circuit, const Mps& target,
                                       const EngineOptions& options) {
  check_pair(circuit, target);
  std::vector<Mat4> grads;
  if (resolve_backend(options, circuit, target) == Backend::dense) {
    const int n = circuit.n_qubits();
    Vec r = dense_target(target);
    dense::apply_circuit_adjoint(circuit, r);
    Vec s = (dense::zero_counts(n) / static_cast<double>(n)).cwiseProduct(r);
    for (GateRef g : circuit.sweep_order()) {
      const Mat4& gate = circuit.gate(g);
      dense::apply_gate(r, n, g.site, gate);
      grads.push_back(2.0 * dense::pair_correlation(s, r, n, g.site).adjoint());
      dense::apply_gate(s, n, g.site, gate);
    }
    return grads;
  }
  StaircaseCircuit c = circuit;
  sweep_environments_local(c, target, [&](const BilinearEnvironment& e, Mat4& gate) {
    grads.push_back(2.0 * e.linear_part(gate).adjoint());
  }, options);
  return grads;
}

}  // namespace mpsenc
