#include <doctest.h>

#include <random>

#include <mpsenc/layer_encoder.hpp>
#include <mpsenc/linalg.hpp>
#include <mpsenc/optimizer.hpp>

#include "../common/oracle.hpp"

using namespace mpsenc;

namespace {

Mat4 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat4 m;
  for (auto& v : m.reshaped()) v = cplx(g(rng), g(rng));
  return m;
}

Mat4 random_antihermitian(std::mt19937_64& rng) {
  const Mat4 m = random_matrix(rng);
  return 0.5 * (m - m.adjoint());
}

Mat4 expm_antihermitian(const Mat4& a) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(cplx(0, -1) * a);  // a = i H
  const Eigen::Vector4cd phases = (cplx(0, 1) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const StaircaseCircuit& c, const Mps& t, CostKind cost) {
  return cost == CostKind::global ? 1 - infidelity(c, t) : mean_local_fidelity(c, t);
}

}  // namespace

TEST_CASE("closest_unitary: unitary input, positive diagonal, random search, trace identity") {
  std::mt19937_64 rng(1);
  const Mat u = haar_unitary(4, rng);
  CHECK((closest_unitary(u) - u).cwiseAbs().maxCoeff() < 1e-12);
  Mat4 d = Mat4::Zero();
  d.diagonal() << 2, 3, 1, 5;
  CHECK((closest_unitary(d) - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);

  const Mat4 t = random_matrix(rng);
  const Mat g = closest_unitary(t);
  CHECK(unitarity_error(g) < 1e-12);
  const double best = (t.adjoint() * g).trace().real();
  CHECK(std::abs(best - svd(t).s.sum()) < 1e-10);
  double search = -1e9;
  for (int k = 0; k < 10000; ++k) search = std::max(search, (t.adjoint() * haar_unitary(4, rng)).trace().real());
  CHECK(best >= search);
  CHECK_THROWS_AS(closest_unitary(Mat4::Zero()), Error);
}

TEST_CASE("riemannian_gradient: critical points, tangent space, finite differences") {
  std::mt19937_64 rng(2);
  const Mat g = haar_unitary(4, rng);
  CHECK(riemannian_gradient(g, g).cwiseAbs().maxCoeff() < 1e-12);
  const Mat4 t = random_matrix(rng);
  CHECK(riemannian_gradient(closest_unitary(t), t).cwiseAbs().maxCoeff() < 1e-10);

  // h(G) = |Tr(A G)|^2 has free gradient 2 Tr(A G) A^dagger.
  const Mat4 a = random_matrix(rng);
  auto h = [&](const Mat4& x) { return std::norm((a * x).trace()); };
  const Mat4 nabla = 2.0 * (a * g).trace() * a.adjoint();
  const Mat grad = riemannian_gradient(g, nabla);
  const Mat skew = g.adjoint() * grad;
  CHECK((skew + skew.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  const double eps = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const Mat4 dir = random_antihermitian(rng);
    const double fd = (h(g * expm_antihermitian(eps * dir)) - h(g * expm_antihermitian(-eps * dir))) / (2 * eps);
    const double an = (grad.adjoint() * (g * dir)).trace().real();
    CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
  }
  CHECK_THROWS_AS(riemannian_gradient(2.0 * Mat4::Identity(), g), Error);
}

TEST_CASE("riemannian gradients of both costs match finite differences") {
  std::mt19937_64 rng(3);
  const StaircaseCircuit c = StaircaseCircuit::random(5, 2, 4);
  const Mps target = random_mps(5, 4, 5);
  for (CostKind cost : {CostKind::global, CostKind::local}) {
    const auto grads = riemannian_gradients(c, target, cost);
    const auto order = c.sweep_order();
    for (std::size_t k = 0; k < order.size(); k += 3) {
      const Mat4 dir = random_antihermitian(rng);
      const Mat4 g = c.gate(order[k]);
      StaircaseCircuit plus = c, minus = c;
      const double eps = 1e-6;
      plus.set_gate(order[k], g * expm_antihermitian(eps * dir));
      minus.set_gate(order[k], g * expm_antihermitian(-eps * dir));
      const double fd = (fidelity(plus, target, cost) - fidelity(minus, target, cost)) / (2 * eps);
      const double an = (grads[k].adjoint() * (g * dir)).trace().real();
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(std::abs(an), 1e-3));
    }
  }
}

TEST_CASE("sweep_global: fixed point, monotonicity, single gate optimum") {
  const StaircaseCircuit exact = StaircaseCircuit::random(5, 2, 8);
  const Mps self = apply_circuit(exact, zero_state(5)).state;
  StaircaseCircuit c = exact;
  const auto r = sweep_global(c, self);
  CHECK(std::abs(r.fidelity - 1) < 1e-12);
  for (GateRef g : c.sweep_order()) CHECK((c.gate(g) - exact.gate(g)).cwiseAbs().maxCoeff() < 1e-8);

  StaircaseCircuit m = StaircaseCircuit::random(6, 2, 9);
  const Mps target = random_mps(6, 8, 10);
  double last = std::abs(overlap(m, target));
  int updates = 0;
  for (int s = 0; s < 5; ++s) {
    sweep_environments_global(m, target, [&](const EnvironmentTensor& e, Mat4& gate) {
      gate = closest_unitary(e.matrix.adjoint());
      const double now = std::abs(e.contract(gate));
      CHECK(now >= last - 1e-12);
      last = now;
      ++updates;
    });
  }
  CHECK(updates == 50);

  std::mt19937_64 rng(11);
  StaircaseCircuit one = StaircaseCircuit::random(2, 1, 12);
  const Mps t2 = random_mps(2, 2, 13);
  sweep_global(one, t2);
  const double achieved = std::abs(overlap(one, t2));
  double search = 0;
  StaircaseCircuit probe(2, 1);
  for (int k = 0; k < 100000; ++k) {
    probe.set_gate({0, 0}, haar_unitary(4, rng));
    search = std::max(search, std::abs(overlap(probe, t2)));
  }
  CHECK(achieved >= search - 1e-12);
  CHECK(achieved == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sweep_local: fixed point, monotonicity, single gate against random search") {
  const StaircaseCircuit exact = StaircaseCircuit::random(5, 2, 18);
  const Mps self = apply_circuit(exact, zero_state(5)).state;
  StaircaseCircuit c = exact;
  CHECK(std::abs(sweep_local(c, self).fidelity - 1) < 1e-12);

  StaircaseCircuit m = StaircaseCircuit::random(6, 2, 19);
  const Mps target = random_mps(6, 8, 20);
  double before = mean_local_fidelity(m, target);
  const auto r = sweep_local(m, target);
  CHECK(r.min_step_change >= -1e-10);
  CHECK(r.fidelity >= before - 1e-10);
  CHECK(std::abs(r.fidelity - mean_local_fidelity(m, target)) < 1e-12);

  // single gate of a 3-qubit circuit, others fixed
  std::mt19937_64 rng(21);
  StaircaseCircuit s = StaircaseCircuit::random(3, 1, 22);
  const Mps t3 = random_mps(3, 2, 23);
  const BilinearEnvironment env = environment_local(s, t3, {0, 1});
  double search = 0;
  for (int k = 0; k < 100000; ++k) search = std::max(search, env.contract(haar_unitary(4, rng)));
  Mat4 g = s.gate(0, 1);
  for (int it = 0; it < 200; ++it) g = closest_unitary(env.linear_part(g).adjoint());
  CHECK(env.contract(g) >= search - 1e-4);
}

TEST_CASE("descent_step: zero step, small step, fixed point") {
  const StaircaseCircuit c = StaircaseCircuit::random(5, 2, 30);
  const Mps target = random_mps(5, 4, 31);
  const StaircaseCircuit same = descent_step(c, target, 0.0, CostKind::global);
  CHECK(same == c);
  for (CostKind cost : {CostKind::global, CostKind::local}) {
    const StaircaseCircuit next = descent_step(c, target, 1e-4, cost);
    CHECK(fidelity(next, target, cost) > fidelity(c, target, cost));
    CHECK(next.max_unitarity_error() < 1e-10);
  }
  const Mps self = apply_circuit(c, zero_state(5)).state;
  const StaircaseCircuit fixed = descent_step(c, self, 0.1, CostKind::global);
  for (GateRef g : c.sweep_order()) CHECK((fixed.gate(g) - c.gate(g)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(descent_step(c, target, -1.0, CostKind::global), Error);
}

TEST_CASE("optimize: trivial target, trace, determinism, noise limit") {
  OptimizerConfig cfg;
  cfg.max_sweeps = 3;
  for (InitKind init : {InitKind::random, InitKind::layer_by_layer_1, InitKind::layer_by_layer_full}) {
    cfg.init = init;
    const auto r = optimize(zero_state(5), 2, cfg);
    CHECK(r.trace.records.at(1).infidelity <= 1e-10);
  }
  const Mps target = random_mps(6, 8, 40);
  cfg.init = InitKind::random;
  cfg.rel_tol = 0;
  cfg.max_sweeps = 4;
  for (CostKind cost : {CostKind::global, CostKind::local}) {
    cfg.cost = cost;
    const auto a = optimize(target, 2, cfg), b = optimize(target, 2, cfg);
    CHECK(a.trace.records.size() == 5);
    CHECK(a.trace.to_csv() == b.trace.to_csv());
    CHECK(a.circuit == b.circuit);
    CHECK(a.circuit.max_unitarity_error() < 1e-10);
    // many shots reproduce the noiseless trace. Global environments of the
    // first layer are rank deficient, so the completion there is set by the
    // noise and later sweeps diverge; only the first sweep is comparable.
    OptimizerConfig noisy = cfg;
    noisy.shots = 1000000000000000000LL;
    const std::size_t compared = cost == CostKind::global ? 2 : a.trace.records.size();
    const auto n = optimize(target, 2, noisy);
    for (std::size_t k = 0; k < compared; ++k)
      CHECK(std::abs(n.trace.records[k].infidelity - a.trace.records[k].infidelity) < 1e-6);
  }
  CHECK(optimize(target, 2, cfg).trace.to_csv().rfind("sweep,infidelity,local_infidelity,grad_norm,seconds\n", 0) == 0);
  cfg.max_sweeps = 0;
  CHECK_THROWS_AS(optimize(target, 2, cfg), Error);
  cfg.max_sweeps = 2;
  cfg.update = UpdateRule::descent;
  cfg.step_size = 0.05;
  const auto d = optimize(target, 2, cfg);
  CHECK(d.trace.records.back().local_infidelity < d.trace.records.front().local_infidelity);
}

TEST_CASE("gradient_diagnostic: exact solution has zero gradient") {
  const StaircaseCircuit c = StaircaseCircuit::random(2, 1, 50);
  const Mps self = apply_circuit(c, zero_state(2)).state;
  for (CostKind cost : {CostKind::global, CostKind::local}) {
    const auto pts = gradient_diagnostic([&](int, std::uint64_t) { return self; }, {2}, 1,
                                         InitKind::layer_by_layer_full, cost, {1});
    CHECK(pts.at(0).magnitude < 1e-10);
  }
  const auto pts = gradient_diagnostic([](int n, std::uint64_t s) { return random_mps(n, 8, s); }, {6, 8}, 2,
                                       InitKind::random, CostKind::global, {1, 2});
  CHECK(pts.size() == 2);
  CHECK(pts[0].per_seed.size() == 2);
}
