#include <doctest.h>

#include <random>

#include <mpsenc/engine.hpp>
#include <mpsenc/io.hpp>
#include <mpsenc/linalg.hpp>
#include <mpsenc/statevector.hpp>

#include "../common/oracle.hpp"

using namespace mpsenc;

namespace {

EngineOptions on(Backend b) {
  EngineOptions o;
  o.backend = b;
  return o;
}

Mat4 cnot() {
  Mat4 c = Mat4::Zero();
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

}  // namespace

TEST_CASE("apply_circuit: identity, CNOT layer, bond growth") {
  const Mps in = random_mps(6, 4, 2);
  const auto same = apply_circuit(StaircaseCircuit::identity(6, 3), in);
  CHECK(std::abs(inner(same.state, in)) >= 1 - 1e-12);

  StaircaseCircuit c(6, 1);
  for (int i = 0; i < 5; ++i) c.set_gate({0, i}, cnot());
  std::vector<int> bits(6, 0);
  Mps plus = product_state(bits);
  Mat2 h;
  h << 1, 1, 1, -1;
  apply_one_site(plus, 0, h / std::sqrt(2.0));
  const Vec expect = oracle::circuit_unitary(c) * to_statevector(plus);
  CHECK((to_statevector(apply_circuit(c, plus).state) - expect).cwiseAbs().maxCoeff() < 1e-12);

  for (int layers = 1; layers <= 4; ++layers) {
    const auto out = apply_circuit(StaircaseCircuit::random(10, layers, 7), zero_state(10));
    for (int b : out.state.bond_dims()) CHECK(b <= (1 << layers));
    CHECK(out.discarded_weight < 1e-12);
  }
  const auto cut = apply_circuit(StaircaseCircuit::random(8, 3, 1), zero_state(8), 2);
  for (int b : cut.state.bond_dims()) CHECK(b <= 2);
  CHECK(cut.discarded_weight > 0);
  CHECK_THROWS_AS(apply_circuit(StaircaseCircuit(5, 1), zero_state(6)), Error);
}

TEST_CASE("overlap: empty circuit, self consistency, dense oracle") {
  for (Backend b : {Backend::dense, Backend::mps}) {
    CHECK(std::abs(overlap(StaircaseCircuit(4, 0), zero_state(4), on(b)) - 1.0) < 1e-14);
    const StaircaseCircuit c = StaircaseCircuit::random(6, 3, 5);
    const Mps self = apply_circuit(c, zero_state(6)).state;
    CHECK(std::abs(std::abs(overlap(c, self, on(b))) - 1) < 1e-12);
    CHECK(infidelity(c, self, on(b)) < 1e-12);
    const Mps target = random_mps(6, 8, 9);
    CHECK(std::abs(overlap(c, target, on(b)) - oracle::overlap(c, to_statevector(target))) < 1e-10);
    CHECK(std::abs(overlap(c, canonicalize(target, 2), on(b)) - overlap(c, target, on(b))) < 1e-12);
  }
  EngineOptions tight = on(Backend::mps);
  tight.max_bond = 2;
  CHECK_THROWS_AS(overlap(StaircaseCircuit::random(8, 3, 1), random_mps(8, 4, 1), tight), Error);
}

TEST_CASE("infidelity of an orthogonal target is 1") {
  CHECK(infidelity(StaircaseCircuit::identity(4, 2), product_state({1, 0, 0, 0})) == doctest::Approx(1.0));
}

TEST_CASE("local fidelities: exact encoder, flipped qubit, dense oracle") {
  for (Backend b : {Backend::dense, Backend::mps}) {
    const StaircaseCircuit c = StaircaseCircuit::random(6, 2, 3);
    const Mps self = apply_circuit(c, zero_state(6)).state;
    for (int n = 0; n < 6; ++n) CHECK(std::abs(local_fidelity(c, self, n, on(b)) - 1) < 1e-12);
    CHECK(local_fidelity(StaircaseCircuit(3, 0), product_state({0, 1, 0}), 1, on(b)) == doctest::Approx(0.0));
    const Mps target = random_mps(6, 8, 4);
    const RealVec f = local_fidelities(c, target, on(b));
    for (int n = 0; n < 6; ++n)
      CHECK(std::abs(f[n] - oracle::local_fidelity(c, to_statevector(target), n)) < 1e-10);
    CHECK_THROWS_AS(local_fidelity(c, target, 6, on(b)), Error);
  }
}

TEST_CASE("environment_global: defining identity, dense oracle, finite differences") {
  std::mt19937_64 rng(17);
  for (Backend b : {Backend::dense, Backend::mps}) {
    const StaircaseCircuit c = StaircaseCircuit::random(6, 2, 11);
    const Mps target = random_mps(6, 8, 12);
    const Vec tv = to_statevector(target);
    const cplx f = overlap(c, target, on(b));
    for (GateRef g : c.sweep_order()) {
      const EnvironmentTensor e = environment_global(c, target, g, on(b));
      CHECK(std::abs(e.contract(c.gate(g)) - f) < 1e-12);
      CHECK((e.matrix - oracle::environment_global(c, tv, g)).cwiseAbs().maxCoeff() < 1e-10);
      // trace bound: |<E, G'>| <= nuclear norm
      const double nuclear = svd(e.matrix).s.sum();
      CHECK(std::abs(e.contract(haar_unitary(4, rng))) <= nuclear + 1e-12);
    }
    const GateRef g{1, 2};
    const EnvironmentTensor e = environment_global(c, target, g, on(b));
    const Mat4 delta = haar_unitary(4, rng);
    const double eps = 1e-6;
    StaircaseCircuit moved = c;
    moved.set_gate(g, c.gate(g) + eps * delta);
    const cplx df = oracle::overlap(moved, tv) - f;
    CHECK(std::abs(df - eps * e.contract(delta)) <= 1e-4 * std::abs(eps * e.contract(delta)));
  }
  CHECK_THROWS_AS(environment_global(StaircaseCircuit(4, 1), zero_state(4), {1, 0}), Error);
  CHECK(std::string(to_string(ErrorCode::out_of_range)) == "out_of_range");
}

TEST_CASE("environment_local: defining identity, hermiticity, dense oracle") {
  for (Backend b : {Backend::dense, Backend::mps}) {
    const StaircaseCircuit c = StaircaseCircuit::random(6, 2, 21);
    const Mps target = random_mps(6, 8, 22);
    const Vec tv = to_statevector(target);
    const double mean = mean_local_fidelity(c, target, on(b));
    for (GateRef g : c.sweep_order()) {
      const BilinearEnvironment t = environment_local(c, target, g, on(b));
      CHECK(std::abs(t.contract(c.gate(g)) - mean) < 1e-12);
      CHECK(t.hermiticity_error() < 1e-12);
      CHECK((t.matrix - oracle::environment_local(c, tv, g)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("backends agree on sweeps with updates") {
  const Mps target = random_mps(7, 8, 3);
  StaircaseCircuit a = StaircaseCircuit::random(7, 3, 4), b = a;
  std::vector<Mat4> ea, eb;
  auto update = [](std::vector<Mat4>& log) {
    return [&log](const EnvironmentTensor& e, Mat4& g) {
      log.push_back(e.matrix);
      const Svd f = svd(e.matrix.adjoint());
      g = f.u * f.v.adjoint();
    };
  };
  sweep_environments_global(a, target, update(ea), on(Backend::dense));
  sweep_environments_global(b, target, update(eb), on(Backend::mps));
  REQUIRE(ea.size() == eb.size());
  for (size_t k = 0; k < ea.size(); ++k) CHECK((ea[k] - eb[k]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cost gradients agree between the fast path and the environments") {
  const StaircaseCircuit c = StaircaseCircuit::random(6, 3, 8);
  const Mps target = random_mps(6, 8, 9);
  const auto gd = local_cost_gradients(c, target, on(Backend::dense));
  const auto gm = local_cost_gradients(c, target, on(Backend::mps));
  const auto gg = global_cost_gradients(c, target, on(Backend::dense));
  const auto gm2 = global_cost_gradients(c, target, on(Backend::mps));
  REQUIRE(gd.size() == 15);
  for (size_t k = 0; k < gd.size(); ++k) {
    CHECK((gd[k] - gm[k]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((gg[k] - gm2[k]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("circuit json round trip is bit exact") {
  const StaircaseCircuit c = StaircaseCircuit::random(5, 3, 77);
  CHECK(circuit_from_json(circuit_to_json(c)) == c);
  StaircaseCircuit bad(3, 1);
  bad.set_gate({0, 0}, 2.0 * Mat4::Identity());
  CHECK_THROWS_AS(circuit_from_json(circuit_to_json(bad)), Error);
  CHECK_THROWS_AS(bad.validate(), Error);
}
