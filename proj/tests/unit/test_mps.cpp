#include <doctest.h>

#include <cmath>
#include <random>

#include <mpsenc/ising.hpp>
#include <mpsenc/io.hpp>
#include <mpsenc/linalg.hpp>
#include <mpsenc/mps.hpp>

#include "../common/oracle.hpp"

using namespace mpsenc;

namespace {

Vec random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(1 << n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v.normalized();
}

double phase_free_distance(const Vec& a, const Vec& b) {
  const cplx ov = a.dot(b);
  const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1);
  return (a * ph - b).cwiseAbs().maxCoeff();
}

Vec ghz(int n) {
  Vec v = Vec::Zero(1 << n);
  v[0] = v[(1 << n) - 1] = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("from_statevector: product and Bell states") {
  Mps p = from_statevector(oracle::basis(2, 0), 4);
  CHECK(p.bond_dims() == std::vector<int>{1});
  CHECK((to_statevector(p) - oracle::basis(2, 0)).norm() < 1e-12);

  Mps bell = from_statevector(ghz(2), 4);
  CHECK(bell.bond_dim(0) == 2);
  RealVec s = schmidt_values(bell, 0);
  CHECK(std::abs(s[0] - 1 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(s[1] - 1 / std::sqrt(2.0)) < 1e-12);
  CHECK((to_statevector(bell) - ghz(2)).norm() < 1e-12);
}

TEST_CASE("from_statevector: round trip of random vectors") {
  const Vec v3 = random_vector(3, 11);
  CHECK(std::abs(v3.dot(to_statevector(from_statevector(v3, 4)))) >= 1 - 1e-12);
  for (int n = 2; n <= 10; ++n) {
    const Vec v = random_vector(n, 100 + n);
    const Mps m = from_statevector(v, 1 << (n / 2));
    CHECK(phase_free_distance(v, to_statevector(m)) < 1e-12);
    CHECK(isometry_error(m) < kIsometryTolerance);
  }
}

TEST_CASE("from_statevector: errors") {
  CHECK_THROWS_AS(from_statevector(Vec::Ones(6).normalized(), 4), Error);
  CHECK_THROWS_AS(from_statevector(Vec::Zero(8), 4), Error);
}

TEST_CASE("to_statevector: product of |1> and memory guard") {
  const Vec v = to_statevector(product_state({1, 1}));
  CHECK((v - oracle::basis(2, 3)).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(to_statevector(zero_state(15)), Error);
  CHECK_NOTHROW(to_statevector(zero_state(15), 15));
}

TEST_CASE("canonicalize preserves the state and sets isometries") {
  const Mps m = random_mps(8, 8, 3);
  const Mps other = random_mps(8, 4, 4);
  const cplx ref = inner(other, m);
  for (int c : {0, 3, 7}) {
    const Mps k = canonicalize(m, c);
    CHECK(k.ortho_center == c);
    CHECK(isometry_error(k) < kIsometryTolerance);
    CHECK(std::abs(inner(other, k) - ref) < 1e-12);
    CHECK(std::abs(inner(m, k)) >= 1 - 1e-12);
  }
  const Mps k0 = canonicalize(m, 0);
  const Mps k00 = canonicalize(k0, 0);
  CHECK(phase_free_distance(to_statevector(k0), to_statevector(k00)) < 1e-12);
  CHECK_THROWS_AS(canonicalize(m, 8), Error);

  const Mps bell = from_statevector(ghz(2), 2);
  for (int c : {0, 1}) {
    RealVec s = schmidt_values(canonicalize(bell, c), 0);
    CHECK(std::abs(s[0] - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(s[1] - 1 / std::sqrt(2.0)) < 1e-12);
  }
}

TEST_CASE("truncate: product, GHZ, and dense best-rank oracle") {
  auto r = truncate(product_state({0, 1, 1, 0}), 1);
  CHECK(r.discarded_weight == doctest::Approx(0.0));
  CHECK(std::abs(inner(r.mps, product_state({0, 1, 1, 0}))) == doctest::Approx(1.0));

  const Mps g = from_statevector(ghz(4), 4);
  auto t = truncate(g, 1);
  CHECK(std::norm(inner(t.mps, g)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.discarded_weight == doctest::Approx(0.5).epsilon(1e-12));

  // Rank-4 truncation at every cut of a random N=8, chi=16 state; the oracle
  // is sequential dense SVD truncation of the statevector.
  const Mps m = random_mps(8, 16, 21);
  const Vec v = to_statevector(m);
  Vec w = v;
  for (int cut = 0; cut < 7; ++cut) {
    const long rows = 1L << (cut + 1), cols = 1L << (7 - cut);
    Mat mat = Eigen::Map<const Eigen::Matrix<cplx, -1, -1, Eigen::RowMajor>>(w.data(), rows, cols);
    Eigen::JacobiSVD<Mat> sv(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const long k = std::min<long>(4, sv.singularValues().size());
    Eigen::Matrix<cplx, -1, -1, Eigen::RowMajor> low = sv.matrixU().leftCols(k) *
        sv.singularValues().head(k).asDiagonal() * sv.matrixV().leftCols(k).adjoint();
    w = Eigen::Map<Vec>(low.data(), low.size());
  }
  w.normalize();
  const auto tr = truncate(m, 4);
  for (int b : tr.mps.bond_dims()) CHECK(b <= 4);
  CHECK(std::norm(inner(tr.mps, tr.mps)) == doctest::Approx(1.0).epsilon(1e-12));
  const double fid = std::norm(to_statevector(tr.mps).dot(v));
  CHECK(std::abs(fid - std::norm(w.dot(v))) < 1e-6);
  CHECK(std::abs(1 - fid - tr.discarded_weight) < 1e-6);

  // chi above current bond: identity up to gauge
  const auto same = truncate(m, 64);
  CHECK(std::abs(inner(same.mps, m)) >= 1 - 1e-12);
}

TEST_CASE("inner matches dense dot products") {
  CHECK(std::abs(inner(zero_state(2), product_state({1, 1}))) == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Mps a = random_mps(6, 4, seed), b = random_mps(6, 8, seed + 50);
    CHECK(std::abs(inner(a, a) - 1.0) < 1e-12);
    CHECK(std::abs(inner(a, b) - to_statevector(a).dot(to_statevector(b))) < 1e-12);
    CHECK(std::abs(inner(a, b)) <= 1 + 1e-12);
  }
  CHECK_THROWS_AS(inner(zero_state(3), zero_state(4)), Error);
}

TEST_CASE("random_mps: bond profile, determinism, product limit") {
  const Mps p = random_mps(6, 1, 5);
  for (int c = 0; c < 5; ++c) CHECK(entanglement_entropy(p, c) < 1e-12);
  const Mps a = random_mps(7, 8, 99), b = random_mps(7, 8, 99);
  for (int i = 0; i < 7; ++i) CHECK(a.sites[i].data() == b.sites[i].data());
  const Mps m = random_mps(12, 64, 1);
  CHECK(m.bond_dim(5) == 64);
  const std::vector<int> expected{2, 4, 8, 16, 32, 64, 32, 16, 8, 4, 2};
  CHECK(m.bond_dims() == expected);
  CHECK(isometry_error(m) < kIsometryTolerance);
  CHECK(std::abs(norm(m) - 1) < 1e-12);
  for (int c = 0; c < 11; ++c) CHECK(entanglement_entropy(m, c) <= std::log2(m.chi_max_attained()) + 1e-12);
}

TEST_CASE("apply_two_site matches the dense operator") {
  std::mt19937_64 rng(8);
  const Mps m = random_mps(5, 4, 8);
  const Mat4 g = haar_unitary(4, rng);
  Mps k = canonicalize(m, 2);
  apply_two_site(k, 2, g, true);
  const Vec expect = oracle::embed(5, 2, g) * to_statevector(m);
  CHECK((to_statevector(k) - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(isometry_error(k) < kIsometryTolerance);
}

TEST_CASE("zero_count_expectation matches the dense sum of projectors") {
  const Mps a = random_mps(5, 4, 1), b = random_mps(5, 4, 2);
  Mat d = Mat::Zero(32, 32);
  for (int q = 0; q < 5; ++q) d += oracle::zero_projector(5, q);
  const cplx expect = to_statevector(a).dot(d * to_statevector(b));
  CHECK(std::abs(zero_count_expectation(a, b) - expect) < 1e-12);
}

TEST_CASE("ising: strong field, dense eigensolver oracle, entropy bound") {
  const Mps plus = ising_ground_state(8, 100.0, 16);
  CHECK(std::norm(inner(plus, product_state(std::vector<int>(8, 0)))) < 1);
  Vec p = Vec::Constant(256, 1.0 / 16.0);
  CHECK(std::norm(p.dot(to_statevector(plus))) >= 0.99);

  const int n = 8;
  Mat h = Mat::Zero(256, 256);
  for (long j = 0; j < 256; ++j) h.col(j) = apply_ising({n, 0.6}, oracle::basis(n, j));
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Mps gs = ising_ground_state(n, 0.6, 16);
  const double e = ising_energy({n, 0.6}, gs).energy;
  CHECK(std::abs(e - es.eigenvalues()[0]) <= 1e-8 * std::abs(es.eigenvalues()[0]));

  const Mps big = ising_ground_state(12, 0.6, 64);
  CHECK(entanglement_entropy(big, 5) <= 6.0);
  CHECK(ising_energy({12, 0.6}, big).variance <= 1e-8 * 12);
}

TEST_CASE("ising: DMRG agrees with the Lanczos solution") {
  const IsingModel model{10, 0.6};
  const Mps dense = ising_ground_state(10, 0.6, 32);
  DmrgOptions opt;
  opt.chi_max = 32;
  const Mps dmrg = ising_ground_state_dmrg(model, opt);
  CHECK(std::abs(ising_energy(model, dmrg).energy - ising_energy(model, dense).energy) < 1e-9);
  CHECK(std::norm(inner(dense, dmrg)) > 1 - 1e-8);
  CHECK(ising_energy(model, dmrg).variance < 1e-8 * 10);
}

TEST_CASE("mps json round trip and validation") {
  const Mps m = random_mps(5, 4, 17);
  const Mps back = mps_from_json(mps_to_json(m));
  for (int i = 0; i < 5; ++i) CHECK(back.sites[i].data() == m.sites[i].data());
  CHECK_THROWS_AS(mps_from_json("{\"n_sites\": 3}"), Error);
  CHECK_THROWS_AS(mps_from_json("not json"), Error);
}
