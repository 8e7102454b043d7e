#include "mpsenc/shot_noise.hpp"

#include <algorithm>
#include <cmath>

namespace mpsenc {

namespace {

// Single-qubit Pauli k as (column of the nonzero in row r, its value).
struct PauliEntry {
  int col;
  cplx value;
};

PauliEntry pauli_entry(int k, int row) {
  const cplx i(0, 1);
  switch (k) {
    case 0: return {row, 1.0};
    case 1: return {1 - row, 1.0};
    case 2: return {1 - row, row == 0 ? -i : i};
    default: return {row, row == 0 ? 1.0 : -1.0};
  }
}

int qubits_of(const Mat& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::size_mismatch, "Pauli decomposition needs a square matrix");
  int n = 0;
  while ((Eigen::Index{1} << n) < m.rows()) ++n;
  if ((Eigen::Index{1} << n) != m.rows() || n < 1 || n > kMaxPauliQubits)
    throw Error(ErrorCode::size_mismatch, "Pauli decomposition needs a 2^n x 2^n matrix with 1 <= n <= 4");
  return n;
}

// Calls visit(row, col, value) for the nonzeros of Pauli string `index`.
template <class F>
void for_each_entry(int n, int index, F&& visit) {
  const int dim = 1 << n;
  for (int row = 0; row < dim; ++row) {
    int col = 0;
    cplx value = 1.0;
    for (int q = 0; q < n; ++q) {
      const int digit = (index >> (2 * (n - 1 - q))) & 3;
      const int bit = (row >> (n - 1 - q)) & 1;
      const PauliEntry e = pauli_entry(digit, bit);
      col |= e.col << (n - 1 - q);
      value *= e.value;
    }
    visit(row, col, value);
  }
}

}  // namespace

Mat pauli_string(int n_qubits, int index) {
  if (n_qubits < 1 || n_qubits > kMaxPauliQubits || index < 0 || index >= (1 << (2 * n_qubits)))
    throw Error(ErrorCode::out_of_range, "invalid Pauli string");
  Mat p = Mat::Zero(1 << n_qubits, 1 << n_qubits);
  for_each_entry(n_qubits, index, [&](int r, int c, cplx v) { p(r, c) = v; });
  return p;
}

PauliCoefficients pauli_decompose(const Mat& m) {
  const int n = qubits_of(m);
  PauliCoefficients out{n, std::vector<cplx>(std::size_t{1} << (2 * n))};
  const double norm = 1.0 / static_cast<double>(1 << n);
  for (int s = 0; s < (1 << (2 * n)); ++s) {
    cplx tr = 0;
    // Tr(P m) = sum_r P(r, c) m(c, r)
    for_each_entry(n, s, [&](int r, int c, cplx v) { tr += v * m(c, r); });
    out.coeffs[s] = tr * norm;
  }
  return out;
}

Mat pauli_recompose(const PauliCoefficients& coeffs) {
  const int n = coeffs.n_qubits;
  if (n < 1 || n > kMaxPauliQubits || coeffs.coeffs.size() != (std::size_t{1} << (2 * n)))
    throw Error(ErrorCode::size_mismatch, "coefficient count does not match 4^n");
  Mat m = Mat::Zero(1 << n, 1 << n);
  for (int s = 0; s < (1 << (2 * n)); ++s) {
    const cplx c = coeffs.coeffs[s];
    if (c == cplx(0)) continue;
    for_each_entry(n, s, [&](int r, int col, cplx v) { m(r, col) += c * v; });
  }
  return m;
}

constexpr long long kGaussianShotThreshold = 1000000000000LL;

double sample_coefficient(double c, double s, long long shots, std::mt19937_64& rng) {
  if (shots < 1) throw Error(ErrorCode::invalid_argument, "shot count must be >= 1");
  if (!(s > 0)) return c;
  const double p = std::clamp((1.0 + c / s) / 2.0, 0.0, 1.0);
  const double m = static_cast<double>(shots);
  if (shots > kGaussianShotThreshold) {
    // binomial sampling stalls in libstdc++ for huge counts; use its normal limit
    std::normal_distribution<double> draw(p, std::sqrt(p * (1.0 - p) / m));
    return s * (2.0 * std::clamp(draw(rng), 0.0, 1.0) - 1.0);
  }
  std::binomial_distribution<long long> draw(shots, p);
  const long long k = draw(rng);
  return s * (2.0 * static_cast<double>(k) / m - 1.0);
}

namespace {

double scale_for(const PauliCoefficients& in, const ShotNoiseModel& model, bool real_only) {
  if (model.scale == ShotScale::absolute) return model.absolute_scale;
  double s = 0;
  for (cplx c : in.coeffs) s = std::max(s, real_only ? std::abs(c.real()) : std::max(std::abs(c.real()), std::abs(c.imag())));
  return s;
}

}  // namespace

PauliCoefficients perturb_coefficients(const PauliCoefficients& in, const ShotNoiseModel& model,
                                       std::mt19937_64& rng) {
  const double s = scale_for(in, model, false);
  PauliCoefficients out = in;
  for (cplx& c : out.coeffs) {
    const double re = sample_coefficient(c.real(), s, model.shots, rng);
    const double im = sample_coefficient(c.imag(), s, model.shots, rng);
    c = cplx(re, im);
  }
  return out;
}

EnvironmentTensor perturb_with_shots(const EnvironmentTensor& env, const ShotNoiseModel& model,
                                     std::mt19937_64& rng) {
  EnvironmentTensor out = env;
  out.matrix = pauli_recompose(perturb_coefficients(pauli_decompose(env.matrix), model, rng));
  return out;
}

BilinearEnvironment perturb_with_shots(const BilinearEnvironment& env, const ShotNoiseModel& model,
                                       std::mt19937_64& rng) {
  PauliCoefficients coeffs = pauli_decompose(env.matrix);
  const double s = scale_for(coeffs, model, true);
  for (cplx& c : coeffs.coeffs) c = sample_coefficient(c.real(), s, model.shots, rng);
  BilinearEnvironment out = env;
  out.matrix = pauli_recompose(coeffs);
  return out;
}

}  // namespace mpsenc
