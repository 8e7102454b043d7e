#pragma once

#include <random>
#include <vector>

#include "mpsenc/engine.hpp"

namespace mpsenc {

/// Pauli expansion m = sum_s coeffs[s] P_s of a 2^n x 2^n matrix.
///
/// String index s has qubit 0 as its most significant base-4 digit with
/// digit order I, X, Y, Z.
struct PauliCoefficients {
  int n_qubits = 0;
  std::vector<cplx> coeffs;
};

inline constexpr int kMaxPauliQubits = 4;

/// Matrix of the Pauli string `index` on n qubits.
Mat pauli_string(int n_qubits, int index);
/// coeffs[s] = Tr(P_s m) / 2^n.
PauliCoefficients pauli_decompose(const Mat& m);
Mat pauli_recompose(const PauliCoefficients& coeffs);

/// How coefficients are mapped to binomial success probabilities.
/// `absolute`: p = (1 + c/s) / 2 with a fixed s (default 1, which bounds every
/// coefficient of both environment kinds).
/// `relative`: s = max |coefficient| of the tensor being perturbed.
enum class ShotScale { absolute, relative };

struct ShotNoiseModel {
  long long shots = 1000;
  ShotScale scale = ShotScale::absolute;
  double absolute_scale = 1.0;
};

/// s * (2k/M - 1) with k ~ Binomial(M, (1 + c/s)/2), p clamped to [0, 1].
double sample_coefficient(double c, double s, long long shots, std::mt19937_64& rng);

/// Perturbs real and imaginary parts of every Pauli coefficient with
/// independent draws.
PauliCoefficients perturb_coefficients(const PauliCoefficients& in, const ShotNoiseModel& model,
                                       std::mt19937_64& rng);

EnvironmentTensor perturb_with_shots(const EnvironmentTensor& env, const ShotNoiseModel& model,
                                     std::mt19937_64& rng);
/// The bilinear tensor is Hermitian, so only the real coefficients are
/// sampled and the result stays Hermitian.
BilinearEnvironment perturb_with_shots(const BilinearEnvironment& env, const ShotNoiseModel& model,
                                       std::mt19937_64& rng);

}  // namespace mpsenc
