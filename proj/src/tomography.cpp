#include "mpsenc/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mpsenc/linalg.hpp"
#include "mpsenc/shot_noise.hpp"

namespace mpsenc {

namespace {

constexpr int kStrings = 16;
constexpr double kProbeUnitarityTol = 1e-10;
// coefficients below this fraction of the largest get phase 0
constexpr double kNullFraction = 1e-10;
constexpr double kDegenerateMagnitude = 1e-14;

void require_unitary(const Mat4& probe) {
  if (unitarity_error(probe) > kProbeUnitarityTol)
    throw Error(ErrorCode::invalid_argument, "tomography probe is not unitary");
}

double sample_probability(double p, long long shots, std::mt19937_64* rng) {
  if (!rng) throw Error(ErrorCode::invalid_argument, "sampled probes need an rng");
  p = std::clamp(p, 0.0, 1.0);
  return (sample_coefficient(2.0 * p - 1.0, 1.0, shots, *rng) + 1.0) / 2.0;
}

// Unitary combination of two Pauli strings: zeta = 1 if they anticommute, i if they commute.
cplx pair_zeta(const Mat4& a, const Mat4& b) {
  return (a * b - b * a).cwiseAbs().maxCoeff() < 1e-12 ? cplx(0, 1) : cplx(1, 0);
}

Mat4 pair_probe(const Mat4& a, const Mat4& b, cplx zeta) { return (a + zeta * b) / std::sqrt(2.0); }

// Predicted |f|^2 of pair_probe(a, b) given coefficients a and b.
double pair_value(cplx ca, cplx cb, cplx zeta) { return std::norm(ca + zeta * cb) / 2.0; }

struct Phase {
  std::array<cplx, 2> candidates{cplx(1, 0), cplx(1, 0)};
  bool resolved = true;
};

// Unit phases e with Re(zeta e) = y.
Phase phase_candidates(double y, cplx zeta) {
  y = std::clamp(y, -1.0, 1.0);
  const double other = std::sqrt(std::max(0.0, 1.0 - y * y));
  Phase out;
  out.candidates = {std::conj(zeta) * cplx(y, other), std::conj(zeta) * cplx(y, -other)};
  out.resolved = other == 0.0;
  return out;
}

}  // namespace

double abs2_overlap_probe(const StaircaseCircuit& circuit, const Mps& target, GateRef gate, const Mat4& probe,
                          std::optional<long long> shots, std::mt19937_64* rng, const EngineOptions& options) {
  require_unitary(probe);
  StaircaseCircuit substituted = circuit;
  substituted.gate(gate);
  substituted.set_gate(gate, probe);
  const double exact = std::norm(overlap(substituted, target, options));
  return shots ? sample_probability(exact, *shots, rng) : exact;
}

TomographyResult reconstruct_from_probes(const ProbeOracle& oracle, GateRef gate) {
  TomographyResult result;
  std::array<Mat4, kStrings> paulis;
  for (int s = 0; s < kStrings; ++s) paulis[s] = pauli_string(2, s);
  auto measure = [&](const Mat4& probe, int& counter) {
    require_unitary(probe);
    ++counter;
    return oracle(probe);
  };

  std::array<double, kStrings> mag{};
  for (int s = 0; s < kStrings; ++s) mag[s] = std::sqrt(std::max(0.0, measure(paulis[s], result.primary_probes)));
  const int ref = static_cast<int>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  if (mag[ref] <= kDegenerateMagnitude)
    throw Error(ErrorCode::degenerate_input, "tomography: every Pauli probe vanishes");
  result.reference_string = ref;

  std::array<Phase, kStrings> phase{};
  std::array<cplx, kStrings> zeta_ref{};
  for (int s = 0; s < kStrings; ++s) {
    if (s == ref) continue;
    zeta_ref[s] = pair_zeta(paulis[ref], paulis[s]);
    const double v = measure(pair_probe(paulis[ref], paulis[s], zeta_ref[s]), result.primary_probes);
    if (mag[s] <= kNullFraction * mag[ref]) continue;
    const double y = (2.0 * v - mag[ref] * mag[ref] - mag[s] * mag[s]) / (2.0 * mag[ref] * mag[s]);
    phase[s] = phase_candidates(y, zeta_ref[s]);
  }

  // Sign choices left open by the reference probes: settle them with a probe
  // against a string whose phase is already known, or jointly for two open
  // strings when no such partner discriminates.
  auto coeff = [&](int s, int choice) { return mag[s] * phase[s].candidates[choice]; };
  auto fix = [&](int s, int choice) {
    phase[s].candidates = {phase[s].candidates[choice], phase[s].candidates[choice]};
    phase[s].resolved = true;
  };
  for (;;) {
    std::vector<int> open;
    for (int s = 0; s < kStrings; ++s)
      if (!phase[s].resolved) open.push_back(s);
    if (open.empty()) break;

    double best_single = 0, best_pair = 0;
    int single_p = -1, single_q = -1, pair_p = -1, pair_k = -1;
    for (int p : open)
      for (int q = 0; q < kStrings; ++q) {
        if (!phase[q].resolved || q == ref) continue;
        const cplx z = pair_zeta(paulis[q], paulis[p]);
        const double gap = std::abs(pair_value(coeff(q, 0), coeff(p, 0), z) - pair_value(coeff(q, 0), coeff(p, 1), z));
        if (gap > best_single) best_single = gap, single_p = p, single_q = q;
      }
    for (std::size_t i = 0; i < open.size(); ++i)
      for (std::size_t j = i + 1; j < open.size(); ++j) {
        const int p = open[i], k = open[j];
        const cplx z = pair_zeta(paulis[p], paulis[k]);
        std::array<double, 4> v{};
        for (int c = 0; c < 4; ++c) v[c] = pair_value(coeff(p, c / 2), coeff(k, c % 2), z);
        double gap = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b) gap = std::min(gap, std::abs(v[a] - v[b]));
        if (gap > best_pair) best_pair = gap, pair_p = p, pair_k = k;
      }

    if (best_single <= 0 && best_pair <= 0) {
      // indistinguishable by two-term probes; both candidates give the same data
      for (int s : open) fix(s, 0);
      break;
    }
    if (best_single >= best_pair) {
      const cplx z = pair_zeta(paulis[single_q], paulis[single_p]);
      const double v = measure(pair_probe(paulis[single_q], paulis[single_p], z), result.disambiguation_probes);
      const double d0 = std::abs(v - pair_value(coeff(single_q, 0), coeff(single_p, 0), z));
      const double d1 = std::abs(v - pair_value(coeff(single_q, 0), coeff(single_p, 1), z));
      fix(single_p, d0 <= d1 ? 0 : 1);
    } else {
      const cplx z = pair_zeta(paulis[pair_p], paulis[pair_k]);
      const double v = measure(pair_probe(paulis[pair_p], paulis[pair_k], z), result.disambiguation_probes);
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < 4; ++c) {
        const double d = std::abs(v - pair_value(coeff(pair_p, c / 2), coeff(pair_k, c % 2), z));
        if (d < best_d) best_d = d, best = c;
      }
      fix(pair_p, best / 2);
      fix(pair_k, best % 2);
    }
  }

  Mat4 m = Mat4::Zero();
  for (int s = 0; s < kStrings; ++s) m += coeff(s, 0) * paulis[s];
  result.environment.gate = gate;
  result.environment.matrix = m / 4.0;
  return result;
}

TomographyResult reconstruct_environment(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                         std::optional<long long> shots, std::mt19937_64* rng,
                                         const EngineOptions& options) {
  if (shots && !rng) throw Error(ErrorCode::invalid_argument, "sampled probes need an rng");
  const EnvironmentTensor env = environment_global(circuit, target, gate, options);
  return reconstruct_from_probes(
      [&](const Mat4& probe) {
        const double exact = std::norm(env.contract(probe));
        return shots ? sample_probability(exact, *shots, rng) : exact;
      },
      gate);
}

double phase_aligned_max_error(const Mat4& a, const Mat4& b) {
  const cplx dot = (b.conjugate().cwiseProduct(a)).sum();
  const cplx phase = std::abs(dot) > 0 ? dot / std::abs(dot) : cplx(1, 0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace mpsenc
