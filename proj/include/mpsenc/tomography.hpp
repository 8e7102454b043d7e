#pragma once

#include <functional>
#include <optional>
#include <random>

#include "mpsenc/engine.hpp"

namespace mpsenc {

/// |f|^2 with the gate at `gate` replaced by `probe`. With `shots`, the exact
/// value is treated as a success probability and estimated from M draws.
double abs2_overlap_probe(const StaircaseCircuit& circuit, const Mps& target, GateRef gate, const Mat4& probe,
                          std::optional<long long> shots = std::nullopt, std::mt19937_64* rng = nullptr,
                          const EngineOptions& options = {});

/// Source of |f(probe)|^2 values; the reconstruction sees nothing else.
using ProbeOracle = std::function<double(const Mat4& probe)>;

struct TomographyResult {
  /// Equal to the true environment up to one global phase.
  EnvironmentTensor environment;
  int primary_probes = 0;
  /// Extra two-term probes used to pick the sign of ambiguous phases.
  int disambiguation_probes = 0;
  /// Pauli string the phases are measured against.
  int reference_string = 0;
};

/// Rebuilds the 2-qubit environment from 16 Pauli magnitude probes, 15
/// phase probes (R + zeta P)/sqrt(2) against the largest string R, and up to
/// one extra probe per phase whose sign those leave open.
TomographyResult reconstruct_from_probes(const ProbeOracle& oracle, GateRef gate = {});

/// Tomography of the environment at `gate`. Probe values come from one exact
/// contraction of that environment, sampled per probe when `shots` is set.
TomographyResult reconstruct_environment(const StaircaseCircuit& circuit, const Mps& target, GateRef gate,
                                         std::optional<long long> shots = std::nullopt,
                                         std::mt19937_64* rng = nullptr, const EngineOptions& options = {});

/// max |a - e^{i phi} b| with phi the least-squares global phase.
double phase_aligned_max_error(const Mat4& a, const Mat4& b);

}  // namespace mpsenc
