#pragma once

#include <cstdint>
#include <vector>

#include "mpsenc/engine.hpp"

namespace mpsenc {

inline constexpr int kDefaultWorkingBond = 256;
inline constexpr std::uint64_t kKernelSeed = 0x5eed'c0de'2bad'f00dULL;

/// One staircase layer U with U|0...0> equal (up to phase) to the bond-2
/// truncation of `mps`. Each gate embeds an isometry of the right-canonical
/// form; unused columns are completed deterministically from `kernel_seed`.
std::vector<Gate2Q> chi2_layer_from_mps(const Mps& mps, std::uint64_t kernel_seed = kKernelSeed);

struct LayerEncoding {
  StaircaseCircuit circuit;
  /// Infidelity against the target after each added layer.
  std::vector<double> infidelity;
};

/// Builds L layers: layer k is derived from the residual obtained by undoing
/// layers 1..k-1 on the target (truncated to `chi_work`). New layers act
/// before the earlier ones, so layers() lists them in application order
/// U_L, ..., U_1.
LayerEncoding layer_by_layer_encode(const Mps& target, int n_layers, int chi_work = kDefaultWorkingBond,
                                    const EngineOptions& options = {});

std::vector<Mat4> gate_matrices(const std::vector<Gate2Q>& gates);

}  // namespace mpsenc
