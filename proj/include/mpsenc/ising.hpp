#pragma once

#include "mpsenc/mps.hpp"

namespace mpsenc {

/// Open transverse-field Ising chain H = -sum Z_n Z_{n+1} - g sum X_n with
/// Pauli operators and g = hx_over_jz (ferromagnetic for |g| < 1; the
/// ground state tends to |+...+> for g -> +inf).
struct IsingModel {
  int n_sites = 2;
  double g = 0.6;
};

Vec apply_ising(const IsingModel& model, const Vec& psi);

struct DmrgOptions {
  int chi_max = 64;
  int max_sweeps = 40;
  double energy_tol = 1e-12;
  std::uint64_t seed = 7;
};

/// Ground state truncated to bond dimension `chi`. Uses a Lanczos solve in
/// the full 2^N space for N <= `dense_max_sites`, two-site DMRG above.
Mps ising_ground_state(int n_sites, double hx_over_jz, int chi, int dense_max_sites = 14);

Mps ising_ground_state_dmrg(const IsingModel& model, const DmrgOptions& options);

/// Exact <H> and <H^2> - <H>^2 of a normalized MPS, via the MPO.
struct EnergyStats {
  double energy = 0.0;
  double variance = 0.0;
};
EnergyStats ising_energy(const IsingModel& model, const Mps& mps);

}  // namespace mpsenc
