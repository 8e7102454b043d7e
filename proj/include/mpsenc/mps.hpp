#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mpsenc/types.hpp"

namespace mpsenc {

/// Rank-3 site tensor A[left, physical, right] with physical dimension 2.
///
/// Storage is row-major in (left, physical, right), so the same buffer can be
/// viewed as a (2*left) x right matrix ("left-grouped", rows = (left, phys))
/// or as a left x (2*right) matrix ("right-grouped", cols = (phys, right)).
class SiteTensor {
 public:
  SiteTensor() = default;
  SiteTensor(int left_dim, int right_dim);

  int left_dim() const { return left_; }
  int right_dim() const { return right_; }

  cplx& operator()(int a, int p, int b) { return data_[(a * 2 + p) * right_ + b]; }
  cplx operator()(int a, int p, int b) const { return data_[(a * 2 + p) * right_ + b]; }

  /// Matrix A^{(p)} of shape left x right.
  Mat slice(int p) const;

  RowMat left_grouped() const;
  RowMat right_grouped() const;
  static SiteTensor from_left_grouped(const Mat& m, int left_dim);
  static SiteTensor from_right_grouped(const Mat& m, int right_dim);

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

 private:
  int left_ = 1;
  int right_ = 1;
  std::vector<cplx> data_ = std::vector<cplx>(2, cplx{});
};

/// Open-boundary matrix product state of N >= 2 qubits.
///
/// Amplitude ordering used throughout the library: site 0 is the most
/// significant bit of a statevector index.
struct Mps {
  std::vector<SiteTensor> sites;
  std::optional<int> ortho_center;

  int n_sites() const { return static_cast<int>(sites.size()); }
  /// Bond dimension between site `cut` and `cut + 1`.
  int bond_dim(int cut) const { return sites[cut].right_dim(); }
  std::vector<int> bond_dims() const;
  int chi_max_attained() const;

  /// Throws Error if shape invariants are violated.
  void validate() const;
};

inline constexpr int kDefaultStatevectorGuard = 14;
inline constexpr double kIsometryTolerance = 1e-10;

/// Successive-SVD factorization; the input is normalized first. The result is
/// left-canonical with its orthogonality center on the last site.
Mps from_statevector(const Vec& amplitudes, int chi_max);

Vec to_statevector(const Mps& mps, int max_sites = kDefaultStatevectorGuard);

Mps product_state(const std::vector<int>& bits);
Mps zero_state(int n_sites);

Mps canonicalize(const Mps& mps, int center);

struct TruncationResult {
  Mps mps;
  /// 1 - (product over cuts of kept singular-value weight).
  double discarded_weight = 0.0;
};

/// Sweep SVD truncation to `chi_max`, result normalized, center on last site.
TruncationResult truncate(const Mps& mps, int chi_max);

cplx inner(const Mps& bra, const Mps& ket);
double norm(const Mps& mps);
Mps normalized(const Mps& mps);

/// Schmidt values across the cut between `cut` and `cut + 1` (normalized state).
RealVec schmidt_values(const Mps& mps, int cut);
/// Von Neumann entropy (base 2) across the cut.
double entanglement_entropy(const Mps& mps, int cut);

/// Gaussian random MPS with bond profile min(2^(i+1), 2^(N-i-1), chi).
Mps random_mps(int n_sites, int chi, std::uint64_t seed);

/// Max-entry deviation from the left/right isometry conditions around the
/// stored orthogonality center (0 if no center is set).
double isometry_error(const Mps& mps);

/// Apply a 4x4 operator to sites (i, i+1). Row/col index of `op` is
/// (bit_i * 2 + bit_{i+1}). The result is split by SVD; the orthogonality
/// center is placed on `i + 1` if `move_right`, else on `i`. Returns the
/// discarded weight fraction of this split.
double apply_two_site(Mps& mps, int i, const Mat4& op, bool move_right, int chi_max = 0,
                      double cutoff = 1e-14);

/// Apply a 2x2 operator to site i (no change of bond dims).
void apply_one_site(Mps& mps, int i, const Mat2& op);

/// Sum over n of <bra| P_n |ket>, with P_n = |0><0| on qubit n.
cplx zero_count_expectation(const Mps& bra, const Mps& ket);

}  // namespace mpsenc
