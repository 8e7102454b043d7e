#pragma once

#include <cstdint>
#include <functional>
#include <vector>
#include <random>

#include "mpsenc/types.hpp"

namespace mpsenc {

/// Thin SVD result, singular values in descending order.
struct Svd {
  Mat u;
  RealVec s;
  Mat v;  // m = u * diag(s) * v.adjoint()
};

Svd svd(const Mat& m);

/// Number of singular values to keep: at most `chi_max` (<= 0 means unbounded),
/// dropping values below `cutoff * s[0]`. Always keeps at least one.
int kept_rank(const RealVec& s, int chi_max, double cutoff);

/// Max-entry norm of u^dagger u - I.
double unitarity_error(const Mat& u);

/// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
Mat haar_unitary(int dim, std::mt19937_64& rng);

/// Complete the orthonormal columns of `m` listed in `fixed` to a unitary.
/// Remaining columns are filled by Gram-Schmidt on seeded Gaussian vectors,
/// so the result is a deterministic function of (m, fixed, seed).
Mat complete_unitary(const Mat& m, const std::vector<int>& fixed, std::uint64_t seed);

struct EigenPair {
  double value = 0.0;
  Vec vector;
};

/// Lowest eigenpair of a Hermitian operator given as a matrix-free product.
/// Restarted Lanczos with full reorthogonalization; stops when the residual
/// norm ||H v - e v|| drops below `tol`.
EigenPair lanczos_lowest(const std::function<Vec(const Vec&)>& apply, const Vec& start,
                         double tol = 1e-10, int max_basis = 60, int max_restarts = 200);

/// SplitMix64 step; used to derive independent per-run seeds.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mpsenc
