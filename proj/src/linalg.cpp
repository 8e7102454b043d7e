#include "mpsenc/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace mpsenc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::size_mismatch: return "size_mismatch";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::resource_limit: return "resource_limit";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

Svd svd(const Mat& m) {
  Svd out;
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<Mat> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = solver.matrixU();
    out.s = solver.singularValues();
    out.v = solver.matrixV();
  } else {
    Eigen::BDCSVD<Mat> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = solver.matrixU();
    out.s = solver.singularValues();
    out.v = solver.matrixV();
  }
  return out;
}

int kept_rank(const RealVec& s, int chi_max, double cutoff) {
  int k = static_cast<int>(s.size());
  if (chi_max > 0) k = std::min(k, chi_max);
  if (k == 0) return 0;
  const double floor = cutoff * s[0];
  while (k > 1 && s[k - 1] <= floor) --k;
  return k;
}

double unitarity_error(const Mat& u) {
  Mat d = u.adjoint() * u - Mat::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

Mat haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  Mat z(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) z(r, c) = cplx(normal(rng), normal(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const cplx d = r(c, c);
    const double a = std::abs(d);
    if (a > 0) q.col(c) *= d / a;
  }
  return q;
}

Mat complete_unitary(const Mat& m, const std::vector<int>& fixed, std::uint64_t seed) {
  const int dim = static_cast<int>(m.rows());
  Mat out = Mat::Zero(dim, dim);
  std::vector<bool> is_fixed(dim, false);
  std::vector<int> basis;
  for (int c : fixed) {
    out.col(c) = m.col(c);
    is_fixed[c] = true;
    basis.push_back(c);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int c = 0; c < dim; ++c) {
    if (is_fixed[c]) continue;
    for (int attempt = 0; attempt < 64; ++attempt) {
      Vec v(dim);
      for (int r = 0; r < dim; ++r) v(r) = cplx(normal(rng), normal(rng));
      // two passes of Gram-Schmidt
      for (int pass = 0; pass < 2; ++pass)
        for (int b : basis) v -= out.col(b) * out.col(b).dot(v);
      const double n = v.norm();
      if (n > 1e-6) {
        out.col(c) = v / n;
        basis.push_back(c);
        break;
      }
    }
  }
  return out;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mpsenc

namespace mpsenc {

EigenPair lanczos_lowest(const std::function<Vec(const Vec&)>& apply, const Vec& start, double tol,
                         int max_basis, int max_restarts) {
  const Eigen::Index dim = start.size();
  Vec x = start / start.norm();
  EigenPair best{0.0, x};
  for (int restart = 0; restart < max_restarts; ++restart) {
    const int m = static_cast<int>(std::min<Eigen::Index>(max_basis, dim));
    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    basis.push_back(x);
    for (int j = 0; j < m; ++j) {
      Vec w = apply(basis[j]);
      alpha.push_back(basis[j].dot(w).real());
      for (int pass = 0; pass < 2; ++pass)
        for (const Vec& b : basis) w -= b * b.dot(w);
      const double bnorm = w.norm();
      if (j + 1 == m || bnorm < 1e-14) {
        beta.push_back(bnorm);
        break;
      }
      beta.push_back(bnorm);
      basis.push_back(w / bnorm);
    }
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < k) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    const Eigen::VectorXd y = eig.eigenvectors().col(0);
    Vec v = Vec::Zero(dim);
    for (int j = 0; j < k; ++j) v += basis[j] * y[j];
    v /= v.norm();
    best.value = eig.eigenvalues()[0];
    best.vector = v;
    const double residual = (apply(v) - best.value * v).norm();
    if (residual < tol) return best;
    x = v;
  }
  return best;
}

}  // namespace mpsenc
