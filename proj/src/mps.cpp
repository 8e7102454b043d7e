#include "mpsenc/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mpsenc/linalg.hpp"

namespace mpsenc {

SiteTensor::SiteTensor(int left_dim, int right_dim)
    : left_(left_dim), right_(right_dim), data_(static_cast<size_t>(left_dim) * 2 * right_dim) {
  if (left_dim < 1 || right_dim < 1)
    throw Error(ErrorCode::invalid_argument, "site tensor bond dimensions must be >= 1");
}

Mat SiteTensor::slice(int p) const {
  Mat m(left_, right_);
  for (int a = 0; a < left_; ++a)
    for (int b = 0; b < right_; ++b) m(a, b) = (*this)(a, p, b);
  return m;
}

RowMat SiteTensor::left_grouped() const {
  return Eigen::Map<const RowMat>(data_.data(), 2 * left_, right_);
}

RowMat SiteTensor::right_grouped() const {
  return Eigen::Map<const RowMat>(data_.data(), left_, 2 * right_);
}

SiteTensor SiteTensor::from_left_grouped(const Mat& m, int left_dim) {
  SiteTensor t(left_dim, static_cast<int>(m.cols()));
  Eigen::Map<RowMat>(t.data_.data(), 2 * left_dim, m.cols()) = m;
  return t;
}

SiteTensor SiteTensor::from_right_grouped(const Mat& m, int right_dim) {
  SiteTensor t(static_cast<int>(m.rows()), right_dim);
  Eigen::Map<RowMat>(t.data_.data(), m.rows(), 2 * right_dim) = m;
  return t;
}

std::vector<int> Mps::bond_dims() const {
  std::vector<int> dims;
  for (int i = 0; i + 1 < n_sites(); ++i) dims.push_back(bond_dim(i));
  return dims;
}

int Mps::chi_max_attained() const {
  int chi = 1;
  for (int i = 0; i + 1 < n_sites(); ++i) chi = std::max(chi, bond_dim(i));
  return chi;
}

void Mps::validate() const {
  if (n_sites() < 2) throw Error(ErrorCode::invalid_argument, "MPS needs at least 2 sites");
  if (sites.front().left_dim() != 1 || sites.back().right_dim() != 1)
    throw Error(ErrorCode::invalid_argument, "MPS boundary bonds must have dimension 1");
  for (int i = 0; i + 1 < n_sites(); ++i)
    if (sites[i].right_dim() != sites[i + 1].left_dim())
      throw Error(ErrorCode::size_mismatch, "MPS bond dimensions do not match at cut " + std::to_string(i));
  if (ortho_center && (*ortho_center < 0 || *ortho_center >= n_sites()))
    throw Error(ErrorCode::out_of_range, "MPS orthogonality center out of range");
}

namespace {

int log2_exact(Eigen::Index len) {
  if (len < 4) return -1;
  int n = 0;
  while ((Eigen::Index{1} << n) < len) ++n;
  return (Eigen::Index{1} << n) == len ? n : -1;
}

}  // namespace

Mps from_statevector(const Vec& amplitudes, int chi_max) {
  const int n = log2_exact(amplitudes.size());
  if (n < 2) throw Error(ErrorCode::invalid_argument, "statevector length must be a power of two >= 4");
  const double nrm = amplitudes.norm();
  if (!(nrm > 0.0)) throw Error(ErrorCode::degenerate_input, "statevector is zero");

  Mps out;
  RowMat rest = Eigen::Map<const RowMat>(amplitudes.data(), 2, amplitudes.size() / 2) / nrm;
  int left = 1;
  for (int i = 0; i + 1 < n; ++i) {
    Svd f = svd(rest);
    const int k = kept_rank(f.s, chi_max, 1e-14);
    out.sites.push_back(SiteTensor::from_left_grouped(f.u.leftCols(k), left));
    RowMat next = f.s.head(k).asDiagonal() * f.v.leftCols(k).adjoint();
    const Eigen::Index cols = next.cols() / 2;
    rest = Eigen::Map<RowMat>(next.data(), 2 * k, cols);
    left = k;
  }
  rest /= rest.norm();
  out.sites.push_back(SiteTensor::from_left_grouped(rest, left));
  out.ortho_center = n - 1;
  return out;
}

Vec to_statevector(const Mps& mps, int max_sites) {
  const int n = mps.n_sites();
  if (n > max_sites)
    throw Error(ErrorCode::resource_limit,
                "to_statevector: " + std::to_string(n) + " sites exceeds guard of " + std::to_string(max_sites));
  RowMat psi = mps.sites[0].left_grouped();
  for (int i = 1; i < n; ++i) {
    const SiteTensor& s = mps.sites[i];
    RowMat next(psi.rows() * 2, s.right_dim());
    const Mat a0 = s.slice(0), a1 = s.slice(1);
    RowMat p0 = psi * a0, p1 = psi * a1;
    for (Eigen::Index x = 0; x < psi.rows(); ++x) {
      next.row(2 * x) = p0.row(x);
      next.row(2 * x + 1) = p1.row(x);
    }
    psi = std::move(next);
  }
  return Eigen::Map<const Vec>(psi.data(), psi.size());
}

Mps product_state(const std::vector<int>& bits) {
  Mps out;
  for (int b : bits) {
    SiteTensor t(1, 1);
    t(0, b ? 1 : 0, 0) = 1.0;
    out.sites.push_back(t);
  }
  out.ortho_center = 0;
  out.validate();
  return out;
}

Mps zero_state(int n_sites) { return product_state(std::vector<int>(n_sites, 0)); }

Mps canonicalize(const Mps& mps, int center) {
  mps.validate();
  if (center < 0 || center >= mps.n_sites())
    throw Error(ErrorCode::out_of_range, "canonicalize: center " + std::to_string(center) + " out of range");
  Mps out = mps;
  for (int i = 0; i < center; ++i) {
    const Mat m = out.sites[i].left_grouped();
    Eigen::HouseholderQR<Mat> qr(m);
    const int k = static_cast<int>(std::min(m.rows(), m.cols()));
    Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
    Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const int left = out.sites[i].left_dim();
    out.sites[i] = SiteTensor::from_left_grouped(q, left);
    const int right = out.sites[i + 1].right_dim();
    out.sites[i + 1] = SiteTensor::from_right_grouped(r * out.sites[i + 1].right_grouped(), right);
  }
  for (int i = out.n_sites() - 1; i > center; --i) {
    const Mat m = out.sites[i].right_grouped();
    const Mat mt = m.adjoint();
    Eigen::HouseholderQR<Mat> qr(mt);
    const int k = static_cast<int>(std::min(mt.rows(), mt.cols()));
    Mat q = qr.householderQ() * Mat::Identity(mt.rows(), k);
    Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const int right = out.sites[i].right_dim();
    out.sites[i] = SiteTensor::from_right_grouped(q.adjoint(), right);
    const int left = out.sites[i - 1].left_dim();
    out.sites[i - 1] = SiteTensor::from_left_grouped(out.sites[i - 1].left_grouped() * r.adjoint(), left);
  }
  out.ortho_center = center;
  return out;
}

TruncationResult truncate(const Mps& mps, int chi_max) {
  if (chi_max < 1) throw Error(ErrorCode::invalid_argument, "truncate: chi_max must be >= 1");
  Mps out = canonicalize(mps, 0);
  double kept = 1.0;
  for (int i = 0; i + 1 < out.n_sites(); ++i) {
    Svd f = svd(out.sites[i].left_grouped());
    const int k = kept_rank(f.s, chi_max, 1e-14);
    const double total = f.s.squaredNorm();
    if (total > 0) kept *= f.s.head(k).squaredNorm() / total;
    const int left = out.sites[i].left_dim();
    out.sites[i] = SiteTensor::from_left_grouped(f.u.leftCols(k), left);
    Mat sv = f.s.head(k).asDiagonal() * f.v.leftCols(k).adjoint();
    const int right = out.sites[i + 1].right_dim();
    out.sites[i + 1] = SiteTensor::from_right_grouped(sv * out.sites[i + 1].right_grouped(), right);
  }
  auto& last = out.sites.back().data();
  double n2 = 0;
  for (const cplx& x : last) n2 += std::norm(x);
  const double n = std::sqrt(n2);
  if (!(n > 0)) throw Error(ErrorCode::degenerate_input, "truncate: zero state");
  for (cplx& x : last) x /= n;
  out.ortho_center = out.n_sites() - 1;
  return {std::move(out), std::max(0.0, 1.0 - kept)};
}

cplx inner(const Mps& bra, const Mps& ket) {
  if (bra.n_sites() != ket.n_sites())
    throw Error(ErrorCode::size_mismatch, "inner: MPS site counts differ");
  Mat env = Mat::Ones(1, 1);
  for (int i = 0; i < bra.n_sites(); ++i) {
    const SiteTensor& a = bra.sites[i];
    const SiteTensor& b = ket.sites[i];
    Mat next = a.slice(0).adjoint() * env * b.slice(0) + a.slice(1).adjoint() * env * b.slice(1);
    env = std::move(next);
  }
  return env(0, 0);
}

double norm(const Mps& mps) { return std::sqrt(std::max(0.0, inner(mps, mps).real())); }

Mps normalized(const Mps& mps) {
  Mps out = mps;
  const double n = norm(mps);
  if (!(n > 0)) throw Error(ErrorCode::degenerate_input, "cannot normalize a zero MPS");
  const int c = out.ortho_center.value_or(0);
  for (cplx& x : out.sites[c].data()) x /= n;
  return out;
}

RealVec schmidt_values(const Mps& mps, int cut) {
  if (cut < 0 || cut + 1 >= mps.n_sites()) throw Error(ErrorCode::out_of_range, "schmidt_values: bad cut");
  Mps c = canonicalize(mps, cut);
  RealVec s = svd(c.sites[cut].left_grouped()).s;
  const double n = s.norm();
  return n > 0 ? RealVec(s / n) : s;
}

double entanglement_entropy(const Mps& mps, int cut) {
  const RealVec s = schmidt_values(mps, cut);
  double e = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double p = s[k] * s[k];
    if (p > 1e-300) e -= p * std::log2(p);
  }
  return e;
}

Mps random_mps(int n_sites, int chi, std::uint64_t seed) {
  if (n_sites < 2) throw Error(ErrorCode::invalid_argument, "random_mps: need N >= 2");
  if (chi < 1) throw Error(ErrorCode::invalid_argument, "random_mps: need chi >= 1");
  auto pow2 = [](int k) { return k >= 30 ? (1 << 30) : (1 << k); };
  std::vector<int> bonds(n_sites + 1, 1);
  for (int i = 0; i + 1 < n_sites; ++i) bonds[i + 1] = std::min({pow2(i + 1), pow2(n_sites - i - 1), chi});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  Mps out;
  for (int i = 0; i < n_sites; ++i) {
    SiteTensor t(bonds[i], bonds[i + 1]);
    for (cplx& x : t.data()) x = cplx(normal(rng), normal(rng));
    out.sites.push_back(std::move(t));
  }
  out = canonicalize(out, 0);
  return normalized(out);
}

double isometry_error(const Mps& mps) {
  if (!mps.ortho_center) return 0.0;
  const int c = *mps.ortho_center;
  double err = 0;
  for (int i = 0; i < mps.n_sites(); ++i) {
    if (i == c) continue;
    if (i < c) {
      const Mat m = mps.sites[i].left_grouped();
      err = std::max(err, (m.adjoint() * m - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff());
    } else {
      const Mat m = mps.sites[i].right_grouped();
      err = std::max(err, (m * m.adjoint() - Mat::Identity(m.rows(), m.rows())).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

double apply_two_site(Mps& mps, int i, const Mat4& op, bool move_right, int chi_max, double cutoff) {
  SiteTensor& s0 = mps.sites[i];
  SiteTensor& s1 = mps.sites[i + 1];
  const int l = s0.left_dim(), r = s1.right_dim();
  const RowMat theta = s0.left_grouped() * s1.right_grouped();  // (l*2) x (2*r)
  RowMat out(2 * l, 2 * r);
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < r; ++b) {
      cplx in[4], res[4];
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) in[p * 2 + q] = theta(a * 2 + p, q * r + b);
      for (int o = 0; o < 4; ++o) {
        res[o] = op(o, 0) * in[0] + op(o, 1) * in[1] + op(o, 2) * in[2] + op(o, 3) * in[3];
      }
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) out(a * 2 + p, q * r + b) = res[p * 2 + q];
    }
  }
  Svd f = svd(out);
  const int k = kept_rank(f.s, chi_max, cutoff);
  const double total = f.s.squaredNorm();
  const double discarded = total > 0 ? (total - f.s.head(k).squaredNorm()) / total : 0.0;
  if (move_right) {
    s0 = SiteTensor::from_left_grouped(f.u.leftCols(k), l);
    s1 = SiteTensor::from_right_grouped(f.s.head(k).asDiagonal() * f.v.leftCols(k).adjoint(), r);
    mps.ortho_center = i + 1;
  } else {
    s0 = SiteTensor::from_left_grouped(f.u.leftCols(k) * f.s.head(k).asDiagonal(), l);
    s1 = SiteTensor::from_right_grouped(f.v.leftCols(k).adjoint(), r);
    mps.ortho_center = i;
  }
  return std::max(0.0, discarded);
}

void apply_one_site(Mps& mps, int i, const Mat2& op) {
  SiteTensor& s = mps.sites[i];
  for (int a = 0; a < s.left_dim(); ++a)
    for (int b = 0; b < s.right_dim(); ++b) {
      const cplx x0 = s(a, 0, b), x1 = s(a, 1, b);
      s(a, 0, b) = op(0, 0) * x0 + op(0, 1) * x1;
      s(a, 1, b) = op(1, 0) * x0 + op(1, 1) * x1;
    }
}

cplx zero_count_expectation(const Mps& bra, const Mps& ket) {
  if (bra.n_sites() != ket.n_sites())
    throw Error(ErrorCode::size_mismatch, "zero_count_expectation: MPS site counts differ");
  Mat e0 = Mat::Ones(1, 1);
  Mat e1 = Mat::Zero(1, 1);
  for (int i = 0; i < bra.n_sites(); ++i) {
    const Mat a0 = bra.sites[i].slice(0).adjoint(), a1 = bra.sites[i].slice(1).adjoint();
    const Mat b0 = ket.sites[i].slice(0), b1 = ket.sites[i].slice(1);
    const Mat zero_part = a0 * e0 * b0;
    Mat n1 = a0 * e1 * b0 + a1 * e1 * b1 + zero_part;
    Mat n0 = zero_part + a1 * e0 * b1;
    e0 = std::move(n0);
    e1 = std::move(n1);
  }
  return e1(0, 0);
}

}  // namespace mpsenc
