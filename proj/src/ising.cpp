#include "mpsenc/ising.hpp"

#include <array>
#include <cmath>

#include "mpsenc/linalg.hpp"

namespace mpsenc {

namespace {

// Lower-triangular MPO, bond 3: left boundary selects row 2, right boundary column 0.
struct IsingMpo {
  std::array<std::array<Mat2, 3>, 3> w;
  std::array<std::array<bool, 3>, 3> nonzero{};

  explicit IsingMpo(double g) {
    const Mat2 id = Mat2::Identity();
    Mat2 z, x;
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    for (auto& row : w)
      for (auto& m : row) m.setZero();
    set(0, 0, id);
    set(1, 0, z);
    set(2, 0, -g * x);
    set(2, 1, -z);
    set(2, 2, id);
  }
  void set(int a, int b, const Mat2& m) {
    w[a][b] = m;
    nonzero[a][b] = true;
  }
};

Mps apply_mpo(const IsingMpo& mpo, const Mps& mps) {
  const int n = mps.n_sites();
  Mps out;
  for (int i = 0; i < n; ++i) {
    const SiteTensor& a = mps.sites[i];
    const int wl_begin = (i == 0) ? 2 : 0, wl_count = (i == 0) ? 1 : 3;
    const int wr_count = (i == n - 1) ? 1 : 3;
    SiteTensor t(wl_count * a.left_dim(), wr_count * a.right_dim());
    for (int wl = 0; wl < wl_count; ++wl)
      for (int wr = 0; wr < wr_count; ++wr) {
        const int mw = wl + wl_begin;
        if (!mpo.nonzero[mw][wr]) continue;
        const Mat2& op = mpo.w[mw][wr];
        for (int x = 0; x < a.left_dim(); ++x)
          for (int y = 0; y < a.right_dim(); ++y)
            for (int so = 0; so < 2; ++so)
              t(wl * a.left_dim() + x, so, wr * a.right_dim() + y) =
                  op(so, 0) * a(x, 0, y) + op(so, 1) * a(x, 1, y);
      }
    out.sites.push_back(std::move(t));
  }
  return out;
}

using EnvStack = std::array<Mat, 3>;

EnvStack grow_left(const IsingMpo& mpo, const EnvStack& env, const SiteTensor& a) {
  EnvStack out;
  const Mat a0 = a.slice(0), a1 = a.slice(1);
  const Mat* slices[2] = {&a0, &a1};
  for (auto& m : out) m = Mat::Zero(a.right_dim(), a.right_dim());
  for (int w = 0; w < 3; ++w) {
    if (env[w].size() == 0 || env[w].isZero(0)) continue;
    for (int w1 = 0; w1 < 3; ++w1) {
      if (!mpo.nonzero[w][w1]) continue;
      const Mat2& op = mpo.w[w][w1];
      for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si) {
          if (op(so, si) == cplx(0)) continue;
          out[w1] += op(so, si) * (slices[so]->adjoint() * env[w] * *slices[si]);
        }
    }
  }
  return out;
}

EnvStack grow_right(const IsingMpo& mpo, const EnvStack& env, const SiteTensor& b) {
  EnvStack out;
  const Mat b0 = b.slice(0), b1 = b.slice(1);
  const Mat* slices[2] = {&b0, &b1};
  for (auto& m : out) m = Mat::Zero(b.left_dim(), b.left_dim());
  for (int w1 = 0; w1 < 3; ++w1) {
    if (env[w1].size() == 0 || env[w1].isZero(0)) continue;
    for (int w = 0; w < 3; ++w) {
      if (!mpo.nonzero[w][w1]) continue;
      const Mat2& op = mpo.w[w][w1];
      for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si) {
          if (op(so, si) == cplx(0)) continue;
          out[w] += op(so, si) * (slices[so]->conjugate() * env[w1] * slices[si]->transpose());
        }
    }
  }
  return out;
}

}  // namespace

Vec apply_ising(const IsingModel& model, const Vec& psi) {
  const int n = model.n_sites;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Vec out(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    double diag = 0;
    for (int q = 0; q + 1 < n; ++q) {
      const int b0 = (j >> (n - 1 - q)) & 1, b1 = (j >> (n - 2 - q)) & 1;
      diag -= (b0 == b1) ? 1.0 : -1.0;
    }
    cplx acc = diag * psi[j];
    for (int q = 0; q < n; ++q) acc -= model.g * psi[j ^ (Eigen::Index{1} << (n - 1 - q))];
    out[j] = acc;
  }
  return out;
}

Mps ising_ground_state(int n_sites, double hx_over_jz, int chi, int dense_max_sites) {
  if (n_sites < 2) throw Error(ErrorCode::invalid_argument, "ising_ground_state: need N >= 2");
  if (chi < 1) throw Error(ErrorCode::invalid_argument, "ising_ground_state: need chi >= 1");
  const IsingModel model{n_sites, hx_over_jz};
  if (n_sites <= dense_max_sites) {
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    // |+...+> lies in the Z2-even sector, which contains the ground state.
    Vec start = Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    EigenPair gs = lanczos_lowest([&](const Vec& v) { return apply_ising(model, v); }, start, 1e-11);
    // fix the sign so that the amplitude of |0...0> is real positive
    const cplx ref = gs.vector[0];
    if (std::abs(ref) > 0) gs.vector *= std::conj(ref) / std::abs(ref);
    return from_statevector(gs.vector, chi);
  }
  DmrgOptions options;
  options.chi_max = chi;
  return ising_ground_state_dmrg(model, options);
}

Mps ising_ground_state_dmrg(const IsingModel& model, const DmrgOptions& options) {
  const int n = model.n_sites;
  const IsingMpo mpo(model.g);
  Mps psi = random_mps(n, std::min(4, options.chi_max), options.seed);
  psi = canonicalize(psi, 0);

  std::vector<EnvStack> left(n + 1), right(n + 1);
  left[0] = {Mat::Zero(1, 1), Mat::Zero(1, 1), Mat::Ones(1, 1)};
  right[n] = {Mat::Ones(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1)};
  for (int i = n - 1; i >= 1; --i) right[i] = grow_right(mpo, right[i + 1], psi.sites[i]);

  auto solve_pair = [&](int i, bool move_right) {
    const SiteTensor& a = psi.sites[i];
    const SiteTensor& b = psi.sites[i + 1];
    const int dl = a.left_dim(), dr = b.right_dim();
    const EnvStack& le = left[i];
    const EnvStack& re = right[i + 2];
    // theta blocks indexed (s1, s2), each dl x dr; flattened as Vec
    auto unpack = [&](const Vec& v, int s) { return Eigen::Map<const Mat>(v.data() + s * dl * dr, dl, dr); };
    auto apply_h = [&](const Vec& v) {
      Vec out = Vec::Zero(v.size());
      for (int w = 0; w < 3; ++w) {
        if (le[w].isZero(0)) continue;
        for (int w1 = 0; w1 < 3; ++w1) {
          if (!mpo.nonzero[w][w1]) continue;
          for (int w2 = 0; w2 < 3; ++w2) {
            if (!mpo.nonzero[w1][w2] || re[w2].isZero(0)) continue;
            const Mat2& o1 = mpo.w[w][w1];
            const Mat2& o2 = mpo.w[w1][w2];
            for (int s1 = 0; s1 < 2; ++s1)
              for (int s2 = 0; s2 < 2; ++s2) {
                Mat acc = Mat::Zero(dl, dr);
                bool any = false;
                for (int t1 = 0; t1 < 2; ++t1)
                  for (int t2 = 0; t2 < 2; ++t2) {
                    const cplx c = o1(s1, t1) * o2(s2, t2);
                    if (c == cplx(0)) continue;
                    acc += c * unpack(v, t1 * 2 + t2);
                    any = true;
                  }
                if (!any) continue;
                Mat block = le[w] * acc * re[w2].transpose();
                Eigen::Map<Mat>(out.data() + (s1 * 2 + s2) * dl * dr, dl, dr) += block;
              }
          }
        }
      }
      return out;
    };
    Vec theta(4 * dl * dr);
    const Mat a0 = a.slice(0), a1 = a.slice(1), b0 = b.slice(0), b1 = b.slice(1);
    const Mat* as[2] = {&a0, &a1};
    const Mat* bs[2] = {&b0, &b1};
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        Eigen::Map<Mat>(theta.data() + (s1 * 2 + s2) * dl * dr, dl, dr) = (*as[s1]) * (*bs[s2]);
    EigenPair gs = lanczos_lowest(apply_h, theta, 1e-10, 40, 20);
    // regroup into (dl*2) x (2*dr)
    Mat m(2 * dl, 2 * dr);
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) {
        const auto blk = unpack(gs.vector, s1 * 2 + s2);
        for (int x = 0; x < dl; ++x)
          for (int y = 0; y < dr; ++y) m(x * 2 + s1, s2 * dr + y) = blk(x, y);
      }
    Svd f = svd(m);
    const int k = kept_rank(f.s, options.chi_max, 1e-13);
    RealVec s = f.s.head(k);
    s /= s.norm();
    if (move_right) {
      psi.sites[i] = SiteTensor::from_left_grouped(f.u.leftCols(k), dl);
      psi.sites[i + 1] = SiteTensor::from_right_grouped(s.asDiagonal() * f.v.leftCols(k).adjoint(), dr);
    } else {
      psi.sites[i] = SiteTensor::from_left_grouped(f.u.leftCols(k) * s.asDiagonal(), dl);
      psi.sites[i + 1] = SiteTensor::from_right_grouped(f.v.leftCols(k).adjoint(), dr);
    }
    return gs.value;
  };

  double previous = 0;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double energy = 0;
    for (int i = 0; i + 1 < n; ++i) {
      energy = solve_pair(i, true);
      left[i + 1] = grow_left(mpo, left[i], psi.sites[i]);
    }
    for (int i = n - 2; i >= 0; --i) {
      energy = solve_pair(i, false);
      right[i + 1] = grow_right(mpo, right[i + 2], psi.sites[i + 1]);
    }
    if (sweep > 0 && std::abs(energy - previous) < options.energy_tol * std::max(1.0, std::abs(energy))) break;
    previous = energy;
  }
  psi.ortho_center = 0;
  return normalized(psi);
}

EnergyStats ising_energy(const IsingModel& model, const Mps& mps) {
  const IsingMpo mpo(model.g);
  const Mps h_psi = apply_mpo(mpo, mps);
  const double nn = inner(mps, mps).real();
  const double e = inner(mps, h_psi).real() / nn;
  const double e2 = inner(h_psi, h_psi).real() / nn;
  return {e, std::max(0.0, e2 - e * e)};
}

}  // namespace mpsenc
