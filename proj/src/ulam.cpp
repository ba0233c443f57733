#include "fbm/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fbm {

UlamResult ulam_density(const MapModel& m, const PartitionTable& t, Side side,
                        const UlamOptions& opt) {
  const int N = opt.bins;
  if (N < 32) throw DomainError("bin count too small");
  const int M = std::min(opt.cell_cap, t.n_max);
  if (M < 1) throw DomainError("cell cap too small");
  UlamResult u;
  u.side = side;
  u.bins = N;
  u.cell_cap = M;
  if (side == Side::Left) {
    u.lo = m.zeroCross(Side::Left);
    u.hi = 0.0;
  } else {
    u.lo = 0.0;
    u.hi = m.zeroCross(Side::Right);
  }
  const double binw = (u.hi - u.lo) / N;
  const MapParams& p = m.params();

  // A cell orbit splits into two legs: the outbound leg (depth mi) carries
  // the cell onto a landing slab of the opposite home that depends only on
  // ni, and the return leg (the jump off that home plus ni-1 outer-branch
  // steps) carries the slab onto the full home. Pull the target bin edges
  // back through the return leg once per level, in endpoint distance taken
  // right after the jump: grid piece j of level ni then maps onto target
  // bin j exactly, so the return leg contributes no per-cell error and the
  // steep seam image stays sharp. grid is (edge, level), column-major.
  const double wcap = m.stepDistPlus(m.maxWRight());
  const double zcap = m.stepDistMinus(m.maxZLeft());
  Eigen::MatrixXd grid(N + 1, M);
  for (int j = 0; j <= N; ++j) {
    double e = u.lo + binw * (side == Side::Left ? j : N - j);  // keep columns increasing
    grid(j, 0) = (side == Side::Left) ? 1.0 + e : 1.0 - e;
  }
  for (int l = 1; l < M; ++l) {
    for (int j = 0; j <= N; ++j) {
      double v = grid(j, l - 1);
      grid(j, l) = (side == Side::Left)
                       ? ((v <= zcap) ? m.pullbackDistMinus(v)
                                      : 1.0 + m.invert(Side::Left, v - 1.0))
                       : ((v <= wcap) ? m.pullbackDistPlus(v)
                                      : 1.0 - m.invert(Side::Right, 1.0 - v));
    }
  }

  // distance coordinate of the jump image of an outbound landing
  auto leg2_dist = [&](double v) {
    if (side == Side::Left)
      return (v <= m.blendLo(Side::Right)) ? p.a2 * std::pow(v, p.k2)
                                           : 1.0 + m.eval(v, Side::Right);
    double mag = -v;
    return (mag <= -m.blendHi(Side::Left)) ? p.a1 * std::pow(mag, p.k1)
                                           : 1.0 - m.eval(v, Side::Left);
  };

  // T(j, i): mass fraction of source bin i carried into target bin j
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
  Eigen::ArrayXd covered = Eigen::ArrayXd::Zero(N);

  auto bin_of = [&](double x) {
    int i = int(std::floor((x - u.lo) / binw));
    return std::clamp(i, 0, N - 1);
  };

  std::vector<double> kx, kz;
  for_each_cell(m, t, side, M, [&](int mi, int ni, double clo, double chi) {
    const double* zg = grid.col(ni - 1).data();
    const double zlo = zg[0], zhi = zg[N];
    auto target_bin = [&](int g) { return side == Side::Left ? g : N - 1 - g; };
    auto splat = [&](int row, double za, double zb, double mass) {
      if (zb < za) std::swap(za, zb);
      za = std::max(za, zlo);
      zb = std::min(zb, zhi);
      int g = int(std::upper_bound(zg, zg + N + 1, za) - zg) - 1;
      g = std::clamp(g, 0, N - 1);
      if (!(zb > za)) {
        T(target_bin(g), row) += mass;
        return;
      }
      for (; g < N && zg[g] < zb; ++g) {
        double ovl = std::min(zg[g + 1], zb) - std::max(zg[g], za);
        if (ovl > 0) T(target_bin(g), row) += mass * (ovl / (zb - za));
      }
    };

    // knots: cell ends plus the bin edges inside the cell; cell ends land
    // exactly on the slab ends
    kx.clear();
    kx.push_back(clo);
    for (int i = bin_of(clo) + 1; i <= bin_of(chi); ++i) {
      double e = u.lo + i * binw;
      if (e > clo && e < chi) kx.push_back(e);
    }
    kx.push_back(chi);
    kz.assign(kx.size(), 0.0);
    kz.front() = (side == Side::Left) ? zlo : zhi;
    kz.back() = (side == Side::Left) ? zhi : zlo;
    for (size_t i = 1; i + 1 < kx.size(); ++i)
      kz[i] = leg2_dist(climb(m, side, kx[i], mi).landing);

    for (size_t i = 0; i + 1 < kx.size(); ++i) {
      double xa = kx[i], xb = kx[i + 1];
      double pm = (xb - xa) / binw;
      if (!(pm > 0)) continue;
      int row = bin_of(0.5 * (xa + xb));
      covered(row) += pm;
      int s = (kx.size() == 2) ? 4 : 2;  // lone pieces get the finer outbound model
      double za = kz[i];
      for (int q = 1; q <= s; ++q) {
        double zb = (q == s) ? kz[i + 1]
                             : leg2_dist(climb(m, side, xa + (xb - xa) * q / s, mi).landing);
        splat(row, za, zb, pm / s);
        za = zb;
      }
    }
  });

  u.escape = 1.0 - covered.sum() / N;
  if (u.escape > opt.escape_tol)
    throw TruncationTooSmall("cell truncation leaves " + std::to_string(u.escape) +
                             " of the home interval uncovered");

  for (int i = 0; i < N; ++i) {
    double s = T.col(i).sum();
    if (s < 1e-14)
      T.col(i).setConstant(1.0 / N);
    else
      T.col(i) /= s;
  }

  Eigen::VectorXd v = Eigen::VectorXd::Constant(N, 1.0 / N);
  double res = 1;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    Eigen::VectorXd w = T * v;
    w /= w.sum();
    res = (w - v).lpNorm<1>();
    v = w;
    if (res <= opt.tol) break;
  }
  if (res > 1e-6) throw NonConvergence("stationary vector failed to settle");
  u.residual = res;
  u.iters = it + 1;
  u.mass = v.array();
  u.density = u.mass / binw;

  // endpoint density by least squares over the bins nearest 0
  int nf = std::min(opt.fit_bins, N);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < nf; ++k) {
    int i = (side == Side::Left) ? N - 1 - k : k;
    double x = u.center(i), y = u.density(i);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double den = nf * sxx - sx * sx;
  double slope = (nf * sxy - sx * sy) / den;
  u.density_at_zero = (sy - slope * sx) / nf;
  return u;
}

double density_at(const UlamResult& u, double x) {
  if (!(x >= u.lo) || !(x <= u.hi)) throw DomainError("density query outside the home interval");
  double binw = u.bin_width();
  double f = (x - u.lo) / binw - 0.5;  // position in center coordinates
  int N = u.bins;
  bool zero_at_hi = (u.side == Side::Left);
  if (f <= 0) {
    if (!zero_at_hi) {  // interpolate toward the fitted endpoint value
      double tfrac = (x - u.lo) / (0.5 * binw);
      return u.density_at_zero + (u.density(0) - u.density_at_zero) * tfrac;
    }
    return u.density(0);
  }
  if (f >= N - 1) {
    if (zero_at_hi) {
      double tfrac = (u.hi - x) / (0.5 * binw);
      return u.density_at_zero + (u.density(N - 1) - u.density_at_zero) * tfrac;
    }
    return u.density(N - 1);
  }
  int i = int(std::floor(f));
  double lam = f - i;
  return u.density(i) * (1.0 - lam) + u.density(i + 1) * lam;
}

}  // namespace fbm
