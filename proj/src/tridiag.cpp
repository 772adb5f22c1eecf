#include "specres/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specres {

TruncatedOperator assemble(const PeriodicPotential& V, Index L) {
  if (L < 1) throw DomainError("assemble: L must be >= 1");
  return TruncatedOperator{V, L};
}

double SpectralData::weight_sum() const {
  return pairwise_sum<double>(0, weights.size(), [&](Index i) { return weights[i]; });
}

namespace {

// #{eigenvalues of the tridiagonal operator < x}, by the Sturm pivot
// recursion.  A vanishing pivot (x hits an eigenvalue of a leading minor)
// is floored with its sign kept, so the count and the division stay
// consistent; zero itself takes the x - 0 convention.
Index sturm_count(const TruncatedOperator& op, double x) {
  const Index n = op.dim();
  constexpr double pivmin = 1e-290;
  Index count = 0;
  double q = op.diag(0) - x;
  for (Index i = 1; i < n; ++i) {
    if (q < 0) ++count;
    if (std::abs(q) < pivmin) q = q < 0 ? -pivmin : pivmin;
    q = (op.diag(i) - x) - 1.0 / q;
  }
  if (q < 0) ++count;
  return count;
}

// Bisection bracket for the k-th (0-based, ascending) eigenvalue.
double bisect_eigenvalue(const TruncatedOperator& op, Index k, double lo, double hi,
                         double tol) {
  for (int it = 0; it < 120 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sturm_count(op, mid) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Tridiagonal LU with partial pivoting for (H - sigma I) y = b; fill-in
// limited to a second superdiagonal.
struct ShiftedSolver {
  VectorXd dl, d0, d1, d2;  // multipliers and U bands
  std::vector<bool> swapped;
  Index n;

  ShiftedSolver(const TruncatedOperator& op, double sigma) : n(op.dim()) {
    dl.resize(n);
    d0.resize(n);
    d1.resize(n);
    d2.resize(n);
    swapped.assign(n, false);
    for (Index i = 0; i < n; ++i) {
      d0[i] = op.diag(i) - sigma;
      d1[i] = (i + 1 < n) ? 1.0 : 0.0;
      d2[i] = 0.0;
    }
    const double tiny = 1e-290;
    for (Index i = 0; i + 1 < n; ++i) {
      double sub = 1.0;  // unit off-diagonal below the pivot
      if (std::abs(sub) > std::abs(d0[i])) {
        swapped[i] = true;  // swap rows i, i+1
        std::swap(d0[i], sub);
        const double t1 = d1[i];
        d1[i] = d0[i + 1];
        d0[i + 1] = t1;
        d2[i] = d1[i + 1];
        d1[i + 1] = 0.0;
      }
      if (d0[i] == 0.0) d0[i] = tiny;
      const double m = sub / d0[i];
      dl[i] = m;
      d0[i + 1] -= m * d1[i];
      d1[i + 1] -= m * d2[i];
    }
    if (d0[n - 1] == 0.0) d0[n - 1] = 1e-290;
  }

  void solve(VectorXd& b) const {
    for (Index i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d0[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - d1[n - 2] * b[n - 1]) / d0[n - 2];
    for (Index i = n - 3; i >= 0; --i)
      b[i] = (b[i] - d1[i] * b[i + 1] - d2[i] * b[i + 2]) / d0[i];
  }
};

// Deterministic pseudo-random start vector for inverse iteration.
VectorXd start_vector(Index n, Index seed) {
  VectorXd b(n);
  std::uint64_t s = 0x9e3779b97f4a7c15ull + std::uint64_t(seed) * 0xbf58476d1ce4e5b9ull;
  for (Index i = 0; i < n; ++i) {
    s ^= s >> 30;
    s *= 0xbf58476d1ce4e5b9ull;
    s ^= s >> 27;
    b[i] = double(s >> 11) / double(1ull << 53) - 0.5;
  }
  b.normalize();
  return b;
}

double residual_norm(const TruncatedOperator& op, double lambda, const VectorXd& y) {
  const Index n = op.dim();
  double acc = 0;
  for (Index i = 0; i < n; ++i) {
    double r = (op.diag(i) - lambda) * y[i];
    if (i > 0) r += y[i - 1];
    if (i + 1 < n) r += y[i + 1];
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace

SpectralData eigen_decompose(const TruncatedOperator& op, const WorkerPool* pool) {
  const Index n = op.dim();
  const double scale = op.norm_inf();
  const double lo0 = op.V.values.minCoeff() - 2.0 - 1e-10 * scale;
  const double hi0 = op.V.values.maxCoeff() + 2.0 + 1e-10 * scale;
  const double eig_tol = 1e-13 * scale;

  SpectralData sd;
  sd.lambdas.resize(n);
  sd.weights.resize(n);
  sd.first_components.resize(n);

  WorkerPool serial(1);
  const WorkerPool& wp = pool ? *pool : serial;

  wp.for_each_index(std::size_t(n), [&](std::size_t k) {
    sd.lambdas[Index(k)] = bisect_eigenvalue(op, Index(k), lo0, hi0, eig_tol);
  });

  // clusters: consecutive eigenvalues closer than 1e-8 * ||H|| share
  // reorthogonalization
  std::vector<std::pair<Index, Index>> clusters;
  const double cluster_gap = 1e-8 * scale;
  for (Index k = 0; k < n;) {
    Index e = k + 1;
    while (e < n && sd.lambdas[e] - sd.lambdas[e - 1] <= cluster_gap) ++e;
    clusters.emplace_back(k, e);
    k = e;
  }

  wp.for_each_index(clusters.size(), [&](std::size_t ci) {
    const auto [kb, ke] = clusters[ci];
    std::vector<VectorXd> basis;
    for (Index k = kb; k < ke; ++k) {
      bool ok = false;
      for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
        const double sigma = sd.lambdas[k] + double(attempt) * 16.0 * eig_tol;
        const ShiftedSolver lu(op, sigma);
        VectorXd y = start_vector(n, k + Index(attempt) * 7919);
        for (int sweep = 0; sweep < 3; ++sweep) {
          lu.solve(y);
          for (const VectorXd& prev : basis) y -= prev.dot(y) * prev;
          const double nrm = y.norm();
          if (nrm == 0.0 || !std::isfinite(nrm)) break;
          y /= nrm;
        }
        if (!y.allFinite()) continue;
        if (residual_norm(op, sd.lambdas[k], y) <= 1e-10 * scale) {
          sd.weights[k] = y[n - 1] * y[n - 1];
          sd.first_components[k] = y[0] * y[0];
          if (ke - kb > 1) basis.push_back(y);
          ok = true;
        }
      }
      if (!ok) {
        std::ostringstream os;
        os << "inverse iteration failed to converge at index " << k << " (lambda = "
           << sd.lambdas[k] << ")";
        throw ConvergenceError(os.str());
      }
    }
  });
  return sd;
}

BandLocalEnumeration enumerate_in_band(const SpectralData& sd, const BandStructure::Band& band,
                                       int band_index) {
  BandLocalEnumeration en;
  en.band_index = band_index;
  en.band_lo = band.lo;
  en.band_hi = band.hi;
  const double tol = 1e-11 * std::max(1.0, std::max(std::abs(band.lo), std::abs(band.hi)));
  std::vector<double> vals;
  for (Index k = 0; k < sd.lambdas.size(); ++k) {
    const double x = sd.lambdas[k];
    if (x < band.lo - tol || x > band.hi + tol) continue;
    if (!vals.empty() && x - vals.back() <= tol) continue;  // distinct values only
    vals.push_back(x);
    en.global_index.push_back(k);
  }
  en.values = Eigen::Map<const VectorXd>(vals.data(), Index(vals.size()));
  return en;
}

RescaledFrame rescale(const SpectralData& sd, double E0, Index L) {
  RescaledFrame fr;
  fr.E0 = E0;
  fr.L = L;
  const double L2 = double(L) * double(L);
  fr.lambda_tilde.resize(sd.lambdas.size());
  fr.a_tilde = double(L) * sd.weights;
  for (Index k = 0; k < sd.lambdas.size(); ++k) {
    const double d = sd.lambdas[k] - E0;
    // an eigenvalue sitting on the edge is pinned to exactly zero
    fr.lambda_tilde[k] = (std::abs(d) <= 1e-10) ? 0.0 : L2 * d;
  }
  return fr;
}

double SpacingReport::alpha() const {
  double a = 1.0;
  for (double r : {pair_ratio_min, pair_ratio_max, edge_ratio_min, edge_ratio_max}) {
    if (r <= 0) continue;
    a = std::max(a, std::max(r, 1.0 / r));
  }
  return a;
}

bool SpacingReport::pass(double alpha_window) const {
  if (pairs_used == 0 || points_used == 0) return false;
  return alpha() <= alpha_window;
}

SpacingReport check_spacing_law(const BandLocalEnumeration& en, double E0, double eps, Index L,
                                Index j) {
  if (!(eps > 0)) throw DomainError("check_spacing_law: eps must be positive");
  const Index kmax = std::min<Index>(en.count() - 1, Index(eps * double(L - j)));
  if (kmax < 1) throw DomainError("check_spacing_law: fewer than 2 eigenvalues in window");
  const double L2 = double(L) * double(L);

  SpacingReport rep;
  rep.pair_ratio_min = rep.edge_ratio_min = std::numeric_limits<double>::infinity();
  for (Index k = 0; k <= kmax; ++k) {
    const double d = en.values[k] - E0;
    if (d <= 0) continue;  // edge eigenvalue itself carries no ratio
    const double r = L2 * d / sqr(double(k + 1));
    rep.edge_ratio_min = std::min(rep.edge_ratio_min, r);
    rep.edge_ratio_max = std::max(rep.edge_ratio_max, r);
    ++rep.points_used;
  }
  for (Index nn = 0; nn < kmax; ++nn)
    for (Index k = nn + 1; k <= kmax; ++k) {
      const double num = L2 * (en.values[k] - en.values[nn]);
      const double den = double(k * k - nn * nn);
      const double r = num / den;
      rep.pair_ratio_min = std::min(rep.pair_ratio_min, r);
      rep.pair_ratio_max = std::max(rep.pair_ratio_max, r);
      ++rep.pairs_used;
    }
  return rep;
}

DecayReport check_outside_band_convergence(const PeriodicPotential& V,
                                           const std::vector<Index>& L_list,
                                           const BandStructure& bs, const WorkerPool* pool) {
  if (L_list.size() < 2) throw DomainError("check_outside_band_convergence: need >= 2 L values");
  const Index p = V.period();
  for (std::size_t i = 1; i < L_list.size(); ++i) {
    if (L_list[i] <= L_list[i - 1])
      throw DomainError("check_outside_band_convergence: L_list must ascend");
    if (L_list[i] % p != L_list[0] % p)
      throw DomainError("check_outside_band_convergence: L_list must share a residue mod p");
  }

  const double slack = 1e-9;
  std::vector<std::vector<double>> outside(L_list.size());
  WorkerPool serial(1);
  const WorkerPool& wp = pool ? *pool : serial;
  wp.for_each_index(L_list.size(), [&](std::size_t i) {
    const SpectralData sd = eigen_decompose(assemble(V, L_list[i]));
    for (Index k = 0; k < sd.lambdas.size(); ++k)
      if (bs.band_of(sd.lambdas[k], slack) < 0) outside[i].push_back(sd.lambdas[k]);
  });

  DecayReport rep;
  rep.vacuous = true;
  for (const auto& v : outside)
    if (!v.empty()) rep.vacuous = false;
  if (rep.vacuous) {
    rep.pass = true;
    return rep;
  }

  // chains seeded at the first L; matched forward injectively by proximity
  std::vector<DecayReport::Chain> chains;
  for (double x : outside[0]) {
    DecayReport::Chain c;
    c.values.push_back(x);
    chains.push_back(c);
  }
  for (std::size_t i = 1; i < L_list.size(); ++i) {
    std::vector<bool> used(outside[i].size(), false);
    for (auto& c : chains) {
      if (c.values.size() != i) continue;  // chain already broken
      const double prev = c.values.back();
      int best = -1;
      double bestd = 0.1;  // matches farther than this are different states
      for (std::size_t m = 0; m < outside[i].size(); ++m) {
        if (used[m]) continue;
        const double d = std::abs(outside[i][m] - prev);
        if (d < bestd) {
          bestd = d;
          best = int(m);
        }
      }
      if (best >= 0) {
        used[std::size_t(best)] = true;
        c.values.push_back(outside[i][std::size_t(best)]);
      }
    }
  }

  rep.pass = true;
  for (auto& c : chains) {
    for (std::size_t i = 1; i < c.values.size(); ++i)
      c.diffs.push_back(std::abs(c.values[i] - c.values[i - 1]));
    if (c.diffs.size() < 2) {
      c.converged_below_eps = !c.diffs.empty() && c.diffs.front() < 1e-13;
      continue;
    }
    bool all_tiny = true;
    for (double d : c.diffs) all_tiny = all_tiny && d < 1e-13;
    if (all_tiny) {
      c.converged_below_eps = true;  // already at rounding level: pass
      continue;
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < c.diffs.size(); ++i) {
      xs.push_back(double(i));
      ys.push_back(std::log(std::max(c.diffs[i], 1e-300)));
    }
    // least squares on the log-differences
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = double(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    c.log_slope = cxy / vx;
    c.r2 = (vy == 0) ? 1.0 : cxy * cxy / (vx * vy);
    if (!(c.log_slope < 0 && c.r2 >= 0.9)) rep.pass = false;
  }
  rep.chains = std::move(chains);
  return rep;
}

}  // namespace specres
