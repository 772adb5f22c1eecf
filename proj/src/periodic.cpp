#include "specres/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specres {

Matrix2c transfer_matrix(Complex E, Index site, const PeriodicPotential& V) {
  Matrix2c T;
  T << E - V(site), Complex(-1.0), Complex(1.0), Complex(0.0);
  return T;
}

Matrix2c monodromy(Complex E, Index base, const PeriodicPotential& V) {
  const Index p = V.period();
  if (base < 0 || base >= p) throw DomainError("monodromy base outside [0, p)");
  Matrix2c M = Matrix2c::Identity();
  for (Index l = base; l < base + p; ++l) M = transfer_matrix(E, l, V) * M;
  return M;
}

Complex discriminant(Complex E, const PeriodicPotential& V) {
  return monodromy(E, 0, V).trace();
}

double polyval(const VectorXd& c, double x) {
  double v = 0;
  for (Index i = c.size() - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

Complex polyval(const VectorXd& c, Complex x) {
  Complex v = 0;
  for (Index i = c.size() - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

VectorXd polyder(const VectorXd& c) {
  if (c.size() <= 1) return VectorXd::Zero(1);
  VectorXd d(c.size() - 1);
  for (Index i = 1; i < c.size(); ++i) d[i - 1] = double(i) * c[i];
  return d;
}

namespace {

// polynomial product and sum, ascending coefficients
VectorXd pmul(const VectorXd& a, const VectorXd& b) {
  VectorXd r = VectorXd::Zero(a.size() + b.size() - 1);
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

VectorXd padd(const VectorXd& a, const VectorXd& b) {
  VectorXd r = VectorXd::Zero(std::max(a.size(), b.size()));
  r.head(a.size()) += a;
  r.head(b.size()) += b;
  return r;
}

struct PolyMat2 {
  VectorXd a, b, c, d;  // ((a, b), (c, d))
};

PolyMat2 transfer_poly(double v) {
  PolyMat2 t;
  t.a = VectorXd(2);
  t.a << -v, 1.0;  // E - v
  t.b = VectorXd::Constant(1, -1.0);
  t.c = VectorXd::Constant(1, 1.0);
  t.d = VectorXd::Zero(1);
  return t;
}

PolyMat2 pmatmul(const PolyMat2& x, const PolyMat2& y) {
  PolyMat2 r;
  r.a = padd(pmul(x.a, y.a), pmul(x.b, y.c));
  r.b = padd(pmul(x.a, y.b), pmul(x.b, y.d));
  r.c = padd(pmul(x.c, y.a), pmul(x.d, y.c));
  r.d = padd(pmul(x.c, y.b), pmul(x.d, y.d));
  return r;
}

double bisect_root(const VectorXd& poly, double lo, double hi, double tol) {
  double flo = polyval(poly, lo);
  for (int it = 0; it < 200 && hi - lo > tol * 0.25; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = polyval(poly, mid);
    if ((flo <= 0) == (fm <= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  // two guarded Newton polish steps
  const VectorXd dp = polyder(poly);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double f = polyval(poly, x);
    const double d = polyval(dp, x);
    if (d == 0) break;
    const double step = f / d;
    const double xn = x - step;
    if (xn < lo || xn > hi) break;
    x = xn;
  }
  return x;
}

}  // namespace

MonodromyPolys monodromy_polys(const PeriodicPotential& V) {
  PolyMat2 M;
  M.a = VectorXd::Constant(1, 1.0);
  M.b = VectorXd::Zero(1);
  M.c = VectorXd::Zero(1);
  M.d = VectorXd::Constant(1, 1.0);
  for (Index l = 0; l < V.period(); ++l) M = pmatmul(transfer_poly(V(l)), M);
  return MonodromyPolys{M.a, M.b, M.c, M.d};
}

VectorXd discriminant_coeffs(const PeriodicPotential& V) {
  const MonodromyPolys mp = monodromy_polys(V);
  return padd(mp.a_p, mp.b_pm1);
}

std::vector<double> poly_real_roots(const VectorXd& coeffs, double lo, double hi, double tol) {
  // trim trailing zero coefficients
  Index deg = coeffs.size() - 1;
  while (deg > 0 && coeffs[deg] == 0.0) --deg;
  const VectorXd c = coeffs.head(deg + 1);
  std::vector<double> roots;
  if (deg == 0) return roots;
  if (deg == 1) {
    const double r = -c[0] / c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  const std::vector<double> crit = poly_real_roots(polyder(c), lo, hi, tol);
  std::vector<double> nodes;
  nodes.push_back(lo);
  for (double cx : crit)
    if (cx > nodes.back() + tol) nodes.push_back(cx);
  if (hi > nodes.back() + tol) nodes.push_back(hi);
  const double scale = c.cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double u = nodes[i], v = nodes[i + 1];
    const double fu = polyval(c, u), fv = polyval(c, v);
    const double touch = 1e-12 * std::max(1.0, scale);
    if (std::abs(fu) <= touch) {
      if (roots.empty() || u > roots.back() + tol) roots.push_back(u);
      continue;
    }
    if (std::abs(fv) <= touch) continue;  // picked up as the next interval's endpoint
    if ((fu < 0) != (fv < 0)) roots.push_back(bisect_root(c, u, v, tol));
  }
  // endpoint roots flagged above may have skipped the final node
  const double fend = polyval(c, nodes.back());
  if (std::abs(fend) <= 1e-12 * std::max(1.0, scale))
    if (roots.empty() || nodes.back() > roots.back() + tol) roots.push_back(nodes.back());
  return roots;
}

int BandStructure::band_of(double E, double slack) const {
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (E >= bands[i].lo - slack && E <= bands[i].hi + slack) return int(i);
  return -1;
}

BandStructure band_structure(const PeriodicPotential& V, double tol) {
  if (!(tol > 0)) throw DomainError("band_structure: tol must be positive");
  const VectorXd delta = discriminant_coeffs(V);
  const double lo = V.values.minCoeff() - 3.0;
  const double hi = V.values.maxCoeff() + 3.0;

  // critical points of Delta split [lo, hi] into monotone pieces
  const std::vector<double> crit = poly_real_roots(polyder(delta), lo, hi, tol);
  std::vector<double> nodes;
  nodes.push_back(lo);
  for (double c : crit)
    if (c > nodes.back() + tol) nodes.push_back(c);
  nodes.push_back(hi);

  const double scale = std::max(1.0, delta.cwiseAbs().maxCoeff());
  const double touch = 1e-9 * scale;

  struct Touch {
    double x;
    double target;
  };
  std::vector<double> edges;
  std::vector<Touch> touches;
  for (double target : {2.0, -2.0}) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double u = nodes[i], v = nodes[i + 1];
      const double fu = polyval(delta, u) - target;
      const double fv = polyval(delta, v) - target;
      if (std::abs(fu) <= touch || std::abs(fv) <= touch) continue;  // handled as touches below
      if ((fu < 0) != (fv < 0)) {
        VectorXd shifted = delta;
        shifted[0] -= target;
        edges.push_back(bisect_root(shifted, u, v, tol));
      }
    }
    for (double c : crit)
      if (std::abs(polyval(delta, c) - target) <= touch) touches.push_back({c, target});
  }
  std::sort(edges.begin(), edges.end());

  if (edges.size() % 2 != 0) {
    std::ostringstream os;
    os << "band_structure: odd edge count for Delta coefficients [";
    for (Index i = 0; i < delta.size(); ++i) os << (i ? ", " : "") << delta[i];
    os << "]";
    throw ConvergenceError(os.str());
  }

  BandStructure bs;
  for (std::size_t i = 0; i + 1 < edges.size(); i += 2) {
    BandStructure::Band b;
    b.lo = edges[i];
    b.hi = edges[i + 1];
    const double mid = 0.5 * (b.lo + b.hi);
    if (std::abs(polyval(delta, mid)) > 2.0 + 1e-6 * scale) {
      std::ostringstream os;
      os << "band_structure: interval [" << b.lo << ", " << b.hi
         << "] fails |Delta| <= 2 at its midpoint";
      throw ConvergenceError(os.str());
    }
    bs.bands.push_back(b);
  }
  for (const Touch& t : touches) {
    const int bi = bs.band_of(t.x, tol);
    if (bi >= 0 && t.x > bs.bands[bi].lo + tol && t.x < bs.bands[bi].hi - tol)
      bs.bands[bi].closed_gaps.push_back(t.x);
  }
  for (auto& b : bs.bands) std::sort(b.closed_gaps.begin(), b.closed_gaps.end());
  bs.edges = edges;
  return bs;
}

double quasimomentum(double E, const PeriodicPotential& V, const BandStructure& bs) {
  const int bi = bs.band_of(E, 1e-12);
  if (bi < 0) throw DomainError("quasimomentum: E outside the essential spectrum");
  const double p = double(V.period());
  const auto& band = bs.bands[std::size_t(bi)];
  // half-waves below this band: each band l holds 1 + #closed gaps of them
  Index m_start = 0;
  for (int l = 0; l < bi; ++l) m_start += 1 + Index(bs.bands[std::size_t(l)].closed_gaps.size());
  Index s = 0;  // segment inside the band
  for (double g : band.closed_gaps)
    if (E > g) ++s;
  // local phase Psi grows 0 -> (c_i + 1) pi across the band; sigma flips the
  // discriminant so each segment starts at +2
  const double sigma0 = std::real(discriminant(Complex(band.lo, 0.0), V)) > 0 ? 1.0 : -1.0;
  const double sigma = (s % 2 == 0) ? sigma0 : -sigma0;
  const double d = std::real(discriminant(Complex(E, 0.0), V));
  const double psi = double(s) * M_PI + std::acos(std::clamp(sigma * d / 2.0, -1.0, 1.0));
  // orientation: 2cos(p theta) = Delta fixes whether theta ascends or
  // descends through the band's target interval
  const bool ascending = sigma0 == ((m_start % 2 == 0) ? 1.0 : -1.0);
  const Index segs = 1 + Index(band.closed_gaps.size());
  const double theta =
      ascending ? (double(m_start) * M_PI + psi) / p
                : (double(m_start + segs) * M_PI - psi) / p;
  return theta;
}

double quasimomentum(double E, const PeriodicPotential& V) {
  return quasimomentum(E, V, band_structure(V));
}

EdgeClassification classify_band_edge(double E0, Index j, const PeriodicPotential& V) {
  const Index p = V.period();
  if (j < 0 || j >= p) throw DomainError("classify_band_edge: j outside [0, p)");
  const Matrix2c M = monodromy(Complex(E0, 0.0), 0, V);
  const double delta = std::real(M.trace());
  if (std::abs(std::abs(delta) - 2.0) > 1e-8 * std::max(1.0, std::abs(delta)))
    throw DomainError("classify_band_edge: |Delta(E0)| != 2, not a band edge");

  EdgeClassification out;
  out.edge = E0;
  out.j = j;
  out.rho = delta > 0 ? 1.0 : -1.0;  // at an edge rho = 1/rho = Delta/2
  out.a0_pm1 = std::real(M(1, 0));
  const double a0_p = std::real(M(0, 0));

  // top row of T_j ... T_0 gives (a_{j+1}, b_{j+1})
  Matrix2c P = Matrix2c::Identity();
  for (Index l = 0; l <= j; ++l) P = transfer_matrix(Complex(E0, 0.0), l, V) * P;
  out.a_j1 = std::real(P(0, 0));
  out.b_j1 = std::real(P(0, 1));
  out.d_j1 = out.a_j1 * (a0_p - 1.0 / out.rho) + out.b_j1 * out.a0_pm1;

  const double s = std::max({1.0, std::abs(out.a_j1), std::abs(out.b_j1)});
  const double s2 = std::max({1.0, std::abs(a0_p), std::abs(std::real(M(1, 1)))});
  const bool a_zero = std::abs(out.a0_pm1) < 1e-8 * s2;
  const bool a_gray = !a_zero && std::abs(out.a0_pm1) < 1e-6 * s2;
  const bool d_zero = std::abs(out.d_j1) < 1e-8 * s;
  const bool d_gray = !d_zero && std::abs(out.d_j1) < 1e-6 * s;

  if (a_gray || (!a_zero && d_gray))
    out.kind = EdgeCase::Indeterminate;
  else if (!a_zero && d_zero)
    out.kind = EdgeCase::NonGeneric;
  else
    out.kind = EdgeCase::Generic;
  return out;
}

const char* to_string(EdgeCase c) {
  switch (c) {
    case EdgeCase::Generic: return "generic";
    case EdgeCase::NonGeneric: return "nongeneric";
    default: return "indeterminate";
  }
}

}  // namespace specres
