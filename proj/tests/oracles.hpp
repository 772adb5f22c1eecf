#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

constexpr double kPi = 3.14159265358979323846;

// Closed-form spectrum of the free (V = 0) Dirichlet truncation on [0, L]:
// the (L+1) x (L+1) matrix with zero diagonal and unit off-diagonals.
inline double free_eigenvalue(int m, Eigen::Index L) {
  // m = 1 .. L+1, descending in m; returns 2 cos(m pi / (L+2)).
  return 2.0 * std::cos(double(m) * kPi / double(L + 2));
}

inline double free_weight(int m, Eigen::Index L) {
  // |phi_m(L)|^2 = (2/(L+2)) sin^2(m pi/(L+2)) for the normalized eigenvector.
  const double s = std::sin(double(m) * kPi / double(L + 2));
  return 2.0 / double(L + 2) * s * s;
}

// Extended-precision rational sum  sum_k a_k / (lambda_k - E), Kahan-compensated
// in long double, ascending index order.
inline std::complex<double> highprec_rational_sum(const Eigen::VectorXd& lambda,
                                                  const Eigen::VectorXd& a,
                                                  std::complex<double> E) {
  std::complex<long double> sum = 0.0L, comp = 0.0L;
  const std::complex<long double> El(static_cast<long double>(E.real()),
                                     static_cast<long double>(E.imag()));
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const std::complex<long double> term =
        static_cast<long double>(a[k]) / (static_cast<long double>(lambda[k]) - El);
    const std::complex<long double> y = term - comp;
    const std::complex<long double> t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

// Central finite difference of a complex function.
template <class F>
std::complex<double> central_diff(F&& f, std::complex<double> z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

// Polynomial with prescribed complex roots, evaluated straight from its
// factorization (companion-free).
struct FactoredPoly {
  std::vector<std::complex<double>> roots;
  std::complex<double> leading = 1.0;

  std::complex<double> operator()(std::complex<double> z) const {
    std::complex<double> v = leading;
    for (const auto& r : roots) v *= (z - r);
    return v;
  }
  std::complex<double> derivative(std::complex<double> z) const {
    // p'(z) = p(z) * sum 1/(z - r_i); robust product form near roots instead:
    std::complex<double> total = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      std::complex<double> v = leading;
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (j != i) v *= (z - roots[j]);
      total += v;
    }
    return total;
  }
};

// Ordinary least squares y = slope * x + intercept with R^2.
struct LineFit {
  double slope = 0, intercept = 0, r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  const std::size_t n = x.size();
  if (n < 2) return out;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (syy == 0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

}  // namespace oracles
