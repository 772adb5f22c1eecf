#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace specres {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::VectorXd;

/// Evaluation landed too close to a pole of a rational function; the caller
/// (typically a contour routine) is expected to re-route rather than ingest
/// a huge float.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, Index pole_index, Complex where)
      : std::runtime_error(what), pole_index(pole_index), where(where) {}
  Index pole_index;
  Complex where;
};

/// Input outside the mathematical domain of an operation (point on a branch
/// cut, energy outside the spectrum, malformed region, ...).
class DomainError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge; the message names the offender.
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Real periodic sequence V(n) = values[n mod p], defined for all n >= 0.
struct PeriodicPotential {
  VectorXd values;

  PeriodicPotential() : values(VectorXd::Zero(1)) {}
  explicit PeriodicPotential(VectorXd v) : values(std::move(v)) {
    if (values.size() < 1) throw DomainError("potential period must be >= 1");
    if (!values.allFinite()) throw DomainError("potential values must be finite");
  }
  PeriodicPotential(std::initializer_list<double> v)
      : PeriodicPotential(Eigen::Map<const VectorXd>(v.begin(), Index(v.size()))) {}

  Index period() const { return values.size(); }
  double operator()(Index n) const { return values[n % values.size()]; }

  PeriodicPotential negated() const { return PeriodicPotential(VectorXd(-values)); }
};

/// Pairwise (cascade) summation of f(lo..hi-1) in a fixed association order.
/// Deterministic across thread counts; error grows like log(n) * eps.
template <class T, class TermFn>
T pairwise_sum(Index lo, Index hi, TermFn&& f) {
  if (hi - lo <= 16) {
    T s{};
    for (Index i = lo; i < hi; ++i) s += f(i);
    return s;
  }
  const Index mid = lo + (hi - lo) / 2;
  return pairwise_sum<T>(lo, mid, f) + pairwise_sum<T>(mid, hi, f);
}

inline double sqr(double x) { return x * x; }

}  // namespace specres
