#pragma once

// Error-free transformations for dot products and sums in roughly twice the
// working precision.

#include <cmath>
#include <complex>

namespace chlab::detail {

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

/// Accumulates real values as an unevaluated sum hi + lo.
struct CompensatedSum {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    double e = 0.0;
    two_sum(hi, x, hi, e);
    lo += e;
  }
  void add_product(double a, double b) {
    double p = 0.0;
    double e = 0.0;
    two_prod(a, b, p, e);
    add(p);
    lo += e;
  }
  double value() const { return hi + lo; }
};

struct CompensatedComplexSum {
  CompensatedSum re;
  CompensatedSum im;

  void add(std::complex<double> x) {
    re.add(x.real());
    im.add(x.imag());
  }
  /// adds conj(a) * b
  void add_conj_product(std::complex<double> a, std::complex<double> b) {
    re.add_product(a.real(), b.real());
    re.add_product(a.imag(), b.imag());
    im.add_product(a.real(), b.imag());
    im.add_product(-a.imag(), b.real());
  }
  /// adds a * b
  void add_product(std::complex<double> a, std::complex<double> b) {
    re.add_product(a.real(), b.real());
    re.add_product(-a.imag(), b.imag());
    im.add_product(a.real(), b.imag());
    im.add_product(a.imag(), b.real());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace chlab::detail
