#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chlab/orthopoly.hpp"
#include "chlab/quadrature.hpp"

namespace chlab {

struct ChristoffelOptions {
  /// Relative objective change that counts as converged (needed twice in a row).
  double tol = 1e-6;
  int max_iter = 200;
  /// Step damping; 0 selects 0.7 for p < 2 and 1 otherwise.
  double damping = 0.0;
  /// Lower limit of the IRLS smoothing parameter.
  double eps_floor = 1e-12;
};

struct ChristoffelResult {
  /// lambda_n(nu, p, z) = sum_q m_q |p_n(z_q)|^p for the stored minimizer.
  double value = 0.0;
  /// Minimizer p_n = sum_j c_j pi_j in the orthonormal basis.
  Eigen::VectorXcd coefficients;
  int iterations = 0;
  double last_relative_change = 0.0;
  double p = 2.0;
  int n = 0;
  Complex z;
  /// Objective after every accepted iteration (starting point first).
  std::vector<double> objective_history;
};

/// Minimizes sum_q w_q h(z_q) |P(z_q)|^p over polynomials of degree <= n with P(z) = 1.
/// The basis must have been computed from the same rule and weight.
ChristoffelResult christoffel_lp(const QuadratureRule& rule, const WeightSpec& weight, const OrthonormalBasis& basis,
                                 Complex z, int n, double p, const ChristoffelOptions& opts = {});

/// |p_n(x)| of the stored minimizer at each point.
std::vector<double> extremal_profile(const OrthonormalBasis& basis, const ChristoffelResult& result,
                                     std::span<const Complex> points);

}  // namespace chlab
