#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "chlab/geometry.hpp"
#include "chlab/quadrature.hpp"

namespace chlab {

/// Orthonormal polynomials pi_0..pi_N of the discrete measure sum_q w_q h(z_q) delta_{z_q}.
///
/// Built by Arnoldi on the weighted node vectors in the frame t = (z - center) / scale.
/// The Hessenberg matrix of that process is the recurrence
///   t pi_j(t) = sum_{i <= j+1} H(i, j) pi_i(t),
/// which is also how values at arbitrary points are computed.
struct OrthonormalBasis {
  int max_degree = 0;
  Complex center;
  double scale = 1.0;
  /// Row j holds the coefficients of pi_j in powers of t (column k is t^k).
  Eigen::MatrixXcd coefficients;
  /// (N+2) x (N+1) upper Hessenberg recurrence matrix.
  Eigen::MatrixXcd recurrence;
  /// Row q, column j: sqrt(m_q) pi_j(z_q). Columns are orthonormal in C^Q.
  Eigen::MatrixXcd weighted_values;
  std::vector<Complex> nodes;
  /// m_q = w_q h(z_q)
  std::vector<double> masses;
  double total_mass = 0.0;
  /// max |G - I| over the Gram matrix of weighted_values.
  double defect = 0.0;

  Complex to_frame(Complex z) const { return (z - center) / scale; }
  /// pi_j(z_q) without the mass factor.
  Complex node_value(std::size_t q, int j) const;
};

OrthonormalBasis compute_basis(const QuadratureRule& rule, const WeightSpec& weight, int max_degree);

/// (pi_0(z), ..., pi_n(z))
std::vector<Complex> orthonormal_values(const OrthonormalBasis& basis, Complex z, int n);

/// K_n(z, z) = sum_{j <= n} |pi_j(z)|^2
double kernel_diag(const OrthonormalBasis& basis, Complex z, int n);

/// lambda_n(nu, 2, z) = 1 / K_n(z, z)
double christoffel_p2(const OrthonormalBasis& basis, Complex z, int n);

/// Value of sum_k c_k t^k at z, with t in the basis frame.
Complex evaluate_in_frame(const OrthonormalBasis& basis, const Eigen::VectorXcd& coeffs, Complex z);

/// Header comment lines with center, scale, N and defect, then "degree,k,re,im" rows.
void write_basis_csv(const OrthonormalBasis& basis, const std::filesystem::path& path);

}  // namespace chlab
