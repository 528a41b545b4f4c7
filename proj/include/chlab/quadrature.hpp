#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chlab/geometry.hpp"

namespace chlab {

struct QuadratureOptions {
  /// Relative accuracy requested on the test integrands {1, |z|^2, prod |z - z_j|^alpha_j}.
  double target_accuracy = 1e-10;
  /// Total polynomial degree in (x, y) integrated exactly (or to rounding) by regular
  /// cells. Christoffel computations of degree n need at least 2n.
  int exact_degree = 80;
  std::size_t node_budget = 2'000'000;
  /// Cusp strips closer to the tip than the point where the dropped mass
  /// int_0^x 2 exp(-1/t) dt falls below cusp_tip_mass * area are omitted.
  double cusp_tip_mass = 1e-30;
};

/// Positive area quadrature on a domain: sum_q w_q f(z_q) ~ int_G f dm.
struct QuadratureRule {
  std::vector<Complex> nodes;
  std::vector<double> weights;
  /// Deepest geometric grading level used toward a singular point.
  int refinement_level = 0;
  /// Estimated absolute error contributed by each graded singular cell.
  std::vector<double> cell_errors;
  double target_accuracy = 0.0;
  /// Max relative deviation on the test integrands against a refined companion rule.
  double estimated_error = 0.0;
  /// Analytic bound on the mass omitted near a cusp tip (0 if none).
  double omitted_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

QuadratureRule build_rule(const Domain& domain, const WeightSpec& weight,
                          const QuadratureOptions& options = {});

/// sum_q w_q f(z_q); throws NonFiniteValue naming the first node with a non-finite value.
Complex integrate(const QuadratureRule& rule, const std::function<Complex(Complex)>& f);

/// sum_q w_q h(z_q) f(z_q).
Complex integrate_weighted(const QuadratureRule& rule, const WeightSpec& weight,
                           const std::function<Complex(Complex)>& f);

/// w_q h(z_q) for every node.
std::vector<double> weighted_masses(const QuadratureRule& rule, const WeightSpec& weight);

/// CSV with header "x,y,w"; values written with 17 significant digits.
void write_rule_csv(const QuadratureRule& rule, const std::filesystem::path& path);
QuadratureRule read_rule_csv(const std::filesystem::path& path);

/// A point toward which a plane rule is refined down to the given cell size.
struct GradingPoint {
  Complex point;
  double min_cell = 0.0;
};

/// Tensor Gauss rule on the square centered at `center` with half-width `half_width`,
/// quadtree-refined toward each grading point: a cell is split while it lies within
/// one cell width of a grading point and is larger than that point's min_cell.
QuadratureRule build_plane_rule(Complex center, double half_width,
                                std::span<const GradingPoint> grading, int gauss_points = 10);

struct ScalingReport {
  double alpha = 0.0;
  double beta = 0.0;
  Complex z1;  // z'
  Complex z2;  // z''
  std::vector<double> deltas;
  std::vector<double> integrals;   // I(delta)
  std::vector<double> normalized;  // I(delta) delta^(beta-2) (|z'-z''| + delta)^(-alpha)
  double max_over_min = 0.0;
  bool pass = false;
};

/// Numerical check that
///   I(delta) = int_C (|z - z''| + delta)^(-beta) |z - z'|^alpha dm(z)
/// scales like delta^(2-beta) (|z' - z''| + delta)^alpha over the given deltas.
/// PASS when the normalized values stay within a factor `bound` of each other.
ScalingReport check_lemma21_scaling(double alpha, double beta, Complex z1, Complex z2,
                                    std::span<const double> deltas, double bound = 20.0);

}  // namespace chlab
