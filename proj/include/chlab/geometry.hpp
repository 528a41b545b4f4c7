#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace chlab {

using Complex = std::complex<double>;

enum class DomainKind { disk, ellipse, polygon, cusp, custom };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct BoundingBox {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;
};

/// Closed Jordan curve, either given by a closed-form 1-periodic map t -> gamma(t)
/// or by a counterclockwise vertex list traversed at uniform arc-length speed.
///
/// Every curve carries a dense reference polyline used for membership and
/// distance queries; for polylines the reference is the vertex list itself.
class BoundaryCurve {
 public:
  using Parameterization = std::function<Complex(double)>;

  BoundaryCurve(Parameterization gamma, std::size_t reference_samples);
  explicit BoundaryCurve(std::vector<Complex> vertices);

  /// gamma(t), with t taken modulo 1.
  Complex operator()(double t) const;

  bool is_polyline() const { return !vertices_.empty(); }
  std::span<const Complex> vertices() const { return vertices_; }
  std::span<const Complex> reference() const { return reference_; }
  /// Parameters of the reference samples (non-decreasing in [0,1)).
  std::span<const double> reference_parameters() const { return reference_t_; }

  /// Shoelace area of the reference polyline; positive for counterclockwise curves.
  double signed_area() const;

 private:
  Parameterization gamma_;
  std::vector<Complex> vertices_;
  std::vector<double> cumulative_length_;  // polyline only, normalized to [0,1]
  std::vector<Complex> reference_;
  std::vector<double> reference_t_;
};

/// Shape parameters for the catalog. Only the fields relevant to a kind are read.
struct DomainParams {
  double radius = 1.0;             // disk
  double a = 1.0;                  // ellipse semi-major axis (along x)
  double b = 1.0;                  // ellipse semi-minor axis
  Complex center{0.0, 0.0};        // disk, ellipse
  std::vector<Complex> vertices;   // polygon, custom
};

class Domain {
 public:
  Domain(DomainKind kind, DomainParams params, BoundaryCurve boundary);

  DomainKind kind() const { return kind_; }
  const DomainParams& params() const { return params_; }
  const BoundaryCurve& boundary() const { return boundary_; }

  Complex centroid() const { return centroid_; }
  double diameter() const { return diameter_; }
  double area() const { return area_; }
  const BoundingBox& bbox() const { return bbox_; }

  /// Polygon vertices whose interior angle differs from pi; empty for smooth kinds.
  /// The cusp tip (origin) and the two right-hand corners of G* are reported for the cusp.
  const std::vector<Complex>& corners() const { return corners_; }

  /// Distance from z to the true boundary (closed-form curves are refined
  /// beyond the reference polyline).
  double distance_to_boundary(Complex z) const;
  /// Curve parameter of the boundary point nearest to z.
  double nearest_parameter(Complex z) const;

  /// Analytic area when known (disk, ellipse, polygon, cusp); otherwise the shoelace area.
  double analytic_area() const;
  /// Analytic membership predicate for the catalog kinds; winding number otherwise.
  bool analytic_contains(Complex z) const;

 private:
  std::size_t nearest_reference_index(Complex z) const;

  DomainKind kind_;
  DomainParams params_;
  BoundaryCurve boundary_;
  Complex centroid_;
  double diameter_ = 0.0;
  double area_ = 0.0;
  BoundingBox bbox_;
  std::vector<Complex> corners_;
};

Domain make_catalog_domain(DomainKind kind, const DomainParams& params = {});
Domain make_disk(double radius, Complex center = {0.0, 0.0});
Domain make_ellipse(double a, double b, Complex center = {0.0, 0.0});
Domain make_polygon(std::vector<Complex> vertices);
Domain make_square(double side, Complex center = {0.0, 0.0});
/// G* = {x+iy : 0 < x < 1, |y| < exp(-1/x)}.
Domain make_cusp();
Domain make_custom_domain(std::vector<Complex> vertices);

/// Reads "x y" pairs, one per line, counterclockwise; '#' lines and blank lines are skipped.
std::vector<Complex> read_vertex_file(const std::filesystem::path& path);

/// M ordered boundary points. Disk and polygon samples are uniform in arc length,
/// ellipse samples are arc-length balanced, cusp samples follow the graded
/// parameterization (dense toward the tip).
std::vector<Complex> sample_boundary(const Domain& domain, std::size_t count);

/// Samples gamma(k/M), k = 0..M-1. Sample sets for M and 2M are nested.
std::vector<Complex> sample_parameter_uniform(const Domain& domain, std::size_t count);

/// Empirical constant of the three-point condition
///   min(diam L', diam L'') <= C |z1 - z2|
/// over all pairs of parameter-uniform samples.
///
/// Subarc diameters are taken over the samples of each subarc, measured as the
/// maximal projected width over a fixed fan of 64 directions, which
/// under-estimates the discrete diameter by at most a factor cos(pi/128).
double estimate_qc_constant(const Domain& domain, std::size_t count);

/// True iff z has winding number 1 with respect to the boundary reference polyline.
/// Points within 1e-12 * diameter of the boundary count as boundary and return false.
bool point_in_domain(const Domain& domain, Complex z);

/// Winding number of a closed polyline around z.
int winding_number(std::span<const Complex> polyline, Complex z);

/// Shoelace signed area of a closed polyline.
double shoelace_area(std::span<const Complex> polyline);

/// True if no two non-adjacent segments of the closed polyline intersect.
bool is_simple_polyline(std::span<const Complex> polyline);

struct Singularity {
  Complex point;
  double exponent = 0.0;
};

/// Generalized Jacobi weight h(z) = h0(z) * prod_j |z - z_j|^alpha_j on G.
class WeightSpec {
 public:
  using Factor = std::function<double(Complex)>;

  /// h == 1.
  WeightSpec();
  WeightSpec(Factor h0, double h0_bound, std::vector<Singularity> singularities);

  static WeightSpec constant(double value);

  double operator()(Complex z) const { return h0_(z) * singular_part(z); }
  double h0(Complex z) const { return h0_(z); }
  double singular_part(Complex z) const;

  double h0_bound() const { return h0_bound_; }
  std::span<const Singularity> singularities() const { return singularities_; }
  bool is_constant_h0() const { return constant_h0_; }

  /// Same singularities, h0 multiplied by factor.
  WeightSpec scaled(double factor) const;

  /// Throws InvalidArgument unless the weight is admissible on the domain.
  void validate(const Domain& domain) const;

 private:
  Factor h0_;
  double h0_bound_ = 1.0;
  std::vector<Singularity> singularities_;
  bool constant_h0_ = true;
};

}  // namespace chlab
