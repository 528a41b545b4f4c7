#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "chlab/geometry.hpp"

namespace chlab {

/// Exterior Green's function with pole at infinity, g(z) = sum_k q_k log|z - y_k| + c0,
/// fitted by charge simulation so that g ~ 0 on the boundary.
struct GreenModel {
  std::vector<Complex> charges;
  std::vector<double> strengths;  // sum to 1
  double offset = 0.0;            // c0 = -log(capacity)
  /// max |g| over the collocation points and the midpoints between them
  double residual = 0.0;
  double tolerance = 0.0;
  std::size_t collocation_count = 0;

  double capacity() const;
};

GreenModel fit_green(const Domain& domain, int n_charges, int n_colloc, double tol);

/// g(z) for z outside the domain; interior points are rejected.
double eval_green(const GreenModel& model, const Domain& domain, Complex z);
/// g(z) without the exterior check.
double eval_green_unchecked(const GreenModel& model, Complex z);
/// (dg/dx, dg/dy) packed as a complex number.
Complex green_gradient(const GreenModel& model, Complex z);

struct LevelCurve {
  double delta = 0.0;
  std::vector<Complex> points;
  /// ray angle (about the centroid) of every point
  std::vector<double> angles;
  int dropped = 0;
};

/// M points of {g = log(1 + delta)}, one per boundary sample, found along rays from the centroid.
LevelCurve level_curve(const GreenModel& model, const Domain& domain, double delta, int M);

/// Distance from boundary points to one level curve, with the sampled curves cached.
class LevelDistance {
 public:
  LevelDistance(const GreenModel& model, const Domain& domain, double delta);
  double operator()(Complex z);

 private:
  const LevelCurve& curve(int m);
  double refine(Complex z, const LevelCurve& c) const;

  const GreenModel* model_;
  const Domain* domain_;
  double delta_;
  std::map<int, LevelCurve> curves_;
};

/// rho_delta(z) = dist(z, L_delta) for a boundary point z.
double rho(const GreenModel& model, const Domain& domain, Complex z, double delta);

void write_level_curve_csv(const LevelCurve& curve, const std::filesystem::path& path);
void write_green_model_csv(const GreenModel& model, const std::filesystem::path& path);

}  // namespace chlab
