#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chlab/christoffel.hpp"
#include "chlab/geometry.hpp"
#include "chlab/greenmap.hpp"
#include "chlab/orthopoly.hpp"
#include "chlab/quadrature.hpp"

namespace chlab {

struct ExperimentConfig {
  DomainKind domain_kind = DomainKind::disk;
  DomainParams domain;
  /// Vertex file for polygon/custom kinds (read when domain.vertices is empty).
  std::filesystem::path vertex_file;

  double h0 = 1.0;
  std::vector<Singularity> singularities;

  double p = 2.0;
  int n_min = 4;
  int n_max = 40;
  /// Number of boundary evaluation points; ignored when explicit points are given.
  int points = 24;
  std::vector<Complex> explicit_points;
  /// Evaluation points closer than this fraction of the diameter to a corner are skipped.
  double corner_exclusion = 1e-3;

  double quad_tol = 1e-10;
  int green_charges = 128;
  double green_tol = 1e-6;

  // pass thresholds, reported rather than built into the library
  double spread_max = 50.0;
  double slope_max = 0.25;
  double decay_slope_max = -5.0;
  int k_factor = 2;
  double s_floor = 0.3;

  int qc_samples = 1024;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;

  Domain make_domain() const;
  WeightSpec make_weight() const;
  /// Throws InvalidArgument on inconsistent settings.
  void validate() const;
};

/// Plain-text "key = value" configuration; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig read_config(const std::filesystem::path& path);

/// Everything shared by the (n, z) cells of one experiment.
struct ExperimentSetup {
  Domain domain;
  WeightSpec weight;
  QuadratureRule rule;
  OrthonormalBasis basis;
};

ExperimentSetup prepare(const ExperimentConfig& config, int max_degree);

/// Boundary evaluation points of a config (corner neighborhoods removed).
std::vector<Complex> evaluation_points(const ExperimentConfig& config, const Domain& domain);

/// prod_j (|z - z_j| + rho)^alpha_j
double weight_product(const WeightSpec& weight, Complex z, double rho, double power = 1.0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct RatioRow {
  int n = 0;
  Complex z;
  double lambda = 0.0;
  double rho = 0.0;
  double weight_product = 0.0;
  double ratio = 0.0;
};

struct RatioReport {
  double p = 2.0;
  std::vector<RatioRow> rows;
  std::vector<int> degrees;
  std::vector<double> max_ratio_by_n;
  std::vector<double> min_ratio_by_n;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;
  /// slope of log max_z R against log n over the whole range (the pass check)
  double slope = 0.0;
  /// the same over the top half of the range, reported only
  double slope_top = 0.0;
  double basis_defect = 0.0;
  /// rows where lambda_n(z) exceeded lambda_{n-1}(z)
  int monotonicity_violations = 0;
  /// accepted IRLS iterations that increased the objective
  int objective_increases = 0;
  int skipped_points = 0;
  bool pass = false;
};

RatioReport run_theorem1(const ExperimentConfig& config);

struct OpolyRow {
  int n = 0;
  Complex z;
  double abs_pi = 0.0;
  double kernel = 0.0;  // K_n(z, z)
  double rho = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;   // abs_pi / envelope
  double block_max = 0.0;  // max_{n < j <= k n} sqrt(j) rho_{1/j}(z) |pi_j(z)|
};

struct OpolyReport {
  int k_factor = 2;
  std::vector<OpolyRow> rows;
  double max_ratio = 0.0;
  double min_block_max = 0.0;
  double basis_defect = 0.0;
  /// rows with |pi_n(z)|^2 > K_n(z, z)
  int kernel_violations = 0;
  bool pass = false;
};

OpolyReport run_opoly_bounds(const ExperimentConfig& config, int k_factor);

struct DecayRow {
  int n = 0;
  double lambda = 0.0;
  /// lambda_n (8 n^2 / diam)^k for k = 1, 2, 4
  double proxy1 = 0.0;
  double proxy2 = 0.0;
  double proxy4 = 0.0;
};

struct DecayReport {
  double p = 2.0;
  double diameter = 0.0;
  double area = 0.0;
  /// lambda_0, which equals the mass of the measure
  double lambda0 = 0.0;
  std::vector<DecayRow> rows;
  /// slope of log lambda_n against log n over the whole range and over its top half
  double slope = 0.0;
  double slope_top = 0.0;
  /// first degree of the top half
  int top_from = 0;
  bool proxies_decreasing = false;
  bool lambda_monotone = false;
  double basis_defect = 0.0;
  int objective_increases = 0;
  bool pass = false;
};

DecayReport run_theorem2(const ExperimentConfig& config);

/// True if every proxy of order k strictly decreases over rows with n in [from, to].
bool proxy_strictly_decreasing(const DecayReport& report, int k, int from, int to);

struct GreenCheckReport {
  GreenModel model;
  double capacity = 0.0;
  int probes = 0;
  int nonpositive_probes = 0;
  std::vector<double> deltas;
  /// rho_delta at every evaluation point, one vector per delta
  std::vector<std::vector<double>> rho;
  std::vector<Complex> points;
  bool nested = false;
};

GreenCheckReport run_green_check(const ExperimentConfig& config);

/// CSV and SVG files named after the report type inside `dir`; returns the written paths.
std::vector<std::filesystem::path> emit_plots(const RatioReport& report, const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_plots(const OpolyReport& report, const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_plots(const DecayReport& report, const std::filesystem::path& dir);

}  // namespace chlab
