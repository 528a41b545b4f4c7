#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <regex>
#include <sstream>

#include "chlab/error.hpp"
#include "chlab/experiments.hpp"
#include "doctest.h"

using namespace chlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// adaptive Simpson on [a, b]
double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
  const double m = 0.5 * (a + b);
  const double whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
  const double right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, 0.5 * tol, depth + 1) + simpson(f, m, b, 0.5 * tol, depth + 1);
}

ExperimentConfig unit_disk(int n_min, int n_max, int points) {
  ExperimentConfig c;
  c.domain_kind = DomainKind::disk;
  c.n_min = n_min;
  c.n_max = n_max;
  c.points = points;
  c.green_charges = 32;
  c.green_tol = 1e-10;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "domain.kind = ellipse\n"
      "domain.a = 2\n"
      "domain.b = 1   # trailing comment\n"
      "weight.alpha.1 = 1\n"
      "weight.z.1 = 2, 0\n"
      "weight.alpha.2 = -0.5\n"
      "weight.z.2 = -2\n"
      "p = 1.5\n"
      "n_min = 3\n"
      "n_max = 12\n"
      "points = 10\n"
      "quad_tol = 1e-9\n"
      "spread_max = 40\n"
      "slope_max = 0.3\n"
      "seed = 42\n");
  CHECK(c.domain_kind == DomainKind::ellipse);
  CHECK(c.domain.a == 2.0);
  CHECK(c.domain.b == 1.0);
  REQUIRE(c.singularities.size() == 2);
  CHECK(c.singularities[0].point == Complex(2.0, 0.0));
  CHECK(c.singularities[1].exponent == -0.5);
  CHECK(c.singularities[1].point == Complex(-2.0, 0.0));
  CHECK(c.p == 1.5);
  CHECK(c.n_min == 3);
  CHECK(c.n_max == 12);
  CHECK(c.points == 10);
  CHECK(c.quad_tol == 1e-9);
  CHECK(c.spread_max == 40.0);
  CHECK(c.slope_max == 0.3);
  CHECK(c.seed == 42u);

  const ExperimentConfig sq = parse_config("domain.kind = square\ndomain.side = 3\n");
  CHECK(sq.domain_kind == DomainKind::polygon);
  CHECK(sq.make_domain().area() == doctest::Approx(9.0));

  CHECK_THROWS_AS(parse_config("colour = red\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("p 2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("p = two\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("weight.alpha.2 = 1\nweight.z.2 = 1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_config("weight.alpha.1 = 1\n"), InvalidArgument);

  ExperimentConfig bad;
  bad.n_min = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.n_min = 5;
  bad.n_max = 201;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("shipped configs parse and validate") {
  const std::filesystem::path dir = CHLAB_CONFIG_DIR;
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path().string());
    const ExperimentConfig c = read_config(entry.path());
    CHECK_NOTHROW(c.validate());
    CHECK_NOTHROW(c.make_weight().validate(c.make_domain()));
    ++count;
  }
  CHECK(count >= 5);
}

TEST_CASE("least-squares slope") {
  std::vector<double> x{1.0, 2.0, 5.0, 9.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("unit disk ratio: closed form, symmetry and recomputable rows") {
  ExperimentConfig c = unit_disk(1, 30, 8);
  const RatioReport r = run_theorem1(c);
  CHECK(r.rows.size() == 30 * 8);
  CHECK(r.basis_defect < 1e-8);
  CHECK(r.monotonicity_violations == 0);
  for (const RatioRow& row : r.rows) {
    const double n = row.n;
    const double exact = 2.0 * kPi * n * n / ((n + 1.0) * (n + 2.0));
    CHECK(row.ratio == doctest::Approx(exact).epsilon(1e-6));
    CHECK(row.weight_product == 1.0);
    CHECK(row.ratio == doctest::Approx(row.lambda / (row.rho * row.rho)).epsilon(1e-12));
  }
  // the spread over the range is R_30 / R_1
  CHECK(r.spread == doctest::Approx((2.0 * kPi * 900.0 / (31.0 * 32.0)) / (kPi / 3.0)).epsilon(1e-6));
  for (std::size_t k = 0; k < r.degrees.size(); ++k) {
    CHECK(r.max_ratio_by_n[k] / r.min_ratio_by_n[k] - 1.0 < 1e-6);
  }
}

TEST_CASE("weighted ratio rows recompute from their own columns") {
  ExperimentConfig c;
  c.domain_kind = DomainKind::ellipse;
  c.domain.a = 2.0;
  c.domain.b = 1.0;
  c.singularities = {{{2.0, 0.0}, 1.0}, {{-2.0, 0.0}, -0.5}};
  c.n_min = 4;
  c.n_max = 10;
  c.points = 6;
  c.green_tol = 1e-8;
  const RatioReport r = run_theorem1(c);
  CHECK(r.spread < 50.0);
  const auto dir = std::filesystem::temp_directory_path() / "chlab_exp_ratio";
  std::filesystem::remove_all(dir);
  emit_plots(r, dir);
  std::ifstream in(dir / "ratio.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,x,y,lambda,rho,weight_product,ratio");
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    double v[7];
    char comma;
    ss >> v[0];
    for (int i = 1; i < 7; ++i) ss >> comma >> v[i];
    const Complex z(v[1], v[2]);
    const double prod = std::pow(std::abs(z - 2.0) + v[4], 1.0) * std::pow(std::abs(z + 2.0) + v[4], -0.5);
    CHECK(v[5] == doctest::Approx(prod).epsilon(1e-12));
    CHECK(v[6] == doctest::Approx(v[3] / (v[4] * v[4] * v[5])).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == static_cast<int>(r.rows.size()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("ratio stays bounded for other exponents p") {
  for (double p : {1.0, 3.0}) {
    ExperimentConfig c = unit_disk(2, 6, 3);
    c.p = p;
    const RatioReport r = run_theorem1(c);
    CHECK(r.objective_increases == 0);
    CHECK(r.min_ratio > 0.0);
    CHECK(r.spread < 50.0);
  }
}

TEST_CASE("orthonormal polynomial bounds on the unit disk") {
  ExperimentConfig c = unit_disk(2, 25, 4);
  const OpolyReport r = run_opoly_bounds(c, 2);
  CHECK(r.kernel_violations == 0);
  CHECK(r.min_block_max >= 0.3);
  CHECK(r.pass);
  for (const OpolyRow& row : r.rows) {
    const double n = row.n;
    CHECK(row.abs_pi == doctest::Approx(std::sqrt((n + 1.0) / kPi)).epsilon(1e-8));
    CHECK(row.kernel == doctest::Approx((n + 1.0) * (n + 2.0) / (2.0 * kPi)).epsilon(1e-8));
    CHECK(row.ratio == doctest::Approx(std::sqrt((n + 1.0) / kPi) / n).epsilon(1e-6));
    CHECK(row.abs_pi * row.abs_pi <= row.kernel * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(run_opoly_bounds(c, 1), InvalidArgument);
}

TEST_CASE("cusp decay") {
  ExperimentConfig c;
  c.domain_kind = DomainKind::cusp;
  c.n_min = 8;
  c.n_max = 40;
  const DecayReport r = run_theorem2(c);
  const double area = simpson([](double x) { return x > 0.0 ? 2.0 * std::exp(-1.0 / x) : 0.0; }, 0.0, 1.0, 1e-15);
  CHECK(r.lambda0 == doctest::Approx(area).epsilon(1e-10));
  CHECK(r.diameter == doctest::Approx(std::sqrt(1.0 + std::exp(-2.0))).epsilon(1e-9));
  CHECK(r.lambda_monotone);
  CHECK(r.slope <= -5.0);
  CHECK(r.proxies_decreasing);
  CHECK(proxy_strictly_decreasing(r, 4, 20, 40));
  CHECK(r.pass);
  for (const DecayRow& row : r.rows) {
    const double s = 8.0 * row.n * row.n / r.diameter;
    CHECK(row.proxy2 == doctest::Approx(row.lambda * s * s).epsilon(1e-12));
  }

  ExperimentConfig wrong = unit_disk(1, 3, 4);
  CHECK_THROWS_AS(run_theorem2(wrong), InvalidArgument);
  CHECK_THROWS_AS(run_theorem1(c), InvalidArgument);
}

TEST_CASE("plots: point counts, empty reports, byte-identical reruns") {
  RatioReport r;
  CHECK_THROWS_AS(emit_plots(r, std::filesystem::temp_directory_path() / "chlab_never"), InvalidArgument);
  CHECK_THROWS_AS(emit_plots(DecayReport{}, std::filesystem::temp_directory_path() / "chlab_never"), InvalidArgument);

  ExperimentConfig c = unit_disk(3, 4, 4);
  const auto a = std::filesystem::temp_directory_path() / "chlab_plot_a";
  const auto b = std::filesystem::temp_directory_path() / "chlab_plot_b";
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  emit_plots(run_theorem1(c), a);
  emit_plots(run_theorem1(c), b);
  CHECK(slurp(a / "ratio.csv") == slurp(b / "ratio.csv"));
  CHECK(slurp(a / "ratio.svg") == slurp(b / "ratio.svg"));

  const std::string svg = slurp(a / "ratio.svg");
  const std::regex poly("points=\"([^\"]*)\"");
  int series = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    const std::string pts = (*it)[1];
    CHECK(std::count(pts.begin(), pts.end(), ',') == 2);
    ++series;
  }
  CHECK(series == 2);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("green check on the square") {
  ExperimentConfig c = parse_config("domain.kind = square\ndomain.side = 2\npoints = 6\ngreen.charges = 256\nseed = 3\n");
  const GreenCheckReport r = run_green_check(c);
  CHECK(r.model.residual < 1e-6);
  CHECK(r.probes == 1000);
  CHECK(r.nonpositive_probes == 0);
  CHECK(r.nested);
  // samples landing on a corner are excluded
  CHECK(!r.points.empty());
  CHECK(r.points.size() <= 6);
  const Domain d = c.make_domain();
  for (const Complex& z : r.points) {
    for (const Complex& corner : d.corners()) CHECK(std::abs(z - corner) >= 1e-3 * d.diameter());
  }
}
