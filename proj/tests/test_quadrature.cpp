#include <cmath>
#include <filesystem>
#include <numbers>

#include "chlab/error.hpp"
#include "chlab/quadrature.hpp"
#include "doctest.h"

using namespace chlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Gauss-Legendre on [a, b] with `panels` panels of 20 points, for 1-D oracles.
template <class F>
double gauss_1d(F f, double a, double b, int panels) {
  static const double x[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                               0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                               0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                               0.9931285991850949};
  static const double w[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                               0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                               0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                               0.0176140071391521};
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < 10; ++k) {
      sum += 0.5 * h * w[k] * (f(c - 0.5 * h * x[k]) + f(c + 0.5 * h * x[k]));
    }
  }
  return sum;
}

// Polar oracle for int_{square [-1,1]^2} |z - z0|^alpha dm with z0 on the boundary:
// the radial integral is exact, the angular one is composite Gauss split at corner angles.
double square_singular_oracle(Complex z0, double alpha) {
  auto exit_distance = [&](double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    double t = std::numeric_limits<double>::infinity();
    if (c > 1e-300) t = std::min(t, (1.0 - z0.real()) / c);
    if (c < -1e-300) t = std::min(t, (-1.0 - z0.real()) / c);
    if (s > 1e-300) t = std::min(t, (1.0 - z0.imag()) / s);
    if (s < -1e-300) t = std::min(t, (-1.0 - z0.imag()) / s);
    return std::max(t, 0.0);
  };
  std::vector<double> breaks;
  for (const Complex c : {Complex(1, 1), Complex(-1, 1), Complex(-1, -1), Complex(1, -1)}) {
    if (std::abs(c - z0) > 1e-14) {
      double a = std::arg(c - z0);
      breaks.push_back(a);
      breaks.push_back(a + 2 * kPi);
      breaks.push_back(a - 2 * kPi);
    }
  }
  breaks.push_back(-kPi);
  breaks.push_back(kPi);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(breaks[i], -kPi);
    const double b = std::min(breaks[i + 1], kPi);
    if (b <= a) continue;
    total += gauss_1d([&](double phi) { return std::pow(exit_distance(phi), alpha + 2) / (alpha + 2); }, a, b, 40);
  }
  return total;
}

}  // namespace

TEST_CASE("unweighted unit disk rule") {
  QuadratureOptions opts;
  opts.target_accuracy = 1e-10;
  const QuadratureRule rule = build_rule(make_disk(1.0), WeightSpec{}, opts);
  CHECK(rule.total_weight() == doctest::Approx(kPi).epsilon(1e-10));
  const Complex m2 = integrate(rule, [](Complex z) { return Complex(std::norm(z), 0.0); });
  CHECK(m2.real() == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  CHECK(rule.estimated_error <= 1e-10);
  for (double w : rule.weights) REQUIRE(w > 0.0);

  SUBCASE("integrate") {
    CHECK(integrate(rule, [](Complex) { return Complex(1.0); }).real() == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(std::abs(integrate(rule, [](Complex z) { return z; })) < 1e-9);
    const Complex v = integrate(rule, [](Complex z) { return z * z * std::conj(z) * std::conj(z); });
    CHECK(v.real() == doctest::Approx(kPi / 3.0).epsilon(1e-8));
  }
  SUBCASE("monomial moments") {
    for (int j = 0; j <= 12; ++j) {
      for (int k = 0; k <= 12; ++k) {
        const Complex v = integrate(rule, [&](Complex z) { return std::pow(z, j) * std::pow(std::conj(z), k); });
        if (j == k) {
          CHECK(v.real() == doctest::Approx(kPi / (j + 1)).epsilon(1e-8));
        } else {
          CHECK(std::abs(v) <= 1e-9 * kPi);
        }
      }
    }
  }
  SUBCASE("non-finite integrand names the node") {
    try {
      integrate(rule, [](Complex z) { return Complex(1.0 / (z.real() > 0.5 ? 0.0 : 1.0), 0.0); });
      FAIL("expected NonFiniteValue");
    } catch (const NonFiniteValue& e) {
      CHECK(rule.nodes[e.node_index].real() > 0.5);
    }
  }
}

TEST_CASE("singular weight on the unit disk matches a polar oracle centered at the singularity") {
  WeightSpec w([](Complex) { return 1.0; }, 1.0, {{{1.0, 0.0}, -1.0}});
  QuadratureOptions opts;
  opts.target_accuracy = 1e-8;
  const QuadratureRule rule = build_rule(make_disk(1.0), w, opts);
  const double value = integrate(rule, [](Complex z) { return Complex(1.0 / std::abs(z - 1.0), 0.0); }).real();
  // zeta = 1 + r e^{i phi}: int_{pi/2}^{3pi/2} int_0^{-2 cos phi} r^{-1} r dr dphi
  const double oracle = gauss_1d([](double phi) { return -2.0 * std::cos(phi); }, kPi / 2, 3 * kPi / 2, 8);
  CHECK(std::isfinite(value));
  CHECK(std::abs(value - oracle) <= 1e-6 * oracle);
  CHECK(rule.refinement_level > 5);
  const Domain disk = make_disk(1.0);
  for (const Complex& z : rule.nodes) REQUIRE(point_in_domain(disk, z));
}

TEST_CASE("ellipse rule with two boundary singularities") {
  const Domain ell = make_ellipse(2.0, 1.0);
  WeightSpec w([](Complex) { return 1.0; }, 1.0, {{{2.0, 0.0}, 1.0}, {{-2.0, 0.0}, -0.5}});
  QuadratureOptions opts;
  opts.target_accuracy = 1e-9;
  const QuadratureRule rule = build_rule(ell, w, opts);
  CHECK(rule.total_weight() == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  for (std::size_t q = 0; q < rule.size(); q += 7) REQUIRE(point_in_domain(ell, rule.nodes[q]));
  // refined reference rule
  QuadratureOptions fine = opts;
  fine.target_accuracy = 1e-11;
  fine.exact_degree = 120;
  const QuadratureRule ref = build_rule(ell, w, fine);
  const auto f = [&](Complex z) { return Complex(w(z), 0.0); };
  const double a = integrate(rule, f).real();
  const double b = integrate(ref, f).real();
  CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
}

TEST_CASE("square rule with singularities at a corner and an edge midpoint") {
  const Domain sq = make_square(2.0);
  for (const Complex z0 : {Complex(1.0, 1.0), Complex(1.0, 0.0)}) {
    for (double alpha : {-1.5, -0.5, 1.0}) {
      WeightSpec w([](Complex) { return 1.0; }, 1.0, {{z0, alpha}});
      QuadratureOptions opts;
      opts.target_accuracy = 1e-8;
      opts.exact_degree = 20;
      const QuadratureRule rule = build_rule(sq, w, opts);
      const double value = integrate(rule, [&](Complex z) { return Complex(w(z), 0.0); }).real();
      const double oracle = square_singular_oracle(z0, alpha);
      CHECK_MESSAGE(std::abs(value - oracle) <= 1e-7 * oracle, "z0=" << z0 << " alpha=" << alpha);
      CHECK(rule.total_weight() == doctest::Approx(4.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("cusp rule") {
  const Domain cusp = make_cusp();
  QuadratureOptions opts;
  opts.target_accuracy = 1e-10;
  const QuadratureRule rule = build_rule(cusp, WeightSpec{}, opts);
  // 1-D oracle for int_0^1 2 exp(-1/x) dx on a graded panel sequence
  double area = 0.0;
  double second = 0.0;
  for (double x0 = 0.005; x0 < 1.0; x0 *= 1.25) {
    const double x1 = std::min(1.0, x0 * 1.25);
    area += gauss_1d([](double x) { return 2.0 * std::exp(-1.0 / x); }, x0, x1, 4);
    // int |z|^2 over the strip: 2 x^2 H + (2/3) H^3, H = exp(-1/x)
    second += gauss_1d([](double x) {
      const double h = std::exp(-1.0 / x);
      return 2.0 * x * x * h + 2.0 / 3.0 * h * h * h;
    }, x0, x1, 4);
  }
  CHECK(area == doctest::Approx(0.296991013551844).epsilon(1e-12));
  CHECK(rule.total_weight() == doctest::Approx(area).epsilon(1e-10));
  CHECK(integrate(rule, [](Complex z) { return Complex(std::norm(z)); }).real() ==
        doctest::Approx(second).epsilon(1e-10));
  CHECK(rule.omitted_mass < 1e-25);
  for (std::size_t q = 0; q < rule.size(); q += 11) REQUIRE(point_in_domain(cusp, rule.nodes[q]));

  WeightSpec sing([](Complex) { return 1.0; }, 1.0, {{{0.0, 0.0}, -1.0}});
  CHECK_THROWS_AS(build_rule(cusp, sing, opts), InvalidArgument);
}

TEST_CASE("preconditions and budget") {
  QuadratureOptions bad;
  bad.target_accuracy = 1e-2;
  CHECK_THROWS_AS(build_rule(make_disk(1.0), WeightSpec{}, bad), InvalidArgument);

  QuadratureOptions tiny;
  tiny.node_budget = 1000;
  try {
    build_rule(make_disk(1.0), WeightSpec{}, tiny);
    FAIL("expected budget failure");
  } catch (const QuadratureBudgetExceeded&) {
  }

  // a larger budget never makes the estimate worse
  WeightSpec w([](Complex) { return 1.0; }, 1.0, {{{1.0, 0.0}, -1.0}});
  QuadratureOptions a;
  a.target_accuracy = 1e-8;
  a.node_budget = 400'000;
  QuadratureOptions b = a;
  b.node_budget = 800'000;
  CHECK(build_rule(make_disk(1.0), w, b).estimated_error <= build_rule(make_disk(1.0), w, a).estimated_error);
}

TEST_CASE("csv round trip preserves the total weight") {
  const QuadratureRule rule = build_rule(make_ellipse(2.0, 1.0), WeightSpec{}, {});
  const auto path = std::filesystem::temp_directory_path() / "chlab_rule_roundtrip.csv";
  write_rule_csv(rule, path);
  const QuadratureRule back = read_rule_csv(path);
  REQUIRE(back.size() == rule.size());
  CHECK(std::abs(back.total_weight() - rule.total_weight()) <= 1e-15 * rule.total_weight());
  std::filesystem::remove(path);
}

TEST_CASE("singular integral scaling") {
  SUBCASE("alpha = 0, beta = 4 reproduces pi/3 delta^-2") {
    const std::vector<double> deltas{0.1, 0.05, 0.025};
    const ScalingReport rep = check_lemma21_scaling(0.0, 4.0, {0, 0}, {0, 0}, deltas);
    for (double v : rep.normalized) CHECK(v == doctest::Approx(kPi / 3.0).epsilon(1e-6));
    CHECK(rep.max_over_min <= 2.0);
    CHECK(rep.pass);
  }
  SUBCASE("alpha = 1, beta = 5, separated points") {
    const std::vector<double> deltas{0.1};
    const ScalingReport rep = check_lemma21_scaling(1.0, 5.0, {0, 0}, {1, 0}, deltas);
    CHECK(std::isfinite(rep.normalized[0]));
    CHECK(rep.normalized[0] > 0.0);
  }
  SUBCASE("alpha = -1, beta = 4, coincident points") {
    const std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
    const ScalingReport rep = check_lemma21_scaling(-1.0, 4.0, {0, 0}, {0, 0}, deltas);
    CHECK(rep.pass);
    // exact: 2 pi int_0^inf (r + d)^-4 dr = 2 pi / (3 d^3), normalized by d^2 (d)^{+1}
    for (double v : rep.normalized) CHECK(v == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(check_lemma21_scaling(-2.5, 5.0, {0, 0}, {0, 0}, std::vector<double>{0.1}), InvalidArgument);
  CHECK_THROWS_AS(check_lemma21_scaling(1.0, 3.0, {0, 0}, {0, 0}, std::vector<double>{0.1}), InvalidArgument);
}
