#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "chlab/error.hpp"
#include "chlab/orthopoly.hpp"
#include "doctest.h"

using namespace chlab;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureRule disk_rule(double radius, int degree) {
  QuadratureOptions o;
  o.exact_degree = degree;
  return build_rule(make_disk(radius), WeightSpec{}, o);
}

// p(zeta) = 1 + (zeta - z) r(zeta) with random r of degree n-1
std::vector<Complex> random_feasible(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> r(static_cast<std::size_t>(std::max(n, 1)));
  for (Complex& c : r) c = Complex(g(rng), g(rng)) * 0.3;
  return r;
}

Complex eval_feasible(const std::vector<Complex>& r, Complex z, Complex zeta) {
  Complex acc{0.0, 0.0};
  for (auto it = r.rbegin(); it != r.rend(); ++it) acc = acc * zeta + *it;
  return 1.0 + (zeta - z) * acc;
}

}  // namespace

TEST_CASE("unit disk: classical Bergman polynomials") {
  const QuadratureRule rule = disk_rule(1.0, 24);
  const OrthonormalBasis b = compute_basis(rule, WeightSpec{}, 5);
  CHECK(b.defect <= 1e-12);
  CHECK(std::abs(b.center) < 1e-12);
  for (int j = 0; j <= 5; ++j) {
    const Complex lead = b.coefficients(j, j);
    CHECK(lead.imag() == 0.0);
    CHECK(lead.real() > 0.0);
    // in the frame t = z / s the leading coefficient carries s^j
    CHECK(lead.real() / std::pow(b.scale, j) == doctest::Approx(std::sqrt((j + 1) / kPi)).epsilon(1e-10));
  }
  for (const Complex z : {Complex(0.3, -0.2), Complex(-0.7, 0.1), Complex(0.0, 1.0)}) {
    const auto v = orthonormal_values(b, z, 5);
    for (int j = 0; j <= 5; ++j) {
      const Complex expected = std::sqrt((j + 1) / kPi) * std::pow(z, j);
      CHECK(std::abs(v[j] - expected) <= 1e-10);
    }
  }
}

TEST_CASE("disk of radius 2, degree one") {
  const OrthonormalBasis b = compute_basis(disk_rule(2.0, 8), WeightSpec{}, 1);
  const Complex z(0.4, 1.1);
  const auto v = orthonormal_values(b, z, 1);
  // int_{|z|<2} 1 dm = 4 pi, int |z|^2 dm = 8 pi
  CHECK(std::abs(v[0] - 1.0 / std::sqrt(4.0 * kPi)) < 1e-12);
  CHECK(std::abs(v[1] - z * std::sqrt(2.0 / kPi) / 4.0) < 1e-12);
  CHECK(std::abs(v[1] - z / std::sqrt(8.0 * kPi)) < 1e-12);
}

TEST_CASE("degree zero is the normalized constant") {
  const Domain ell = make_ellipse(2.0, 1.0);
  WeightSpec w([](Complex z) { return 1.0 + 0.5 * z.real() * z.real() / 4.0; }, 2.0, {});
  const QuadratureRule rule = build_rule(ell, w);
  const OrthonormalBasis b = compute_basis(rule, w, 0);
  double nu = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) nu += rule.weights[q] * w(rule.nodes[q]);
  CHECK(b.total_mass == doctest::Approx(nu).epsilon(1e-13));
  CHECK(std::abs(orthonormal_values(b, {0.3, 0.2}, 0)[0] - 1.0 / std::sqrt(nu)) < 1e-14);
  CHECK(kernel_diag(b, {1.0, 0.0}, 0) == doctest::Approx(1.0 / nu).epsilon(1e-13));
}

TEST_CASE("kernel and p = 2 Christoffel function on the unit disk") {
  const OrthonormalBasis b = compute_basis(disk_rule(1.0, 60), WeightSpec{}, 20);
  for (int n : {0, 3, 10, 20}) {
    CHECK(kernel_diag(b, {0.0, 0.0}, n) == doctest::Approx(1.0 / kPi).epsilon(1e-10));
    CHECK(christoffel_p2(b, {0.0, 0.0}, n) == doctest::Approx(kPi).epsilon(1e-10));
  }
  CHECK(kernel_diag(b, {1.0, 0.0}, 2) == doctest::Approx(6.0 / kPi).epsilon(1e-10));
  CHECK(christoffel_p2(b, {1.0, 0.0}, 2) == doctest::Approx(0.5235987755982988).epsilon(1e-10));
  for (int n = 0; n <= 20; ++n) {
    CHECK(christoffel_p2(b, {1.0, 0.0}, n) == doctest::Approx(2.0 * kPi / ((n + 1.0) * (n + 2.0))).epsilon(1e-9));
  }
  CHECK(christoffel_p2(b, {1.0, 0.0}, 10) == doctest::Approx(2.0 * kPi / 132.0).epsilon(1e-10));

  const auto at_one = orthonormal_values(b, {1.0, 0.0}, 3);
  const auto at_zero = orthonormal_values(b, {0.0, 0.0}, 3);
  for (int j = 0; j <= 3; ++j) {
    CHECK(std::abs(at_one[j] - std::sqrt((j + 1) / kPi)) < 1e-11);
    CHECK(std::abs(at_zero[j] - (j == 0 ? std::sqrt(1.0 / kPi) : 0.0)) < 1e-11);
  }
  // at the frame center only the constant term of pi_1 survives
  CHECK(std::abs(orthonormal_values(b, b.center, 1)[1] - b.coefficients(1, 0)) < 1e-15);
}

TEST_CASE("out-of-range degrees are rejected") {
  const OrthonormalBasis b = compute_basis(disk_rule(1.0, 12), WeightSpec{}, 4);
  CHECK_THROWS_AS(kernel_diag(b, {0.0, 0.0}, 5), InvalidArgument);
  CHECK_THROWS_AS(christoffel_p2(b, {0.0, 0.0}, -1), InvalidArgument);
  CHECK_THROWS_AS(orthonormal_values(b, {0.0, 0.0}, 7), InvalidArgument);
  CHECK_THROWS_AS(compute_basis(disk_rule(1.0, 12), WeightSpec{}, 201), InvalidArgument);
}

TEST_CASE("too few distinct nodes") {
  QuadratureRule small;
  for (int k = 0; k < 10; ++k) {
    small.nodes.push_back(std::polar(0.5, 0.3 * k));
    small.weights.push_back(0.1);
  }
  CHECK_THROWS_AS(compute_basis(small, WeightSpec{}, 5), InvalidArgument);
  // enough nodes, but only five distinct points
  QuadratureRule repeated;
  for (int k = 0; k < 40; ++k) {
    repeated.nodes.push_back(std::polar(0.5, 1.2 * (k % 5)));
    repeated.weights.push_back(0.1);
  }
  try {
    compute_basis(repeated, WeightSpec{}, 6);
    FAIL("expected OrthogonalityLoss");
  } catch (const OrthogonalityLoss& e) {
    CHECK(e.degree == 5);
  }
}

TEST_CASE("invariants on weighted and non-symmetric domains") {
  struct Case {
    Domain domain;
    WeightSpec weight;
    int n;
  };
  const Domain sq = make_square(2.0, {1.0, 0.5});
  std::vector<Case> cases;
  cases.push_back({make_ellipse(2.0, 1.0), WeightSpec([](Complex) { return 1.0; }, 1.0, {{{2.0, 0.0}, 1.0}, {{-2.0, 0.0}, -0.5}}), 25});
  cases.push_back({sq, WeightSpec([](Complex) { return 1.0; }, 1.0, {{{2.0, 1.5}, -1.0}}), 20});
  cases.push_back({make_cusp(), WeightSpec{}, 40});
  std::mt19937_64 rng(7);
  for (const Case& c : cases) {
    QuadratureOptions o;
    o.exact_degree = 2 * c.n + 4;
    const QuadratureRule rule = build_rule(c.domain, c.weight, o);
    const OrthonormalBasis b = compute_basis(rule, c.weight, c.n);
    INFO(to_string(c.domain.kind()));
    CHECK(b.defect <= 1e-8);
    for (int j = 0; j <= c.n; ++j) {
      CHECK(b.coefficients(j, j).imag() == 0.0);
      CHECK(b.coefficients(j, j).real() > 0.0);
    }

    // evaluation points on the boundary and inside
    std::vector<Complex> points = sample_boundary(c.domain, 12);
    points.push_back(c.domain.centroid());
    for (const Complex z : points) {
      double previous = std::numeric_limits<double>::infinity();
      for (int n = 0; n <= c.n; n += std::max(1, c.n / 8)) {
        const double lam = christoffel_p2(b, z, n);
        CHECK(lam <= previous * (1.0 + 1e-12));
        previous = lam;
        const auto v = orthonormal_values(b, z, n);
        CHECK(std::abs(v[n]) <= std::pow(lam, -0.5) * (1.0 + 1e-12));
      }
      // variational principle against random feasible polynomials of degree n
      const int n = std::min(c.n, 10);
      const double lam = christoffel_p2(b, z, n);
      for (int trial = 0; trial < 20; ++trial) {
        const auto r = random_feasible(rng, n);
        const double value = integrate(rule, [&](Complex zeta) {
                               return Complex(std::norm(eval_feasible(r, z, zeta)) * c.weight(zeta), 0.0);
                             }).real();
        CHECK(lam <= value * (1.0 + 1e-10));
      }
    }
  }
}

TEST_CASE("truncated and extended bases agree") {
  const Domain ell = make_ellipse(2.0, 1.0);
  QuadratureOptions o;
  o.exact_degree = 40;
  const QuadratureRule rule = build_rule(ell, WeightSpec{}, o);
  const OrthonormalBasis a = compute_basis(rule, WeightSpec{}, 10);
  const OrthonormalBasis b = compute_basis(rule, WeightSpec{}, 16);
  for (int j = 0; j <= 10; ++j) {
    for (int k = 0; k <= j; ++k) CHECK(std::abs(a.coefficients(j, k) - b.coefficients(j, k)) <= 1e-7 * std::abs(b.coefficients(j, j)));
  }
}

TEST_CASE("coefficient export") {
  const OrthonormalBasis b = compute_basis(disk_rule(1.0, 12), WeightSpec{}, 3);
  const auto path = std::filesystem::temp_directory_path() / "chlab_basis_test.csv";
  write_basis_csv(b, path);
  std::ifstream in(path);
  std::string header;
  std::string columns;
  std::getline(in, header);
  std::getline(in, columns);
  CHECK(header.find("N=3") != std::string::npos);
  CHECK(header.find("defect=") != std::string::npos);
  CHECK(columns == "degree,k,re,im");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
  std::filesystem::remove(path);
}
