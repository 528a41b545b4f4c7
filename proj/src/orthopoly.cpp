#include "chlab/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "chlab/error.hpp"
#include "compensated.hpp"

namespace chlab {

namespace {

constexpr double kDefectLimit = 1e-8;

Complex dot(const Eigen::MatrixXcd& m, Eigen::Index col_a, const Eigen::VectorXcd& b) {
  detail::CompensatedComplexSum acc;
  const Complex* a = m.col(col_a).data();
  for (Eigen::Index q = 0; q < b.size(); ++q) acc.add_conj_product(a[q], b[q]);
  return acc.value();
}

double norm2(const Eigen::VectorXcd& v) {
  detail::CompensatedSum acc;
  for (Eigen::Index q = 0; q < v.size(); ++q) {
    acc.add_product(v[q].real(), v[q].real());
    acc.add_product(v[q].imag(), v[q].imag());
  }
  return std::sqrt(acc.value());
}

}  // namespace

Complex OrthonormalBasis::node_value(std::size_t q, int j) const {
  return weighted_values(static_cast<Eigen::Index>(q), j) / std::sqrt(masses[q]);
}

OrthonormalBasis compute_basis(const QuadratureRule& rule, const WeightSpec& weight, int max_degree) {
  if (max_degree < 0 || max_degree > 200) throw InvalidArgument("basis degree must lie in [0, 200]");
  const std::size_t needed = static_cast<std::size_t>(max_degree + 1) * static_cast<std::size_t>(max_degree + 2) / 2;
  if (rule.size() < needed) {
    throw InvalidArgument("rule has " + std::to_string(rule.size()) + " nodes, degree " +
                          std::to_string(max_degree) + " needs at least " + std::to_string(needed));
  }

  OrthonormalBasis b;
  b.max_degree = max_degree;
  b.nodes = rule.nodes;
  b.masses = weighted_masses(rule, weight);
  const Eigen::Index nq = static_cast<Eigen::Index>(rule.size());
  detail::CompensatedSum mass_acc;
  for (std::size_t q = 0; q < b.masses.size(); ++q) {
    if (!(b.masses[q] > 0.0) || !std::isfinite(b.masses[q])) {
      throw InvalidArgument("node " + std::to_string(q) + " has a non-positive or non-finite weighted mass");
    }
    mass_acc.add(b.masses[q]);
  }
  b.total_mass = mass_acc.value();

  // centroid of the nodes and twice the largest distance from it
  Complex mu{0.0, 0.0};
  for (const Complex& z : rule.nodes) mu += z;
  mu /= static_cast<double>(rule.size());
  double rmax = 0.0;
  for (const Complex& z : rule.nodes) rmax = std::max(rmax, std::abs(z - mu));
  b.center = mu;
  b.scale = rmax > 0.0 ? 2.0 * rmax : 1.0;

  const int n1 = max_degree + 1;
  b.weighted_values.resize(nq, n1);
  b.recurrence = Eigen::MatrixXcd::Zero(n1 + 1, n1);
  b.coefficients = Eigen::MatrixXcd::Zero(n1, n1);

  Eigen::VectorXcd t(nq);
  for (Eigen::Index q = 0; q < nq; ++q) t[q] = b.to_frame(rule.nodes[static_cast<std::size_t>(q)]);

  const double pi0 = 1.0 / std::sqrt(b.total_mass);
  for (Eigen::Index q = 0; q < nq; ++q) b.weighted_values(q, 0) = std::sqrt(b.masses[static_cast<std::size_t>(q)]) * pi0;
  b.coefficients(0, 0) = pi0;

  Eigen::VectorXcd w(nq);
  for (int j = 0; j < max_degree; ++j) {
    w = t.cwiseProduct(b.weighted_values.col(j));
    const double wnorm = norm2(w);
    // classical Gram-Schmidt, then one full reorthogonalization pass
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const Complex h = dot(b.weighted_values, i, w);
        b.recurrence(i, j) += h;
        w -= h * b.weighted_values.col(i);
      }
    }
    const double h_next = norm2(w);
    if (!(h_next > 1e-13 * wnorm)) {
      throw OrthogonalityLoss("Krylov breakdown: the rule cannot separate polynomials of degree " +
                                  std::to_string(j + 1),
                              1.0, j + 1);
    }
    b.recurrence(j + 1, j) = h_next;
    b.weighted_values.col(j + 1) = w / h_next;

    // coefficients of pi_{j+1} = (t pi_j - sum_i H(i,j) pi_i) / H(j+1,j)
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n1);
    for (int k = 0; k <= j; ++k) c[k + 1] = b.coefficients(j, k);
    for (int i = 0; i <= j; ++i) c -= b.recurrence(i, j) * b.coefficients.row(i).transpose();
    b.coefficients.row(j + 1) = (c / h_next).transpose();
    b.coefficients(j + 1, j + 1) = b.coefficients(j, j) / h_next;  // exactly real and positive
  }

  // orthonormality defect, located at the first degree that exceeds the limit
  const Eigen::MatrixXcd gram = b.weighted_values.adjoint() * b.weighted_values;
  double defect = 0.0;
  int bad_degree = -1;
  for (int j = 0; j < n1; ++j) {
    double col = 0.0;
    for (int i = 0; i <= j; ++i) col = std::max(col, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    if (col > kDefectLimit && bad_degree < 0) bad_degree = j;
    defect = std::max(defect, col);
  }
  b.defect = defect;
  if (bad_degree >= 0) {
    std::ostringstream os;
    os << "orthonormality defect " << defect << " exceeds " << kDefectLimit << " at degree " << bad_degree;
    throw OrthogonalityLoss(os.str(), defect, bad_degree);
  }
  return b;
}

std::vector<Complex> orthonormal_values(const OrthonormalBasis& basis, Complex z, int n) {
  if (n < 0 || n > basis.max_degree) {
    throw InvalidArgument("degree " + std::to_string(n) + " outside the basis range [0, " +
                          std::to_string(basis.max_degree) + "]");
  }
  const Complex t = basis.to_frame(z);
  std::vector<Complex> v(static_cast<std::size_t>(n) + 1);
  v[0] = basis.coefficients(0, 0);
  for (int j = 0; j < n; ++j) {
    detail::CompensatedComplexSum acc;
    acc.add_product(t, v[static_cast<std::size_t>(j)]);
    for (int i = 0; i <= j; ++i) acc.add_product(-basis.recurrence(i, j), v[static_cast<std::size_t>(i)]);
    v[static_cast<std::size_t>(j) + 1] = acc.value() / basis.recurrence(j + 1, j).real();
  }
  return v;
}

double kernel_diag(const OrthonormalBasis& basis, Complex z, int n) {
  const auto v = orthonormal_values(basis, z, n);
  detail::CompensatedSum acc;
  for (const Complex& x : v) {
    acc.add_product(x.real(), x.real());
    acc.add_product(x.imag(), x.imag());
  }
  return acc.value();
}

double christoffel_p2(const OrthonormalBasis& basis, Complex z, int n) { return 1.0 / kernel_diag(basis, z, n); }

Complex evaluate_in_frame(const OrthonormalBasis& basis, const Eigen::VectorXcd& coeffs, Complex z) {
  const Complex t = basis.to_frame(z);
  Complex acc{0.0, 0.0};
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * t + coeffs[k];
  return acc;
}

void write_basis_csv(const OrthonormalBasis& basis, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# center=" << basis.center.real() << ',' << basis.center.imag() << " scale=" << basis.scale
      << " N=" << basis.max_degree << " defect=" << basis.defect << '\n';
  out << "degree,k,re,im\n";
  for (int j = 0; j <= basis.max_degree; ++j) {
    for (int k = 0; k <= j; ++k) {
      const Complex c = basis.coefficients(j, k);
      out << j << ',' << k << ',' << c.real() << ',' << c.imag() << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace chlab
