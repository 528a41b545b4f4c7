#include "chlab/christoffel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chlab/error.hpp"
#include "compensated.hpp"

namespace chlab {

namespace {

// sum_q m_q |P(z_q)|^p where the weighted values sqrt(m_q) P(z_q) are given.
double objective(const Eigen::VectorXcd& weighted, const std::vector<double>& masses, double p) {
  detail::CompensatedSum acc;
  for (Eigen::Index q = 0; q < weighted.size(); ++q) {
    const double m = masses[static_cast<std::size_t>(q)];
    const double a = std::abs(weighted[q]);
    acc.add(p == 2.0 ? a * a : m * std::pow(a / std::sqrt(m), p));
  }
  return acc.value();
}

// Solves G y = rhs for the Hermitian positive definite G = B^H diag(r) B.
Eigen::VectorXcd weighted_solve(const Eigen::MatrixXcd& basis, const Eigen::VectorXd& r, const Eigen::VectorXcd& rhs) {
  const Eigen::MatrixXcd scaled = r.cwiseSqrt().asDiagonal() * basis;
  const Eigen::MatrixXcd gram = scaled.adjoint() * scaled;
  // symmetric diagonal equilibration before the factorization
  const Eigen::VectorXd d = gram.diagonal().real().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd eq = d.asDiagonal() * gram * d.asDiagonal();
  Eigen::LLT<Eigen::MatrixXcd> llt(eq);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXcd y = d.asDiagonal() * llt.solve(d.asDiagonal() * rhs);
    if (y.allFinite()) return y;
  }
  // least-squares route with half the condition number
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(scaled);
  const Eigen::Index k = basis.cols();
  const Eigen::MatrixXcd rmat = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::VectorXcd u = rmat.adjoint().triangularView<Eigen::Lower>().solve(rhs);
  return rmat.triangularView<Eigen::Upper>().solve(u);
}

}  // namespace

ChristoffelResult christoffel_lp(const QuadratureRule& rule, const WeightSpec& weight, const OrthonormalBasis& basis,
                                 Complex z, int n, double p, const ChristoffelOptions& opts) {
  (void)weight;
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("Christoffel exponent p must satisfy 1 <= p < inf");
  if (n < 0 || n > basis.max_degree) {
    throw InvalidArgument("degree " + std::to_string(n) + " outside the basis range [0, " +
                          std::to_string(basis.max_degree) + "]");
  }
  if (basis.nodes.size() != rule.size()) throw InvalidArgument("basis was not computed from this rule");
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.eps_floor > 0.0)) {
    throw InvalidArgument("invalid Christoffel solver options");
  }

  const auto vals = orthonormal_values(basis, z, n);
  Eigen::VectorXcd v(n + 1);
  for (int j = 0; j <= n; ++j) v[j] = vals[static_cast<std::size_t>(j)];
  const double kernel = v.squaredNorm();
  if (!(kernel > std::numeric_limits<double>::min()) || !std::isfinite(kernel)) {
    std::ostringstream os;
    os << "reproducing kernel at (" << z.real() << ", " << z.imag() << ") is " << kernel
       << "; the point is outside the numerical support of the measure";
    throw Error(os.str());
  }

  const Eigen::MatrixXcd b = basis.weighted_values.leftCols(n + 1);
  ChristoffelResult res;
  res.p = p;
  res.n = n;
  res.z = z;
  // the p = 2 minimizer K_n(., z) / K_n(z, z) starts the iteration
  res.coefficients = v.conjugate() / kernel;
  Eigen::VectorXcd weighted = b * res.coefficients;
  double f = objective(weighted, basis.masses, p);
  res.objective_history.push_back(f);
  if (p == 2.0 || n == 0) {
    res.value = f;
    return res;
  }

  const double theta0 = opts.damping > 0.0 ? opts.damping : (p < 2.0 ? 0.7 : 1.0);
  const double eps0 = 1e-3 * std::pow(f / basis.total_mass, 1.0 / p);
  // smoothing must be well below the requested accuracy before convergence counts
  const double eps_done = std::max(opts.eps_floor, eps0 * opts.tol);
  double eps = eps0;
  int small_steps = 0;
  double change = std::numeric_limits<double>::infinity();
  const Eigen::Index nq = b.rows();
  Eigen::VectorXd r(nq);

  for (int it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double m = basis.masses[static_cast<std::size_t>(q)];
      const double a2 = std::norm(weighted[q]) / m;
      r[q] = std::pow(a2 + eps * eps, 0.5 * (p - 2.0));
    }
    r /= r.maxCoeff();
    const Eigen::VectorXcd y = weighted_solve(b, r, v.conjugate());
    const Complex denom = v.transpose() * y;
    bool accepted = false;
    if (std::isfinite(std::abs(denom)) && std::abs(denom) > 0.0) {
      const Eigen::VectorXcd target = y / denom;
      double theta = theta0;
      while (theta >= 1.0 / 64.0) {
        const Eigen::VectorXcd trial = (1.0 - theta) * res.coefficients + theta * target;
        const Eigen::VectorXcd tw = b * trial;
        const double ft = objective(tw, basis.masses, p);
        if (ft <= f) {
          change = (f - ft) / f;
          res.coefficients = trial;
          weighted = tw;
          f = ft;
          res.objective_history.push_back(f);
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
    }
    if (!accepted) change = 0.0;
    res.last_relative_change = change;
    const bool smooth_enough = p >= 2.0 || eps <= eps_done;
    if (change < opts.tol && smooth_enough) {
      if (++small_steps >= 2) {
        res.value = f;
        return res;
      }
    } else {
      small_steps = 0;
    }
    eps = std::max(0.5 * eps, opts.eps_floor);
  }
  std::ostringstream os;
  os << "IRLS did not converge in " << opts.max_iter << " iterations (p=" << p << ", n=" << n << ")";
  throw ConvergenceFailure(os.str(), f, change);
}

std::vector<double> extremal_profile(const OrthonormalBasis& basis, const ChristoffelResult& result,
                                     std::span<const Complex> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Complex& x : points) {
    const auto vals = orthonormal_values(basis, x, result.n);
    detail::CompensatedComplexSum acc;
    for (int j = 0; j <= result.n; ++j) acc.add_product(result.coefficients[j], vals[static_cast<std::size_t>(j)]);
    out.push_back(std::abs(acc.value()));
  }
  return out;
}

}  // namespace chlab
