#include "chlab/greenmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "chlab/error.hpp"
#include "compensated.hpp"

namespace chlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// ratio of consecutive sample distances to a polygon corner
constexpr double kCornerGrading = 0.7;

struct BoundaryNode {
  Complex point;
  Complex inward;    // unit inward normal
  double clearance;  // how far inside a charge may sit
};

// Points along one polygon edge, geometrically clustered toward both ends.
std::vector<double> graded_edge_positions(double length, int count) {
  std::vector<double> s(static_cast<std::size_t>(count));
  // the closest point stays above 1e-10 of the edge length
  const double levels = std::min(0.5 * count, std::log(1e-10) / std::log(kCornerGrading));
  for (int j = 0; j < count; ++j) {
    const double u = (j + 0.5) / count;
    if (u <= 0.5) {
      s[static_cast<std::size_t>(j)] = 0.5 * length * std::pow(kCornerGrading, levels * (1.0 - 2.0 * u));
    } else {
      s[static_cast<std::size_t>(j)] = length - 0.5 * length * std::pow(kCornerGrading, levels * (2.0 * u - 1.0));
    }
  }
  return s;
}

double min_corner_distance(const Domain& domain, Complex z) {
  double d = std::numeric_limits<double>::infinity();
  for (const Complex& c : domain.corners()) d = std::min(d, std::abs(z - c));
  return d;
}

// `count` boundary nodes; `shift` in [0,1) offsets the sampling parameter so that
// shifted sets interleave with the unshifted one.
std::vector<BoundaryNode> boundary_nodes(const Domain& domain, int count, double shift) {
  std::vector<BoundaryNode> out;
  const double inradius = domain.distance_to_boundary(domain.centroid());
  if (domain.boundary().is_polyline()) {
    const auto verts = domain.boundary().vertices();
    const std::size_t nv = verts.size();
    double perimeter = 0.0;
    for (std::size_t i = 0; i < nv; ++i) perimeter += std::abs(verts[(i + 1) % nv] - verts[i]);
    for (std::size_t i = 0; i < nv; ++i) {
      const Complex a = verts[i];
      const Complex b = verts[(i + 1) % nv];
      const double len = std::abs(b - a);
      const Complex dir = (b - a) / len;
      const int ne = std::max(3, static_cast<int>(std::lround(count * len / perimeter)));
      std::vector<double> pos = graded_edge_positions(len, ne);
      if (shift > 0.0) {
        // midpoints in the graded coordinate
        std::vector<double> next = graded_edge_positions(len, 2 * ne);
        pos.clear();
        for (std::size_t k = 1; k < next.size(); k += 2) pos.push_back(next[k]);
      }
      for (double s : pos) {
        const Complex p = a + s * dir;
        const double corner = min_corner_distance(domain, p);
        out.push_back({p, Complex(0.0, 1.0) * dir, std::min(inradius, corner)});
      }
    }
    return out;
  }
  // smooth closed-form boundaries (disk, ellipse)
  const DomainParams& prm = domain.params();
  const double a = domain.kind() == DomainKind::disk ? prm.radius : prm.a;
  const double b = domain.kind() == DomainKind::disk ? prm.radius : prm.b;
  std::vector<Complex> pts;
  if (shift > 0.0) {
    const auto fine = sample_boundary(domain, static_cast<std::size_t>(2 * count));
    for (std::size_t k = 1; k < fine.size(); k += 2) pts.push_back(fine[k]);
  } else {
    pts = sample_boundary(domain, static_cast<std::size_t>(count));
  }
  for (const Complex& p : pts) {
    const Complex w = p - prm.center;
    const double c = w.real() / a;
    const double s = w.imag() / b;
    const Complex outward = Complex(w.real() / (a * a), w.imag() / (b * b));
    const double curvature_radius = std::pow(a * a * s * s + b * b * c * c, 1.5) / (a * b);
    out.push_back({p, -outward / std::abs(outward), std::min(curvature_radius, inradius)});
  }
  return out;
}

struct Fit {
  GreenModel model;
  bool ok = false;
};

Fit fit_once(const Domain& domain, int n_charges, int n_colloc, double tol) {
  const auto charge_nodes = boundary_nodes(domain, n_charges, 0.0);
  const auto colloc_nodes = boundary_nodes(domain, n_colloc, 0.0);
  const auto check_nodes = boundary_nodes(domain, n_colloc, 0.5);

  GreenModel m;
  m.tolerance = tol;
  for (const BoundaryNode& node : charge_nodes) {
    double d = 0.5 * node.clearance;
    Complex y = node.point + d * node.inward;
    // keep the charge well inside
    for (int guard = 0; guard < 60 && !(point_in_domain(domain, y) && domain.distance_to_boundary(y) >= 0.25 * d); ++guard) {
      d *= 0.5;
      y = node.point + d * node.inward;
    }
    m.charges.push_back(y);
  }
  const Eigen::Index nc = static_cast<Eigen::Index>(m.charges.size());
  const Eigen::Index nx = static_cast<Eigen::Index>(colloc_nodes.size());
  if (nx < 2 * nc) {
    throw InvalidArgument("charge simulation needs at least twice as many collocation points as charges");
  }

  // unknowns q_0..q_{nc-2}, c0; q_{nc-1} = 1 - sum of the others
  Eigen::MatrixXd a(nx, nc);
  Eigen::VectorXd rhs(nx);
  const Complex last = m.charges.back();
  for (Eigen::Index i = 0; i < nx; ++i) {
    const Complex x = colloc_nodes[static_cast<std::size_t>(i)].point;
    const double ll = std::log(std::abs(x - last));
    for (Eigen::Index k = 0; k + 1 < nc; ++k) a(i, k) = std::log(std::abs(x - m.charges[static_cast<std::size_t>(k)])) - ll;
    a(i, nc - 1) = 1.0;
    rhs[i] = -ll;
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
  m.strengths.assign(static_cast<std::size_t>(nc), 0.0);
  detail::CompensatedSum partial;
  for (Eigen::Index k = 0; k + 1 < nc; ++k) {
    m.strengths[static_cast<std::size_t>(k)] = sol[k];
    partial.add(sol[k]);
  }
  m.strengths.back() = 1.0 - partial.value();
  m.offset = sol[nc - 1];
  m.collocation_count = static_cast<std::size_t>(nx);

  double res = 0.0;
  for (const auto* set : {&colloc_nodes, &check_nodes}) {
    for (const BoundaryNode& node : *set) res = std::max(res, std::abs(eval_green_unchecked(m, node.point)));
  }
  m.residual = res;
  return {m, std::isfinite(res) && res <= tol};
}

// First crossing of g = target along the ray centroid + s e^{i phi}, beyond the boundary.
struct RaySolver {
  const GreenModel& model;
  const Domain& domain;
  double target;

  Complex at(double phi, double s) const { return domain.centroid() + std::polar(s, phi); }

  double boundary_distance(double phi) const {
    double lo = 0.0;
    double hi = domain.diameter() * 1.01;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (point_in_domain(domain, at(phi, mid)) ? lo : hi) = mid;
    }
    return hi;
  }

  bool solve(double phi, double s_boundary, Complex* out) const {
    const auto f = [&](double s) { return eval_green_unchecked(model, at(phi, s)) - target; };
    double lo = s_boundary;
    double flo = f(lo);
    if (!(flo < 0.0)) return false;
    double step = std::max(target, 1e-3) * domain.diameter();
    double hi = lo + step;
    double fhi = f(hi);
    for (int it = 0; it < 80 && !(fhi > 0.0); ++it) {
      lo = hi;
      flo = fhi;
      step *= 2.0;
      hi = lo + step;
      fhi = f(hi);
    }
    if (!(fhi > 0.0) || !(flo < 0.0)) return false;
    const double tol = 1e-12 * (1.0 + hi);
    // bisection to a short bracket, then secant steps kept inside the bracket
    for (int it = 0; it < 12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm < 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
    }
    // Illinois variant of regula falsi: halve the stale endpoint value on repeats
    int side = 0;
    for (int it = 0; it < 100 && hi - lo > tol; ++it) {
      double s = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
      const double fs = f(s);
      if (fs == 0.0) {
        lo = hi = s;
        break;
      }
      if (fs < 0.0) {
        lo = s;
        flo = fs;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = s;
        fhi = fs;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    *out = at(phi, 0.5 * (lo + hi));
    return true;
  }

  // Follows the gradient field from a boundary point up to the level.
  bool trace(Complex start, Complex* out) const {
    Complex z = start;
    double g = eval_green_unchecked(model, z);
    const int steps = 40;
    const double dtau = (target - g) / steps;
    auto field = [&](Complex w) {
      const Complex gr = green_gradient(model, w);
      return gr / std::norm(gr);
    };
    for (int k = 0; k < steps; ++k) {
      const Complex k1 = field(z);
      const Complex k2 = field(z + 0.5 * dtau * k1);
      const Complex k3 = field(z + 0.5 * dtau * k2);
      const Complex k4 = field(z + dtau * k3);
      z += dtau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    for (int it = 0; it < 20; ++it) {
      const Complex gr = green_gradient(model, z);
      const double r = eval_green_unchecked(model, z) - target;
      z -= r * gr / std::norm(gr);
      if (std::abs(r) < 1e-14) break;
    }
    g = eval_green_unchecked(model, z);
    if (!(std::abs(g - target) < 1e-10)) return false;
    *out = z;
    return true;
  }
};

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

double GreenModel::capacity() const { return std::exp(-offset); }

GreenModel fit_green(const Domain& domain, int n_charges, int n_colloc, double tol) {
  if (domain.kind() == DomainKind::cusp) {
    throw InvalidArgument("the exterior Green's function of the cusp domain is not supported");
  }
  if (n_charges < 4) throw InvalidArgument("charge simulation needs at least 4 charges");
  if (n_colloc < 2 * n_charges) throw InvalidArgument("n_colloc must be at least 2 * n_charges");
  if (!(tol > 0.0)) throw InvalidArgument("green fit tolerance must be positive");
  Fit best;
  best.model.residual = std::numeric_limits<double>::infinity();
  for (int factor = 1; factor <= 4; factor *= 2) {
    Fit f = fit_once(domain, n_charges * factor, n_colloc * factor, tol);
    if (f.ok) return f.model;
    if (f.model.residual < best.model.residual) best = f;
  }
  std::ostringstream os;
  os << "charge simulation residual " << best.model.residual << " above tolerance " << tol
     << " after escalating to " << 4 * n_charges << " charges";
  throw GreenFitFailure(os.str(), best.model.residual);
}

double eval_green_unchecked(const GreenModel& model, Complex z) {
  double rmax = 0.0;
  for (const Complex& y : model.charges) rmax = std::max(rmax, std::abs(y));
  detail::CompensatedSum acc;
  if (std::abs(z) > 4.0 * rmax) {
    // split off the log|z| growth so that large |z| keeps its digits
    detail::CompensatedSum total;
    for (std::size_t k = 0; k < model.charges.size(); ++k) {
      acc.add(model.strengths[k] * std::log(std::abs(1.0 - model.charges[k] / z)));
      total.add(model.strengths[k]);
    }
    return total.value() * std::log(std::abs(z)) + acc.value() + model.offset;
  }
  for (std::size_t k = 0; k < model.charges.size(); ++k) {
    acc.add(model.strengths[k] * std::log(std::abs(z - model.charges[k])));
  }
  return acc.value() + model.offset;
}

double eval_green(const GreenModel& model, const Domain& domain, Complex z) {
  if (point_in_domain(domain, z)) {
    std::ostringstream os;
    os << "Green's function requested at interior point (" << z.real() << ", " << z.imag() << ")";
    throw InvalidArgument(os.str());
  }
  return eval_green_unchecked(model, z);
}

Complex green_gradient(const GreenModel& model, Complex z) {
  detail::CompensatedComplexSum acc;
  for (std::size_t k = 0; k < model.charges.size(); ++k) {
    const Complex d = z - model.charges[k];
    acc.add(model.strengths[k] * d / std::norm(d));
  }
  return acc.value();
}

LevelCurve level_curve(const GreenModel& model, const Domain& domain, double delta, int M) {
  if (!(delta > 0.0 && delta <= 10.0)) throw InvalidArgument("level curve delta must lie in (0, 10]");
  if (M < 64) throw InvalidArgument("level curve needs at least 64 samples");
  const RaySolver solver{model, domain, std::log1p(delta)};
  LevelCurve c;
  c.delta = delta;
  for (const Complex& b : sample_boundary(domain, static_cast<std::size_t>(M))) {
    const double phi = std::arg(b - domain.centroid());
    Complex hit;
    if (solver.solve(phi, std::abs(b - domain.centroid()), &hit) || solver.trace(b, &hit)) {
      c.points.push_back(hit);
      c.angles.push_back(wrap_angle(std::arg(hit - domain.centroid())));
    } else {
      ++c.dropped;
    }
  }
  if (c.dropped > 0.05 * M) {
    throw Error("level curve: " + std::to_string(c.dropped) + " of " + std::to_string(M) +
                " samples could not be placed on the level set");
  }
  return c;
}

LevelDistance::LevelDistance(const GreenModel& model, const Domain& domain, double delta)
    : model_(&model), domain_(&domain), delta_(delta) {
  if (!(delta > 0.0 && delta <= 10.0)) throw InvalidArgument("level curve delta must lie in (0, 10]");
}

const LevelCurve& LevelDistance::curve(int m) {
  auto it = curves_.find(m);
  if (it == curves_.end()) it = curves_.emplace(m, level_curve(*model_, *domain_, delta_, m)).first;
  return it->second;
}

double LevelDistance::refine(Complex z, const LevelCurve& c) const {
  const std::size_t n = c.points.size();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::abs(z - c.points[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  // golden-section over the ray angle between the neighbours of the best sample
  const RaySolver solver{*model_, *domain_, std::log1p(delta_)};
  double lo = c.angles[(best + n - 1) % n];
  double hi = c.angles[(best + 1) % n];
  const double mid = c.angles[best];
  if (lo > mid) lo -= kTwoPi;
  if (hi < mid) hi += kTwoPi;
  const auto dist = [&](double phi) {
    Complex hit;
    if (!solver.solve(phi, solver.boundary_distance(phi), &hit)) return std::numeric_limits<double>::infinity();
    return std::abs(z - hit);
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = dist(x1);
  double f2 = dist(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-11; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = dist(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = dist(x2);
    }
  }
  return std::min({best_d, f1, f2});
}

double LevelDistance::operator()(Complex z) {
  if (domain_->distance_to_boundary(z) > 1e-9 * domain_->diameter()) {
    throw InvalidArgument("rho is defined for boundary points only");
  }
  double previous = refine(z, curve(64));
  for (int m = 128; m <= 8192; m *= 2) {
    const double current = refine(z, curve(m));
    if (std::abs(current - previous) <= 1e-4 * current) return std::min(current, previous);
    previous = current;
  }
  return previous;
}

double rho(const GreenModel& model, const Domain& domain, Complex z, double delta) {
  LevelDistance d(model, domain, delta);
  return d(z);
}

void write_level_curve_csv(const LevelCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17) << "x,y\n";
  for (const Complex& p : curve.points) out << p.real() << ',' << p.imag() << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

void write_green_model_csv(const GreenModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# offset=" << model.offset << " capacity=" << model.capacity() << " residual=" << model.residual << '\n';
  out << "x,y,q\n";
  for (std::size_t k = 0; k < model.charges.size(); ++k) {
    out << model.charges[k].real() << ',' << model.charges[k].imag() << ',' << model.strengths[k] << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace chlab
