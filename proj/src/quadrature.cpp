#include "chlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "chlab/error.hpp"

namespace chlab {

namespace {

struct GaussLegendre {
  std::vector<double> x;  // on (0,1)
  std::vector<double> w;
};

// Newton iteration on the three-term recurrence for P_n.
GaussLegendre compute_gauss(int n) {
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    g.x[i] = 0.5 * (1.0 - z);
    g.x[n - 1 - i] = 0.5 * (1.0 + z);
    g.w[i] = g.w[n - 1 - i] = 0.5 * w;
  }
  return g;
}

const GaussLegendre& gauss(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

// Nodes and weights on (0,1) for the weight u^beta (beta > -1), by Golub-Welsch on
// the Jacobi(0, beta) recurrence.
GaussLegendre compute_gauss_jacobi(int n, double beta) {
  const double a = 0.0;
  const double b = beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double t = 2.0 * m + a + b;
      sub(k) = std::sqrt(4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  // int_{-1}^{1} (1+x)^b dx
  const double mu0 = std::pow(2.0, b + 1.0) / (b + 1.0);
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    g.x[k] = 0.5 * (es.eigenvalues()(k) + 1.0);
    g.w[k] = mu0 * v0 * v0 * std::pow(2.0, -b - 1.0);
  }
  return g;
}

const GaussLegendre& gauss_jacobi(int n, double beta) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gauss_jacobi(n, beta)).first;
  return it->second;
}

struct Sink {
  std::vector<Complex> nodes;
  std::vector<double> weights;
  std::size_t budget = 0;

  void push(Complex z, double w) {
    nodes.push_back(z);
    weights.push_back(w);
  }
  void check(double achieved) const {
    if (nodes.size() > budget) {
      throw QuadratureBudgetExceeded("quadrature node budget of " + std::to_string(budget) +
                                         " nodes exceeded",
                                     achieved);
    }
  }
};

int level_order(int base, int level) {
  const int reduced = static_cast<int>(std::ceil(base / std::pow(2.0, level))) + 6;
  return std::clamp(reduced, std::min(14, base), base);
}

// Triangle (apex, p1, p2) in some parameter plane, collapsed at the apex where the
// weight has a factor |z - z0|^alpha. Along rays from the apex |z - z0| / u is
// smooth, so for alpha < 0 Gauss-Jacobi with weight u^(1+alpha) absorbs the
// singularity; the node weights carry u^(-alpha) so that the rule stays a plain
// area rule. For alpha >= 0 the factor is bounded and plain Gauss is used.
template <class Map>
void emit_singular_fan(Complex apex, Complex p1, Complex p2, double alpha, int qu, int qv, const Map& map,
                       Sink& sink) {
  const double area2 = std::abs((p1 - apex).real() * (p2 - apex).imag() - (p1 - apex).imag() * (p2 - apex).real());
  if (area2 == 0.0) return;
  if (alpha > 0.0) alpha = 0.0;
  const GaussLegendre& gu = alpha < 0.0 ? gauss_jacobi(qu, 1.0 + alpha) : gauss(qu);
  const GaussLegendre& gv = gauss(qv);
  for (int i = 0; i < qu; ++i) {
    const double u = gu.x[i];
    for (int k = 0; k < qv; ++k) {
      const Complex p = apex + u * (p1 - apex) + u * gv.x[k] * (p2 - p1);
      const auto [z, jac] = map(p);
      sink.push(z, gu.w[i] * gv.w[k] * area2 * jac * std::pow(u, alpha < 0.0 ? -alpha : 1.0));
    }
  }
}

// ---------------------------------------------------------------------------
// Polar cells: z = c + a r cos(theta) + i b r sin(theta)

struct PolarMap {
  Complex center;
  double a;
  double b;

  Complex operator()(double r, double t) const {
    return center + Complex(a * r * std::cos(t), b * r * std::sin(t));
  }
  double jacobian(double r) const { return a * b * r; }
};

struct PolarCell {
  double r0, r1, t0, t1;
};

struct Build {
  Sink sink;
  int max_level = 0;
  std::vector<double> cell_errors;
};

void emit_polar(const PolarMap& map, const PolarCell& c, int qr, int qt, Sink& sink,
                const WeightSpec* weight, double* mass) {
  const GaussLegendre& gr = gauss(qr);
  const GaussLegendre& gt = gauss(qt);
  for (int i = 0; i < qr; ++i) {
    const double r = c.r0 + (c.r1 - c.r0) * gr.x[i];
    const double wr = (c.r1 - c.r0) * gr.w[i] * map.jacobian(r);
    for (int k = 0; k < qt; ++k) {
      const double t = c.t0 + (c.t1 - c.t0) * gt.x[k];
      const double w = wr * (c.t1 - c.t0) * gt.w[k];
      const Complex z = map(r, t);
      sink.push(z, w);
      if (mass != nullptr) *mass += w * (*weight)(z);
    }
  }
}

struct GradingParams {
  int qr = 0;
  int qt = 0;
  double threshold_fraction = 0.0;  // target accuracy
  double total_mass = 0.0;
  int level_cap = 40;
};

// Recursively splits polar cells whose closure contains a singular parameter point.
struct SingularParam {
  double r, t, alpha;
};

void refine_polar(const PolarMap& map, const PolarCell& c, int level,
                  const std::vector<SingularParam>& singular_params,
                  const WeightSpec& weight, const GradingParams& gp, Build& build) {
  const double eps_t = 1e-14 * (c.t1 - c.t0);
  const SingularParam* touching = nullptr;
  for (const SingularParam& sp : singular_params) {
    if (sp.r >= c.r0 - 1e-14 && sp.r <= c.r1 + 1e-14 && sp.t >= c.t0 - eps_t && sp.t <= c.t1 + eps_t) touching = &sp;
  }
  const bool touches = touching != nullptr;
  const int qr = level_order(gp.qr, level);
  const int qt = level_order(gp.qt, level);
  if (!touches) {
    emit_polar(map, c, qr, qt, build.sink, nullptr, nullptr);
    return;
  }
  // contribution estimate of the touching cell
  Sink probe;
  probe.budget = std::numeric_limits<std::size_t>::max();
  double mass = 0.0;
  emit_polar(map, c, qr, qt, probe, &weight, &mass);
  if (std::abs(mass) <= gp.threshold_fraction * gp.total_mass || level >= gp.level_cap) {
    // fan of triangles in the (r, theta) plane with the singular point as apex
    const Complex apex(touching->r, touching->t);
    const std::array<Complex, 4> corners{Complex(c.r0, c.t0), Complex(c.r1, c.t0), Complex(c.r1, c.t1),
                                         Complex(c.r0, c.t1)};
    const auto polar = [&map](Complex p) { return std::make_pair(map(p.real(), p.imag()), map.jacobian(p.real())); };
    for (int e = 0; e < 4; ++e) {
      emit_singular_fan(apex, corners[e], corners[(e + 1) % 4], touching->alpha, qr, qt, polar, build.sink);
    }
    build.cell_errors.push_back(std::abs(mass));
    build.max_level = std::max(build.max_level, level);
    return;
  }
  // keep the children close to square in the physical plane; elongated cells next
  // to the singular point converge slowly
  const double rm = 0.5 * (c.r0 + c.r1);
  const double tm = 0.5 * (c.t0 + c.t1);
  const double radial = c.r1 - c.r0;
  const double angular = c.r1 * (c.t1 - c.t0);
  std::vector<PolarCell> children;
  if (radial > 2.0 * angular) {
    children = {PolarCell{c.r0, rm, c.t0, c.t1}, PolarCell{rm, c.r1, c.t0, c.t1}};
  } else if (angular > 2.0 * radial) {
    children = {PolarCell{c.r0, c.r1, c.t0, tm}, PolarCell{c.r0, c.r1, tm, c.t1}};
  } else {
    children = {PolarCell{c.r0, rm, c.t0, tm}, PolarCell{rm, c.r1, c.t0, tm}, PolarCell{c.r0, rm, tm, c.t1},
                PolarCell{rm, c.r1, tm, c.t1}};
  }
  for (const PolarCell& child : children) refine_polar(map, child, level + 1, singular_params, weight, gp, build);
  build.sink.check(std::numeric_limits<double>::quiet_NaN());
}

int angular_panels(int degree) { return std::max(16, degree / 5); }

int angular_order(int degree, int panels) {
  const double omega = degree * std::numbers::pi / panels;
  return std::max(10, static_cast<int>(std::ceil(1.5 * omega)) + 2);
}

Build build_polar(const Domain& domain, const WeightSpec& weight, int degree, double threshold,
                  std::size_t budget) {
  const DomainParams& p = domain.params();
  PolarMap map{p.center, domain.kind() == DomainKind::disk ? p.radius : p.a,
               domain.kind() == DomainKind::disk ? p.radius : p.b};

  std::vector<SingularParam> singular_params;
  for (const Singularity& s : weight.singularities()) {
    if (s.exponent == 0.0) continue;
    const Complex w = s.point - p.center;
    double t = std::atan2(w.imag() / map.b, w.real() / map.a);
    if (t < 0) t += 2.0 * std::numbers::pi;
    singular_params.push_back({1.0, t, s.exponent});
    if (t < 1e-14) singular_params.push_back({1.0, 2.0 * std::numbers::pi, s.exponent});
  }

  const int panels = angular_panels(degree);
  GradingParams gp;
  gp.qr = (degree + 3) / 2;
  gp.qt = angular_order(degree, panels);
  gp.threshold_fraction = threshold;

  std::vector<PolarCell> base;
  for (int k = 0; k < panels; ++k) {
    const double t1 = k + 1 == panels ? 2.0 * std::numbers::pi : 2.0 * std::numbers::pi * (k + 1) / panels;
    base.push_back({0.0, 1.0, 2.0 * std::numbers::pi * k / panels, t1});
  }

  // total weighted mass from the unrefined grid
  {
    Sink probe;
    double mass = 0.0;
    for (const PolarCell& c : base) emit_polar(map, c, gp.qr, gp.qt, probe, &weight, &mass);
    gp.total_mass = mass;
  }

  Build build;
  build.sink.budget = budget;
  for (const PolarCell& c : base) refine_polar(map, c, 0, singular_params, weight, gp, build);
  build.sink.check(std::numeric_limits<double>::quiet_NaN());
  return build;
}

// ---------------------------------------------------------------------------
// Triangles (polygons): collapsed map with vertex A as the collapsed corner,
// z(u, v) = A + u (B - A) + u v (C - B), Jacobian u * 2|T|.

struct Triangle {
  Complex a, b, c;
};

double tri_area2(const Triangle& t) {
  return std::abs((t.b - t.a).real() * (t.c - t.a).imag() - (t.b - t.a).imag() * (t.c - t.a).real());
}

void emit_triangle(const Triangle& t, int qu, int qv, Sink& sink, const WeightSpec* weight, double* mass) {
  const GaussLegendre& gu = gauss(qu);
  const GaussLegendre& gv = gauss(qv);
  const double area2 = tri_area2(t);
  for (int i = 0; i < qu; ++i) {
    const double u = gu.x[i];
    for (int k = 0; k < qv; ++k) {
      const double v = gv.x[k];
      const Complex z = t.a + u * (t.b - t.a) + u * v * (t.c - t.b);
      const double w = gu.w[i] * gv.w[k] * u * area2;
      sink.push(z, w);
      if (mass != nullptr) *mass += w * (*weight)(z);
    }
  }
}

const Singularity* singular_vertex(Complex v, const std::vector<Singularity>& singular, double tol) {
  for (const Singularity& s : singular) {
    if (std::abs(v - s.point) <= tol) return &s;
  }
  return nullptr;
}

bool is_singular_vertex(Complex v, const std::vector<Complex>& points, double tol) {
  for (const Complex& s : points) {
    if (std::abs(v - s) <= tol) return true;
  }
  return false;
}

void refine_triangle(const Triangle& t, int level, const std::vector<Singularity>& singular, double tol,
                     const WeightSpec& weight, const GradingParams& gp, Build& build) {
  const int qu = level_order(gp.qr, level);
  const int qv = level_order(gp.qt, level);
  // deep in the grading the absolute tolerance exceeds the cell size
  const double edge = std::min({std::abs(t.a - t.b), std::abs(t.b - t.c), std::abs(t.c - t.a)});
  tol = std::min(tol, 1e-3 * edge);
  // rotate so that a singular vertex (if any) is the collapsed corner
  Triangle r = t;
  const Singularity* touching = nullptr;
  if ((touching = singular_vertex(t.a, singular, tol)) != nullptr) {
  } else if ((touching = singular_vertex(t.b, singular, tol)) != nullptr) {
    r = {t.b, t.c, t.a};
  } else if ((touching = singular_vertex(t.c, singular, tol)) != nullptr) {
    r = {t.c, t.a, t.b};
  }
  const bool touches = touching != nullptr;
  if (!touches) {
    emit_triangle(r, qu, qv, build.sink, nullptr, nullptr);
    return;
  }
  Sink probe;
  double mass = 0.0;
  emit_triangle(r, qu, qv, probe, &weight, &mass);
  if (std::abs(mass) <= gp.threshold_fraction * gp.total_mass || level >= gp.level_cap) {
    const auto identity = [](Complex p) { return std::make_pair(p, 1.0); };
    emit_singular_fan(r.a, r.b, r.c, touching->exponent, qu, qv, identity, build.sink);
    build.cell_errors.push_back(std::abs(mass));
    build.max_level = std::max(build.max_level, level);
    return;
  }
  const Complex ab = 0.5 * (t.a + t.b);
  const Complex bc = 0.5 * (t.b + t.c);
  const Complex ca = 0.5 * (t.c + t.a);
  for (const Triangle& child : {Triangle{t.a, ab, ca}, Triangle{ab, t.b, bc}, Triangle{ca, bc, t.c},
                                Triangle{ab, bc, ca}}) {
    refine_triangle(child, level + 1, singular, tol, weight, gp, build);
  }
  build.sink.check(std::numeric_limits<double>::quiet_NaN());
}

double cross(Complex o, Complex a, Complex b) {
  return (a - o).real() * (b - o).imag() - (a - o).imag() * (b - o).real();
}

bool point_in_closed_triangle(Complex p, Complex a, Complex b, Complex c) {
  const double d1 = cross(a, b, p);
  const double d2 = cross(b, c, p);
  const double d3 = cross(c, a, p);
  const bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  const bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(neg && pos);
}

std::vector<Triangle> ear_clip(std::vector<Complex> poly) {
  std::vector<Triangle> tris;
  double scale = 0.0;
  for (const Complex& v : poly) scale = std::max(scale, std::abs(v - poly[0]));
  const double eps = 1e-14 * scale * scale;
  std::size_t guard = 0;
  while (poly.size() > 3) {
    const std::size_t n = poly.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex a = poly[(i + n - 1) % n];
      const Complex b = poly[i];
      const Complex c = poly[(i + 1) % n];
      if (cross(a, b, c) <= eps) continue;
      bool empty = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == (i + n - 1) % n || k == (i + 1) % n) continue;
        if (point_in_closed_triangle(poly[k], a, b, c)) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({a, b, c});
      poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 100000) throw InvalidArgument("polygon triangulation failed");
  }
  if (cross(poly[0], poly[1], poly[2]) > eps) tris.push_back({poly[0], poly[1], poly[2]});
  return tris;
}

Build build_polygon(const Domain& domain, const WeightSpec& weight, int degree, double threshold,
                    std::size_t budget) {
  std::vector<Complex> verts(domain.boundary().vertices().begin(), domain.boundary().vertices().end());
  const double tol = 1e-9 * domain.diameter();
  std::vector<Singularity> singular;
  for (const Singularity& s : weight.singularities()) {
    if (s.exponent == 0.0) continue;
    singular.push_back(s);
    if (is_singular_vertex(s.point, verts, tol)) continue;
    // insert the singular point as a vertex on its edge
    const std::size_t n = verts.size();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const Complex e0 = verts[i];
      const Complex e1 = verts[(i + 1) % n];
      const Complex d = e1 - e0;
      const double sp = std::clamp(((s.point - e0) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
      const double dist = std::abs(s.point - (e0 + sp * d));
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    verts.insert(verts.begin() + static_cast<std::ptrdiff_t>(best + 1), s.point);
  }

  std::vector<Triangle> base;
  for (const Triangle& t : ear_clip(verts)) {
    // split base triangles until each is at most half the domain diameter
    std::vector<Triangle> stack{t};
    while (!stack.empty()) {
      Triangle cur = stack.back();
      stack.pop_back();
      const double d = std::max({std::abs(cur.a - cur.b), std::abs(cur.b - cur.c), std::abs(cur.c - cur.a)});
      if (d <= 0.5 * domain.diameter() + 1e-12) {
        base.push_back(cur);
        continue;
      }
      const Complex ab = 0.5 * (cur.a + cur.b);
      const Complex bc = 0.5 * (cur.b + cur.c);
      const Complex ca = 0.5 * (cur.c + cur.a);
      stack.push_back({cur.a, ab, ca});
      stack.push_back({ab, cur.b, bc});
      stack.push_back({ca, bc, cur.c});
      stack.push_back({ab, bc, ca});
    }
  }

  GradingParams gp;
  gp.qr = (degree + 3) / 2;
  gp.qt = (degree + 2) / 2;
  gp.threshold_fraction = threshold;
  {
    Sink probe;
    double mass = 0.0;
    for (const Triangle& t : base) emit_triangle(t, gp.qr, gp.qt, probe, &weight, &mass);
    gp.total_mass = mass;
  }
  Build build;
  build.sink.budget = budget;
  for (const Triangle& t : base) refine_triangle(t, 0, singular, tol, weight, gp, build);
  build.sink.check(std::numeric_limits<double>::quiet_NaN());
  return build;
}

// ---------------------------------------------------------------------------
// Cusp: vertical strips with width graded toward x = 0 and exact height 2 exp(-1/x).

double cusp_tip_floor(double mass_bound) {
  // smallest x with 2 x^2 exp(-1/x) >= mass_bound, found by bisection
  double lo = 1e-4;
  double hi = 1.0;
  auto f = [](double x) { return 2.0 * x * x * std::exp(-1.0 / x); };
  if (f(lo) >= mass_bound) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < mass_bound ? lo : hi) = mid;
  }
  return lo;
}

Build build_cusp(const Domain& domain, const WeightSpec& weight, int degree, double tip_mass,
                 std::size_t budget, double* omitted) {
  for (const Singularity& s : weight.singularities()) {
    if (s.exponent != 0.0) throw InvalidArgument("singular weights are not supported on the cusp domain");
  }
  const double floor_x = cusp_tip_floor(tip_mass * domain.analytic_area());
  *omitted = 2.0 * floor_x * floor_x * std::exp(-1.0 / floor_x);
  const int qx = (degree + 3) / 2 + 6;
  const int qy = (degree + 3) / 2;
  const GaussLegendre& gx = gauss(qx);
  const GaussLegendre& gy = gauss(qy);
  std::vector<double> edges{1.0};
  while (edges.back() > floor_x) edges.push_back(std::max(floor_x, 0.75 * edges.back()));
  std::reverse(edges.begin(), edges.end());

  Build build;
  build.sink.budget = budget;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double x0 = edges[s];
    const double x1 = edges[s + 1];
    for (int i = 0; i < qx; ++i) {
      const double x = x0 + (x1 - x0) * gx.x[i];
      const double h = std::exp(-1.0 / x);
      const double wx = (x1 - x0) * gx.w[i];
      for (int k = 0; k < qy; ++k) {
        const double y = -h + 2.0 * h * gy.x[k];
        build.sink.push({x, y}, wx * 2.0 * h * gy.w[k]);
      }
    }
  }
  build.sink.check(std::numeric_limits<double>::quiet_NaN());
  return build;
}

Build build_once(const Domain& domain, const WeightSpec& weight, int degree, double threshold,
                 const QuadratureOptions& opts, double* omitted) {
  *omitted = 0.0;
  switch (domain.kind()) {
    case DomainKind::disk:
    case DomainKind::ellipse: return build_polar(domain, weight, degree, threshold, opts.node_budget);
    case DomainKind::polygon:
    case DomainKind::custom: return build_polygon(domain, weight, degree, threshold, opts.node_budget);
    case DomainKind::cusp: return build_cusp(domain, weight, degree, opts.cusp_tip_mass, opts.node_budget, omitted);
  }
  throw InvalidArgument("unsupported domain kind");
}

std::array<double, 3> test_integrals(const Sink& sink, const WeightSpec& weight) {
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  std::array<double, 3> comp{0.0, 0.0, 0.0};
  for (std::size_t q = 0; q < sink.nodes.size(); ++q) {
    const Complex z = sink.nodes[q];
    const double w = sink.weights[q];
    const std::array<double, 3> terms{w, w * std::norm(z), w * weight.singular_part(z)};
    for (int k = 0; k < 3; ++k) {
      const double y = terms[k] - comp[k];
      const double t = acc[k] + y;
      comp[k] = (t - acc[k]) - y;
      acc[k] = t;
    }
  }
  return acc;
}

}  // namespace

double QuadratureRule::total_weight() const {
  double s = 0.0;
  double c = 0.0;
  for (double w : weights) {
    const double y = w - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

QuadratureRule build_rule(const Domain& domain, const WeightSpec& weight, const QuadratureOptions& opts) {
  if (!(opts.target_accuracy >= 1e-12 && opts.target_accuracy <= 1e-3)) {
    throw InvalidArgument("target accuracy must lie in [1e-12, 1e-3]");
  }
  if (opts.exact_degree < 0) throw InvalidArgument("exact degree must be non-negative");
  weight.validate(domain);

  int degree = std::max(opts.exact_degree, 4);
  double threshold = opts.target_accuracy * 0.1;
  double achieved = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 8; ++attempt) {
    double omitted = 0.0;
    double omitted_ref = 0.0;
    Build main;
    try {
      main = build_once(domain, weight, degree, threshold, opts, &omitted);
    } catch (const QuadratureBudgetExceeded& e) {
      throw QuadratureBudgetExceeded(e.what(), achieved);
    }
    QuadratureOptions ref_opts = opts;
    ref_opts.node_budget = std::numeric_limits<std::size_t>::max();
    ref_opts.cusp_tip_mass = opts.cusp_tip_mass * 1e-6;
    Build ref = build_once(domain, weight, degree + 16, threshold * 1e-3, ref_opts, &omitted_ref);

    const auto a = test_integrals(main.sink, weight);
    const auto b = test_integrals(ref.sink, weight);
    double err = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double e = std::abs(a[k] - b[k]) / std::abs(b[k]);
      err = std::isfinite(e) ? std::max(err, e) : std::numeric_limits<double>::infinity();
    }
    // dropped cusp mass counts toward the error of the area integrand
    err = std::max(err, omitted / std::abs(b[0]));
    achieved = err;

    if (err <= opts.target_accuracy) {
      QuadratureRule rule;
      rule.nodes = std::move(main.sink.nodes);
      rule.weights = std::move(main.sink.weights);
      rule.refinement_level = main.max_level;
      rule.cell_errors = std::move(main.cell_errors);
      rule.target_accuracy = opts.target_accuracy;
      rule.estimated_error = err;
      rule.omitted_mass = omitted;
      return rule;
    }
    degree += degree / 4 + 8;
    threshold *= 1e-2;
    if (main.sink.nodes.size() * 2 > opts.node_budget) break;
  }
  throw QuadratureBudgetExceeded("quadrature target accuracy not reached within the node budget", achieved);
}

Complex integrate(const QuadratureRule& rule, const std::function<Complex(Complex)>& f) {
  Complex sum{0.0, 0.0};
  Complex comp{0.0, 0.0};
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Complex v = f(rule.nodes[q]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "non-finite integrand value at node " << q << " (" << rule.nodes[q].real() << ", "
         << rule.nodes[q].imag() << ")";
      throw NonFiniteValue(os.str(), q);
    }
    const Complex y = rule.weights[q] * v - comp;
    const Complex t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

Complex integrate_weighted(const QuadratureRule& rule, const WeightSpec& weight,
                           const std::function<Complex(Complex)>& f) {
  return integrate(rule, [&](Complex z) { return weight(z) * f(z); });
}

std::vector<double> weighted_masses(const QuadratureRule& rule, const WeightSpec& weight) {
  std::vector<double> m(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) m[q] = rule.weights[q] * weight(rule.nodes[q]);
  return m;
}

void write_rule_csv(const QuadratureRule& rule, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "x,y,w\n";
  out << std::setprecision(17);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out << rule.nodes[q].real() << ',' << rule.nodes[q].imag() << ',' << rule.weights[q] << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

QuadratureRule read_rule_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,w", 0) != 0) {
    throw InvalidArgument(path.string() + ": expected header 'x,y,w'");
  }
  QuadratureRule rule;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    char c1 = 0;
    char c2 = 0;
    if (!(ss >> x >> c1 >> y >> c2 >> w) || c1 != ',' || c2 != ',') {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (!(w > 0.0)) throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": weight must be positive");
    rule.nodes.emplace_back(x, y);
    rule.weights.push_back(w);
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Plane rules and the singular-integral scaling check

namespace {

struct Square {
  Complex center;
  double half;
};

void refine_square(const Square& s, std::span<const GradingPoint> grading, int q, Sink& sink, int depth) {
  bool split = false;
  for (const GradingPoint& g : grading) {
    const double dx = std::max(0.0, std::abs(g.point.real() - s.center.real()) - s.half);
    const double dy = std::max(0.0, std::abs(g.point.imag() - s.center.imag()) - s.half);
    if (std::hypot(dx, dy) <= 2.0 * s.half && 2.0 * s.half > g.min_cell) split = true;
  }
  if (split && depth < 80) {
    const double h = 0.5 * s.half;
    for (const Complex off : {Complex(-h, -h), Complex(h, -h), Complex(-h, h), Complex(h, h)}) {
      refine_square({s.center + off, h}, grading, q, sink, depth + 1);
    }
    return;
  }
  const GaussLegendre& g = gauss(q);
  const double len = 2.0 * s.half;
  const Complex corner = s.center - Complex(s.half, s.half);
  for (int i = 0; i < q; ++i) {
    for (int k = 0; k < q; ++k) {
      sink.push(corner + Complex(len * g.x[i], len * g.x[k]), len * len * g.w[i] * g.w[k]);
    }
  }
}

}  // namespace

QuadratureRule build_plane_rule(Complex center, double half_width, std::span<const GradingPoint> grading,
                                int gauss_points) {
  if (!(half_width > 0.0)) throw InvalidArgument("plane rule needs a positive half-width");
  Sink sink;
  sink.budget = std::numeric_limits<std::size_t>::max();
  refine_square({center, half_width}, grading, gauss_points, sink, 0);
  QuadratureRule rule;
  rule.nodes = std::move(sink.nodes);
  rule.weights = std::move(sink.weights);
  return rule;
}

ScalingReport check_lemma21_scaling(double alpha, double beta, Complex z1, Complex z2,
                                    std::span<const double> deltas, double bound) {
  if (!(alpha > -2.0)) throw InvalidArgument("scaling check needs alpha > -2");
  if (!(beta > 2.0 + std::abs(alpha))) throw InvalidArgument("scaling check needs beta > 2 + |alpha|");
  if (deltas.empty()) throw InvalidArgument("scaling check needs at least one delta");
  ScalingReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.z1 = z1;
  rep.z2 = z2;
  const double d = std::abs(z1 - z2);
  for (double delta : deltas) {
    if (!(delta > 0.0)) throw InvalidArgument("scaling check needs positive deltas");
    const double half = 200.0 * (d + delta);
    // resolve |z - z'|^alpha until a singular cell carries a negligible share
    const double sing_cell = alpha < 0.0 ? delta * std::pow(1e-10, 1.0 / (2.0 + alpha)) : delta * 1e-3;
    const std::vector<GradingPoint> grading{{z1, sing_cell}, {z2, delta / 8.0}};
    const QuadratureRule rule = build_plane_rule(z2, half, grading, 12);
    const double inside = integrate(rule, [&](Complex z) {
                            const double r1 = std::abs(z - z1);
                            return Complex(std::pow(std::abs(z - z2) + delta, -beta) * std::pow(r1, alpha), 0.0);
                          }).real();
    // tail outside the square, with both distances replaced by the radius of the
    // equal-area disk
    const double r_eq = 2.0 * half / std::sqrt(std::numbers::pi);
    const double tail = 2.0 * std::numbers::pi * std::pow(r_eq, alpha - beta + 2.0) / (beta - alpha - 2.0);
    const double total = inside + tail;
    rep.deltas.push_back(delta);
    rep.integrals.push_back(total);
    rep.normalized.push_back(total * std::pow(delta, beta - 2.0) * std::pow(d + delta, -alpha));
  }
  const auto [mn, mx] = std::minmax_element(rep.normalized.begin(), rep.normalized.end());
  rep.max_over_min = *mx / *mn;
  rep.pass = std::isfinite(rep.max_over_min) && rep.max_over_min <= bound;
  return rep;
}

}  // namespace chlab
