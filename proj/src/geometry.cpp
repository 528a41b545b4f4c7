#include "chlab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "chlab/error.hpp"

namespace chlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// E1(1), the exponential integral at 1.
constexpr double kExpIntE1AtOne = 0.21938393439552027368;

// Cusp parameterization: lower arc on [0, kCuspT1), right side on
// [kCuspT1, kCuspT2), upper arc on [kCuspT2, 1). Along each arc x = s^2.
constexpr double kCuspT1 = 0.4;
constexpr double kCuspT2 = 0.6;

// Below this abscissa exp(-1/x) is replaced by the chord to the origin; the two
// curves differ by less than exp(-600), and the upper and lower arcs stay
// distinct in floating point.
constexpr double kCuspChordX = 1.0 / 600.0;

double cusp_height(double x) {
  if (x >= kCuspChordX) return std::exp(-1.0 / x);
  return std::exp(-1.0 / kCuspChordX) * (x / kCuspChordX);
}

Complex cusp_gamma(double t) {
  if (t < kCuspT1) {
    const double s = t / kCuspT1;
    const double x = s * s;
    return {x, -cusp_height(x)};
  }
  if (t < kCuspT2) {
    const double u = (t - kCuspT1) / (kCuspT2 - kCuspT1);
    const double h = std::exp(-1.0);
    return {1.0, -h + 2.0 * h * u};
  }
  const double s = (1.0 - t) / (1.0 - kCuspT2);
  const double x = s * s;
  return {x, cusp_height(x)};
}

double wrap_unit(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

double segment_distance(Complex a, Complex b, Complex z) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double s = ((z - a) * std::conj(d)).real() / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(z - (a + s * d));
}

double orient(Complex a, Complex b, Complex c) {
  return (b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real();
}

bool on_segment(Complex a, Complex b, Complex p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol, double* argmin) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  const double t = 0.5 * (lo + hi);
  if (argmin != nullptr) *argmin = t;
  return f(t);
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disk: return "disk";
    case DomainKind::ellipse: return "ellipse";
    case DomainKind::polygon: return "polygon";
    case DomainKind::cusp: return "cusp";
    case DomainKind::custom: return "custom";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "disk") return DomainKind::disk;
  if (name == "ellipse") return DomainKind::ellipse;
  if (name == "polygon" || name == "square") return DomainKind::polygon;
  if (name == "cusp") return DomainKind::cusp;
  if (name == "custom") return DomainKind::custom;
  throw InvalidArgument("unknown domain kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// BoundaryCurve

BoundaryCurve::BoundaryCurve(Parameterization gamma, std::size_t reference_samples)
    : gamma_(std::move(gamma)) {
  reference_.reserve(reference_samples);
  reference_t_.reserve(reference_samples);
  for (std::size_t k = 0; k < reference_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(reference_samples);
    reference_t_.push_back(t);
    reference_.push_back(gamma_(t));
  }
}

BoundaryCurve::BoundaryCurve(std::vector<Complex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw InvalidArgument("polyline boundary needs at least 3 vertices");
  const std::size_t n = vertices_.size();
  cumulative_length_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative_length_[i + 1] = cumulative_length_[i] + std::abs(vertices_[(i + 1) % n] - vertices_[i]);
  }
  const double total = cumulative_length_.back();
  if (!(total > 0.0)) throw InvalidArgument("degenerate polyline boundary");
  for (double& c : cumulative_length_) c /= total;
  reference_ = vertices_;
  reference_t_.assign(cumulative_length_.begin(), cumulative_length_.end() - 1);
}

Complex BoundaryCurve::operator()(double t) const {
  t = wrap_unit(t);
  if (!is_polyline()) return gamma_(t);
  const auto it = std::upper_bound(cumulative_length_.begin(), cumulative_length_.end(), t);
  const std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_length_.begin(), it)) - 1;
  const std::size_t n = vertices_.size();
  const double t0 = cumulative_length_[seg];
  const double t1 = cumulative_length_[seg + 1];
  const double s = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
  return vertices_[seg] + s * (vertices_[(seg + 1) % n] - vertices_[seg]);
}

double BoundaryCurve::signed_area() const { return shoelace_area(reference_); }

// ---------------------------------------------------------------------------
// Polyline helpers

double shoelace_area(std::span<const Complex> polyline) {
  const std::size_t n = polyline.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = polyline[i];
    const Complex b = polyline[(i + 1) % n];
    acc += a.real() * b.imag() - b.real() * a.imag();
  }
  return 0.5 * acc;
}

int winding_number(std::span<const Complex> polyline, Complex z) {
  const std::size_t n = polyline.size();
  int wn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = polyline[i];
    const Complex b = polyline[(i + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && orient(a, b, z) > 0) ++wn;
    } else {
      if (b.imag() <= z.imag() && orient(a, b, z) < 0) --wn;
    }
  }
  return wn;
}

bool is_simple_polyline(std::span<const Complex> polyline) {
  const std::size_t n = polyline.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex p1 = polyline[i];
    const Complex p2 = polyline[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent segments share an endpoint
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(p1, p2, polyline[j], polyline[(j + 1) % n])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainKind kind, DomainParams params, BoundaryCurve boundary)
    : kind_(kind), params_(std::move(params)), boundary_(std::move(boundary)) {
  const auto ref = boundary_.reference();
  area_ = shoelace_area(ref);
  if (!(area_ > 0.0)) throw InvalidArgument("boundary must be positively oriented");

  // area centroid of the reference polygon
  const std::size_t n = ref.size();
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = ref[i];
    const Complex b = ref[(i + 1) % n];
    const double cross = a.real() * b.imag() - b.real() * a.imag();
    cx += (a.real() + b.real()) * cross;
    cy += (a.imag() + b.imag()) * cross;
  }
  centroid_ = Complex(cx / (6.0 * area_), cy / (6.0 * area_));

  double diam2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) diam2 = std::max(diam2, std::norm(ref[i] - ref[j]));
  }
  diameter_ = std::sqrt(diam2);

  bbox_ = {ref[0].real(), ref[0].real(), ref[0].imag(), ref[0].imag()};
  for (const Complex& p : ref) {
    bbox_.xmin = std::min(bbox_.xmin, p.real());
    bbox_.xmax = std::max(bbox_.xmax, p.real());
    bbox_.ymin = std::min(bbox_.ymin, p.imag());
    bbox_.ymax = std::max(bbox_.ymax, p.imag());
  }

  if (boundary_.is_polyline()) {
    const auto v = boundary_.vertices();
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Complex prev = v[(i + m - 1) % m];
      const Complex next = v[(i + 1) % m];
      const double cross = orient(prev, v[i], next);
      const double scale = std::abs(v[i] - prev) * std::abs(next - v[i]);
      if (std::abs(cross) > 1e-12 * scale) corners_.push_back(v[i]);
    }
  } else if (kind_ == DomainKind::cusp) {
    corners_ = {Complex(0.0, 0.0), Complex(1.0, -std::exp(-1.0)), Complex(1.0, std::exp(-1.0))};
  }

  if (winding_number(ref, centroid_) != 1) {
    throw InvalidArgument("domain centroid does not lie inside the boundary");
  }
}

std::size_t Domain::nearest_reference_index(Complex z) const {
  const auto ref = boundary_.reference();
  const std::size_t n = ref.size();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = segment_distance(ref[i], ref[(i + 1) % n], z);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double Domain::nearest_parameter(Complex z) const {
  const auto ref = boundary_.reference();
  const auto ts = boundary_.reference_parameters();
  const std::size_t n = ref.size();
  const std::size_t i = nearest_reference_index(z);
  if (boundary_.is_polyline()) {
    const Complex a = ref[i];
    const Complex b = ref[(i + 1) % n];
    const Complex d = b - a;
    const double s = std::clamp(((z - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    const double t0 = ts[i];
    const double t1 = (i + 1 < n) ? ts[i + 1] : 1.0;
    return wrap_unit(t0 + s * (t1 - t0));
  }
  const double lo = (i == 0) ? ts[n - 1] - 1.0 : ts[i - 1];
  const double hi = (i + 2 < n) ? ts[i + 2] : ts[(i + 2) % n] + 1.0;
  double tmin = 0.0;
  golden_minimize([&](double t) { return std::abs(boundary_(t) - z); }, lo, hi, 1e-15, &tmin);
  return wrap_unit(tmin);
}

double Domain::distance_to_boundary(Complex z) const {
  if (boundary_.is_polyline()) {
    const auto ref = boundary_.reference();
    const std::size_t i = nearest_reference_index(z);
    return segment_distance(ref[i], ref[(i + 1) % ref.size()], z);
  }
  return std::abs(boundary_(nearest_parameter(z)) - z);
}

double Domain::analytic_area() const {
  switch (kind_) {
    case DomainKind::disk: return std::numbers::pi * params_.radius * params_.radius;
    case DomainKind::ellipse: return std::numbers::pi * params_.a * params_.b;
    case DomainKind::cusp: return 2.0 * (std::exp(-1.0) - kExpIntE1AtOne);
    default: return area_;
  }
}

bool Domain::analytic_contains(Complex z) const {
  switch (kind_) {
    case DomainKind::disk: return std::abs(z - params_.center) < params_.radius;
    case DomainKind::ellipse: {
      const Complex w = z - params_.center;
      const double u = w.real() / params_.a;
      const double v = w.imag() / params_.b;
      return u * u + v * v < 1.0;
    }
    case DomainKind::cusp:
      return z.real() > 0.0 && z.real() < 1.0 && std::abs(z.imag()) < std::exp(-1.0 / z.real());
    default: return winding_number(boundary_.reference(), z) == 1;
  }
}

// ---------------------------------------------------------------------------
// Catalog

Domain make_disk(double radius, Complex center) {
  if (!(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  DomainParams p;
  p.radius = radius;
  p.center = center;
  BoundaryCurve curve([radius, center](double t) { return center + std::polar(radius, kTwoPi * t); },
                      4096);
  return Domain(DomainKind::disk, std::move(p), std::move(curve));
}

Domain make_ellipse(double a, double b, Complex center) {
  if (!(b > 0.0) || a < b) throw InvalidArgument("ellipse requires semi-axes a >= b > 0");
  DomainParams p;
  p.a = a;
  p.b = b;
  p.center = center;
  BoundaryCurve curve(
      [a, b, center](double t) {
        return center + Complex(a * std::cos(kTwoPi * t), b * std::sin(kTwoPi * t));
      },
      4096);
  return Domain(DomainKind::ellipse, std::move(p), std::move(curve));
}

Domain make_polygon(std::vector<Complex> vertices) {
  if (vertices.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  if (!is_simple_polyline(vertices)) throw InvalidArgument("polygon is not simple");
  if (!(shoelace_area(vertices) > 0.0)) throw InvalidArgument("polygon vertices must be counterclockwise");
  DomainParams p;
  p.vertices = vertices;
  return Domain(DomainKind::polygon, std::move(p), BoundaryCurve(std::move(vertices)));
}

Domain make_square(double side, Complex center) {
  if (!(side > 0.0)) throw InvalidArgument("square side must be positive");
  const double h = 0.5 * side;
  return make_polygon({center + Complex(-h, -h), center + Complex(h, -h), center + Complex(h, h),
                       center + Complex(-h, h)});
}

Domain make_cusp() {
  return Domain(DomainKind::cusp, DomainParams{}, BoundaryCurve(cusp_gamma, 10000));
}

Domain make_custom_domain(std::vector<Complex> vertices) {
  if (vertices.size() < 3) throw InvalidArgument("custom domain needs at least 3 vertices");
  if (!is_simple_polyline(vertices)) throw InvalidArgument("custom boundary is not simple");
  if (!(shoelace_area(vertices) > 0.0)) throw InvalidArgument("custom boundary must be counterclockwise");
  DomainParams p;
  p.vertices = vertices;
  return Domain(DomainKind::custom, std::move(p), BoundaryCurve(std::move(vertices)));
}

Domain make_catalog_domain(DomainKind kind, const DomainParams& params) {
  switch (kind) {
    case DomainKind::disk: return make_disk(params.radius, params.center);
    case DomainKind::ellipse: return make_ellipse(params.a, params.b, params.center);
    case DomainKind::polygon: return make_polygon(params.vertices);
    case DomainKind::cusp: return make_cusp();
    case DomainKind::custom: return make_custom_domain(params.vertices);
  }
  throw InvalidArgument("unknown domain kind");
}

std::vector<Complex> read_vertex_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open vertex file " + path.string());
  std::vector<Complex> vertices;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double x = 0.0;
    double y = 0.0;
    if (!(ss >> x >> y)) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected 'x y'");
    }
    vertices.emplace_back(x, y);
  }
  return vertices;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Complex> sample_parameter_uniform(const Domain& domain, std::size_t count) {
  if (count < 3) throw InvalidArgument("need at least 3 boundary samples");
  std::vector<Complex> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = domain.boundary()(static_cast<double>(k) / static_cast<double>(count));
  }
  return out;
}

std::vector<Complex> sample_boundary(const Domain& domain, std::size_t count) {
  if (count < 3) throw InvalidArgument("need at least 3 boundary samples");
  if (domain.kind() != DomainKind::ellipse) return sample_parameter_uniform(domain, count);

  // arc-length balanced: invert the cumulative length of the parameterization
  const std::size_t fine = std::max<std::size_t>(8 * count, 8192);
  std::vector<double> cum(fine + 1, 0.0);
  Complex prev = domain.boundary()(0.0);
  for (std::size_t i = 1; i <= fine; ++i) {
    const Complex cur = domain.boundary()(static_cast<double>(i) / static_cast<double>(fine));
    cum[i] = cum[i - 1] + std::abs(cur - prev);
    prev = cur;
  }
  const double total = cum.back();
  std::vector<Complex> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(count);
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::distance(cum.begin(), it)), fine) - 1;
    const double frac = cum[i + 1] > cum[i] ? (target - cum[i]) / (cum[i + 1] - cum[i]) : 0.0;
    out[k] = domain.boundary()((static_cast<double>(i) + frac) / static_cast<double>(fine));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quasiconformality estimator

double estimate_qc_constant(const Domain& domain, std::size_t count) {
  if (count < 64) throw InvalidArgument("estimate_qc_constant needs at least 64 samples");
  constexpr std::size_t kDirs = 64;
  const auto pts = sample_parameter_uniform(domain, count);
  const std::size_t m = pts.size();

  // proj[i * kDirs + k] = <p_i, e_k>
  std::vector<double> proj(m * kDirs);
  std::array<double, kDirs> cs{};
  std::array<double, kDirs> sn{};
  for (std::size_t k = 0; k < kDirs; ++k) {
    cs[k] = std::cos(std::numbers::pi * static_cast<double>(k) / kDirs);
    sn[k] = std::sin(std::numbers::pi * static_cast<double>(k) / kDirs);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < kDirs; ++k) {
      proj[i * kDirs + k] = pts[i].real() * cs[k] + pts[i].imag() * sn[k];
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double coincide = 1e-14 * domain.diameter();
  std::array<double, kDirs> pre_max;
  std::array<double, kDirs> pre_min;
  pre_max.fill(-inf);
  pre_min.fill(inf);
  std::vector<double> diam_complement(m, 0.0);
  double best = 1.0;

  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double* pi = &proj[i * kDirs];
    for (std::size_t k = 0; k < kDirs; ++k) {
      pre_max[k] = std::max(pre_max[k], pi[k]);
      pre_min[k] = std::min(pre_min[k], pi[k]);
    }
    // subarc through the start of the parameterization: {j..m-1} U {0..i}
    std::array<double, kDirs> suf_max;
    std::array<double, kDirs> suf_min;
    suf_max.fill(-inf);
    suf_min.fill(inf);
    for (std::size_t j = m - 1; j > i; --j) {
      const double* pj = &proj[j * kDirs];
      double w = 0.0;
      for (std::size_t k = 0; k < kDirs; ++k) {
        suf_max[k] = std::max(suf_max[k], pj[k]);
        suf_min[k] = std::min(suf_min[k], pj[k]);
        w = std::max(w, std::max(suf_max[k], pre_max[k]) - std::min(suf_min[k], pre_min[k]));
      }
      diam_complement[j] = w;
    }
    // subarc {i..j}
    std::array<double, kDirs> run_max;
    std::array<double, kDirs> run_min;
    for (std::size_t k = 0; k < kDirs; ++k) run_max[k] = run_min[k] = pi[k];
    for (std::size_t j = i + 1; j < m; ++j) {
      const double* pj = &proj[j * kDirs];
      double w = 0.0;
      for (std::size_t k = 0; k < kDirs; ++k) {
        run_max[k] = std::max(run_max[k], pj[k]);
        run_min[k] = std::min(run_min[k], pj[k]);
        w = std::max(w, run_max[k] - run_min[k]);
      }
      const double chord = std::abs(pts[i] - pts[j]);
      if (chord <= coincide) continue;
      best = std::max(best, std::min(w, diam_complement[j]) / chord);
    }
  }
  return best;
}

bool point_in_domain(const Domain& domain, Complex z) {
  const BoundingBox& bb = domain.bbox();
  if (z.real() < bb.xmin || z.real() > bb.xmax || z.imag() < bb.ymin || z.imag() > bb.ymax) return false;
  // closed-form boundaries: the reference polyline is only a chord approximation
  if (!domain.boundary().is_polyline()) return domain.analytic_contains(z);
  const auto ref = domain.boundary().reference();
  if (winding_number(ref, z) != 1) return false;
  const double tol = 1e-12 * domain.diameter();
  // cheap rejection before the exact boundary distance
  const std::size_t n = ref.size();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, segment_distance(ref[i], ref[(i + 1) % n], z));
  return d > tol;
}

// ---------------------------------------------------------------------------
// WeightSpec

WeightSpec::WeightSpec() : h0_([](Complex) { return 1.0; }) {}

WeightSpec::WeightSpec(Factor h0, double h0_bound, std::vector<Singularity> singularities)
    : h0_(std::move(h0)), h0_bound_(h0_bound), singularities_(std::move(singularities)),
      constant_h0_(false) {
  if (!h0_) throw InvalidArgument("weight factor h0 must be callable");
  if (!(h0_bound_ >= 1.0)) throw InvalidArgument("weight bound C_h must be >= 1");
}

WeightSpec WeightSpec::constant(double value) {
  if (!(value > 0.0)) throw InvalidArgument("constant weight must be positive");
  WeightSpec w;
  w.h0_ = [value](Complex) { return value; };
  w.h0_bound_ = std::max(value, 1.0 / value);
  return w;
}

double WeightSpec::singular_part(Complex z) const {
  double v = 1.0;
  for (const Singularity& s : singularities_) v *= std::pow(std::abs(z - s.point), s.exponent);
  return v;
}

WeightSpec WeightSpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("weight scale factor must be positive");
  WeightSpec w = *this;
  Factor base = h0_;
  w.h0_ = [base, factor](Complex z) { return factor * base(z); };
  w.h0_bound_ = h0_bound_ * std::max(factor, 1.0 / factor);
  return w;
}

void WeightSpec::validate(const Domain& domain) const {
  const double diam = domain.diameter();
  for (std::size_t j = 0; j < singularities_.size(); ++j) {
    const Singularity& s = singularities_[j];
    if (!(s.exponent > -2.0)) {
      throw InvalidArgument("singular exponent alpha_" + std::to_string(j + 1) + " must exceed -2");
    }
    if (domain.distance_to_boundary(s.point) > 1e-9 * diam) {
      throw InvalidArgument("singular point z_" + std::to_string(j + 1) + " does not lie on the boundary");
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (std::abs(s.point - singularities_[k].point) <= 1e-9 * diam) {
        throw InvalidArgument("singular points must be pairwise distinct");
      }
    }
  }
  const BoundingBox& bb = domain.bbox();
  constexpr int kGrid = 24;
  for (int i = 0; i < kGrid; ++i) {
    for (int k = 0; k < kGrid; ++k) {
      const Complex z(bb.xmin + (bb.xmax - bb.xmin) * (i + 0.5) / kGrid,
                      bb.ymin + (bb.ymax - bb.ymin) * (k + 0.5) / kGrid);
      if (!point_in_domain(domain, z)) continue;
      const double v = h0_(z);
      if (!(v >= 1.0 / h0_bound_ * (1 - 1e-12) && v <= h0_bound_ * (1 + 1e-12))) {
        throw InvalidArgument("h0 leaves its declared bounds [1/C_h, C_h] inside the domain");
      }
    }
  }
}

}  // namespace chlab
