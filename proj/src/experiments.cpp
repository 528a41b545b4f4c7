#include "chlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "chlab/error.hpp"
#include "compensated.hpp"
#include "report_io.hpp"

namespace chlab {

namespace {

std::string where(int n, Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << n << ", z=(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

int count_increases(const ChristoffelResult& r) {
  int bad = 0;
  for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
    if (r.objective_history[k] > r.objective_history[k - 1]) ++bad;
  }
  return bad;
}

GreenModel fit_for(const ExperimentConfig& c, const Domain& d) {
  return fit_green(d, c.green_charges, 2 * c.green_charges, c.green_tol);
}

}  // namespace

ExperimentSetup prepare(const ExperimentConfig& config, int max_degree) {
  config.validate();
  if (max_degree < 0 || max_degree > 200) throw InvalidArgument("basis degree outside [0, 200]");
  Domain domain = config.make_domain();
  WeightSpec weight = config.make_weight();
  weight.validate(domain);
  QuadratureOptions o;
  o.target_accuracy = config.quad_tol;
  o.exact_degree = 2 * max_degree + 8;
  QuadratureRule rule = build_rule(domain, weight, o);
  OrthonormalBasis basis = compute_basis(rule, weight, max_degree);
  return {std::move(domain), std::move(weight), std::move(rule), std::move(basis)};
}

std::vector<Complex> evaluation_points(const ExperimentConfig& config, const Domain& domain) {
  const double diam = domain.diameter();
  std::vector<Complex> out;
  if (!config.explicit_points.empty()) {
    for (const Complex& z : config.explicit_points) {
      if (domain.distance_to_boundary(z) > 1e-9 * diam) {
        throw InvalidArgument("evaluation point " + where(0, z).substr(5) + " is not on the boundary");
      }
      out.push_back(z);
    }
    return out;
  }
  for (const Complex& z : sample_boundary(domain, static_cast<std::size_t>(config.points))) {
    bool near_corner = false;
    if (domain.kind() == DomainKind::polygon || domain.kind() == DomainKind::custom) {
      for (const Complex& c : domain.corners()) near_corner |= std::abs(z - c) < config.corner_exclusion * diam;
    }
    if (!near_corner) out.push_back(z);
  }
  return out;
}

double weight_product(const WeightSpec& weight, Complex z, double rho, double power) {
  double prod = 1.0;
  for (const Singularity& s : weight.singularities()) prod *= std::pow(std::abs(z - s.point) + rho, power * s.exponent);
  return prod;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs at least two matching points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    num += dx * (std::log(y[i]) - my);
    den += dx * dx;
  }
  if (!(den > 0.0)) throw InvalidArgument("slope needs at least two distinct abscissae");
  return num / den;
}

RatioReport run_theorem1(const ExperimentConfig& config) {
  config.validate();
  if (config.domain_kind == DomainKind::cusp) throw InvalidArgument("the two-sided ratio needs a quasidisk; the cusp domain is rejected");
  const ExperimentSetup s = prepare(config, config.n_max);
  const GreenModel model = fit_for(config, s.domain);
  const auto pts = evaluation_points(config, s.domain);
  if (pts.empty()) throw InvalidArgument("no evaluation points left after the corner exclusion");

  RatioReport rep;
  rep.p = config.p;
  rep.basis_defect = s.basis.defect;
  rep.skipped_points = config.explicit_points.empty() ? config.points - static_cast<int>(pts.size()) : 0;
  std::vector<double> previous(pts.size(), std::numeric_limits<double>::infinity());
  rep.min_ratio = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (int n = config.n_min; n <= config.n_max; ++n) {
    LevelDistance dist(model, s.domain, 1.0 / n);
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Complex z = pts[i];
      RatioRow row;
      row.n = n;
      row.z = z;
      try {
        const ChristoffelResult cr = christoffel_lp(s.rule, s.weight, s.basis, z, n, config.p);
        rep.objective_increases += count_increases(cr);
        row.lambda = cr.value;
        row.rho = dist(z);
      } catch (const Error& e) {
        throw Error("ratio experiment failed at " + where(n, z) + ": " + e.what());
      }
      row.weight_product = weight_product(s.weight, z, row.rho);
      row.ratio = row.lambda / (row.rho * row.rho * row.weight_product);
      finite = finite && std::isfinite(row.ratio) && row.ratio > 0.0;
      // nested infima, allowing for rounding in the solver
      if (row.lambda > previous[i] * (1.0 + 1e-9)) ++rep.monotonicity_violations;
      previous[i] = row.lambda;
      hi = std::max(hi, row.ratio);
      lo = std::min(lo, row.ratio);
      rep.rows.push_back(row);
    }
    rep.degrees.push_back(n);
    rep.max_ratio_by_n.push_back(hi);
    rep.min_ratio_by_n.push_back(lo);
    rep.max_ratio = std::max(rep.max_ratio, hi);
    rep.min_ratio = std::min(rep.min_ratio, lo);
  }
  rep.spread = rep.max_ratio / rep.min_ratio;
  if (rep.degrees.size() >= 2) {
    std::vector<double> ns(rep.degrees.begin(), rep.degrees.end());
    rep.slope = loglog_slope(ns, rep.max_ratio_by_n);
    const std::size_t half = ns.size() / 2;
    if (ns.size() - half >= 2) {
      rep.slope_top = loglog_slope({ns.begin() + static_cast<std::ptrdiff_t>(half), ns.end()},
                                   {rep.max_ratio_by_n.begin() + static_cast<std::ptrdiff_t>(half), rep.max_ratio_by_n.end()});
    }
  }
  rep.pass = finite && rep.spread <= config.spread_max && std::abs(rep.slope) <= config.slope_max;
  return rep;
}

OpolyReport run_opoly_bounds(const ExperimentConfig& config, int k_factor) {
  config.validate();
  if (k_factor < 2) throw InvalidArgument("k_factor must be an integer >= 2");
  if (config.domain_kind == DomainKind::cusp) throw InvalidArgument("level distances are not available on the cusp domain");
  const int top = k_factor * config.n_max;
  if (top > 200) throw InvalidArgument("k_factor * n_max exceeds the basis degree cap 200");
  const ExperimentSetup s = prepare(config, top);
  const GreenModel model = fit_for(config, s.domain);
  const auto pts = evaluation_points(config, s.domain);
  if (pts.empty()) throw InvalidArgument("no evaluation points left after the corner exclusion");

  // rho_{1/j}(z) for every degree that enters a row or a block
  std::vector<std::vector<double>> rho(static_cast<std::size_t>(top + 1), std::vector<double>(pts.size(), 0.0));
  for (int j = config.n_min; j <= top; ++j) {
    LevelDistance dist(model, s.domain, 1.0 / j);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      try {
        rho[static_cast<std::size_t>(j)][i] = dist(pts[i]);
      } catch (const Error& e) {
        throw Error("level distance failed at " + where(j, pts[i]) + ": " + e.what());
      }
    }
  }

  OpolyReport rep;
  rep.k_factor = k_factor;
  rep.basis_defect = s.basis.defect;
  rep.min_block_max = std::numeric_limits<double>::infinity();
  for (int n = config.n_min; n <= config.n_max; ++n) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Complex z = pts[i];
      const auto v = orthonormal_values(s.basis, z, top);
      OpolyRow row;
      row.n = n;
      row.z = z;
      row.abs_pi = std::abs(v[static_cast<std::size_t>(n)]);
      detail::CompensatedSum k;
      for (int j = 0; j <= n; ++j) k.add(std::norm(v[static_cast<std::size_t>(j)]));
      row.kernel = k.value();
      row.rho = rho[static_cast<std::size_t>(n)][i];
      row.envelope = 1.0 / (row.rho * weight_product(s.weight, z, row.rho, 0.5));
      row.ratio = row.abs_pi / row.envelope;
      for (int j = n + 1; j <= k_factor * n; ++j) {
        const double rj = rho[static_cast<std::size_t>(j)][i];
        row.block_max = std::max(row.block_max, std::sqrt(static_cast<double>(j)) * rj * std::abs(v[static_cast<std::size_t>(j)]));
      }
      if (row.abs_pi * row.abs_pi > row.kernel * (1.0 + 1e-12)) ++rep.kernel_violations;
      rep.max_ratio = std::max(rep.max_ratio, row.ratio);
      rep.min_block_max = std::min(rep.min_block_max, row.block_max);
      rep.rows.push_back(row);
    }
  }
  rep.pass = rep.kernel_violations == 0 && std::isfinite(rep.max_ratio) && rep.min_block_max >= config.s_floor;
  return rep;
}

DecayReport run_theorem2(const ExperimentConfig& config) {
  config.validate();
  if (config.domain_kind != DomainKind::cusp) throw InvalidArgument("the decay experiment runs on the cusp domain");
  if (!config.singularities.empty() || config.h0 != 1.0) throw InvalidArgument("the decay experiment uses the plain area measure");
  const ExperimentSetup s = prepare(config, config.n_max);

  DecayReport rep;
  rep.p = config.p;
  rep.diameter = s.domain.diameter();
  rep.area = s.domain.analytic_area();
  rep.basis_defect = s.basis.defect;
  const Complex tip{0.0, 0.0};
  auto lambda = [&](int n) {
    try {
      const ChristoffelResult r = christoffel_lp(s.rule, s.weight, s.basis, tip, n, config.p);
      rep.objective_increases += count_increases(r);
      return r.value;
    } catch (const Error& e) {
      throw Error("decay experiment failed at " + where(n, tip) + ": " + e.what());
    }
  };
  rep.lambda0 = lambda(0);
  rep.lambda_monotone = true;
  double previous = rep.lambda0;
  for (int n = config.n_min; n <= config.n_max; ++n) {
    DecayRow row;
    row.n = n;
    row.lambda = lambda(n);
    const double scale = 8.0 * n * n / rep.diameter;
    row.proxy1 = row.lambda * scale;
    row.proxy2 = row.lambda * scale * scale;
    row.proxy4 = row.lambda * std::pow(scale, 4);
    if (row.lambda > previous * (1.0 + 1e-9)) rep.lambda_monotone = false;
    previous = row.lambda;
    rep.rows.push_back(row);
  }
  rep.top_from = (config.n_min + config.n_max + 1) / 2;
  std::vector<double> ns;
  std::vector<double> ls;
  std::vector<double> ns_top;
  std::vector<double> ls_top;
  for (const DecayRow& r : rep.rows) {
    ns.push_back(r.n);
    ls.push_back(r.lambda);
    if (r.n >= rep.top_from) {
      ns_top.push_back(r.n);
      ls_top.push_back(r.lambda);
    }
  }
  if (ns.size() >= 2) rep.slope = loglog_slope(ns, ls);
  if (ns_top.size() >= 2) rep.slope_top = loglog_slope(ns_top, ls_top);
  rep.proxies_decreasing = proxy_strictly_decreasing(rep, 1, rep.top_from, config.n_max) &&
                           proxy_strictly_decreasing(rep, 2, rep.top_from, config.n_max);
  rep.pass = rep.proxies_decreasing && rep.lambda_monotone && rep.slope <= config.decay_slope_max;
  return rep;
}

bool proxy_strictly_decreasing(const DecayReport& report, int k, int from, int to) {
  if (k != 1 && k != 2 && k != 4) throw InvalidArgument("proxies are tabulated for k = 1, 2, 4");
  double previous = std::numeric_limits<double>::infinity();
  int seen = 0;
  for (const DecayRow& r : report.rows) {
    if (r.n < from || r.n > to) continue;
    const double v = k == 1 ? r.proxy1 : (k == 2 ? r.proxy2 : r.proxy4);
    if (!(v < previous)) return false;
    previous = v;
    ++seen;
  }
  return seen >= 2;
}

GreenCheckReport run_green_check(const ExperimentConfig& config) {
  config.validate();
  const Domain domain = config.make_domain();
  GreenCheckReport rep;
  rep.model = fit_for(config, domain);
  rep.capacity = rep.model.capacity();

  // maximum principle on a box around the domain
  std::mt19937_64 rng(config.seed);
  const BoundingBox& bb = domain.bbox();
  const double pad = domain.diameter();
  std::uniform_real_distribution<double> ux(bb.xmin - pad, bb.xmax + pad);
  std::uniform_real_distribution<double> uy(bb.ymin - pad, bb.ymax + pad);
  while (rep.probes < 1000) {
    const Complex z(ux(rng), uy(rng));
    if (point_in_domain(domain, z) || domain.distance_to_boundary(z) < 1e-6 * pad) continue;
    ++rep.probes;
    if (!(eval_green(rep.model, domain, z) > 0.0)) ++rep.nonpositive_probes;
  }

  rep.points = evaluation_points(config, domain);
  rep.deltas = {1e-3, 1e-2, 0.1, 1.0};
  rep.nested = true;
  for (double delta : rep.deltas) {
    LevelDistance dist(rep.model, domain, delta);
    std::vector<double> r;
    for (const Complex& z : rep.points) r.push_back(dist(z));
    if (!rep.rho.empty()) {
      for (std::size_t i = 0; i < r.size(); ++i) rep.nested = rep.nested && r[i] > rep.rho.back()[i];
    }
    rep.rho.push_back(std::move(r));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// output

std::vector<std::filesystem::path> emit_plots(const RatioReport& report, const std::filesystem::path& dir) {
  if (report.rows.empty()) throw InvalidArgument("ratio report has no rows");
  using detail::fmt;
  std::string csv = "n,x,y,lambda,rho,weight_product,ratio\n";
  for (const RatioRow& r : report.rows) {
    csv += std::to_string(r.n) + ',' + fmt(r.z.real()) + ',' + fmt(r.z.imag()) + ',' + fmt(r.lambda) + ',' + fmt(r.rho) +
           ',' + fmt(r.weight_product) + ',' + fmt(r.ratio) + '\n';
  }
  std::vector<double> ns(report.degrees.begin(), report.degrees.end());
  const std::string svg = detail::svg_line_plot({"two-sided ratio, p = " + fmt(report.p), "n", "R", true, true},
                                                {{"max R", ns, report.max_ratio_by_n}, {"min R", ns, report.min_ratio_by_n}});
  const auto a = dir / "ratio.csv";
  const auto b = dir / "ratio.svg";
  detail::write_text(a, csv);
  detail::write_text(b, svg);
  return {a, b};
}

std::vector<std::filesystem::path> emit_plots(const OpolyReport& report, const std::filesystem::path& dir) {
  if (report.rows.empty()) throw InvalidArgument("orthonormal polynomial report has no rows");
  using detail::fmt;
  std::string csv = "n,x,y,abs_pi,kernel,rho,envelope,ratio,block_max\n";
  std::vector<double> ns;
  std::vector<double> max_ratio;
  std::vector<double> min_block;
  for (const OpolyRow& r : report.rows) {
    csv += std::to_string(r.n) + ',' + fmt(r.z.real()) + ',' + fmt(r.z.imag()) + ',' + fmt(r.abs_pi) + ',' + fmt(r.kernel) +
           ',' + fmt(r.rho) + ',' + fmt(r.envelope) + ',' + fmt(r.ratio) + ',' + fmt(r.block_max) + '\n';
    if (ns.empty() || ns.back() != r.n) {
      ns.push_back(r.n);
      max_ratio.push_back(r.ratio);
      min_block.push_back(r.block_max);
    } else {
      max_ratio.back() = std::max(max_ratio.back(), r.ratio);
      min_block.back() = std::min(min_block.back(), r.block_max);
    }
  }
  const std::string svg = detail::svg_line_plot({"orthonormal polynomial bounds", "n", "value", true, true},
                                                {{"max |pi_n| / envelope", ns, max_ratio}, {"min block statistic", ns, min_block}});
  const auto a = dir / "opoly.csv";
  const auto b = dir / "opoly.svg";
  detail::write_text(a, csv);
  detail::write_text(b, svg);
  return {a, b};
}

std::vector<std::filesystem::path> emit_plots(const DecayReport& report, const std::filesystem::path& dir) {
  if (report.rows.empty()) throw InvalidArgument("decay report has no rows");
  using detail::fmt;
  std::string csv = "n,lambda,proxy1,proxy2,proxy4\n";
  std::vector<double> ns;
  std::vector<double> l;
  std::vector<double> p1;
  std::vector<double> p2;
  for (const DecayRow& r : report.rows) {
    csv += std::to_string(r.n) + ',' + fmt(r.lambda) + ',' + fmt(r.proxy1) + ',' + fmt(r.proxy2) + ',' + fmt(r.proxy4) + '\n';
    ns.push_back(r.n);
    l.push_back(r.lambda);
    p1.push_back(r.proxy1);
    p2.push_back(r.proxy2);
  }
  const std::string svg = detail::svg_line_plot({"decay at the cusp tip, p = " + fmt(report.p), "n", "value", true, true},
                                                {{"lambda_n", ns, l}, {"P_1", ns, p1}, {"P_2", ns, p2}});
  const auto a = dir / "decay.csv";
  const auto b = dir / "decay.svg";
  detail::write_text(a, csv);
  detail::write_text(b, svg);
  return {a, b};
}

}  // namespace chlab
