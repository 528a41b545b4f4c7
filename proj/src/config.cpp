#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "chlab/error.hpp"
#include "chlab/experiments.hpp"

namespace chlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw InvalidArgument("config key " + key + ": not a number: '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw InvalidArgument("config key " + key + ": not an integer: '" + v + "'");
  return static_cast<int>(d);
}

// "x" or "x,y"
Complex to_complex(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) return {to_double(key, v), 0.0};
  return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

// "prefix.K" -> K (1-based), or -1
int indexed(const std::string& key, const std::string& prefix) {
  if (key.rfind(prefix, 0) != 0) return -1;
  const std::string tail = key.substr(prefix.size());
  if (tail.empty() || !std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) return -1;
  const int k = std::stoi(tail);
  return k >= 1 ? k : -1;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  std::map<int, double> alpha;
  std::map<int, Complex> sing_z;
  std::map<int, Complex> eval_z;
  std::map<int, Complex> verts;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool square = false;
  double side = 2.0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "domain.kind") {
      c.domain_kind = domain_kind_from_string(v);
      square = v == "square";
    } else if (key == "domain.side") side = to_double(key, v);
    else if (key == "domain.a") c.domain.a = to_double(key, v);
    else if (key == "domain.b") c.domain.b = to_double(key, v);
    else if (key == "domain.radius") c.domain.radius = to_double(key, v);
    else if (key == "domain.center") c.domain.center = to_complex(key, v);
    else if (key == "domain.vertices") c.vertex_file = base_dir / v;
    else if (int k = indexed(key, "domain.vertex."); k > 0) verts[k] = to_complex(key, v);
    else if (key == "weight.h0") c.h0 = to_double(key, v);
    else if (int k = indexed(key, "weight.alpha."); k > 0) alpha[k] = to_double(key, v);
    else if (int k = indexed(key, "weight.z."); k > 0) sing_z[k] = to_complex(key, v);
    else if (key == "p") c.p = to_double(key, v);
    else if (key == "n_min") c.n_min = to_int(key, v);
    else if (key == "n_max") c.n_max = to_int(key, v);
    else if (key == "points") c.points = to_int(key, v);
    else if (int k = indexed(key, "point."); k > 0) eval_z[k] = to_complex(key, v);
    else if (key == "corner_exclusion") c.corner_exclusion = to_double(key, v);
    else if (key == "quad_tol") c.quad_tol = to_double(key, v);
    else if (key == "green.charges") c.green_charges = to_int(key, v);
    else if (key == "green.tol") c.green_tol = to_double(key, v);
    else if (key == "spread_max") c.spread_max = to_double(key, v);
    else if (key == "slope_max") c.slope_max = to_double(key, v);
    else if (key == "decay_slope_max") c.decay_slope_max = to_double(key, v);
    else if (key == "k_factor") c.k_factor = to_int(key, v);
    else if (key == "s_floor") c.s_floor = to_double(key, v);
    else if (key == "qc.samples") c.qc_samples = to_int(key, v);
    else if (key == "out") c.out_dir = v;
    else if (key == "seed") c.seed = std::stoull(v);
    else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }

  auto dense = [](const auto& m, const char* what) {
    int expect = 1;
    for (const auto& kv : m) {
      if (kv.first != expect++) throw InvalidArgument(std::string("config: ") + what + " indices must be 1, 2, ... without gaps");
    }
  };
  dense(alpha, "weight.alpha");
  dense(sing_z, "weight.z");
  dense(eval_z, "point");
  dense(verts, "domain.vertex");
  if (alpha.size() != sing_z.size()) throw InvalidArgument("config: every weight.alpha.K needs a matching weight.z.K");
  for (const auto& [k, a] : alpha) c.singularities.push_back({sing_z.at(k), a});
  for (const auto& kv : eval_z) c.explicit_points.push_back(kv.second);
  for (const auto& kv : verts) c.domain.vertices.push_back(kv.second);
  if (square && c.domain.vertices.empty() && c.vertex_file.empty()) {
    const Domain sq = make_square(side, c.domain.center);
    c.domain.vertices.assign(sq.boundary().vertices().begin(), sq.boundary().vertices().end());
  }
  return c;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Domain ExperimentConfig::make_domain() const {
  if ((domain_kind == DomainKind::polygon || domain_kind == DomainKind::custom) && domain.vertices.empty()) {
    if (vertex_file.empty()) throw InvalidArgument("polygon domains need domain.vertex.K entries or domain.vertices");
    DomainParams prm = domain;
    prm.vertices = read_vertex_file(vertex_file);
    return make_catalog_domain(domain_kind, prm);
  }
  return make_catalog_domain(domain_kind, domain);
}

WeightSpec ExperimentConfig::make_weight() const {
  const double h = h0;
  return WeightSpec([h](Complex) { return h; }, std::max(h, 1.0 / h), singularities);
}

void ExperimentConfig::validate() const {
  if (n_min < 1) throw InvalidArgument("n_min must be at least 1");
  if (n_max < n_min) throw InvalidArgument("n_max must not be below n_min");
  if (n_max > 200) throw InvalidArgument("n_max exceeds the basis degree cap 200");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("p must satisfy 1 <= p < inf");
  if (explicit_points.empty() && points < 1) throw InvalidArgument("points must be positive");
  if (!(h0 > 0.0)) throw InvalidArgument("weight.h0 must be positive");
  if (!(quad_tol > 0.0) || !(green_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (green_charges < 4) throw InvalidArgument("green.charges must be at least 4");
  if (k_factor < 2) throw InvalidArgument("k_factor must be an integer >= 2");
  if (!(corner_exclusion >= 0.0)) throw InvalidArgument("corner_exclusion must be non-negative");
}

}  // namespace chlab
