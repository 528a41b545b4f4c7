#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "chlab/chlab.hpp"
#include "json.hpp"

using namespace chlab;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : read_config(c.config);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed_given) cfg.seed = c.seed;
  return cfg;
}

void save_summary(const ExperimentConfig& cfg, const std::string& name, const json& j) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream(cfg.out_dir / (name + "_summary.json")) << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
}

int theorem1(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const RatioReport r = run_theorem1(cfg);
  emit_plots(r, cfg.out_dir);
  save_summary(cfg, "theorem1", {{"rows", r.rows.size()},
                                 {"min_ratio", r.min_ratio},
                                 {"max_ratio", r.max_ratio},
                                 {"spread", r.spread},
                                 {"spread_max", cfg.spread_max},
                                 {"slope", r.slope},
                                 {"slope_top_half", r.slope_top},
                                 {"slope_max", cfg.slope_max},
                                 {"basis_defect", r.basis_defect},
                                 {"monotonicity_violations", r.monotonicity_violations},
                                 {"skipped_points", r.skipped_points},
                                 {"pass", r.pass}});
  return r.pass ? 0 : 1;
}

int theorem2(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const DecayReport r = run_theorem2(cfg);
  emit_plots(r, cfg.out_dir);
  save_summary(cfg, "theorem2", {{"lambda0", r.lambda0},
                                 {"area", r.area},
                                 {"diameter", r.diameter},
                                 {"slope", r.slope},
                                 {"slope_top_half", r.slope_top},
                                 {"decay_slope_max", cfg.decay_slope_max},
                                 {"top_from", r.top_from},
                                 {"proxies_decreasing", r.proxies_decreasing},
                                 {"lambda_monotone", r.lambda_monotone},
                                 {"basis_defect", r.basis_defect},
                                 {"pass", r.pass}});
  return r.pass ? 0 : 1;
}

int opoly(const Common& c, int k) {
  const ExperimentConfig cfg = load(c);
  const OpolyReport r = run_opoly_bounds(cfg, k > 0 ? k : cfg.k_factor);
  emit_plots(r, cfg.out_dir);
  save_summary(cfg, "opoly", {{"rows", r.rows.size()},
                              {"k_factor", r.k_factor},
                              {"max_envelope_ratio", r.max_ratio},
                              {"min_block_statistic", r.min_block_max},
                              {"block_floor", cfg.s_floor},
                              {"kernel_violations", r.kernel_violations},
                              {"basis_defect", r.basis_defect},
                              {"pass", r.pass}});
  return r.pass ? 0 : 1;
}

int qc_constant(const Common& c, int samples) {
  const ExperimentConfig cfg = load(c);
  const Domain d = cfg.make_domain();
  const int m = samples > 0 ? samples : cfg.qc_samples;
  json rows = json::array();
  for (int k = 64; k <= m; k *= 2) {
    rows.push_back({{"samples", k}, {"constant", estimate_qc_constant(d, static_cast<std::size_t>(k))}});
  }
  save_summary(cfg, "qc_constant", {{"domain", to_string(d.kind())}, {"estimates", rows}});
  return 0;
}

int green_check(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const GreenCheckReport r = run_green_check(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  write_green_model_csv(r.model, cfg.out_dir / "green_model.csv");
  const Domain d = cfg.make_domain();
  for (double delta : r.deltas) {
    char name[64];
    std::snprintf(name, sizeof name, "level_%g.csv", delta);
    write_level_curve_csv(level_curve(r.model, d, delta, 256), cfg.out_dir / name);
  }
  const bool ok = r.nonpositive_probes == 0 && r.nested;
  save_summary(cfg, "green_check", {{"capacity", r.capacity},
                                    {"residual", r.model.residual},
                                    {"charges", r.model.charges.size()},
                                    {"probes", r.probes},
                                    {"nonpositive_probes", r.nonpositive_probes},
                                    {"nested_levels", r.nested},
                                    {"pass", ok}});
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Christoffel functions on quasidisks and the cusp domain"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "key = value experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", common.out, "output directory (overrides the config)");
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&](const std::uint64_t& s) {
        common.seed = s;
        common.seed_given = true;
      },
      "seed for randomized probes");

  auto* t1 = app.add_subcommand("theorem1", "two-sided ratio of lambda_n against the level distance");
  auto* t2 = app.add_subcommand("theorem2", "decay of lambda_n at the cusp tip");
  auto* op = app.add_subcommand("opoly", "bounds on orthonormal polynomials");
  int k = 0;
  op->add_option("--k", k, "block factor k (default from config)");
  auto* qc = app.add_subcommand("qc-constant", "three-point constant estimates under sample doubling");
  int samples = 0;
  qc->add_option("--samples", samples, "largest sample count (default from config)");
  auto* gc = app.add_subcommand("green-check", "Green's function fit, positivity and nested levels");

  CLI11_PARSE(app, argc, argv);
  try {
    if (t1->parsed()) return theorem1(common);
    if (t2->parsed()) return theorem2(common);
    if (op->parsed()) return opoly(common, k);
    if (qc->parsed()) return qc_constant(common, samples);
    if (gc->parsed()) return green_check(common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
