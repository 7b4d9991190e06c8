#include "rsr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace rsr::experiments {

HaystackParams convergence_params() { return HaystackParams{200, 200, 1.0, 1.0, 100, 5}; }

HaystackParams stability_grid_params() { return HaystackParams{200, 200, 1.0, 1.0, 200, 10}; }

GgdConfig default_piecewise(Eigen::Index ambient, int max_iters) {
  GgdConfig cfg;
  cfg.schedule = PiecewiseConstantSchedule{1.0 / static_cast<double>(ambient), 20, 0.5};
  cfg.max_iters = max_iters;
  return cfg;
}

StabilityGrid stability_grid(const Dataset& data, const StabilityGridConfig& cfg) {
  if (!data.l_star) throw ConfigError("stability grid needs a ground-truth subspace");
  if (!(cfg.gamma > 0 && cfg.gamma < std::numbers::pi / 2))
    throw ConfigError("gamma must lie in (0, pi/2)");
  if (cfg.n_angles < 1 || cfg.per_angle < 1)
    throw ConfigError("stability grid needs at least one angle and one sample per angle");
  const Subspace& l_star = *data.l_star;

  StabilityGrid grid;
  Diagnostics diag;
  const double perm = permeance(data.inliers, l_star, &diag);
  const double inlier_term = std::cos(cfg.gamma) * perm;

  const int total = cfg.n_angles * cfg.per_angle;
  grid.rows.resize(static_cast<std::size_t>(total));
  for (int a = 0; a < cfg.n_angles; ++a) {
    const double angle = cfg.gamma * (a + 1) / cfg.n_angles;
    for (int s = 0; s < cfg.per_angle; ++s) {
      const int idx = a * cfg.per_angle + s;
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(idx)));
      grid.subspaces.push_back(subspace_at_angle(l_star, angle, rng));
      grid.rows[static_cast<std::size_t>(idx)] = {angle, s, 0.0};
    }
  }
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < total; ++i) {
    const auto u = static_cast<std::size_t>(i);
    grid.rows[u].value = inlier_term - alignment(data.outliers, grid.subspaces[u]);
  }

  StabilityReport& rep = grid.report;
  rep.gamma = cfg.gamma;
  rep.n_samples = total;
  rep.seed = cfg.seed;
  rep.permeance = perm;
  rep.alignment_at_center = alignment(data.outliers, l_star);
  rep.alignment_global_bound = alignment_global_bound(data.outliers);
  double sup = rep.alignment_at_center;
  for (const auto& row : grid.rows) sup = std::max(sup, inlier_term - row.value);
  rep.alignment_sup_estimate = sup;
  rep.s_sampled = inlier_term - sup;
  rep.s_global_lower = inlier_term - rep.alignment_global_bound;
  rep.warnings = diag.warnings;
  return grid;
}

std::vector<std::pair<std::string, StepSchedule>> convergence_schedules(Eigen::Index ambient) {
  const double s = 1.0 / static_cast<double>(ambient);
  return {{"sqrt", SqrtSchedule{s}},
          {"piecewise_K20_shrink0.5", PiecewiseConstantSchedule{s, 20, 0.5}},
          {"piecewise_K50_shrink0.1", PiecewiseConstantSchedule{s, 50, 0.1}},
          {"adaptive", AdaptiveShrinkSchedule{s, 40}}};
}

std::vector<NamedTrace> convergence(const Dataset& data, Eigen::Index d, int max_iters,
                                    const std::vector<std::pair<std::string, StepSchedule>>& schedules) {
  const PointSet points = data.all();
  Diagnostics diag;
  const Subspace init = pca_subspace(points, d, &diag);
  std::vector<NamedTrace> out;
  for (const auto& [name, schedule] : schedules) {
    GgdConfig cfg;
    cfg.schedule = schedule;
    cfg.max_iters = max_iters;
    cfg.init = InitGiven{init};
    Rng rng(0);
    GgdResult res = run_ggd(points, d, cfg, rng, data.l_star);
    res.trace.warnings.insert(res.trace.warnings.end(), diag.warnings.begin(), diag.warnings.end());
    out.push_back({name, std::move(res.trace)});
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi >= lo) || n < 1) throw ConfigError("log_grid: need 0 < lo <= hi and n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

namespace {

Eigen::Index inlier_count(const PhaseConfig& cfg, double snr) {
  return static_cast<Eigen::Index>(std::llround(snr * static_cast<double>(cfg.n_out)));
}

}  // namespace

Dataset phase_dataset(const PhaseConfig& cfg, double snr, int trial) {
  if (!(snr >= 0)) throw ConfigError("phase: SNR must be non-negative");
  const Eigen::Index n_in = inlier_count(cfg, snr);
  // Fixed draw order: L*, outliers, then inliers one at a time, so prefixes agree
  // across SNR values.
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
  Dataset data;
  data.l_star = random_subspace(cfg.ambient, cfg.dim, rng);
  data.outliers = (cfg.sigma_out / std::sqrt(static_cast<double>(cfg.ambient))) *
                  gaussian_matrix(cfg.ambient, cfg.n_out, rng);
  data.inliers = data.l_star->basis() *
                 ((cfg.sigma_in / std::sqrt(static_cast<double>(cfg.dim))) *
                  gaussian_matrix(cfg.dim, n_in, rng));
  data.meta = {{"model", "haystack"}, {"D", cfg.ambient}, {"d", cfg.dim},
               {"n_in", n_in},        {"n_out", cfg.n_out}, {"trial", trial},
               {"seed", cfg.seed}};
  return data;
}

std::vector<PhaseRow> phase_sweep(const PhaseConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("phase: trials must be >= 1");
  if (cfg.snrs.empty()) throw ConfigError("phase: empty SNR grid");
  std::vector<double> snrs = cfg.snrs;
  std::sort(snrs.begin(), snrs.end());

  const int cells = static_cast<int>(snrs.size()) * cfg.trials;
  std::vector<PhaseRow> rows(static_cast<std::size_t>(cells));
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < cells; ++c) {
    const double snr = snrs[static_cast<std::size_t>(c / cfg.trials)];
    const int trial = c % cfg.trials;
    PhaseRow row{snr, trial, false, std::numbers::pi / 2};
    const Dataset data = phase_dataset(cfg, snr, trial);
    const GgdConfig ggd = default_piecewise(cfg.ambient, cfg.max_iters);
    Rng rng(derive_seed(cfg.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(c)));
    try {
      const GgdResult res = run_ggd(data.all(), cfg.dim, ggd, rng, data.l_star);
      row.final_theta = theta1(res.subspace, *data.l_star);
    } catch (const NumericError&) {
      // Degenerate data (rank below d) counts as a failed recovery.
    }
    row.success = row.final_theta <= cfg.success_tol;
    rows[static_cast<std::size_t>(c)] = row;
  }
  return rows;
}

std::vector<PhaseSummary> summarize(const std::vector<PhaseRow>& rows) {
  std::map<double, std::pair<int, int>> counts;
  for (const auto& r : rows) {
    auto& [ok, total] = counts[r.snr];
    ok += r.success ? 1 : 0;
    ++total;
  }
  std::vector<PhaseSummary> out;
  for (const auto& [snr, c] : counts)
    out.push_back({snr, static_cast<double>(c.first) / static_cast<double>(c.second)});
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  fit.n = static_cast<int>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return fit;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LineFit log_linear_fit(const GgdTrace& trace, double floor) {
  std::vector<double> ks, logs;
  for (const auto& rec : trace.records) {
    if (!rec.theta_truth) continue;
    if (*rec.theta_truth < floor) break;
    ks.push_back(rec.k);
    logs.push_back(std::log10(*rec.theta_truth));
  }
  return fit_line(ks, logs);
}

double theta_at(const GgdTrace& trace, int k) {
  if (trace.records.empty()) throw ConfigError("theta_at: empty trace");
  for (const auto& rec : trace.records)
    if (rec.k == k) return rec.theta_truth.value_or(std::nan(""));
  return trace.records.back().theta_truth.value_or(std::nan(""));
}

}  // namespace rsr::experiments
