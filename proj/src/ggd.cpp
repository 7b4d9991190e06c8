#include "rsr/ggd.hpp"

#include <cmath>

namespace rsr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const StepSchedule& schedule) {
  std::visit(Overloaded{
                 [](const SqrtSchedule& s) {
                   if (!(s.s > 0)) throw ConfigError("step size s must be positive");
                 },
                 [](const PiecewiseConstantSchedule& s) {
                   if (!(s.s > 0)) throw ConfigError("step size s must be positive");
                   if (s.interval < 1) throw ConfigError("shrink interval K must be >= 1");
                   if (!(s.shrink > 0 && s.shrink < 1))
                     throw ConfigError("shrink factor must lie in (0,1)");
                 },
                 [](const AdaptiveShrinkSchedule& s) {
                   if (!(s.s > 0)) throw ConfigError("step size s must be positive");
                   if (s.max_halvings < 1) throw ConfigError("max_halvings must be >= 1");
                 }},
             schedule);
}

double grad_spectral_norm(const Matrix& g) {
  // ||G||_2^2 = lambda_max(G^T G); d x d is cheap.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.transpose() * g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()(g.cols() - 1)));
}

}  // namespace

double step_size(const StepSchedule& schedule, int k, double adaptive_current) {
  validate(schedule);
  if (k < 1) throw ConfigError("iteration index k must be >= 1");
  return std::visit(
      Overloaded{[k](const SqrtSchedule& s) { return s.s / std::sqrt(static_cast<double>(k)); },
                 [k](const PiecewiseConstantSchedule& s) {
                   return s.s * std::pow(s.shrink, static_cast<double>(k / s.interval));
                 },
                 [adaptive_current](const AdaptiveShrinkSchedule& s) {
                   return adaptive_current > 0 ? adaptive_current : s.s;
                 }},
      schedule);
}

std::string schedule_name(const StepSchedule& schedule) {
  return std::visit(Overloaded{[](const SqrtSchedule&) { return std::string("sqrt"); },
                               [](const PiecewiseConstantSchedule& s) {
                                 return "piecewise_K" + std::to_string(s.interval);
                               },
                               [](const AdaptiveShrinkSchedule&) { return std::string("adaptive"); }},
                    schedule);
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::CriticalPoint: return "critical_point";
    case StopReason::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

Subspace pca_subspace(const PointSet& points, Eigen::Index d, Diagnostics* diag) {
  if (d < 1 || d > points.rows()) throw ConfigError("pca_subspace: need 1 <= d <= D");
  if (!points.allFinite()) throw NumericError("pca_subspace: non-finite data");
  if (points.cols() < d) throw NumericError("insufficient rank: fewer points than d");

  Eigen::BDCSVD<Matrix> svd(points, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double top = sv(0);
  if (!(top > 0) || sv(d - 1) <= 1e-12 * top)
    throw NumericError("insufficient rank: data matrix rank is below d");
  if (diag && d < sv.size() && sv(d - 1) - sv(d) < 1e-12 * top)
    diag->warn("pca_subspace: singular gap at d is below 1e-12; PCA subspace is not unique");
  return orthonormalize(svd.matrixU().leftCols(d));
}

GgdResult run_ggd(const PointSet& points, Eigen::Index d, const GgdConfig& cfg, Rng& rng,
                  const std::optional<Subspace>& truth) {
  validate(cfg.schedule);
  if (!(cfg.tau > 0)) throw ConfigError("tau must be positive");
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (points.cols() == 0) throw ConfigError("run_ggd: empty dataset");
  if (truth && (truth->ambient_dim() != points.rows() || truth->dim() != d))
    throw ConfigError("run_ggd: ground truth shape does not match data");

  GgdTrace trace;
  Diagnostics diag;
  Subspace v = std::visit(
      Overloaded{[&](const InitPca&) { return pca_subspace(points, d, &diag); },
                 [&](const InitRandom&) { return random_subspace(points.rows(), d, rng); },
                 [&](const InitGiven& g) {
                   if (g.subspace.ambient_dim() != points.rows() || g.subspace.dim() != d)
                     throw ConfigError("run_ggd: initial subspace shape does not match data");
                   return g.subspace;
                 }},
      cfg.init);
  trace.warnings = diag.warnings;

  const bool adaptive = std::holds_alternative<AdaptiveShrinkSchedule>(cfg.schedule);
  double adaptive_step = adaptive ? std::get<AdaptiveShrinkSchedule>(cfg.schedule).s : 0.0;
  std::optional<Subspace> previous;

  EnergyAndGradient eval = energy_and_gradient(v, points, cfg.tol_active, cfg.backend);
  for (int k = 1;; ++k) {
    GgdRecord rec;
    rec.k = k;
    rec.energy = eval.energy.value;
    rec.grad_norm = grad_spectral_norm(eval.gradient);
    rec.step = step_size(cfg.schedule, k, adaptive_step);
    if (previous) rec.theta_prev = theta1(v, *previous);
    if (truth) rec.theta_truth = theta1(v, *truth);

    std::optional<StopReason> stop;
    if (rec.theta_prev && *rec.theta_prev <= cfg.tau) {
      stop = StopReason::Converged;
    } else if (rec.grad_norm <= kCriticalGradNorm) {
      stop = StopReason::CriticalPoint;
    } else if (k >= cfg.max_iters) {
      stop = StopReason::MaxIters;
    }
    if (stop) {
      trace.records.push_back(rec);
      trace.stopped_reason = *stop;
      break;
    }

    if (!adaptive) {
      Subspace next = geodesic_step(v, eval.gradient, rec.step);
      trace.records.push_back(rec);
      previous = std::move(v);
      v = std::move(next);
      eval = energy_and_gradient(v, points, cfg.tol_active, cfg.backend);
      continue;
    }

    // Adaptive: accept the first of step, step/2, step/4, ... that lowers the energy,
    // and keep it as the new constant step.
    const int max_halvings = std::get<AdaptiveShrinkSchedule>(cfg.schedule).max_halvings;
    bool accepted = false;
    double trial = adaptive_step;
    for (int n = 0; n <= max_halvings; ++n, trial *= 0.5) {
      Subspace candidate = geodesic_step(v, eval.gradient, trial);
      EnergyAndGradient cand_eval =
          energy_and_gradient(candidate, points, cfg.tol_active, cfg.backend);
      if (cand_eval.energy.value < eval.energy.value) {
        adaptive_step = trial;
        rec.step = trial;
        trace.records.push_back(rec);
        previous = std::move(v);
        v = std::move(candidate);
        eval = std::move(cand_eval);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rec.step = trial * 2.0;
      trace.records.push_back(rec);
      trace.stopped_reason = StopReason::StepUnderflow;
      break;
    }
  }
  return GgdResult{std::move(v), std::move(trace)};
}

}  // namespace rsr
