#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rsr/common.hpp"
#include "rsr/energy.hpp"
#include "rsr/grassmann.hpp"

namespace rsr {

/// t^k = s / sqrt(k)
struct SqrtSchedule {
  double s = 0.01;
};

/// t^k = s * shrink^floor(k / K)
struct PiecewiseConstantSchedule {
  double s = 0.01;
  int interval = 20;
  double shrink = 0.5;
};

/// Constant step, halved only when it fails to decrease the energy.
struct AdaptiveShrinkSchedule {
  double s = 0.01;
  int max_halvings = 40;
};

using StepSchedule = std::variant<SqrtSchedule, PiecewiseConstantSchedule, AdaptiveShrinkSchedule>;

/// Step size for iteration k >= 1. For AdaptiveShrink this is the current constant
/// step `adaptive_current` (the trial step before any halving).
double step_size(const StepSchedule& schedule, int k, double adaptive_current = 0.0);

std::string schedule_name(const StepSchedule& schedule);

struct InitPca {};
struct InitRandom {};
struct InitGiven {
  Subspace subspace;
};
using GgdInit = std::variant<InitPca, InitRandom, InitGiven>;

struct GgdConfig {
  StepSchedule schedule = PiecewiseConstantSchedule{};
  double tau = 1e-10;
  int max_iters = 10000;
  double tol_active = kDefaultActiveTol;
  GgdInit init = InitPca{};
  kernels::Backend backend = kernels::Backend::Parallel;
};

enum class StopReason { Converged, MaxIters, CriticalPoint, StepUnderflow };
std::string to_string(StopReason reason);

/// One row per iterate V^k.
struct GgdRecord {
  int k = 0;
  double step = 0.0;        // t^k, the step taken from V^k
  double energy = 0.0;      // F(V^k)
  double grad_norm = 0.0;   // spectral norm of the gradient at V^k
  std::optional<double> theta_prev;   // theta_1(V^k, V^{k-1}); absent at k = 1
  std::optional<double> theta_truth;  // theta_1(V^k, L_*) when a ground truth is given
};

struct GgdTrace {
  std::vector<GgdRecord> records;
  StopReason stopped_reason = StopReason::MaxIters;
  std::vector<std::string> warnings;
};

struct GgdResult {
  Subspace subspace;
  GgdTrace trace;
};

/// Span of the top-d left singular vectors of the D x N data matrix.
Subspace pca_subspace(const PointSet& points, Eigen::Index d, Diagnostics* diag = nullptr);

/// Geodesic gradient descent on G(D,d). `truth`, when given, only feeds theta_truth.
GgdResult run_ggd(const PointSet& points, Eigen::Index d, const GgdConfig& cfg, Rng& rng,
                  const std::optional<Subspace>& truth = std::nullopt);

/// Gradient spectral norms at or below this stop the run as a critical point.
inline constexpr double kCriticalGradNorm = 1e-14;

}  // namespace rsr
