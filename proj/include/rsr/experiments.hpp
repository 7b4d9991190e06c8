#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsr/datagen.hpp"
#include "rsr/ggd.hpp"
#include "rsr/stability.hpp"

// Simulation drivers shared by the CLI and the acceptance suite.
namespace rsr::experiments {

/// Haystack configuration of the convergence simulation: N_in = N_out = 200,
/// sigma = 1, D = 100, d = 5.
HaystackParams convergence_params();
/// Haystack configuration of the stability simulation: D = 200, d = 10.
HaystackParams stability_grid_params();

/// Piecewise-constant GGD with s = 1/D, K = 20, shrink 1/2.
GgdConfig default_piecewise(Eigen::Index ambient, int max_iters);

// ---- stability grid ----

struct StabilityGridConfig {
  double gamma = 0.7853981633974483;  // pi/4
  int n_angles = 10;                  // angles gamma * i / n_angles, i = 1..n_angles
  int per_angle = 20;
  std::uint64_t seed = 0;
};

struct StabilityGridRow {
  double angle = 0.0;
  int sample_index = 0;
  double value = 0.0;  // cos(gamma) P(X_in) - A(X_out, L)
};

struct StabilityGrid {
  std::vector<StabilityGridRow> rows;
  std::vector<Subspace> subspaces;  // same order as rows
  StabilityReport report;           // sup estimate taken over the grid subspaces
};

StabilityGrid stability_grid(const Dataset& data, const StabilityGridConfig& cfg);

// ---- convergence comparison ----

struct NamedTrace {
  std::string schedule;
  GgdTrace trace;
};

/// The four step-size schemes compared in the convergence simulation, all with s = 1/D.
std::vector<std::pair<std::string, StepSchedule>> convergence_schedules(Eigen::Index ambient);

/// Runs every schedule from the same PCA initialization on the same data.
std::vector<NamedTrace> convergence(const Dataset& data, Eigen::Index d, int max_iters,
                                    const std::vector<std::pair<std::string, StepSchedule>>& schedules);

// ---- SNR phase sweep ----

struct PhaseConfig {
  Eigen::Index ambient = 100;
  Eigen::Index dim = 5;
  Eigen::Index n_out = 200;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
  std::vector<double> snrs;
  int trials = 20;
  std::uint64_t seed = 0;
  int max_iters = 600;
  double success_tol = 1e-5;
};

struct PhaseRow {
  double snr = 0.0;
  int trial = 0;
  bool success = false;
  double final_theta = 0.0;
  bool operator==(const PhaseRow&) const = default;
};

/// Log-spaced grid of n values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// Trial t shares L*, outliers and the inlier stream across every SNR value, so the
/// datasets for one trial are nested as SNR grows. Rows are sorted by (snr, trial).
std::vector<PhaseRow> phase_sweep(const PhaseConfig& cfg);

/// Dataset of one (snr, trial) cell of the sweep.
Dataset phase_dataset(const PhaseConfig& cfg, double snr, int trial);

struct PhaseSummary {
  double snr = 0.0;
  double success_rate = 0.0;
};
std::vector<PhaseSummary> summarize(const std::vector<PhaseRow>& rows);

// ---- trace analysis ----

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares fit of log10(theta_truth) against k over the records from k = 1
/// up to (excluding) the first record with theta_truth < floor.
LineFit log_linear_fit(const GgdTrace& trace, double floor);

/// theta_truth at iteration k (1-based); the last record if the run stopped earlier.
double theta_at(const GgdTrace& trace, int k);

}  // namespace rsr::experiments
