#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsr/datagen.hpp"
#include "rsr/experiments.hpp"
#include "rsr/ggd.hpp"
#include "rsr/io.hpp"
#include "rsr/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

fs::path default_output_dir() {
  if (const char* env = std::getenv("RSR_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  const fs::path path = dir / (command + ".manifest.json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  json m = {{"command", command}, {"config", config}};
  out << m.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

// Writes and then reloads the table, checking the header and row widths.
void write_checked(const fs::path& path, const io::CsvTable& table) {
  io::write_csv(path, table);
  io::check_csv_schema(path, table.header);
}

struct HaystackOpts {
  long long ambient = 100;
  long long dim = 5;
  long long n_in = 200;
  long long n_out = 200;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--D", ambient, "ambient dimension")->check(CLI::PositiveNumber);
    app->add_option("--d", dim, "subspace dimension")->check(CLI::PositiveNumber);
    app->add_option("--n-in", n_in, "number of inliers")->check(CLI::NonNegativeNumber);
    app->add_option("--n-out", n_out, "number of outliers")->check(CLI::NonNegativeNumber);
    app->add_option("--sigma-in", sigma_in, "inlier scale")->check(CLI::PositiveNumber);
    app->add_option("--sigma-out", sigma_out, "outlier scale")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
  }
  HaystackParams params() const {
    return HaystackParams{n_in, n_out, sigma_in, sigma_out, ambient, dim};
  }
  json to_json() const {
    return {{"D", ambient},         {"d", dim},
            {"n_in", n_in},         {"n_out", n_out},
            {"sigma_in", sigma_in}, {"sigma_out", sigma_out},
            {"seed", seed}};
  }
};

// ---- generate ----

struct GenerateOpts {
  HaystackOpts hay;
  std::vector<double> lambda_in;
  std::vector<double> sigma_out_diag;
  double noise_eps = 0.0;
  fs::path out_dir = default_output_dir();
  std::string name = "dataset";
};

int cmd_generate(const std::string& model, const GenerateOpts& o) {
  Rng rng(o.hay.seed);
  Dataset data;
  json cfg = o.hay.to_json();
  cfg["model"] = model;
  if (model == "haystack") {
    data = haystack(o.hay.params(), rng);
  } else {
    GeneralizedHaystackParams p;
    p.n_in = o.hay.n_in;
    p.n_out = o.hay.n_out;
    p.lambda_in = o.lambda_in.empty() ? Vector(Vector::Ones(o.hay.dim))
                                      : Vector(Eigen::Map<const Vector>(o.lambda_in.data(),
                                                                        static_cast<Eigen::Index>(o.lambda_in.size())));
    if (p.lambda_in.size() != o.hay.dim) throw ConfigError("--lambda-in needs d values");
    const Vector diag = o.sigma_out_diag.empty()
                            ? Vector(Vector::Ones(o.hay.ambient))
                            : Vector(Eigen::Map<const Vector>(o.sigma_out_diag.data(),
                                                              static_cast<Eigen::Index>(o.sigma_out_diag.size())));
    if (diag.size() != o.hay.ambient) throw ConfigError("--sigma-out-diag needs D values");
    p.sigma_out = diag.asDiagonal();
    data = generalized_haystack(p, o.hay.ambient, rng);
    cfg["lambda_in"] = std::vector<double>(p.lambda_in.data(), p.lambda_in.data() + p.lambda_in.size());
    cfg["sigma_out_diag"] = std::vector<double>(diag.data(), diag.data() + diag.size());
  }
  if (o.noise_eps > 0) data = add_noise(data, o.noise_eps, rng);
  cfg["noise_eps"] = o.noise_eps;
  data.meta["seed"] = o.hay.seed;
  const io::DatasetPaths paths = io::write_dataset(o.out_dir / (o.name + ".csv"), data);
  write_manifest(o.out_dir, "generate", cfg);
  std::cout << "wrote " << paths.csv.string() << " (" << data.n_in() + data.n_out() << " rows) and "
            << paths.meta.string() << "\n";
  return kExitOk;
}

// ---- run ----

struct ScheduleOpts {
  std::string kind = "piecewise";
  std::optional<double> s;
  int interval = 20;
  double shrink = 0.5;
  int max_halvings = 40;

  void add(CLI::App* app) {
    app->add_option("--schedule", kind, "sqrt | piecewise | adaptive")
        ->check(CLI::IsMember({"sqrt", "piecewise", "adaptive"}));
    app->add_option("--s", s, "initial step size (default 1/D)")->check(CLI::PositiveNumber);
    app->add_option("--K", interval, "piecewise: iterations per constant block")->check(CLI::PositiveNumber);
    app->add_option("--shrink", shrink, "piecewise: shrink factor per block")->check(CLI::Range(0.0, 1.0));
    app->add_option("--max-halvings", max_halvings, "adaptive: halvings before giving up")
        ->check(CLI::PositiveNumber);
  }
  StepSchedule build(Eigen::Index ambient) const {
    const double step = s.value_or(1.0 / static_cast<double>(ambient));
    if (kind == "sqrt") return SqrtSchedule{step};
    if (kind == "adaptive") return AdaptiveShrinkSchedule{step, max_halvings};
    return PiecewiseConstantSchedule{step, interval, shrink};
  }
};

json schedule_json(const StepSchedule& sch) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SqrtSchedule>) return {{"kind", "sqrt"}, {"s", v.s}};
        else if constexpr (std::is_same_v<T, PiecewiseConstantSchedule>)
          return {{"kind", "piecewise"}, {"s", v.s}, {"K", v.interval}, {"shrink", v.shrink}};
        else return {{"kind", "adaptive"}, {"s", v.s}, {"max_halvings", v.max_halvings}};
      },
      sch);
}

struct RunOpts {
  fs::path data;
  long long dim = 0;
  ScheduleOpts schedule;
  double tau = 1e-10;
  int max_iters = 10000;
  std::string init = "pca";
  std::string backend = "parallel";
  std::uint64_t seed = 0;
  fs::path out_dir = default_output_dir();
  std::string name = "trace";
};

int cmd_run(const RunOpts& o) {
  const Dataset data = io::read_dataset(o.data);
  Eigen::Index d = o.dim;
  if (d == 0) {
    if (!data.l_star) throw ConfigError("--d is required when the dataset has no ground truth");
    d = data.l_star->dim();
  }
  GgdConfig cfg;
  cfg.schedule = o.schedule.build(data.ambient_dim());
  cfg.tau = o.tau;
  cfg.max_iters = o.max_iters;
  if (o.init == "random") cfg.init = InitRandom{};
  cfg.backend = o.backend == "serial" ? kernels::Backend::Serial : kernels::Backend::Parallel;
  Rng rng(o.seed);
  const GgdResult res = run_ggd(data.all(), d, cfg, rng, data.l_star);

  const fs::path trace_path = o.out_dir / (o.name + ".csv");
  io::write_trace(trace_path, res.trace);
  io::check_csv_schema(trace_path, io::kTraceHeader);
  write_manifest(o.out_dir, "run",
                 {{"data", o.data.string()},
                  {"d", d},
                  {"schedule", schedule_json(cfg.schedule)},
                  {"tau", o.tau},
                  {"max_iters", o.max_iters},
                  {"init", o.init},
                  {"backend", o.backend},
                  {"seed", o.seed}});
  io::write_subspace(o.out_dir / (o.name + ".subspace.txt"), res.subspace);

  const GgdRecord& last = res.trace.records.back();
  std::cout << "iterations=" << last.k << " stopped_reason=" << to_string(res.trace.stopped_reason)
            << " energy=" << io::format_double(last.energy);
  if (data.l_star) std::cout << " final_theta=" << io::format_double(theta1(res.subspace, *data.l_star));
  std::cout << "\n";
  for (const auto& w : res.trace.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

// ---- stability ----

struct StabilityOpts {
  HaystackOpts hay{200, 10, 200, 200, 1.0, 1.0, 0};
  std::optional<fs::path> data;
  double gamma = std::numbers::pi / 4;
  int n_angles = 10;
  int per_angle = 20;
  fs::path out_dir = default_output_dir();
};

int cmd_stability(const StabilityOpts& o) {
  json cfg = {{"gamma", o.gamma}, {"n_angles", o.n_angles}, {"per_angle", o.per_angle}};
  Dataset data;
  if (o.data) {
    data = io::read_dataset(*o.data);
    cfg["data"] = o.data->string();
    cfg["seed"] = o.hay.seed;
  } else {
    Rng rng(o.hay.seed);
    data = haystack(o.hay.params(), rng);
    cfg["haystack"] = o.hay.to_json();
  }
  experiments::StabilityGridConfig gc;
  gc.gamma = o.gamma;
  gc.n_angles = o.n_angles;
  gc.per_angle = o.per_angle;
  gc.seed = derive_seed(o.hay.seed, 1);
  const experiments::StabilityGrid grid = experiments::stability_grid(data, gc);

  io::CsvTable table{{"angle", "sample_index", "simstab_value"}, {}};
  for (const auto& r : grid.rows)
    table.rows.push_back({io::format_double(r.angle), std::to_string(r.sample_index), io::format_double(r.value)});
  write_checked(o.out_dir / "stability_grid.csv", table);
  write_checked(o.out_dir / "stability_report.csv",
                io::CsvTable{io::report_header(), {io::report_row(grid.report)}});
  write_manifest(o.out_dir, "stability", cfg);
  std::cout << io::to_key_value(grid.report);
  for (const auto& w : grid.report.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

// ---- convergence ----

struct ConvergenceOpts {
  HaystackOpts hay;
  int max_iters = 2000;
  fs::path out_dir = default_output_dir();
};

int cmd_convergence(const ConvergenceOpts& o) {
  Rng rng(o.hay.seed);
  const Dataset data = haystack(o.hay.params(), rng);
  const auto schedules = experiments::convergence_schedules(o.hay.ambient);
  const auto traces = experiments::convergence(data, o.hay.dim, o.max_iters, schedules);

  std::vector<std::string> header = {"schedule"};
  header.insert(header.end(), io::kTraceHeader.begin(), io::kTraceHeader.end());
  header.push_back("log10_theta_truth");
  io::CsvTable table{header, {}};
  json sched_cfg = json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    sched_cfg.push_back({{"name", t.schedule}, {"schedule", schedule_json(schedules[i].second)}});
    for (std::size_t r = 0; r < t.trace.records.size(); ++r) {
      const GgdRecord& rec = t.trace.records[r];
      const bool last = r + 1 == t.trace.records.size();
      std::vector<std::string> row = {t.schedule};
      const auto cells = io::trace_row(rec, last ? to_string(t.trace.stopped_reason) : "");
      row.insert(row.end(), cells.begin(), cells.end());
      row.push_back(rec.theta_truth && *rec.theta_truth > 0 ? io::format_double(std::log10(*rec.theta_truth))
                                                            : "");
      table.rows.push_back(std::move(row));
    }
    std::cout << t.schedule << ": iterations=" << t.trace.records.back().k
              << " final_theta=" << io::format_double(*t.trace.records.back().theta_truth) << "\n";
  }
  write_checked(o.out_dir / "convergence.csv", table);
  write_manifest(o.out_dir, "convergence",
                 {{"haystack", o.hay.to_json()}, {"max_iters", o.max_iters}, {"init", "pca"},
                  {"schedules", sched_cfg}});
  return kExitOk;
}

// ---- phase ----

struct PhaseOpts {
  long long ambient = 100;
  long long dim = 5;
  long long n_out = 200;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
  std::vector<double> snrs;
  double snr_min = 0.05;
  double snr_max = 8.0;
  int n_snr = 8;
  int trials = 20;
  int max_iters = 600;
  double success_tol = 1e-5;
  std::uint64_t seed = 0;
  fs::path out_dir = default_output_dir();
};

int cmd_phase(const PhaseOpts& o) {
  experiments::PhaseConfig cfg;
  cfg.ambient = o.ambient;
  cfg.dim = o.dim;
  cfg.n_out = o.n_out;
  cfg.sigma_in = o.sigma_in;
  cfg.sigma_out = o.sigma_out;
  cfg.snrs = o.snrs.empty() ? experiments::log_grid(o.snr_min, o.snr_max, o.n_snr) : o.snrs;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.max_iters = o.max_iters;
  cfg.success_tol = o.success_tol;
  if (cfg.dim >= cfg.ambient) throw ConfigError("phase: need d < D");
  const auto rows = experiments::phase_sweep(cfg);

  io::CsvTable table{{"snr", "trial", "success", "final_theta"}, {}};
  for (const auto& r : rows)
    table.rows.push_back({io::format_double(r.snr), std::to_string(r.trial), r.success ? "1" : "0",
                          io::format_double(r.final_theta)});
  write_checked(o.out_dir / "phase.csv", table);

  io::CsvTable summary{{"snr", "success_rate"}, {}};
  for (const auto& s : experiments::summarize(rows)) {
    summary.rows.push_back({io::format_double(s.snr), io::format_double(s.success_rate)});
    std::cout << "snr=" << s.snr << " success_rate=" << s.success_rate << "\n";
  }
  write_checked(o.out_dir / "phase_summary.csv", summary);

  io::CsvTable thresholds{{"regime", "snr_threshold"}, {}};
  thresholds.rows.push_back({"small_sample", io::format_double(snr_threshold(SnrRegime::SmallSample, o.sigma_in,
                                                                             o.sigma_out, o.ambient, o.dim))});
  thresholds.rows.push_back({"large_sample", io::format_double(snr_threshold(SnrRegime::LargeSample, o.sigma_in,
                                                                             o.sigma_out, o.ambient, o.dim))});
  write_checked(o.out_dir / "phase_thresholds.csv", thresholds);

  write_manifest(o.out_dir, "phase",
                 {{"D", o.ambient}, {"d", o.dim}, {"n_out", o.n_out}, {"sigma_in", o.sigma_in},
                  {"sigma_out", o.sigma_out}, {"snrs", cfg.snrs}, {"trials", o.trials},
                  {"max_iters", o.max_iters}, {"success_tol", o.success_tol}, {"seed", o.seed},
                  {"ggd", schedule_json(experiments::default_piecewise(o.ambient, o.max_iters).schedule)}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust subspace recovery by geodesic gradient descent"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset and its metadata");
  generate->require_subcommand(1);
  std::string model;
  for (const std::string m : {"haystack", "generalized"}) {
    auto* sub = generate->add_subcommand(m, m == "haystack" ? "Haystack model" : "Generalized Haystack model");
    gen.hay.add(sub);
    sub->add_option("--noise-eps", gen.noise_eps, "bound on the inlier noise magnitude")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", gen.out_dir, "output directory (default $RSR_OUTPUT_DIR or .)");
    sub->add_option("--name", gen.name, "file stem");
    if (m == "generalized") {
      sub->add_option("--lambda-in", gen.lambda_in, "inlier covariance eigenvalues (d values)")->delimiter(',');
      sub->add_option("--sigma-out-diag", gen.sigma_out_diag, "diagonal of the outlier covariance (D values)")
          ->delimiter(',');
    }
    sub->callback([&model, m] { model = m; });
  }

  RunOpts run;
  auto* run_cmd = app.add_subcommand("run", "run GGD on a dataset file");
  run_cmd->add_option("--data", run.data, "dataset CSV")->required();
  run_cmd->add_option("--d", run.dim, "subspace dimension (default: from metadata)")->check(CLI::PositiveNumber);
  run.schedule.add(run_cmd);
  run_cmd->add_option("--tau", run.tau, "stop when theta(V^k, V^{k-1}) <= tau")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--max-iters", run.max_iters)->check(CLI::PositiveNumber);
  run_cmd->add_option("--init", run.init, "pca | random")->check(CLI::IsMember({"pca", "random"}));
  run_cmd->add_option("--backend", run.backend, "serial | parallel")->check(CLI::IsMember({"serial", "parallel"}));
  run_cmd->add_option("--seed", run.seed, "seed for random initialization");
  run_cmd->add_option("--out-dir", run.out_dir, "output directory (default $RSR_OUTPUT_DIR or .)");
  run_cmd->add_option("--name", run.name, "file stem of the trace");

  StabilityOpts stab;
  auto* stab_cmd = app.add_subcommand("stability", "stability statistic over an angle grid");
  stab.hay.add(stab_cmd);
  stab_cmd->add_option("--data", stab.data, "dataset CSV with ground truth (overrides the generator)");
  stab_cmd->add_option("--gamma", stab.gamma, "radius of the ball around L*");
  stab_cmd->add_option("--n-angles", stab.n_angles)->check(CLI::PositiveNumber);
  stab_cmd->add_option("--per-angle", stab.per_angle)->check(CLI::PositiveNumber);
  stab_cmd->add_option("--out-dir", stab.out_dir, "output directory (default $RSR_OUTPUT_DIR or .)");

  ConvergenceOpts conv;
  auto* conv_cmd = app.add_subcommand("convergence", "compare step-size schedules on one dataset");
  conv.hay.add(conv_cmd);
  conv_cmd->add_option("--max-iters", conv.max_iters)->check(CLI::PositiveNumber);
  conv_cmd->add_option("--out-dir", conv.out_dir, "output directory (default $RSR_OUTPUT_DIR or .)");

  PhaseOpts phase;
  auto* phase_cmd = app.add_subcommand("phase", "success rate over an SNR grid");
  phase_cmd->add_option("--D", phase.ambient)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--d", phase.dim)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--n-out", phase.n_out)->check(CLI::NonNegativeNumber);
  phase_cmd->add_option("--sigma-in", phase.sigma_in)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--sigma-out", phase.sigma_out)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--snrs", phase.snrs, "explicit SNR values")->delimiter(',');
  phase_cmd->add_option("--snr-min", phase.snr_min)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--snr-max", phase.snr_max)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--n-snr", phase.n_snr, "log-spaced grid size")->check(CLI::PositiveNumber);
  phase_cmd->add_option("--trials", phase.trials)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--max-iters", phase.max_iters)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--success-tol", phase.success_tol)->check(CLI::PositiveNumber);
  phase_cmd->add_option("--seed", phase.seed);
  phase_cmd->add_option("--out-dir", phase.out_dir, "output directory (default $RSR_OUTPUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return cmd_generate(model, gen);
    if (run_cmd->parsed()) return cmd_run(run);
    if (stab_cmd->parsed()) return cmd_stability(stab);
    if (conv_cmd->parsed()) return cmd_convergence(conv);
    if (phase_cmd->parsed()) return cmd_phase(phase);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
