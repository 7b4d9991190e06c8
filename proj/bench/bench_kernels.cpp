// Serial vs OpenMP timings of the per-point kernels and of whole GGD runs.
//   bench_kernels [--reps N]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>

#include "rsr/datagen.hpp"
#include "rsr/energy.hpp"
#include "rsr/ggd.hpp"
#include "rsr/kernels.hpp"

using namespace rsr;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void compare(const char* label, int reps, const std::function<void(kernels::Backend)>& fn) {
  const double serial = seconds([&] { fn(kernels::Backend::Serial); }, reps);
  const double parallel = seconds([&] { fn(kernels::Backend::Parallel); }, reps);
  std::printf("%-34s serial %10.3f ms   parallel %10.3f ms   speedup %5.2fx\n", label, serial * 1e3,
              parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 20;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--reps") == 0) reps = std::atoi(argv[i + 1]);
  std::printf("threads: %d, reps: %d\n", kernels::max_threads(), reps);

  struct Shape {
    Eigen::Index ambient, dim, n;
  };
  for (const Shape s : {Shape{100, 5, 400}, Shape{200, 10, 2000}, Shape{500, 20, 10000}}) {
    Rng rng(1);
    const Dataset data = haystack(HaystackParams{s.n / 2, s.n / 2, 1.0, 1.0, s.ambient, s.dim}, rng);
    const PointSet points = data.all();
    const Subspace v = random_subspace(s.ambient, s.dim, rng);
    char label[64];

    std::snprintf(label, sizeof label, "energy+gradient D=%ld d=%ld N=%ld", static_cast<long>(s.ambient),
                  static_cast<long>(s.dim), static_cast<long>(s.n));
    compare(label, reps, [&](kernels::Backend b) {
      volatile double sink = energy_and_gradient(v, points, kDefaultActiveTol, b).energy.value;
      (void)sink;
    });

    std::snprintf(label, sizeof label, "ggd 100 iters D=%ld d=%ld N=%ld", static_cast<long>(s.ambient),
                  static_cast<long>(s.dim), static_cast<long>(s.n));
    compare(label, std::max(1, reps / 10), [&](kernels::Backend b) {
      GgdConfig cfg;
      cfg.schedule = PiecewiseConstantSchedule{1.0 / static_cast<double>(s.ambient), 20, 0.5};
      cfg.max_iters = 100;
      cfg.tau = 1e-300;
      cfg.init = InitGiven{v};
      cfg.backend = b;
      Rng r(0);
      volatile double sink = run_ggd(points, s.dim, cfg, r).trace.records.back().energy;
      (void)sink;
    });
  }
  return 0;
}
