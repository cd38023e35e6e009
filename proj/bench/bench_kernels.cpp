// Wall time of the OpenMP kernels against their serial twins, and whether the outputs match.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "fracdim/energy_min.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/set_models.hpp"
#include "fracdim/simulate.hpp"

using namespace fracdim;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel, same ? "identical" : "DIFFER");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");

  {
    const auto net = discretize(CompactSet::interval(0.0, 1.0), 1.0 / 3000.0);
    const auto fam = KernelFamily::falconer_howroyd(0.7);
    KernelMatrix a, b;
    const double ts = seconds([&] { a = build_kernel_serial(fam, 0.01, net); }, 3);
    const double tp = seconds([&] { b = build_kernel(fam, 0.01, net); }, 3);
    row("kernel matrix (n=3001)", ts, tp, a.data == b.data);
  }
  {
    const auto model = LevyModel::stable(1.5, 1.0, 2);
    MonteCarloEstimate a, b;
    const double ts = seconds([&] { a = kappa_monte_carlo_serial(model, 0.5, 1.0, 2000000, 11); }, 3);
    const double tp = seconds([&] { b = kappa_monte_carlo(model, 0.5, 1.0, 2000000, 11); }, 3);
    row("Monte Carlo kappa (2e6)", ts, tp, a.estimate == b.estimate);
  }
  {
    const auto cloud = PointCloud::from_net(discretize(CompactSet::interval(0.0, 1.0), std::ldexp(1.0, -18), 300000));
    std::vector<double> radii;
    for (int k = 2; k <= 14; ++k) radii.push_back(std::ldexp(1.0, -k));
    std::vector<std::size_t> a, b;
    const double ts = seconds([&] { a = capacity_profile_serial(cloud, radii); }, 3);
    const double tp = seconds([&] { b = capacity_profile(cloud, radii); }, 3);
    row("capacity profile (2^18)", ts, tp, a == b);
  }
  {
    const auto model = LevyModel::stable(1.2, 1.0, 1);
    const auto unit = CompactSet::interval(0.0, 1.0);
    std::vector<double> radii;
    for (int k = 3; k <= 8; ++k) radii.push_back(std::ldexp(1.0, -k));
    ImageExperiment a, b;
    const double ts = seconds([&] { a = image_dim_experiment_serial(model, unit, 8, radii, 5); }, 1);
    const double tp = seconds([&] { b = image_dim_experiment(model, unit, 8, radii, 5); }, 1);
    row("image experiment (8 paths)", ts, tp, a.estimates == b.estimates);
  }
  return 0;
}
