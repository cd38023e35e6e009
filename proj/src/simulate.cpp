#include "fracdim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>

#include "fracdim/errors.hpp"
#include "fracdim/random.hpp"

namespace fracdim {

PathSample sample_path(const LevyModel& model, const DeltaNet& net, std::uint64_t seed, std::uint64_t path_index) {
  if (model.sampler() == SamplerRecipe::None) throw NoSampler("no sampler for " + model.tag());
  const auto d = static_cast<std::size_t>(model.dim());
  PathSample path;
  path.times = net.points;
  path.dim = model.dim();
  path.model = model.tag();
  path.seed = seed;
  path.path_index = path_index;
  path.values.assign(path.times.size() * d, 0.0);

  auto gen = task_stream(seed, path_index);
  std::vector<double> step(d);
  double prev_t = 0.0;
  std::vector<double> prev(d, 0.0);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double gap = path.times[k] - prev_t;
    if (gap < 0.0) throw InvalidArgument("path times must be nonnegative and sorted");
    if (gap > 0.0) {
      model.sample(gap, gen, step);
      for (std::size_t j = 0; j < d; ++j) prev[j] += step[j];
    }
    std::copy(prev.begin(), prev.end(), path.values.begin() + static_cast<std::ptrdiff_t>(k * d));
    prev_t = path.times[k];
  }
  return path;
}

double experiment_mesh(const LevyModel& model, const CompactSet& set, double r_min, const ExperimentOptions& options) {
  if (!(r_min > 0.0)) throw InvalidArgument("radii must be positive");
  if (options.max_points < 2) throw InvalidArgument("max_points must be at least 2");
  double scale = 1.0;
  if (const auto* m = std::get_if<IsotropicStable>(&model.kind())) scale = m->scale;
  double mesh = options.mesh_factor * std::pow(r_min, model.scaling_index()) / scale;
  const auto [lo, hi] = set.hull();
  const double floor_mesh = (hi - lo) / static_cast<double>(options.max_points - 1);
  return std::max(mesh, floor_mesh);
}

namespace {

void check_experiment_args(std::size_t n_paths, std::span<const double> r_ladder) {
  if (n_paths < 1) throw InvalidArgument("n_paths must be at least 1");
  if (r_ladder.size() < 3) throw InvalidArgument("radius ladder needs at least 3 radii");
}

struct Setup {
  DeltaNet net;
  double mesh;
};

Setup experiment_setup(const LevyModel& model, const CompactSet& set, std::span<const double> r_ladder,
                       const ExperimentOptions& options) {
  const double r_min = *std::min_element(r_ladder.begin(), r_ladder.end());
  const double mesh = experiment_mesh(model, set, r_min, options);
  return {discretize(set, mesh, options.max_points + 1), mesh};
}

void run_path(const LevyModel& model, const DeltaNet& net, std::span<const double> r_ladder, std::uint64_t seed,
              std::size_t p, SlopeMode mode, double& estimate, std::vector<std::size_t>& counts) {
  const PathSample path = sample_path(model, net, seed, p);
  PointCloud cloud;
  cloud.dim = path.dim;
  cloud.coords = path.values;
  counts = capacity_profile_serial(cloud, r_ladder);
  estimate = minkowski_dim_estimate(cloud, r_ladder, mode).slope;
}

ImageExperiment assemble(const LevyModel& model, const CompactSet& set, std::size_t n_paths,
                         std::span<const double> r_ladder, std::uint64_t seed, const ExperimentOptions& options,
                         const Setup& setup, std::vector<double> estimates,
                         std::vector<std::vector<std::size_t>> counts) {
  ImageExperiment e;
  e.model = model.tag();
  e.set = set.id();
  e.n_paths = n_paths;
  e.r_ladder.assign(r_ladder.begin(), r_ladder.end());
  e.seed = seed;
  e.mode = options.mode;
  e.mesh = setup.mesh;
  e.net_size = setup.net.points.size();
  for (double v : estimates) {
    if (!std::isfinite(v)) throw Error("non-finite per-path estimate");
  }
  e.median = quantile(estimates, 0.5);
  e.q1 = quantile(estimates, 0.25);
  e.q3 = quantile(estimates, 0.75);
  e.estimates = std::move(estimates);
  e.counts = std::move(counts);
  return e;
}

}  // namespace

ImageExperiment image_dim_experiment(const LevyModel& model, const CompactSet& set, std::size_t n_paths,
                                     std::span<const double> r_ladder, std::uint64_t seed,
                                     const ExperimentOptions& options) {
  check_experiment_args(n_paths, r_ladder);
  const Setup setup = experiment_setup(model, set, r_ladder, options);
  std::vector<double> estimates(n_paths);
  std::vector<std::vector<std::size_t>> counts(n_paths);
  std::exception_ptr failure;
  const auto count = static_cast<long>(n_paths);
#pragma omp parallel for schedule(dynamic)
  for (long p = 0; p < count; ++p) {
    try {
      const auto i = static_cast<std::size_t>(p);
      run_path(model, setup.net, r_ladder, seed, i, options.mode, estimates[i], counts[i]);
    } catch (...) {
#pragma omp critical(fracdim_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(model, set, n_paths, r_ladder, seed, options, setup, std::move(estimates), std::move(counts));
}

ImageExperiment image_dim_experiment_serial(const LevyModel& model, const CompactSet& set, std::size_t n_paths,
                                            std::span<const double> r_ladder, std::uint64_t seed,
                                            const ExperimentOptions& options) {
  check_experiment_args(n_paths, r_ladder);
  const Setup setup = experiment_setup(model, set, r_ladder, options);
  std::vector<double> estimates(n_paths);
  std::vector<std::vector<std::size_t>> counts(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    run_path(model, setup.net, r_ladder, seed, i, options.mode, estimates[i], counts[i]);
  }
  return assemble(model, set, n_paths, r_ladder, seed, options, setup, std::move(estimates), std::move(counts));
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Comparison theory_vs_empirical(const LevyModel& model, const CompactSet& set, const ProfileReport& profile,
                               const ImageExperiment& experiment, double band) {
  const std::string tag = model.tag();
  if (profile.model != tag || experiment.model != tag) {
    throw MismatchedInputs("profile and experiment must describe model " + tag);
  }
  const std::string id = set.id();
  if (profile.set_id != id || experiment.set != id) {
    throw MismatchedInputs("profile and experiment must describe set " + id);
  }
  Comparison c;
  c.theory = profile.estimate;
  c.empirical = experiment.median;
  c.difference = std::abs(c.theory - c.empirical);
  c.band = band;
  c.pass = c.difference <= band;
  return c;
}

void write_experiment_csv(std::ostream& out, const ImageExperiment& experiment) {
  const auto old_precision = out.precision(17);
  out << "path_index,slope";
  for (double r : experiment.r_ladder) out << ",K(" << r << ")";
  out << "\r\n";
  for (std::size_t p = 0; p < experiment.estimates.size(); ++p) {
    out << p << ',' << experiment.estimates[p];
    for (std::size_t k : experiment.counts[p]) out << ',' << k;
    out << "\r\n";
  }
  out.precision(old_precision);
}

}  // namespace fracdim
