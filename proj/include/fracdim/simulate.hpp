#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fracdim/ladder.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/profiles.hpp"
#include "fracdim/set_models.hpp"

namespace fracdim {

struct PathSample {
  std::vector<double> times;
  int dim = 1;
  std::vector<double> values;  // row-major, times.size() x dim
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;

  std::span<const double> at(std::size_t k) const {
    return {values.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

// Exact increments over every gap of the net, starting from X(0) = 0. Throws NoSampler.
PathSample sample_path(const LevyModel& model, const DeltaNet& net, std::uint64_t seed, std::uint64_t path_index = 0);

struct ExperimentOptions {
  SlopeMode mode = SlopeMode::Upper;
  // mesh = mesh_factor * r_min^index / scale, coarsened so the net has at most max_points
  double mesh_factor = 1.0 / 64.0;
  std::size_t max_points = std::size_t{1} << 20;
};

struct ImageExperiment {
  std::string model;
  std::string set;
  std::size_t n_paths = 0;
  std::vector<double> r_ladder;
  std::uint64_t seed = 0;
  SlopeMode mode = SlopeMode::Upper;
  double mesh = 0.0;
  std::size_t net_size = 0;
  std::vector<double> estimates;                  // per path
  std::vector<std::vector<std::size_t>> counts;  // per path, K(r) along the ladder
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

double experiment_mesh(const LevyModel& model, const CompactSet& set, double r_min, const ExperimentOptions& options);

ImageExperiment image_dim_experiment(const LevyModel& model, const CompactSet& set, std::size_t n_paths,
                                     std::span<const double> r_ladder, std::uint64_t seed,
                                     const ExperimentOptions& options = {});
ImageExperiment image_dim_experiment_serial(const LevyModel& model, const CompactSet& set, std::size_t n_paths,
                                            std::span<const double> r_ladder, std::uint64_t seed,
                                            const ExperimentOptions& options = {});

// Type-7 sample quantile.
double quantile(std::vector<double> values, double p);

struct Comparison {
  double theory = 0.0;
  double empirical = 0.0;
  double difference = 0.0;
  double band = 0.0;
  bool pass = false;
};

Comparison theory_vs_empirical(const LevyModel& model, const CompactSet& set, const ProfileReport& profile,
                               const ImageExperiment& experiment, double band = 0.1);

// Rows {path_index, slope, K(r_1), ..., K(r_m)}.
void write_experiment_csv(std::ostream& out, const ImageExperiment& experiment);

}  // namespace fracdim
