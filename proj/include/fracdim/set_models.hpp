#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracdim/ladder.hpp"

namespace fracdim {

struct Interval {
  double a = 0.0;
  double b = 1.0;
};

struct FinitePoints {
  std::vector<double> points;
};

// Attractor of x -> ratios[i] * x + translations[i], positive ratios in (0, 1).
struct IfsAttractor {
  std::vector<double> ratios;
  std::vector<double> translations;
  int depth_budget = 30;
};

class CompactSet;
struct SetUnion {
  std::vector<CompactSet> parts;
};

class CompactSet {
 public:
  using Kind = std::variant<Interval, FinitePoints, IfsAttractor, SetUnion>;

  explicit CompactSet(Kind kind);
  static CompactSet interval(double a, double b);
  static CompactSet points(std::vector<double> pts);
  static CompactSet ifs(std::vector<double> ratios, std::vector<double> translations, int depth_budget = 30);
  static CompactSet middle_third_cantor(int depth_budget = 30);
  static CompactSet union_of(std::vector<CompactSet> parts);

  const Kind& kind() const { return kind_; }
  std::pair<double, double> hull() const;
  std::string id() const;
  // Set where the packing profile equals the box profile of every relatively open piece.
  bool self_cover_certified() const;

 private:
  Kind kind_;
};

struct DeltaNet {
  std::vector<double> points;  // sorted
  double mesh = 0.0;
  std::string parent;
};

inline constexpr std::size_t kDefaultNetCap = 200000;

DeltaNet discretize(const CompactSet& set, double delta, std::size_t cap = kDefaultNetCap);

// Both endpoints of every depth-k cylinder, sorted.
DeltaNet ifs_cylinder_net(const IfsAttractor& ifs, int depth, std::size_t cap = kDefaultNetCap);

struct PointCloud {
  int dim = 1;
  std::vector<double> coords;  // row-major, dim values per point

  std::size_t size() const { return dim > 0 ? coords.size() / static_cast<std::size_t>(dim) : 0; }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  static PointCloud from_net(const DeltaNet& net);
};

PointCloud read_point_cloud_csv(std::istream& in);
void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud);

// Separation test used throughout: |x - y| >= r up to a relative 1e-9 rounding allowance.
bool separated(double distance, double r);

double sup_distance(std::span<const double> x, std::span<const double> y);

// Indices of a greedy maximal r-separated subset in sup-norm. For d = 1 the scan runs in
// sorted order and is an exact maximum.
std::vector<std::size_t> separated_subset(const PointCloud& cloud, double r);

std::size_t kolmogorov_capacity(const DeltaNet& net, double r);
std::size_t kolmogorov_capacity(const PointCloud& cloud, double r);

// K(r) for every radius of the ladder; OpenMP over radii.
std::vector<std::size_t> capacity_profile(const PointCloud& cloud, std::span<const double> radii);
std::vector<std::size_t> capacity_profile_serial(const PointCloud& cloud, std::span<const double> radii);

// Slope of log K(r) against log(1/r). Radii must be a decreasing geometric ladder of
// length >= 5. Constant K = 1 yields slope 0; constant K > 1 throws DegenerateLadder.
LadderEstimate minkowski_dim_estimate(const PointCloud& cloud, std::span<const double> radii,
                                      SlopeMode mode = SlopeMode::Upper);
LadderEstimate minkowski_dim_estimate(const DeltaNet& net, std::span<const double> radii,
                                      SlopeMode mode = SlopeMode::Upper);

}  // namespace fracdim
