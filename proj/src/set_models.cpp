#include "fracdim/set_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "fracdim/errors.hpp"

namespace fracdim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::pair<double, double> ifs_hull(const IfsAttractor& ifs) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < ifs.ratios.size(); ++i) {
    const double fixed = ifs.translations[i] / (1.0 - ifs.ratios[i]);
    lo = std::min(lo, fixed);
    hi = std::max(hi, fixed);
  }
  return {lo, hi};
}

void validate_ifs(const IfsAttractor& ifs) {
  if (ifs.ratios.size() < 2 || ifs.ratios.size() != ifs.translations.size()) {
    throw InvalidArgument("IFS needs at least two maps with matching ratios and translations");
  }
  for (double r : ifs.ratios)
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("IFS ratios must lie in (0, 1)");
  const auto [lo, hi] = ifs_hull(ifs);
  if (lo < 0.0) throw InvalidArgument("IFS attractor must lie in the half-line");
  std::vector<std::pair<double, double>> images;
  for (std::size_t i = 0; i < ifs.ratios.size(); ++i) {
    images.emplace_back(ifs.ratios[i] * lo + ifs.translations[i], ifs.ratios[i] * hi + ifs.translations[i]);
  }
  std::sort(images.begin(), images.end());
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (!(images[i - 1].second < images[i].first)) throw InvalidArgument("IFS first-level images overlap");
  }
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::size_t greedy_sorted_count(std::span<const double> sorted, double r) {
  if (sorted.empty()) return 0;
  std::size_t count = 1;
  double last = sorted[0];
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (separated(sorted[i] - last, r)) {
      ++count;
      last = sorted[i];
    }
  }
  return count;
}

struct CellHash {
  std::size_t operator()(const std::vector<long long>& key) const {
    std::size_t h = 1469598103934665603ull;
    for (long long k : key) h = (h ^ static_cast<std::size_t>(k)) * 1099511628211ull;
    return h;
  }
};

std::vector<std::size_t> greedy_separated_multi(const PointCloud& cloud, double r) {
  const auto d = static_cast<std::size_t>(cloud.dim);
  std::unordered_map<std::vector<long long>, std::vector<std::size_t>, CellHash> cells;
  std::vector<std::size_t> chosen;
  std::vector<long long> key(d), probe(d);
  std::size_t neighbours = 1;
  for (std::size_t k = 0; k < d; ++k) neighbours *= 3;

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t k = 0; k < d; ++k) key[k] = static_cast<long long>(std::floor(p[k] / r));
    bool ok = true;
    for (std::size_t code = 0; code < neighbours && ok; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < d; ++k) {
        probe[k] = key[k] + static_cast<long long>(c % 3) - 1;
        c /= 3;
      }
      const auto it = cells.find(probe);
      if (it == cells.end()) continue;
      for (std::size_t j : it->second) {
        if (!separated(sup_distance(p, cloud.point(j)), r)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      chosen.push_back(i);
      cells[key].push_back(i);
    }
  }
  return chosen;
}

LadderEstimate capacity_estimate(const std::vector<std::size_t>& counts, std::span<const double> radii,
                                 SlopeMode mode) {
  bool constant = true;
  for (std::size_t k : counts) constant = constant && k == counts.front();
  if (constant && counts.front() > 1) {
    throw DegenerateLadder("capacity is constant (" + std::to_string(counts.front()) +
                           ") across the ladder; radii do not resolve the set");
  }
  std::vector<double> scales(radii.begin(), radii.end()), values, x, y;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    values.push_back(static_cast<double>(counts[i]));
    x.push_back(-std::log(radii[i]));
    y.push_back(std::log(static_cast<double>(counts[i])));
  }
  return make_estimate(std::move(scales), std::move(values), std::move(x), std::move(y), mode);
}

void check_radius_ladder(std::span<const double> radii) {
  if (radii.size() < 5) throw InvalidArgument("Minkowski ladder needs at least 5 radii");
  const double ratio = radii[1] / radii[0];
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("Minkowski ladder ratio must lie in (0, 1)");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || std::abs(radii[i] / radii[i - 1] - ratio) > 1e-9 * ratio) {
      throw InvalidArgument("Minkowski ladder must be geometric");
    }
  }
}

}  // namespace

CompactSet::CompactSet(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{[](const Interval& s) {
                          if (!(s.a >= 0.0 && s.a <= s.b) || !std::isfinite(s.b)) {
                            throw InvalidArgument("interval must satisfy 0 <= a <= b < inf");
                          }
                        },
                        [](FinitePoints& s) {
                          if (s.points.empty()) throw InvalidArgument("finite set must be nonempty");
                          for (double p : s.points)
                            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("points must be finite and >= 0");
                          sort_unique(s.points);
                        },
                        [](const IfsAttractor& s) { validate_ifs(s); },
                        [](const SetUnion& s) {
                          if (s.parts.empty()) throw InvalidArgument("union needs at least one part");
                        }},
             kind_);
}

CompactSet CompactSet::interval(double a, double b) { return CompactSet(Interval{a, b}); }
CompactSet CompactSet::points(std::vector<double> pts) { return CompactSet(FinitePoints{std::move(pts)}); }
CompactSet CompactSet::ifs(std::vector<double> ratios, std::vector<double> translations, int depth_budget) {
  return CompactSet(IfsAttractor{std::move(ratios), std::move(translations), depth_budget});
}
CompactSet CompactSet::middle_third_cantor(int depth_budget) {
  return ifs({1.0 / 3.0, 1.0 / 3.0}, {0.0, 2.0 / 3.0}, depth_budget);
}
CompactSet CompactSet::union_of(std::vector<CompactSet> parts) { return CompactSet(SetUnion{std::move(parts)}); }

std::pair<double, double> CompactSet::hull() const {
  return std::visit(Overloaded{[](const Interval& s) { return std::pair{s.a, s.b}; },
                               [](const FinitePoints& s) { return std::pair{s.points.front(), s.points.back()}; },
                               [](const IfsAttractor& s) { return ifs_hull(s); },
                               [](const SetUnion& s) {
                                 auto h = s.parts.front().hull();
                                 for (const auto& p : s.parts) {
                                   const auto q = p.hull();
                                   h = {std::min(h.first, q.first), std::max(h.second, q.second)};
                                 }
                                 return h;
                               }},
                    kind_);
}

std::string CompactSet::id() const {
  return std::visit(Overloaded{[](const Interval& s) { return "interval:" + num(s.a) + "," + num(s.b); },
                               [](const FinitePoints& s) {
                                 std::string out = "points:";
                                 for (std::size_t i = 0; i < s.points.size(); ++i) {
                                   if (i) out += ",";
                                   out += num(s.points[i]);
                                 }
                                 return out;
                               },
                               [](const IfsAttractor& s) {
                                 if (s.ratios.size() == 2 && s.ratios[0] == 1.0 / 3.0 && s.ratios[1] == 1.0 / 3.0 &&
                                     s.translations[0] == 0.0 && s.translations[1] == 2.0 / 3.0) {
                                   return std::string("cantor3");
                                 }
                                 std::string out = "ifs:";
                                 for (std::size_t i = 0; i < s.ratios.size(); ++i) {
                                   if (i) out += ";";
                                   out += num(s.ratios[i]) + "," + num(s.translations[i]);
                                 }
                                 return out;
                               },
                               [](const SetUnion& s) {
                                 std::string out = "union(";
                                 for (std::size_t i = 0; i < s.parts.size(); ++i) {
                                   if (i) out += "|";
                                   out += s.parts[i].id();
                                 }
                                 return out + ")";
                               }},
                    kind_);
}

bool CompactSet::self_cover_certified() const {
  return !std::holds_alternative<SetUnion>(kind_);
}

DeltaNet ifs_cylinder_net(const IfsAttractor& ifs, int depth, std::size_t cap) {
  validate_ifs(ifs);
  const double maps = static_cast<double>(ifs.ratios.size());
  if (2.0 * std::pow(maps, depth) > static_cast<double>(cap)) {
    throw MeshTooFine("IFS net at depth " + std::to_string(depth) + " exceeds the cap of " + std::to_string(cap));
  }
  const auto [lo, hi] = ifs_hull(ifs);
  // Each cylinder is g(hull) for an increasing affine g(x) = scale * x + shift.
  std::vector<std::pair<double, double>> level{{1.0, 0.0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::pair<double, double>> next;
    next.reserve(level.size() * ifs.ratios.size());
    for (const auto& [scale, shift] : level) {
      for (std::size_t i = 0; i < ifs.ratios.size(); ++i) {
        next.emplace_back(scale * ifs.ratios[i], scale * ifs.translations[i] + shift);
      }
    }
    level = std::move(next);
  }
  DeltaNet net;
  net.points.reserve(2 * level.size());
  double longest = 0.0;
  for (const auto& [scale, shift] : level) {
    net.points.push_back(scale * lo + shift);
    net.points.push_back(scale * hi + shift);
    longest = std::max(longest, scale * (hi - lo));
  }
  sort_unique(net.points);
  net.mesh = longest;
  net.parent = CompactSet(ifs).id();
  return net;
}

DeltaNet discretize(const CompactSet& set, double delta, std::size_t cap) {
  if (!(delta > 0.0)) throw InvalidArgument("mesh must be positive");
  DeltaNet net = std::visit(
      Overloaded{[&](const Interval& s) {
                   DeltaNet out;
                   const double length = s.b - s.a;
                   const double cells = std::ceil(length / delta);
                   if (cells + 1.0 > static_cast<double>(cap)) {
                     throw MeshTooFine("interval net at mesh " + num(delta) + " exceeds the cap of " + std::to_string(cap));
                   }
                   const auto m = static_cast<std::size_t>(cells);
                   if (m == 0) {
                     out.points = {s.a};
                   } else {
                     out.points.resize(m + 1);
                     for (std::size_t k = 0; k <= m; ++k) {
                       out.points[k] = s.a + length * static_cast<double>(k) / static_cast<double>(m);
                     }
                     out.points.back() = s.b;
                   }
                   return out;
                 },
                 [&](const FinitePoints& s) {
                   if (s.points.size() > cap) throw MeshTooFine("finite set exceeds the net cap");
                   return DeltaNet{s.points, delta, ""};
                 },
                 [&](const IfsAttractor& s) {
                   const auto [lo, hi] = ifs_hull(s);
                   const double rmax = *std::max_element(s.ratios.begin(), s.ratios.end());
                   int depth = 0;
                   double longest = hi - lo;
                   while (longest > delta) {
                     ++depth;
                     longest *= rmax;
                     if (depth > s.depth_budget) {
                       throw MeshTooFine("IFS mesh " + num(delta) + " needs more than the depth budget of " +
                                         std::to_string(s.depth_budget));
                     }
                   }
                   return ifs_cylinder_net(s, depth, cap);
                 },
                 [&](const SetUnion& s) {
                   DeltaNet out;
                   for (const auto& part : s.parts) {
                     const DeltaNet sub = discretize(part, delta, cap);
                     out.points.insert(out.points.end(), sub.points.begin(), sub.points.end());
                   }
                   sort_unique(out.points);
                   if (out.points.size() > cap) throw MeshTooFine("union net exceeds the cap");
                   return out;
                 }},
      set.kind());
  net.mesh = delta;
  net.parent = set.id();
  return net;
}

PointCloud PointCloud::from_net(const DeltaNet& net) { return PointCloud{1, net.points}; }

PointCloud read_point_cloud_csv(std::istream& in) {
  PointCloud cloud;
  cloud.dim = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream fields(line);
    fields.imbue(std::locale::classic());
    std::string field;
    while (std::getline(fields, field, ',')) {
      std::istringstream parse(field);
      parse.imbue(std::locale::classic());
      double v = 0.0;
      parse >> v;
      if (parse.fail()) throw InvalidArgument("point cloud row " + std::to_string(row) + ": bad number '" + field + "'");
      values.push_back(v);
    }
    if (cloud.dim == 0) cloud.dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != cloud.dim) {
      throw InvalidArgument("point cloud row " + std::to_string(row) + " has the wrong number of columns");
    }
    cloud.coords.insert(cloud.coords.end(), values.begin(), values.end());
  }
  if (cloud.dim == 0) cloud.dim = 1;
  return cloud;
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) os << ',';
      os << p[k];
    }
    os << "\r\n";
  }
  out << os.str();
}

bool separated(double distance, double r) { return distance >= r * (1.0 - 1e-9); }

double sup_distance(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, std::abs(x[k] - y[k]));
  return d;
}

std::vector<std::size_t> separated_subset(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) throw InvalidArgument("capacity radius must be positive");
  if (cloud.dim > 1) return greedy_separated_multi(cloud, r);
  std::vector<std::size_t> order(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cloud.coords[a] < cloud.coords[b]; });
  std::vector<std::size_t> chosen;
  for (std::size_t idx : order) {
    if (chosen.empty() || separated(cloud.coords[idx] - cloud.coords[chosen.back()], r)) chosen.push_back(idx);
  }
  return chosen;
}

std::size_t kolmogorov_capacity(const DeltaNet& net, double r) {
  if (!(r > 0.0)) throw InvalidArgument("capacity radius must be positive");
  return greedy_sorted_count(net.points, r);
}

std::size_t kolmogorov_capacity(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) throw InvalidArgument("capacity radius must be positive");
  if (cloud.dim == 1) {
    std::vector<double> sorted = cloud.coords;
    std::sort(sorted.begin(), sorted.end());
    return greedy_sorted_count(sorted, r);
  }
  return greedy_separated_multi(cloud, r).size();
}

std::vector<std::size_t> capacity_profile(const PointCloud& cloud, std::span<const double> radii) {
  std::vector<std::size_t> counts(radii.size());
  if (cloud.dim == 1) {
    std::vector<double> sorted = cloud.coords;
    std::sort(sorted.begin(), sorted.end());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < radii.size(); ++i) counts[i] = greedy_sorted_count(sorted, radii[i]);
    return counts;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < radii.size(); ++i) counts[i] = greedy_separated_multi(cloud, radii[i]).size();
  return counts;
}

std::vector<std::size_t> capacity_profile_serial(const PointCloud& cloud, std::span<const double> radii) {
  std::vector<std::size_t> counts(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) counts[i] = kolmogorov_capacity(cloud, radii[i]);
  return counts;
}

LadderEstimate minkowski_dim_estimate(const PointCloud& cloud, std::span<const double> radii, SlopeMode mode) {
  check_radius_ladder(radii);
  if (cloud.size() == 0) throw InvalidArgument("empty point cloud");
  return capacity_estimate(capacity_profile(cloud, radii), radii, mode);
}

LadderEstimate minkowski_dim_estimate(const DeltaNet& net, std::span<const double> radii, SlopeMode mode) {
  return minkowski_dim_estimate(PointCloud::from_net(net), radii, mode);
}

}  // namespace fracdim
