#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fracdim/errors.hpp"
#include "fracdim/set_models.hpp"

using namespace fracdim;

namespace {

// Largest r-separated subset by exhaustive include/exclude search.
std::size_t exhaustive_capacity(const PointCloud& c, double r) {
  const std::size_t n = c.size();
  std::vector<std::size_t> chosen;
  std::size_t best = 0;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (chosen.size() + (n - i) <= best) return;
    if (i == n) {
      best = std::max(best, chosen.size());
      return;
    }
    bool ok = true;
    for (std::size_t j : chosen) {
      if (!separated(sup_distance(c.point(i), c.point(j)), r)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      chosen.push_back(i);
      go(i + 1);
      chosen.pop_back();
    }
    go(i + 1);
  };
  go(0);
  return best;
}

PointCloud cloud_1d(std::vector<double> v) {
  PointCloud c;
  c.dim = 1;
  c.coords = std::move(v);
  return c;
}

// Left endpoints of the depth-k middle-third cylinders, by ternary digits.
std::vector<double> cantor_left_endpoints(int depth) {
  std::vector<double> out;
  for (int mask = 0; mask < (1 << depth); ++mask) {
    double x = 0.0, scale = 1.0;
    for (int k = 0; k < depth; ++k) {
      scale /= 3.0;
      if (mask & (1 << (depth - 1 - k))) x += 2.0 * scale;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("nets") {
  const auto net = discretize(CompactSet::interval(0.0, 1.0), 0.25);
  REQUIRE(net.points.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(net.points[static_cast<std::size_t>(i)] == doctest::Approx(0.25 * i));

  const auto c = discretize(CompactSet::middle_third_cantor(), 1.0 / 27.0);
  REQUIRE(c.points.size() == 16);
  std::vector<double> expect;
  for (double x : cantor_left_endpoints(3)) {
    expect.push_back(x);
    expect.push_back(x + 1.0 / 27.0);
  }
  std::sort(expect.begin(), expect.end());
  for (std::size_t i = 0; i < 16; ++i) CHECK(c.points[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  CHECK(c.mesh <= 1.0 / 27.0 + 1e-15);

  const auto p = discretize(CompactSet::points({1.0, 0.0}), 1e-3);
  CHECK(p.points == std::vector<double>{0.0, 1.0});

  CHECK_THROWS_AS(discretize(CompactSet::interval(0.0, 1.0), 1e-7), MeshTooFine);
  CHECK_THROWS_AS(discretize(CompactSet::interval(0.0, 1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(CompactSet::ifs({0.6, 0.6}, {0.0, 0.4}), InvalidArgument);
  CHECK(CompactSet::middle_third_cantor().id() == "cantor3");
  CHECK(CompactSet::interval(0.0, 1.0).self_cover_certified());
}

TEST_CASE("net covers its parent set") {
  // every point of a deep Cantor net is within the mesh of the coarse net
  const auto coarse = discretize(CompactSet::middle_third_cantor(), 0.01);
  const auto fine = ifs_cylinder_net(std::get<IfsAttractor>(CompactSet::middle_third_cantor().kind()), 10);
  for (double x : fine.points) {
    auto it = std::lower_bound(coarse.points.begin(), coarse.points.end(), x);
    double d = 1e300;
    if (it != coarse.points.end()) d = *it - x;
    if (it != coarse.points.begin()) d = std::min(d, x - *std::prev(it));
    CHECK(d <= coarse.mesh + 1e-12);
  }
}

TEST_CASE("capacity examples") {
  const auto net = discretize(CompactSet::interval(0.0, 1.0), 1.0 / 4096);
  for (int k : {4, 8, 16}) CHECK(kolmogorov_capacity(net, 1.0 / k) == static_cast<std::size_t>(k + 1));
  CHECK(kolmogorov_capacity(discretize(CompactSet::points({0.0, 1.0}), 0.1), 2.0) == 1);
  const auto c3 = discretize(CompactSet::middle_third_cantor(), 1.0 / 27.0);
  CHECK(kolmogorov_capacity(c3, 1.0 / 9.0) == 8);
  CHECK(exhaustive_capacity(PointCloud::from_net(c3), 1.0 / 9.0) == 8);
}

TEST_CASE("1-d greedy capacity equals the exhaustive maximum") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 20);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(size(gen)));
    for (double& x : v) x = u(gen);
    const auto cloud = cloud_1d(v);
    for (double r : {0.03, 0.1, 0.25}) CHECK(kolmogorov_capacity(cloud, r) == exhaustive_capacity(cloud, r));
  }
}

TEST_CASE("greedy separated set in higher dimension") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    PointCloud c;
    c.dim = 2;
    for (int i = 0; i < 18 * 2; ++i) c.coords.push_back(u(gen));
    for (double r : {0.1, 0.3}) {
      const auto m = separated_subset(c, r);
      for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b) CHECK(separated(sup_distance(c.point(m[a]), c.point(m[b])), r));
      for (std::size_t i = 0; i < c.size(); ++i) {
        double best = 1e300;
        for (std::size_t j : m) best = std::min(best, sup_distance(c.point(i), c.point(j)));
        CHECK(best < r);
      }
      CHECK(m.size() <= exhaustive_capacity(c, r));
      CHECK(kolmogorov_capacity(c, r) == m.size());
    }
  }
}

TEST_CASE("capacity is monotone and collapses beyond the diameter") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  PointCloud c;
  c.dim = 3;
  for (int i = 0; i < 3 * 500; ++i) c.coords.push_back(nd(gen));
  std::size_t prev = 0;
  for (double r = 0.05; r < 20.0; r *= 1.5) {
    const std::size_t k = kolmogorov_capacity(c, r);
    if (prev) CHECK(k <= prev);
    prev = k;
  }
  CHECK(kolmogorov_capacity(c, 100.0) == 1);
}

TEST_CASE("capacity-volume bound against a rasterized enlargement") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    PointCloud c;
    c.dim = 2;
    for (int i = 0; i < 2 * 40; ++i) c.coords.push_back(u(gen));
    for (double r : {0.05, 0.15}) {
      const double h = r / 20.0;
      const int cells = static_cast<int>(std::ceil((1.0 + 2 * r) / h));
      std::size_t covered = 0;
      for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
          const double x[2] = {-r + (i + 0.5) * h, -r + (j + 0.5) * h};
          for (std::size_t p = 0; p < c.size(); ++p) {
            if (sup_distance(c.point(p), x) < r) {
              ++covered;
              break;
            }
          }
        }
      }
      const double volume = static_cast<double>(covered) * h * h;
      CHECK(r * r * static_cast<double>(kolmogorov_capacity(c, r)) <= 1.05 * volume);
    }
  }
}

TEST_CASE("Minkowski estimates") {
  const auto unit = discretize(CompactSet::interval(0.0, 1.0), std::ldexp(1.0, -16));
  std::vector<double> radii;
  for (int k = 4; k <= 12; ++k) radii.push_back(std::ldexp(1.0, -k));
  CHECK(std::abs(minkowski_dim_estimate(unit, radii).slope - 1.0) <= 0.02);

  const auto cantor = ifs_cylinder_net(std::get<IfsAttractor>(CompactSet::middle_third_cantor().kind()), 12);
  std::vector<double> triadic;
  for (int k = 2; k <= 10; ++k) triadic.push_back(std::pow(3.0, -k));
  const auto est = minkowski_dim_estimate(cantor, triadic);
  CHECK(std::abs(est.slope - std::log(2.0) / std::log(3.0)) <= 0.03);
  CHECK(est.recompute(est.mode).slope == est.slope);

  const auto single = discretize(CompactSet::points({0.5}), 0.1);
  CHECK(minkowski_dim_estimate(single, radii).slope == 0.0);
  CHECK_THROWS_AS(minkowski_dim_estimate(discretize(CompactSet::points({0.0, 10.0}), 0.1), radii), DegenerateLadder);
  CHECK_THROWS_AS(minkowski_dim_estimate(unit, std::vector<double>{0.1, 0.05, 0.025}), InvalidArgument);
}

TEST_CASE("capacity profile serial and parallel agree") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> nd;
  PointCloud c;
  c.dim = 2;
  for (int i = 0; i < 2 * 3000; ++i) c.coords.push_back(nd(gen));
  const std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  CHECK(capacity_profile(c, radii) == capacity_profile_serial(c, radii));
}

TEST_CASE("point cloud CSV round trip") {
  PointCloud c;
  c.dim = 2;
  c.coords = {0.1, -2.5e-7, 1.0 / 3.0, 4.0};
  std::stringstream ss;
  write_point_cloud_csv(ss, c);
  const auto back = read_point_cloud_csv(ss);
  CHECK(back.dim == 2);
  CHECK(back.coords == c.coords);
}
