#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fracdim/errors.hpp"
#include "fracdim/simulate.hpp"

using namespace fracdim;

namespace {

DeltaNet net_of(std::vector<double> pts) {
  DeltaNet net;
  net.points = std::move(pts);
  net.mesh = 0.1;
  net.parent = "test";
  return net;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

std::vector<double> binary_radii(int from, int to) {
  std::vector<double> r;
  for (int k = from; k <= to; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

}  // namespace

TEST_CASE("Gaussian increments have variance 2 c dt") {
  const double c = 1.5, dt = 0.3;
  const auto model = LevyModel::stable(2.0, c, 1);
  const auto net = net_of({0.2, 0.2 + dt});
  const int n = 100000;
  double m1 = 0.0, m2 = 0.0;
  for (int p = 0; p < n; ++p) {
    const auto path = sample_path(model, net, 17, static_cast<std::uint64_t>(p));
    const double inc = path.values[1] - path.values[0];
    m1 += inc;
    m2 += inc * inc;
  }
  const double var = m2 / n - (m1 / n) * (m1 / n);
  CHECK(std::abs(var / (2.0 * c * dt) - 1.0) <= 0.02);
}

TEST_CASE("stable subordinator Laplace transform") {
  const auto model = LevyModel::subordinator(LaplaceExponent::stable(0.5));
  const auto net = net_of({1.0});
  const int n = 100000;
  double lt = 0.0;
  for (int p = 0; p < n; ++p) lt += std::exp(-sample_path(model, net, 23, static_cast<std::uint64_t>(p)).values[0]);
  CHECK(std::abs(lt / n / std::exp(-1.0) - 1.0) <= 0.01);
}

TEST_CASE("path invariants") {
  const auto zero = sample_path(LevyModel::stable(1.3, 1.0, 2), net_of({0.0}), 1);
  CHECK(zero.values == std::vector<double>{0.0, 0.0});
  for (const auto& phi : {LaplaceExponent::stable(0.4), LaplaceExponent::gamma(2.0, 1.0),
                          LaplaceExponent::compound_poisson_drift(3.0, 0.2, 0.1)}) {
    const auto model = LevyModel::subordinator(phi);
    const auto net = discretize(CompactSet::interval(0.0, 1.0), 1e-3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto path = sample_path(model, net, seed);
      CHECK(path.values.front() == 0.0);
      CHECK(std::is_sorted(path.values.begin(), path.values.end()));
    }
  }
  const auto model = LevyModel::subordinator(LaplaceExponent::custom("f", [](double l) { return l; }));
  CHECK_THROWS_AS(sample_path(model, net_of({0.0, 1.0}), 1), NoSampler);
  const auto a = sample_path(LevyModel::stable(0.9), net_of({0.1, 0.5}), 5, 3);
  const auto b = sample_path(LevyModel::stable(0.9), net_of({0.1, 0.5}), 5, 3);
  CHECK(a.values == b.values);
}

TEST_CASE("increments are stationary") {
  const double h = 0.05;
  const auto net = net_of({0.1, 0.1 + h, 0.7, 0.7 + h});
  const int n = 10000;
  // two-sample critical value at the 1% level
  const double critical = 1.628 * std::sqrt(2.0 / n);
  // gamma shape a*h = 1: with a*h << 1 many increments fall below the rounding unit of the
  // running sum, and differences of stored values no longer carry them
  for (const auto& model : {LevyModel::stable(1.2), LevyModel::subordinator(LaplaceExponent::gamma(20.0, 1.0)),
                            LevyModel::subordinate_brownian(LaplaceExponent::stable(0.5))}) {
    std::vector<double> early, late;
    for (int p = 0; p < n; ++p) {
      const auto path = sample_path(model, net, 31, static_cast<std::uint64_t>(p));
      early.push_back(path.values[1] - path.values[0]);
      late.push_back(path.values[3] - path.values[2]);
    }
    INFO(model.tag());
    CHECK(ks_statistic(early, late) < critical);
  }
}

TEST_CASE("image experiments are deterministic and thread independent") {
  const auto unit = CompactSet::interval(0.0, 1.0);
  const auto radii = binary_radii(3, 7);
  const auto model = LevyModel::stable(1.5, 1.0, 2);
  const auto a = image_dim_experiment(model, unit, 6, radii, 99);
  const auto b = image_dim_experiment_serial(model, unit, 6, radii, 99);
  CHECK(a.estimates == b.estimates);
  CHECK(a.counts == b.counts);
  CHECK(a.median == b.median);
  for (double e : a.estimates) {
    CHECK(std::isfinite(e));
    CHECK(e <= 2.0 + 0.05);
  }
  CHECK(a.q1 <= a.median);
  CHECK(a.median <= a.q3);
  CHECK_THROWS_AS(image_dim_experiment(model, unit, 0, radii, 1), InvalidArgument);

  std::ostringstream csv;
  write_experiment_csv(csv, a);
  const std::string text = csv.str();
  CHECK(text.rfind("path_index,slope,K(0.125),", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("quantiles") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(quantile({}, 0.5), InvalidArgument);
}

TEST_CASE("theory against simulation") {
  const auto unit = CompactSet::interval(0.0, 1.0);
  ProfileOptions po;
  po.mesh_factor = 0.5;
  const auto ladder = geometric_ladder(0.0136, 0.5, 6);
  const auto radii = binary_radii(3, 9);

  const auto stable = LevyModel::stable(0.8, 1.0, 1);
  const auto prof = levy_profile(stable, unit, ladder, po);
  const auto exp = image_dim_experiment(stable, unit, 16, radii, 7);
  const auto cmp = theory_vs_empirical(stable, unit, prof, exp, 0.1);
  CHECK(cmp.pass);
  CHECK(cmp.difference == doctest::Approx(std::abs(prof.estimate - exp.median)));
  CHECK(exp.median <= std::min(1.0, prof.estimate) + 0.15);

  const auto single = CompactSet::points({0.3});
  const auto sp = levy_profile(stable, single, ladder, po);
  const auto se = image_dim_experiment(stable, single, 4, radii, 7);
  const auto sc = theory_vs_empirical(stable, single, sp, se);
  CHECK(sc.theory == 0.0);
  CHECK(sc.empirical == 0.0);
  CHECK(sc.pass);

  CHECK_THROWS_AS(theory_vs_empirical(LevyModel::stable(1.0), unit, prof, exp), MismatchedInputs);
  CHECK_THROWS_AS(theory_vs_empirical(stable, single, prof, exp), MismatchedInputs);
}
