#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracdim/errors.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/random.hpp"

using namespace fracdim;
using std::numbers::pi;

namespace {

// Composite Simpson on [a, b]; reference for smooth integrands.
template <class F>
double simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

SimplexWeights random_weights(std::size_t n, std::mt19937_64& gen) {
  std::exponential_distribution<double> e;
  SimplexWeights w;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w.w.emplace_back(e(gen));
  for (double& v : w.w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("line stable kernel against closed forms") {
  CHECK(kappa_stable_1d(2.0, 1.0, 0.3, 0.0) == 1.0);
  CHECK(kappa_stable_1d(2.0, 1.0, 1.0, 1.0) == doctest::Approx(std::erf(0.5)).epsilon(1e-8));
  CHECK(kappa_stable_1d(1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
  // Gaussian with variance 2ct, Cauchy with scale ct
  for (double c : {0.5, 2.0}) {
    for (double t : {0.01, 0.3, 4.0}) {
      for (double eps : {0.05, 0.7, 3.0}) {
        CHECK(std::abs(kappa_stable_1d(2.0, c, eps, t) - std::erf(eps / (2.0 * std::sqrt(c * t)))) < 1e-8);
        CHECK(std::abs(kappa_stable_1d(1.0, c, eps, t) - 2.0 / pi * std::atan(eps / (c * t))) < 1e-8);
      }
    }
  }
}

TEST_CASE("line stable kernel is monotone in eps and continuous in t") {
  for (double alpha : {0.6, 1.3, 1.9}) {
    double prev = 0.0;
    for (double eps = 0.01; eps < 2.0; eps *= 1.3) {
      const double k = kappa_stable_1d(alpha, 1.0, eps, 0.5);
      CHECK(k >= prev - 1e-9);
      CHECK(k <= 1.0);
      prev = k;
    }
    for (double t = 0.05; t < 1.0; t += 0.05) {
      const double a = kappa_stable_1d(alpha, 1.0, 0.2, t);
      const double b = kappa_stable_1d(alpha, 1.0, 0.2, t + 1e-6);
      CHECK(std::abs(a - b) < 1e-4);
    }
  }
}

TEST_CASE("Monte Carlo small-ball probabilities") {
  const auto bm = LevyModel::stable(2.0, 1.0, 1);
  const auto trivial = kappa_monte_carlo(bm, 1.0, 0.0, 10000, 7);
  CHECK(trivial.estimate == 1.0);
  CHECK(trivial.half_width == 0.0);

  const auto g = kappa_monte_carlo(bm, 1.0, 1.0, 1000000, 11);
  CHECK(std::abs(g.estimate - std::erf(0.5)) < 0.002);
  CHECK(g.half_width == doctest::Approx(1.96 * std::sqrt(g.estimate * (1 - g.estimate) / 1e6)));

  // Levy law: P{S(1) < 1} = erfc(1/2) for Phi(l) = l^{1/2}
  const auto sub = LevyModel::subordinator(LaplaceExponent::stable(0.5));
  const auto s = kappa_monte_carlo(sub, 1.0, 1.0, 1000000, 13);
  CHECK(std::abs(s.estimate - std::erfc(0.5)) < 0.002);

  CHECK_THROWS_AS(kappa_monte_carlo(bm, 1.0, 1.0, 999, 1), InvalidArgument);
  const auto custom = LevyModel::subordinator(LaplaceExponent::custom("f", [](double l) { return l; }));
  CHECK_THROWS_AS(kappa_monte_carlo(custom, 1.0, 1.0, 1000, 1), NoSampler);
}

TEST_CASE("Monte Carlo parallel and serial agree bit for bit") {
  const auto m = LevyModel::stable(1.5, 1.0, 2);
  const auto a = kappa_monte_carlo(m, 0.5, 0.7, 20000, 99);
  const auto b = kappa_monte_carlo_serial(m, 0.5, 0.7, 20000, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.half_width == b.half_width);
}

TEST_CASE("samplers reproduce known laws") {
  auto gen = task_stream(5, 0);
  const int n = 200000;
  // alpha = 2 is N(0, 2)
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_symmetric_stable(2.0, gen);
    m2 += x * x;
  }
  CHECK(m2 / n == doctest::Approx(2.0).epsilon(0.02));
  // positive stable: E exp(-S) = exp(-1)
  double lt = 0.0;
  for (int i = 0; i < n; ++i) lt += std::exp(-sample_positive_stable(0.3, gen));
  CHECK(lt / n == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
  // gamma subordinator a=2, b=3 at t=0.5: E exp(-S) = (1 + 1/b)^{-a t}
  const auto gam = LaplaceExponent::gamma(2.0, 3.0);
  double lg = 0.0;
  for (int i = 0; i < n; ++i) lg += std::exp(-gam.sample(0.5, gen));
  CHECK(lg / n == doctest::Approx(std::pow(4.0 / 3.0, -1.0)).epsilon(0.01));
  // compound Poisson with drift
  const auto cpd = LaplaceExponent::compound_poisson_drift(2.0, 0.5, 0.3);
  double lc = 0.0;
  for (int i = 0; i < n; ++i) lc += std::exp(-cpd.sample(1.0, gen));
  CHECK(lc / n == doctest::Approx(std::exp(-cpd(1.0))).epsilon(0.01));
}

TEST_CASE("Laplace exponents are Bernstein-like on a grid") {
  const std::vector<LaplaceExponent> phis = {
      LaplaceExponent::stable(0.3), LaplaceExponent::stable(1.0), LaplaceExponent::gamma(1.0, 1.0),
      LaplaceExponent::compound_poisson_drift(1.5, 2.0, 0.1),
      LaplaceExponent::tabulated({{1.0, 1.0}, {2.0, 1.5}, {10.0, 3.0}})};
  for (const auto& phi : phis) {
    CHECK(phi(0.0) == 0.0);
    const double h = 0.05;
    for (double l = 0.0; l < 20.0; l += h) {
      CHECK(phi(l + h) >= phi(l));
      CHECK(phi(l + 2 * h) - 2 * phi(l + h) + phi(l) <= 1e-9);
    }
  }
  CHECK(LaplaceExponent::stable(0.5).tag() == "stable:0.5");
  CHECK_THROWS_AS(LaplaceExponent::stable(1.5), InvalidArgument);
}

TEST_CASE("characteristic exponents") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0.0, 3.0);
  const std::vector<LevyModel> models = {LevyModel::stable(1.2, 2.0, 3),
                                         LevyModel::subordinator(LaplaceExponent::stable(0.4)),
                                         LevyModel::subordinator(LaplaceExponent::gamma(1.0, 2.0)),
                                         LevyModel::subordinate_brownian(LaplaceExponent::stable(0.5), 2)};
  for (const auto& m : models) {
    const auto psi = m.char_exponent();
    std::vector<double> z(static_cast<std::size_t>(psi.dim), 0.0);
    CHECK(std::abs(psi(z)) < 1e-15);
    for (int k = 0; k < 50; ++k) {
      for (double& v : z) v = nd(gen);
      const Complex p = psi(z);
      CHECK(p.real() >= 0.0);
      if (psi.symmetric) CHECK(std::abs(p.imag()) < 1e-12);
    }
  }
  const auto iso = LevyModel::stable(1.2, 2.0, 2).char_exponent();
  const std::vector<double> z = {3.0, 4.0};
  CHECK(iso(z).real() == doctest::Approx(2.0 * std::pow(5.0, 1.2)));
  // stable subordinator: Psi(xi) = (-i xi)^beta
  const auto sub = LevyModel::subordinator(LaplaceExponent::stable(0.5)).char_exponent();
  const Complex expect = std::pow(Complex(0.0, -2.0), 0.5);
  CHECK(std::abs(sub(2.0) - expect) < 1e-14);
}

TEST_CASE("kernel families") {
  CHECK(kernel_eval(KernelFamily::falconer_howroyd(0.5), 0.1, 0.4) == doctest::Approx(0.5));
  const auto sx = KernelFamily::subordinator_exp(LaplaceExponent::stable(0.5));
  CHECK(kernel_eval(sx, 100.0, 0.2) == doctest::Approx(std::exp(-2.0)));
  const std::vector<KernelFamily> fams = {KernelFamily::falconer_howroyd(1.3), sx,
                                          KernelFamily::stable_sandwich(1.5, 2),
                                          KernelFamily::exact(LevyModel::stable(1.5))};
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (const auto& f : fams) {
    CHECK(kernel_eval(f, 0.3, 0.0) == 1.0);
    double prev = 1.0;
    for (int i = 0; i < 40; ++i) {
      const double r = 0.05 * i;
      const double v = kernel_eval(f, 0.3, r);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    for (int i = 0; i < 20; ++i) {
      const double v = kernel_eval(f, 0.01 + u(gen), u(gen));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  // the sandwich kernel is the FH kernel at scale eps^alpha with s = d/alpha
  for (double r : {0.01, 0.1, 0.5}) {
    CHECK(kernel_eval(KernelFamily::stable_sandwich(1.5, 2), 0.2, r) ==
          doctest::Approx(kernel_eval(KernelFamily::falconer_howroyd(2.0 / 1.5), std::pow(0.2, 1.5), r)));
  }
}

TEST_CASE("stable kernel sandwich constants are scale stable") {
  for (double alpha : {1.0, 1.5, 2.0}) {
    auto ratio_range = [&](double eps_hi) {
      double lo = 1e300, hi = 0.0;
      for (double eps = eps_hi; eps > eps_hi * 1e-2; eps *= 0.7) {
        for (double t = 1.0; t > 1e-4; t *= 0.6) {
          const double bound = std::min(1.0, eps / std::pow(t, 1.0 / alpha));
          const double ratio = kappa_stable_1d(alpha, 1.0, eps, t) / bound;
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
        }
      }
      return std::pair{lo, hi};
    };
    const auto [a1, a2] = ratio_range(0.9);
    const auto [b1, b2] = ratio_range(0.05);
    CHECK(a1 > 0.2);
    CHECK(a2 < 1.0 + 1e-9);
    // constants fitted at coarse scales still bracket the fine ones
    CHECK(b1 >= 0.9 * a1);
    CHECK(b2 <= a2 + 1e-9);
  }
}

TEST_CASE("energy form") {
  const auto bm = LevyModel::stable(2.0, 1.0, 1).char_exponent();
  const std::vector<double> one = {0.3};
  CHECK(energy_form(one, SimplexWeights::uniform(1), bm, std::vector<double>{2.0}) == doctest::Approx(1.0));
  const std::vector<double> two = {0.0, 1.0};
  CHECK(energy_form(two, SimplexWeights::uniform(2), bm, std::vector<double>{1.0}) ==
        doctest::Approx(0.5 + 0.5 * std::exp(-1.0)).epsilon(1e-12));

  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<CharExponent> psis = {bm, LevyModel::subordinator(LaplaceExponent::stable(0.7)).char_exponent(),
                                          LevyModel::subordinator(LaplaceExponent::gamma(2.0, 1.0)).char_exponent()};
  for (const auto& psi : psis) {
    for (int k = 0; k < 30; ++k) {
      std::vector<double> t(6);
      for (double& v : t) v = u(gen);
      const auto w = random_weights(6, gen);
      CHECK(energy_form(t, w, psi, std::vector<double>{0.0}) == doctest::Approx(1.0));
      const double e = energy_form(t, w, psi, std::vector<double>{20.0 * u(gen) - 10.0});
      CHECK(e >= -1e-14);
      CHECK(e <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("Cauchy-weighted energy") {
  const auto cauchy = LevyModel::stable(1.0, 1.0, 1).char_exponent();
  CHECK(cauchy_weighted_energy(std::vector<double>{0.5}, SimplexWeights::uniform(1), cauchy, 0.1) ==
        doctest::Approx(1.0).epsilon(1e-6));
  // (2/pi) int_0^inf e^{-z}/(1+z^2) dz, with z = tan u
  const double ref = 2.0 / pi * simpson([](double u) { return u < pi / 2 ? std::exp(-std::tan(u)) : 0.0; }, 0.0,
                                        pi / 2, 200000);
  const double v = cauchy_weighted_energy(std::vector<double>{0.0, 1.0}, SimplexWeights::uniform(2), cauchy, 1.0);
  CHECK(std::abs(v - (0.5 + 0.5 * ref)) < 1e-6);
  CHECK(std::abs(v - 0.6978135592) < 1e-6);

  // two-dimensional isotropic stable: product Cauchy weight against a direct 2-d Simpson
  const auto bm2 = LevyModel::stable(2.0, 1.0, 2).char_exponent();
  const double v2 = cauchy_weighted_energy(std::vector<double>{0.0, 1.0}, SimplexWeights::uniform(2), bm2, 2.0);
  const double inner = simpson(
      [](double u1) {
        return simpson(
            [&](double u2) {
              const double z1 = std::tan(u1) / 2.0, z2 = std::tan(u2) / 2.0;
              return std::exp(-(z1 * z1 + z2 * z2));
            },
            -pi / 2 + 1e-12, pi / 2 - 1e-12, 800);
      },
      -pi / 2 + 1e-12, pi / 2 - 1e-12, 800);
  CHECK(std::abs(v2 - (0.5 + 0.5 * inner / (pi * pi))) < 1e-6);
}

TEST_CASE("subordinator identity for the Cauchy-weighted energy") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& phi : {LaplaceExponent::stable(0.5), LaplaceExponent::gamma(1.0, 1.0)}) {
    const auto psi = LevyModel::subordinator(phi).char_exponent();
    for (double eps : {0.1, 0.01}) {
      std::vector<double> t(10);
      for (double& v : t) v = u(gen);
      const auto w = SimplexWeights::uniform(10);
      double direct = 0.0;
      for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) direct += 0.01 * std::exp(-std::abs(t[i] - t[j]) * phi(1.0 / eps));
      CHECK(std::abs(cauchy_weighted_energy(t, w, psi, eps) - direct) < 1e-6);
    }
  }
}

TEST_CASE("Cauchy upper bound for the stable kernel energy") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {1.0, 2.0}) {
    const auto model = LevyModel::stable(alpha, 1.0, 1);
    const auto psi = model.char_exponent();
    for (int k = 0; k < 5; ++k) {
      std::vector<double> t(5);
      for (double& v : t) v = u(gen);
      const auto w = random_weights(5, gen);
      const double eps = 0.05;
      double lhs = 0.0;
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
          lhs += w.w[i] * w.w[j] * kappa_stable_1d(alpha, 1.0, eps, std::abs(t[i] - t[j]));
      CHECK(lhs <= 2.0 * pi * cauchy_weighted_energy(t, w, psi, eps));
    }
  }
}
