#include "fracdim/process_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracdim/errors.hpp"
#include "fracdim/quadrature.hpp"
#include "fracdim/random.hpp"

namespace fracdim {
namespace {

constexpr double kPi = std::numbers::pi;
// exp(-kTruncation) < 1e-16
constexpr double kTruncation = 36.85;
constexpr double kInversionTarget = 1e-8;
constexpr std::size_t kMaxInversionPieces = 4'000'000;
constexpr std::size_t kMonteCarloBatches = 64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// (2/pi) * integral over (0, z_max) of sin(omega z)/z * decay(z), split at the zeros of
// the sine so each piece is integrated over at most one half period.
double sine_inversion(const std::function<double(double)>& decay, double omega, double z_max) {
  const double half_period = kPi / omega;
  const double pieces_d = std::ceil(z_max / half_period);
  if (pieces_d > static_cast<double>(kMaxInversionPieces)) {
    throw NonConvergedQuadrature("ball probability needs " + num(pieces_d) +
                                     " oscillation pieces; parameters too extreme",
                                 std::numeric_limits<double>::infinity());
  }
  const auto pieces = static_cast<std::size_t>(std::max(1.0, pieces_d));
  const double piece_target = std::max(1e-16, 0.1 * kInversionTarget / static_cast<double>(pieces));
  auto integrand = [&](double z) { return std::sin(omega * z) / z * decay(z); };

  double total = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double a = static_cast<double>(k) * half_period;
    const double b = std::min(z_max, static_cast<double>(k + 1) * half_period);
    if (b <= a) break;
    const QuadResult q = integrate_gk(integrand, a, b, piece_target, 200);
    total += q.value;
    error += q.error;
  }
  error *= 2.0 / kPi;
  if (!std::isfinite(total) || error > kInversionTarget) {
    throw NonConvergedQuadrature("ball probability inversion missed its 1e-8 target", error);
  }
  return std::clamp(2.0 / kPi * total, 0.0, 1.0);
}

bool inside_open_ball(std::span<const double> x, double eps) {
  for (double v : x)
    if (!(std::abs(v) < eps)) return false;
  return true;
}

std::uint64_t count_batch(const LevyModel& model, double eps, double t, std::uint64_t count,
                          std::uint64_t seed, std::uint64_t batch) {
  auto gen = task_stream(seed, batch);
  std::vector<double> x(static_cast<std::size_t>(model.dim()));
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    model.sample(t, gen, x);
    if (inside_open_ball(x, eps)) ++hits;
  }
  return hits;
}

std::uint64_t batch_size(std::uint64_t n, std::uint64_t b) {
  return n / kMonteCarloBatches + (b < n % kMonteCarloBatches ? 1 : 0);
}

void check_monte_carlo_inputs(const LevyModel& model, double eps, double t, std::uint64_t n) {
  if (model.sampler() == SamplerRecipe::None) throw NoSampler("model " + model.tag() + " has no sampler");
  if (n < 1000) throw InvalidArgument("Monte Carlo ball probability needs n >= 1000");
  if (!(eps > 0.0) || !(t >= 0.0)) throw InvalidArgument("need eps > 0 and t >= 0");
}

MonteCarloEstimate finish(std::uint64_t hits, std::uint64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace

// ---------------------------------------------------------------- LaplaceExponent

LaplaceExponent LaplaceExponent::stable(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("stable subordinator index must lie in (0, 1]");
  LaplaceExponent e;
  e.family_ = LaplaceFamily::StableSubordinator;
  e.params_ = {beta};
  return e;
}

LaplaceExponent LaplaceExponent::gamma(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("gamma subordinator needs a, b > 0");
  LaplaceExponent e;
  e.family_ = LaplaceFamily::Gamma;
  e.params_ = {a, b};
  return e;
}

LaplaceExponent LaplaceExponent::compound_poisson_drift(double rate, double jump_mean, double drift) {
  if (!(rate >= 0.0 && jump_mean > 0.0 && drift >= 0.0) || (rate == 0.0 && drift == 0.0)) {
    throw InvalidArgument("compound Poisson exponent needs rate >= 0, mean > 0, drift >= 0, not both zero");
  }
  LaplaceExponent e;
  e.family_ = LaplaceFamily::CompoundPoissonDrift;
  e.params_ = {rate, jump_mean, drift};
  return e;
}

LaplaceExponent LaplaceExponent::tabulated(std::vector<std::pair<double, double>> knots) {
  std::sort(knots.begin(), knots.end());
  if (knots.empty() || knots.front().first <= 0.0) {
    throw InvalidArgument("tabulated exponent needs knots at positive lambda");
  }
  double prev_l = 0.0, prev_v = 0.0;
  for (const auto& [l, v] : knots) {
    if (l <= prev_l || v < prev_v) throw InvalidArgument("tabulated exponent must be increasing in lambda and nondecreasing");
    prev_l = l;
    prev_v = v;
  }
  LaplaceExponent e;
  e.family_ = LaplaceFamily::Tabulated;
  e.knots_ = std::move(knots);
  return e;
}

LaplaceExponent LaplaceExponent::custom(std::string name, std::function<double(double)> phi) {
  LaplaceExponent e;
  e.family_ = LaplaceFamily::Custom;
  e.custom_ = std::move(phi);
  e.name_ = std::move(name);
  return e;
}

double LaplaceExponent::operator()(double lambda) const {
  switch (family_) {
    case LaplaceFamily::StableSubordinator:
      return lambda <= 0.0 ? 0.0 : std::pow(lambda, params_[0]);
    case LaplaceFamily::Gamma:
      return params_[0] * std::log1p(lambda / params_[1]);
    case LaplaceFamily::CompoundPoissonDrift: {
      const double ml = params_[1] * lambda;
      return params_[2] * lambda + params_[0] * ml / (1.0 + ml);
    }
    case LaplaceFamily::Tabulated: {
      if (lambda <= 0.0) return 0.0;
      double l0 = 0.0, v0 = 0.0;
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto [l1, v1] = knots_[i];
        if (lambda <= l1 || i + 1 == knots_.size()) {
          return v0 + (v1 - v0) * (lambda - l0) / (l1 - l0);
        }
        l0 = l1;
        v0 = v1;
      }
      return v0;
    }
    case LaplaceFamily::Custom:
      return custom_(lambda);
  }
  return 0.0;
}

std::optional<Complex> LaplaceExponent::at_complex(Complex w) const {
  switch (family_) {
    case LaplaceFamily::StableSubordinator:
      if (w == Complex(0.0)) return Complex(0.0);
      if (params_[0] == 1.0) return w;
      return std::exp(params_[0] * std::log(w));
    case LaplaceFamily::Gamma:
      return params_[0] * std::log(1.0 + w / params_[1]);
    case LaplaceFamily::CompoundPoissonDrift: {
      const Complex mw = params_[1] * w;
      return params_[2] * w + params_[0] * mw / (1.0 + mw);
    }
    default:
      return std::nullopt;
  }
}

std::string LaplaceExponent::tag() const {
  switch (family_) {
    case LaplaceFamily::StableSubordinator:
      return "stable:" + num(params_[0]);
    case LaplaceFamily::Gamma:
      return "gamma:" + num(params_[0]) + "," + num(params_[1]);
    case LaplaceFamily::CompoundPoissonDrift:
      return "cpd:" + num(params_[0]) + "," + num(params_[1]) + "," + num(params_[2]);
    case LaplaceFamily::Tabulated:
      return "tabulated:" + std::to_string(knots_.size());
    case LaplaceFamily::Custom:
      return "custom:" + name_;
  }
  return "";
}

double LaplaceExponent::sample(double t, std::mt19937_64& gen) const {
  if (t <= 0.0) return 0.0;
  switch (family_) {
    case LaplaceFamily::StableSubordinator: {
      const double beta = params_[0];
      if (beta == 1.0) return t;
      return std::pow(t, 1.0 / beta) * sample_positive_stable(beta, gen);
    }
    case LaplaceFamily::Gamma: {
      std::gamma_distribution<double> g(params_[0] * t, 1.0 / params_[1]);
      return g(gen);
    }
    case LaplaceFamily::CompoundPoissonDrift: {
      std::poisson_distribution<long> jumps(params_[0] * t);
      const long count = params_[0] > 0.0 ? jumps(gen) : 0;
      double value = params_[2] * t;
      if (count > 0) {
        std::gamma_distribution<double> g(static_cast<double>(count), params_[1]);
        value += g(gen);
      }
      return value;
    }
    default:
      throw NoSampler("Laplace exponent " + tag() + " has no sampler");
  }
}

// ---------------------------------------------------------------- samplers

double sample_symmetric_stable(double alpha, std::mt19937_64& gen) {
  const double v = kPi * (open_uniform(gen) - 0.5);
  if (alpha == 1.0) return std::tan(v);
  const double w = -std::log(open_uniform(gen));
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

double sample_positive_stable(double rho, std::mt19937_64& gen) {
  if (rho == 1.0) return 1.0;
  const double u = kPi * open_uniform(gen);
  const double w = -std::log(open_uniform(gen));
  const double log_a = std::log(std::sin(rho * u)) - std::log(std::sin(u)) / rho +
                       (1.0 - rho) / rho * (std::log(std::sin((1.0 - rho) * u)) - std::log(w));
  return std::exp(log_a);
}

// ---------------------------------------------------------------- LevyModel

LevyModel::LevyModel(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const IsotropicStable& m) {
                   if (!(m.alpha > 0.0 && m.alpha <= 2.0)) throw InvalidArgument("stable index must lie in (0, 2]");
                   if (!(m.scale > 0.0)) throw InvalidArgument("stable scale must be positive");
                   if (m.dim < 1) throw InvalidArgument("dimension must be >= 1");
                 },
                 [](const Subordinator&) {},
                 [](const SubordinateBrownian& m) {
                   if (m.dim < 1) throw InvalidArgument("dimension must be >= 1");
                 },
             },
             kind_);
}

LevyModel LevyModel::stable(double alpha, double scale, int dim) {
  return LevyModel(IsotropicStable{alpha, scale, dim});
}
LevyModel LevyModel::subordinator(LaplaceExponent phi) { return LevyModel(Subordinator{std::move(phi)}); }
LevyModel LevyModel::subordinate_brownian(LaplaceExponent phi, int dim) {
  return LevyModel(SubordinateBrownian{std::move(phi), dim});
}

int LevyModel::dim() const {
  return std::visit(Overloaded{[](const IsotropicStable& m) { return m.dim; },
                               [](const Subordinator&) { return 1; },
                               [](const SubordinateBrownian& m) { return m.dim; }},
                    kind_);
}

CharExponent LevyModel::char_exponent() const {
  return std::visit(
      Overloaded{
          [](const IsotropicStable& m) {
            return CharExponent{[m](std::span<const double> z) {
                                  double norm2 = 0.0;
                                  for (double v : z) norm2 += v * v;
                                  return Complex(m.scale * std::pow(norm2, 0.5 * m.alpha), 0.0);
                                },
                                m.dim, true};
          },
          [](const Subordinator& m) {
            if (!m.phi.has_closed_form()) {
              throw InvalidArgument("Laplace exponent " + m.phi.tag() + " has no analytic continuation");
            }
            return CharExponent{[phi = m.phi](std::span<const double> z) {
                                  return *phi.at_complex(Complex(0.0, -z[0]));
                                },
                                1, false};
          },
          [](const SubordinateBrownian& m) {
            return CharExponent{[m](std::span<const double> z) {
                                  double norm2 = 0.0;
                                  for (double v : z) norm2 += v * v;
                                  return Complex(m.phi(norm2), 0.0);
                                },
                                m.dim, true};
          },
      },
      kind_);
}

SamplerRecipe LevyModel::sampler() const {
  return std::visit(Overloaded{[](const IsotropicStable& m) {
                                 return m.dim == 1 ? SamplerRecipe::ChambersMallowsStuck
                                                   : SamplerRecipe::GaussianSubordination;
                               },
                               [](const Subordinator& m) {
                                 return m.phi.has_sampler() ? SamplerRecipe::SubordinatorIncrement
                                                            : SamplerRecipe::None;
                               },
                               [](const SubordinateBrownian& m) {
                                 return m.phi.has_sampler() ? SamplerRecipe::GaussianSubordination
                                                            : SamplerRecipe::None;
                               }},
                    kind_);
}

std::string LevyModel::tag() const {
  return std::visit(
      Overloaded{[](const IsotropicStable& m) {
                   return "isotropic_stable(alpha=" + num(m.alpha) + ",c=" + num(m.scale) +
                          ",d=" + std::to_string(m.dim) + ")";
                 },
                 [](const Subordinator& m) { return "subordinator(" + m.phi.tag() + ")"; },
                 [](const SubordinateBrownian& m) {
                   return "subordinate_brownian(" + m.phi.tag() + ",d=" + std::to_string(m.dim) + ")";
                 }},
      kind_);
}

double LevyModel::scaling_index() const {
  auto phi_index = [](const LaplaceExponent& phi) {
    return phi.family() == LaplaceFamily::StableSubordinator ? phi.params()[0] : 1.0;
  };
  return std::visit(Overloaded{[](const IsotropicStable& m) { return m.alpha; },
                               [&](const Subordinator& m) { return phi_index(m.phi); },
                               [&](const SubordinateBrownian& m) { return 2.0 * phi_index(m.phi); }},
                    kind_);
}

void LevyModel::sample(double t, std::mt19937_64& gen, std::span<double> out) const {
  std::visit(Overloaded{
                 [&](const IsotropicStable& m) {
                   if (t <= 0.0) {
                     std::fill(out.begin(), out.end(), 0.0);
                     return;
                   }
                   if (m.dim == 1) {
                     out[0] = std::pow(m.scale * t, 1.0 / m.alpha) * sample_symmetric_stable(m.alpha, gen);
                     return;
                   }
                   // exp(-A|z|^2) averaged over A gives exp(-c t |z|^alpha)
                   const double a = std::pow(m.scale * t, 2.0 / m.alpha) * sample_positive_stable(0.5 * m.alpha, gen);
                   const double sd = std::sqrt(2.0 * a);
                   std::normal_distribution<double> normal;
                   for (double& v : out) v = sd * normal(gen);
                 },
                 [&](const Subordinator& m) { out[0] = m.phi.sample(t, gen); },
                 [&](const SubordinateBrownian& m) {
                   const double s = m.phi.sample(t, gen);
                   const double sd = std::sqrt(2.0 * s);
                   std::normal_distribution<double> normal;
                   for (double& v : out) v = sd * normal(gen);
                 },
             },
             kind_);
}

// ---------------------------------------------------------------- KernelFamily

std::string KernelFamily::tag() const {
  return std::visit(Overloaded{[](const ExactKernel& k) { return "exact(" + k.model.tag() + ")"; },
                               [](const StableSandwichKernel& k) {
                                 return "stable_sandwich(alpha=" + num(k.alpha) + ",d=" + std::to_string(k.dim) + ")";
                               },
                               [](const FalconerHowroydKernel& k) { return "fh(s=" + num(k.s) + ")"; },
                               [](const SubordinatorExpKernel& k) { return "subordinator_exp(" + k.phi.tag() + ")"; }},
                    kind_);
}

bool KernelFamily::known_psd() const {
  // exp(-a|t-s|) is a covariance function for every a >= 0.
  return std::holds_alternative<SubordinatorExpKernel>(kind_);
}

bool KernelFamily::scale_is_radius() const { return !std::holds_alternative<SubordinatorExpKernel>(kind_); }

// ---------------------------------------------------------------- kappa

double kappa_stable_1d(double alpha, double c, double eps, double t) {
  if (!(alpha > 0.0 && alpha <= 2.0) || !(c > 0.0) || !(eps > 0.0) || !(t >= 0.0)) {
    throw InvalidArgument("kappa_stable_1d needs alpha in (0,2], c > 0, eps > 0, t >= 0");
  }
  if (t == 0.0) return 1.0;
  const double rate = c * t;
  const double z_max = std::pow(kTruncation / rate, 1.0 / alpha);
  if (!std::isfinite(z_max)) return 1.0;
  return sine_inversion([rate, alpha](double z) { return std::exp(-rate * std::pow(z, alpha)); }, eps, z_max);
}

double kappa_symmetric_1d(const std::function<double(double)>& psi, double eps, double t) {
  if (!(eps > 0.0) || !(t >= 0.0)) throw InvalidArgument("kappa_symmetric_1d needs eps > 0 and t >= 0");
  if (t == 0.0) return 1.0;
  double z_max = 1.0;
  while (t * psi(z_max) < kTruncation) {
    z_max *= 2.0;
    if (z_max > 1e12) {
      throw NonConvergedQuadrature("characteristic exponent grows too slowly to truncate",
                                   std::numeric_limits<double>::infinity());
    }
  }
  return sine_inversion([&psi, t](double z) { return std::exp(-t * psi(z)); }, eps, z_max);
}

MonteCarloEstimate kappa_monte_carlo(const LevyModel& model, double eps, double t, std::uint64_t n,
                                     std::uint64_t seed) {
  check_monte_carlo_inputs(model, eps, t, n);
  if (t == 0.0) return {1.0, 0.0};
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : hits)
  for (std::size_t b = 0; b < kMonteCarloBatches; ++b) {
    hits += count_batch(model, eps, t, batch_size(n, b), seed, b);
  }
  return finish(hits, n);
}

MonteCarloEstimate kappa_monte_carlo_serial(const LevyModel& model, double eps, double t,
                                            std::uint64_t n, std::uint64_t seed) {
  check_monte_carlo_inputs(model, eps, t, n);
  if (t == 0.0) return {1.0, 0.0};
  std::uint64_t hits = 0;
  for (std::size_t b = 0; b < kMonteCarloBatches; ++b) {
    hits += count_batch(model, eps, t, batch_size(n, b), seed, b);
  }
  return finish(hits, n);
}

double kappa(const ExactKernel& kernel, double eps, double t) {
  if (t == 0.0) return 1.0;
  if (const auto* m = std::get_if<IsotropicStable>(&kernel.model.kind()); m && m->dim == 1) {
    return kappa_stable_1d(m->alpha, m->scale, eps, t);
  }
  if (const auto* m = std::get_if<SubordinateBrownian>(&kernel.model.kind()); m && m->dim == 1) {
    const LaplaceExponent phi = m->phi;
    return kappa_symmetric_1d([phi](double z) { return phi(z * z); }, eps, t);
  }
  // Per-(eps, t) stream keeps kernel matrices deterministic.
  const std::uint64_t key = std::bit_cast<std::uint64_t>(eps) * 0x9e3779b97f4a7c15ull ^
                            std::bit_cast<std::uint64_t>(t);
  return kappa_monte_carlo(kernel.model, eps, t, kernel.mc_samples, kernel.mc_seed ^ key).estimate;
}

double kernel_eval(const KernelFamily& family, double scale, double r) {
  if (!(scale > 0.0)) throw InvalidArgument("kernel scale must be positive");
  if (r == 0.0) return 1.0;
  return std::visit(Overloaded{[&](const ExactKernel& k) { return kappa(k, scale, r); },
                               [&](const StableSandwichKernel& k) {
                                 const double base = std::min(1.0, scale / std::pow(r, 1.0 / k.alpha));
                                 return std::pow(base, k.dim);
                               },
                               [&](const FalconerHowroydKernel& k) {
                                 return std::min(1.0, std::pow(scale / r, k.s));
                               },
                               [&](const SubordinatorExpKernel& k) { return std::exp(-r * k.phi(scale)); }},
                    family.kind());
}

// ---------------------------------------------------------------- energy forms

double energy_form(std::span<const double> times, const SimplexWeights& weights, const CharExponent& psi,
                   std::span<const double> z) {
  weights.validate();
  if (times.size() != weights.size()) throw InvalidArgument("weights and times differ in length");
  if (z.size() != static_cast<std::size_t>(psi.dim)) throw InvalidArgument("z has the wrong dimension");
  const std::size_t n = times.size();
  std::vector<double> neg(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) neg[k] = -z[k];
  const Complex psi_pos = psi(z);
  const Complex psi_neg = psi(std::span<const double>(neg));

  Complex total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double gap = times[i] - times[j];
      if (gap == 0.0) {
        total += weights.w[i] * weights.w[j];
        continue;
      }
      const Complex& p = gap > 0.0 ? psi_pos : psi_neg;
      total += weights.w[i] * weights.w[j] * std::exp(-std::abs(gap) * p);
    }
  }
  if (std::abs(total.imag()) > 1e-10) {
    throw InvalidArgument("energy form has imaginary residue; exponent violates Psi(-z) = conj(Psi(z))");
  }
  return total.real();
}

double cauchy_weighted_energy(std::span<const double> times, const SimplexWeights& weights,
                              const CharExponent& psi, double eps, double abs_target) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  weights.validate();
  const int d = psi.dim;
  const double inner_target = 0.1 * abs_target;
  std::vector<double> z(static_cast<std::size_t>(d));

  // Coordinates are compactified by z_j = tan(u_j): dz_j / (1 + z_j^2) = du_j.
  std::function<double(int)> integrate_from = [&](int k) -> double {
    if (k == d) return energy_form(times, weights, psi, z);
    const double lo = d == 1 ? 0.0 : -kPi / 2;
    const double factor = d == 1 ? 2.0 / kPi : 1.0 / kPi;
    auto f = [&, k](double u) {
      z[static_cast<std::size_t>(k)] = std::tan(u) / eps;
      return integrate_from(k + 1);
    };
    const double target = (k == 0 ? inner_target : 0.1 * inner_target) / factor;
    const QuadResult q = integrate_gk(f, lo, kPi / 2, target, k == 0 ? 20000 : 2000);
    if (k == 0 && q.error * factor > abs_target) {
      throw NonConvergedQuadrature("Cauchy-weighted energy missed its error target", q.error * factor);
    }
    return factor * q.value;
  };
  return integrate_from(0);
}

}  // namespace fracdim
