#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracdim/measure.hpp"

namespace fracdim {

using Complex = std::complex<double>;

enum class LaplaceFamily { StableSubordinator, Gamma, CompoundPoissonDrift, Tabulated, Custom };

// Laplace exponent of a subordinator: E exp(-lambda S(t)) = exp(-t Phi(lambda)).
class LaplaceExponent {
 public:
  // Phi(l) = l^beta, beta in (0, 1]; beta = 1 is unit drift.
  static LaplaceExponent stable(double beta);
  // Phi(l) = a log(1 + l/b).
  static LaplaceExponent gamma(double a, double b);
  // Phi(l) = drift*l + rate*mean*l/(1 + mean*l): exponential jumps of mean `jump_mean`.
  static LaplaceExponent compound_poisson_drift(double rate, double jump_mean, double drift);
  // Piecewise-linear through (0,0) and the given (lambda, Phi) knots; last slope extends.
  static LaplaceExponent tabulated(std::vector<std::pair<double, double>> knots);
  // Arbitrary evaluator; has no characteristic exponent and no sampler.
  static LaplaceExponent custom(std::string name, std::function<double(double)> phi);

  double operator()(double lambda) const;

  // Analytic continuation to Re w >= 0; empty for tabulated and custom exponents.
  std::optional<Complex> at_complex(Complex w) const;
  bool has_closed_form() const { return family_ != LaplaceFamily::Tabulated && family_ != LaplaceFamily::Custom; }
  bool has_sampler() const { return has_closed_form(); }

  LaplaceFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  // Short descriptor such as "stable:0.5" or "gamma:1,1".
  std::string tag() const;

  // Draws S(t) for the subordinator with this exponent.
  double sample(double t, std::mt19937_64& gen) const;

 private:
  LaplaceFamily family_ = LaplaceFamily::StableSubordinator;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> knots_;
  std::function<double(double)> custom_;
  std::string name_;
};

// Characteristic exponent: E exp(i z.X(t)) = exp(-t Psi(z)).
struct CharExponent {
  std::function<Complex(std::span<const double>)> eval;
  int dim = 1;
  bool symmetric = false;

  Complex operator()(std::span<const double> z) const { return eval(z); }
  Complex operator()(double z) const { return eval(std::span<const double>(&z, 1)); }
};

struct IsotropicStable {
  double alpha = 2.0;
  double scale = 1.0;
  int dim = 1;
};

struct Subordinator {
  LaplaceExponent phi;
};

// sqrt(2) B(S(t)); Psi(z) = Phi(|z|^2).
struct SubordinateBrownian {
  LaplaceExponent phi;
  int dim = 1;
};

enum class SamplerRecipe {
  None,
  ChambersMallowsStuck,
  GaussianSubordination,
  SubordinatorIncrement,
};

class LevyModel {
 public:
  using Kind = std::variant<IsotropicStable, Subordinator, SubordinateBrownian>;

  explicit LevyModel(Kind kind);
  static LevyModel stable(double alpha, double scale = 1.0, int dim = 1);
  static LevyModel subordinator(LaplaceExponent phi);
  static LevyModel subordinate_brownian(LaplaceExponent phi, int dim = 1);

  const Kind& kind() const { return kind_; }
  int dim() const;
  CharExponent char_exponent() const;
  SamplerRecipe sampler() const;
  std::string tag() const;
  // Growth index of the time-to-space scaling used by the simulation mesh rule.
  double scaling_index() const;

  // Draws X(t) into `out` (size dim()). Throws NoSampler.
  void sample(double t, std::mt19937_64& gen, std::span<double> out) const;

 private:
  Kind kind_;
};

// E exp(izS) = exp(-|z|^alpha) by the Chambers-Mallows-Stuck transform.
double sample_symmetric_stable(double alpha, std::mt19937_64& gen);
// E exp(-lA) = exp(-l^rho), rho in (0, 1], by Kanter's representation.
double sample_positive_stable(double rho, std::mt19937_64& gen);

struct ExactKernel {
  LevyModel model;
  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 0x6b617070u;
};
// (scale / r^{1/alpha} ^ 1)^d
struct StableSandwichKernel {
  double alpha = 2.0;
  int dim = 1;
};
// min(1, (scale/r)^s)
struct FalconerHowroydKernel {
  double s = 1.0;
};
// exp(-r Phi(scale)); scale plays the role of lambda = 1/eps.
struct SubordinatorExpKernel {
  LaplaceExponent phi;
};

class KernelFamily {
 public:
  using Kind = std::variant<ExactKernel, StableSandwichKernel, FalconerHowroydKernel, SubordinatorExpKernel>;

  explicit KernelFamily(Kind kind) : kind_(std::move(kind)) {}
  static KernelFamily exact(LevyModel model) { return KernelFamily(ExactKernel{std::move(model)}); }
  static KernelFamily stable_sandwich(double alpha, int dim = 1) {
    return KernelFamily(StableSandwichKernel{alpha, dim});
  }
  static KernelFamily falconer_howroyd(double s) { return KernelFamily(FalconerHowroydKernel{s}); }
  static KernelFamily subordinator_exp(LaplaceExponent phi) {
    return KernelFamily(SubordinatorExpKernel{std::move(phi)});
  }

  const Kind& kind() const { return kind_; }
  std::string tag() const;
  // True when every kernel matrix of the family is positive semidefinite.
  bool known_psd() const;
  // True when the scale parameter is a radius (kernel grows with scale); false for lambda.
  bool scale_is_radius() const;

 private:
  Kind kind_;
};

// P{|X(t)| <= eps} for the symmetric alpha-stable line process with Psi(z) = c|z|^alpha,
// by Fourier inversion. Throws NonConvergedQuadrature.
double kappa_stable_1d(double alpha, double c, double eps, double t);

// Same inversion for any real, even, nondecreasing-in-|z| exponent on the line.
double kappa_symmetric_1d(const std::function<double(double)>& psi, double eps, double t);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
};

// Fraction of n samples of X(t) in the open sup-norm ball B(0, eps).
MonteCarloEstimate kappa_monte_carlo(const LevyModel& model, double eps, double t, std::uint64_t n,
                                     std::uint64_t seed);
MonteCarloEstimate kappa_monte_carlo_serial(const LevyModel& model, double eps, double t,
                                            std::uint64_t n, std::uint64_t seed);

// kappa_eps(t) by the cheapest exact route for the model: quadrature for symmetric line
// models, seeded Monte Carlo otherwise.
double kappa(const ExactKernel& kernel, double eps, double t);

double kernel_eval(const KernelFamily& family, double scale, double r);

// sum_ij w_i w_j exp(-|t_i - t_j| Psi(sgn(t_i - t_j) z)); real part after summation.
double energy_form(std::span<const double> times, const SimplexWeights& weights,
                   const CharExponent& psi, std::span<const double> z);

// integral of f_C(z) E_nu(z / eps) dz with f_C the product Cauchy density on R^d.
double cauchy_weighted_energy(std::span<const double> times, const SimplexWeights& weights,
                              const CharExponent& psi, double eps, double abs_target = 1e-6);

}  // namespace fracdim
