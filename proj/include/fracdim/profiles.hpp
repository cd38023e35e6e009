#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracdim/energy_min.hpp"
#include "fracdim/ladder.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/set_models.hpp"

namespace fracdim {

struct ProfileOptions {
  // Net mesh per scale: mesh_factor * eps for radius kernels, mesh_factor / Phi(lambda)
  // for the subordinator kernel.
  double mesh_factor = 0.1;
  SlopeMode mode = SlopeMode::Upper;
  EnergyOptions energy;
  std::size_t max_net = kDenseKernelCap;
  double window_max = 2.0;  // sanity window is [0, window_max * d]
  int dim = 1;
};

struct ProfilePoint {
  double scale = 0.0;
  double mesh = 0.0;
  std::size_t net_size = 0;
  double energy = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool flagged_nonconvex = false;
};

struct ProfileReport {
  std::string set_id;
  std::string family;
  std::string parameter;  // "s=..." or the Laplace exponent tag
  std::string model;      // Levy model the profile describes, when there is one
  double estimate = 0.0;
  SlopeMode mode = SlopeMode::Upper;
  LadderEstimate ladder;
  std::vector<ProfilePoint> points;
  bool certified = false;  // set carries a self-cover certificate
  std::optional<double> packing_profile;
  bool within_window = true;
};

// Slope of -log Z against log(1/eps) (radius kernels, eps decreasing) or log(lambda)
// (subordinator kernel, lambda increasing), Z the minimum energy over nets of the set.
ProfileReport box_profile(const CompactSet& set, const KernelFamily& family, std::span<const double> ladder,
                          const ProfileOptions& options = {});

ProfileReport fh_profile(const CompactSet& set, double s, std::span<const double> eps_ladder,
                         const ProfileOptions& options = {});

ProfileReport subordinator_box_dim(const LaplaceExponent& phi, const CompactSet& set,
                                   std::span<const double> lambda_ladder, const ProfileOptions& options = {});

// Smallest lambda with Phi(lambda) >= value, by bisection. Throws if Phi stays below value.
double laplace_inverse(const LaplaceExponent& phi, double value);

// Geometric lambda ladder of `count` points ending where Phi reaches `phi_top`, so the
// finest net of the subordinator profile has about mesh_factor^{-1} * phi_top points.
std::vector<double> subordinator_ladder(const LaplaceExponent& phi, double phi_top, double ratio, int count);

// Profile of the image dimension for a Levy model: alpha * FH profile at s = d/alpha for
// isotropic stable models, the subordinator criterion (lambda = 1/eps) for subordinators.
// For stable models the ladder is read on the FH scale; the slope does not depend on it.
ProfileReport levy_profile(const LevyModel& model, const CompactSet& set, std::span<const double> eps_ladder,
                           const ProfileOptions& options = {});

// Envelope slope of log Phi against log lambda; the ladder must span >= 8 decades.
LadderEstimate phi_index_estimate(const LaplaceExponent& phi, std::span<const double> lambda_ladder,
                                  SlopeMode which);
double phi_index(const LaplaceExponent& phi, std::span<const double> lambda_ladder, SlopeMode which);

inline constexpr double kDefaultThetaLambdaMax = 1e40;

struct ThetaReport {
  double theta = 0.0;
  LadderEstimate ladder;  // log of the cumulative integral against log lambda
};

// Lower-envelope growth index of lambda -> integral over (1, lambda) of dx / Phi(x^{1/s}),
// clamped to [0, 1]. Requires s >= 1/2.
ThetaReport theta_index_report(const LaplaceExponent& phi, double s, double lambda_max = kDefaultThetaLambdaMax,
                               double quad_tol = 1e-8);
double theta_index(const LaplaceExponent& phi, double s, double lambda_max = kDefaultThetaLambdaMax,
                   double quad_tol = 1e-8);

// s (1 - theta).
double fh_subordinator_predicted(const LaplaceExponent& phi, double s,
                                 double lambda_max = kDefaultThetaLambdaMax);

// Pieces of J(r) = integral over (0, inf) of dx / ((1 + x^2)(1 + Phi((x/r)^alpha))).
struct CauchySplit {
  double near = 0.0;    // over (0, r)
  double middle = 0.0;  // over (r, 1)
  double tail = 0.0;    // over (1, inf)
  double f = 0.0;       // r * integral over (1, 1/r) of dx / Phi(x^alpha)
  double g = 0.0;       // (1/r) * integral over (1/r, inf) of dx / (x^2 Phi(x^alpha))
  double total() const { return near + middle + tail; }
};

CauchySplit cauchy_split(const LaplaceExponent& phi, double alpha, double r);

// Upper-envelope slope of log J(r) / log r over a decreasing r ladder; equals 1 - theta at
// s = 1/alpha.
LadderEstimate subordinated_stable_index(const LaplaceExponent& phi, double alpha, std::span<const double> r_ladder);

}  // namespace fracdim
