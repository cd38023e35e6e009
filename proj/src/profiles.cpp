#include "fracdim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "fracdim/errors.hpp"
#include "fracdim/quadrature.hpp"

namespace fracdim {
namespace {

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void check_ladder_direction(std::span<const double> ladder, bool decreasing) {
  if (ladder.size() < 3) throw InvalidArgument("profile ladder needs at least 3 scales");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    const bool ok = decreasing ? ladder[i] < ladder[i - 1] : ladder[i] > ladder[i - 1];
    if (!ok || !(ladder[i] > 0.0)) {
      throw InvalidArgument(decreasing ? "radius ladder must decrease" : "lambda ladder must increase");
    }
  }
}

// Integral of f over [a, b] to a relative tolerance.
double integrate_relative(const std::function<double(double)>& f, double a, double b, double rel) {
  const QuadResult rough = integrate_gk(f, a, b, std::numeric_limits<double>::infinity(), 1);
  const double target = rel * std::abs(rough.value) + 1e-300;
  const QuadResult q = integrate_gk(f, a, b, target, 10000);
  if (!std::isfinite(q.value) || q.error > 10.0 * rel * std::abs(q.value) + 1e-300) {
    throw NonConvergedQuadrature("integral on [" + num(a) + ", " + num(b) + "] missed relative target " + num(rel),
                                 q.error);
  }
  return q.value;
}

}  // namespace

ProfileReport box_profile(const CompactSet& set, const KernelFamily& family, std::span<const double> ladder,
                          const ProfileOptions& options) {
  const bool radius = family.scale_is_radius();
  check_ladder_direction(ladder, radius);
  const LaplaceExponent* phi = nullptr;
  if (const auto* k = std::get_if<SubordinatorExpKernel>(&family.kind())) phi = &k->phi;

  std::vector<ProfilePoint> points(ladder.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(ladder.size());
#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < count; ++idx) {
    try {
      const auto i = static_cast<std::size_t>(idx);
      const double scale = ladder[i];
      const double mesh = phi ? options.mesh_factor / std::max((*phi)(scale), 1e-300) : options.mesh_factor * scale;
      const DeltaNet net = discretize(set, mesh, std::max<std::size_t>(options.max_net, 1));
      const KernelMatrix k = build_kernel(family, scale, net, options.max_net);
      const EnergyResult r = min_energy(k, options.energy);
      points[i] = {scale, mesh, net.points.size(), r.value, r.duality_gap, r.iterations, r.flagged_nonconvex};
    } catch (...) {
#pragma omp critical(fracdim_profile_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> scales, values, x, y;
  for (const auto& p : points) {
    scales.push_back(p.scale);
    values.push_back(p.energy);
    x.push_back(radius ? -std::log(p.scale) : std::log(p.scale));
    y.push_back(-std::log(p.energy));
  }

  ProfileReport report;
  report.set_id = set.id();
  report.family = family.tag();
  if (const auto* fh = std::get_if<FalconerHowroydKernel>(&family.kind())) report.parameter = "s=" + num(fh->s);
  if (phi) report.parameter = phi->tag();
  report.mode = options.mode;
  report.ladder = make_estimate(std::move(scales), std::move(values), std::move(x), std::move(y), options.mode);
  report.estimate = report.ladder.slope;
  report.points = std::move(points);
  report.certified = set.self_cover_certified();
  if (report.certified) report.packing_profile = report.estimate;
  report.within_window = report.estimate >= -1e-9 && report.estimate <= options.window_max * options.dim + 1e-9;
  return report;
}

ProfileReport fh_profile(const CompactSet& set, double s, std::span<const double> eps_ladder,
                         const ProfileOptions& options) {
  if (!(s > 0.0)) throw InvalidArgument("profile parameter s must be positive");
  return box_profile(set, KernelFamily::falconer_howroyd(s), eps_ladder, options);
}

ProfileReport subordinator_box_dim(const LaplaceExponent& phi, const CompactSet& set,
                                   std::span<const double> lambda_ladder, const ProfileOptions& options) {
  return box_profile(set, KernelFamily::subordinator_exp(phi), lambda_ladder, options);
}

double laplace_inverse(const LaplaceExponent& phi, double value) {
  if (!(value > 0.0)) throw InvalidArgument("target value must be positive");
  double hi = 1.0;
  while (phi(hi) < value) {
    hi *= 2.0;
    if (hi > 1e300) throw InvalidArgument("Laplace exponent never reaches " + num(value));
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) >= value ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> subordinator_ladder(const LaplaceExponent& phi, double phi_top, double ratio, int count) {
  if (!(ratio > 1.0)) throw InvalidArgument("lambda ladder ratio must exceed 1");
  if (count < 3) throw InvalidArgument("ladder count must be at least 3");
  // a hair below the target keeps the finest net inside the cap
  const double top = laplace_inverse(phi, phi_top) * (1.0 - 1e-12);
  std::vector<double> out;
  for (int k = count - 1; k >= 0; --k) out.push_back(top * std::pow(ratio, -k));
  return out;
}

ProfileReport levy_profile(const LevyModel& model, const CompactSet& set, std::span<const double> eps_ladder,
                           const ProfileOptions& options) {
  ProfileReport report;
  if (const auto* m = std::get_if<IsotropicStable>(&model.kind())) {
    report = fh_profile(set, static_cast<double>(m->dim) / m->alpha, eps_ladder, options);
    report.estimate *= m->alpha;
    if (report.packing_profile) report.packing_profile = report.estimate;
    report.within_window = report.estimate >= -1e-9 && report.estimate <= options.window_max * m->dim + 1e-9;
  } else if (const auto* m = std::get_if<Subordinator>(&model.kind())) {
    std::vector<double> lambdas(eps_ladder.begin(), eps_ladder.end());
    for (double& l : lambdas) l = 1.0 / l;
    report = subordinator_box_dim(m->phi, set, lambdas, options);
  } else {
    throw InvalidArgument("no profile route for model " + model.tag());
  }
  report.model = model.tag();
  return report;
}

LadderEstimate phi_index_estimate(const LaplaceExponent& phi, std::span<const double> lambda_ladder,
                                  SlopeMode which) {
  check_ladder_direction(lambda_ladder, false);
  if (std::log10(lambda_ladder.back() / lambda_ladder.front()) < 8.0 - 1e-9) {
    throw InvalidArgument("index ladder must span at least 8 decades");
  }
  std::vector<double> scales(lambda_ladder.begin(), lambda_ladder.end()), values, x, y;
  for (double l : lambda_ladder) {
    const double v = phi(l);
    if (!(v > 0.0)) throw InvalidArgument("Laplace exponent must be positive on the ladder");
    values.push_back(v);
    x.push_back(std::log(l));
    y.push_back(std::log(v));
  }
  return make_estimate(std::move(scales), std::move(values), std::move(x), std::move(y), which);
}

double phi_index(const LaplaceExponent& phi, std::span<const double> lambda_ladder, SlopeMode which) {
  return phi_index_estimate(phi, lambda_ladder, which).slope;
}

ThetaReport theta_index_report(const LaplaceExponent& phi, double s, double lambda_max, double quad_tol) {
  if (!(s >= 0.5)) throw InvalidArgument("theta index is defined here only for s >= 1/2");
  if (!(lambda_max >= 1e3)) throw InvalidArgument("lambda_max must be at least 1e3");
  constexpr int kPerDecade = 4;
  const int steps = static_cast<int>(std::ceil(std::log10(lambda_max) * kPerDecade));
  // x = e^u: dx / Phi(x^{1/s}) = e^u / Phi(e^{u/s}) du
  auto integrand = [&](double u) { return std::exp(u) / phi(std::exp(u / s)); };

  std::vector<double> scales, values, x, y;
  double cumulative = 0.0;
  double prev_u = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double u = std::min(std::log(lambda_max), std::log(10.0) * k / kPerDecade);
    cumulative += integrate_relative(integrand, prev_u, u, quad_tol);
    prev_u = u;
    scales.push_back(std::exp(u));
    values.push_back(cumulative);
    x.push_back(u);
    y.push_back(std::log(cumulative));
  }
  ThetaReport report;
  report.ladder = make_estimate(std::move(scales), std::move(values), std::move(x), std::move(y), SlopeMode::Lower);
  report.theta = std::clamp(report.ladder.slope, 0.0, 1.0);
  return report;
}

double theta_index(const LaplaceExponent& phi, double s, double lambda_max, double quad_tol) {
  return theta_index_report(phi, s, lambda_max, quad_tol).theta;
}

double fh_subordinator_predicted(const LaplaceExponent& phi, double s, double lambda_max) {
  return s * (1.0 - theta_index(phi, s, lambda_max));
}

CauchySplit cauchy_split(const LaplaceExponent& phi, double alpha, double r) {
  if (!(r > 0.0 && r < 0.5)) throw InvalidArgument("split analysis needs 0 < r < 1/2");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (0, 2]");
  constexpr double kRel = 1e-9;
  constexpr double kTailSpan = 45.0;  // e^{-45} is negligible against every piece
  auto full = [&](double x) { return 1.0 / ((1.0 + x * x) * (1.0 + phi(std::pow(x / r, alpha)))); };
  auto full_log = [&](double u) {
    const double x = std::exp(u);
    return x * full(x);
  };
  CauchySplit out;
  out.near = integrate_relative(full, 0.0, r, kRel);
  out.middle = integrate_relative(full_log, std::log(r), 0.0, kRel);
  out.tail = integrate_relative(full_log, 0.0, kTailSpan, kRel);
  const double top = -std::log(r);
  out.f = r * integrate_relative([&](double u) { return std::exp(u) / phi(std::exp(alpha * u)); }, 0.0, top, kRel);
  out.g = integrate_relative([&](double u) { return std::exp(-u) / phi(std::exp(alpha * u)); }, top, top + kTailSpan,
                             kRel) /
          r;
  return out;
}

LadderEstimate subordinated_stable_index(const LaplaceExponent& phi, double alpha, std::span<const double> r_ladder) {
  check_ladder_direction(r_ladder, true);
  std::vector<double> scales(r_ladder.begin(), r_ladder.end()), values, x, y;
  for (double r : r_ladder) {
    const double j = cauchy_split(phi, alpha, r).total();
    values.push_back(j);
    x.push_back(-std::log(r));
    y.push_back(-std::log(j));
  }
  return make_estimate(std::move(scales), std::move(values), std::move(x), std::move(y), SlopeMode::Upper);
}

}  // namespace fracdim
