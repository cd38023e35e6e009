#include "fracdim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "fracdim/energy_min.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/profiles.hpp"
#include "fracdim/random.hpp"
#include "fracdim/set_models.hpp"
#include "fracdim/simulate.hpp"

namespace fracdim {

namespace {

using std::numbers::pi;

// Streams per criterion so each criterion's draws do not depend on which others ran.
std::mt19937_64 stream(std::uint64_t seed, int criterion) { return task_stream(seed, 1000u + criterion); }

CriterionResult titled(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// Gram matrix of random nonnegative unit vectors: PSD, unit diagonal, entries in [0, 1].
KernelMatrix random_psd(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t m = 4;
  std::vector<std::vector<double>> v(n, std::vector<double>(m));
  for (auto& row : v) {
    double norm = 0.0;
    for (double& x : row) {
      x = std::pow(u(gen), 3.0);
      norm += x * x;
    }
    for (double& x : row) x /= std::sqrt(norm);
  }
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t a = 0; a < m; ++a) dot += v[i][a] * v[j][a];
      e[i * n + j] = i == j ? 1.0 : std::min(1.0, dot);
    }
  return KernelMatrix::from_entries(n, std::move(e), true);
}

// Subordinator kernel exp(-|t-s| Phi(lambda)) on a random net.
KernelMatrix random_subordinator_kernel(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DeltaNet net;
  for (std::size_t i = 0; i < n; ++i) net.points.push_back(u(gen));
  std::sort(net.points.begin(), net.points.end());
  net.mesh = 0.0;
  net.parent = "random";
  const double lambda = std::exp(std::log(1e4) * u(gen));
  return build_kernel(KernelFamily::subordinator_exp(LaplaceExponent::stable(0.5)), lambda, net);
}

// Largest r-separated subset by exhaustive include/exclude search.
std::size_t exhaustive_capacity(const std::vector<double>& pts, double r) {
  const std::size_t n = pts.size();
  std::vector<double> chosen;
  std::size_t best = 0;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (chosen.size() + (n - i) <= best) return;
    if (i == n) {
      best = std::max(best, chosen.size());
      return;
    }
    const bool fits = std::all_of(chosen.begin(), chosen.end(),
                                  [&](double c) { return separated(std::abs(pts[i] - c), r); });
    if (fits) {
      chosen.push_back(pts[i]);
      go(i + 1);
      chosen.pop_back();
    }
    go(i + 1);
  };
  go(0);
  return best;
}

SimplexWeights random_weights(std::size_t n, std::mt19937_64& gen) {
  std::exponential_distribution<double> e;
  SimplexWeights w;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w.w.emplace_back(e(gen));
  for (double& v : w.w) v /= total;
  return w;
}

std::vector<double> binary_radii(int from, int to) {
  std::vector<double> r;
  for (int k = from; k <= to; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

// Energy of Lebesgue measure on [0, 1] under min(1, (eps/r)^{1/2}).
double lebesgue_fh_half(double eps) { return 8.0 / 3.0 * std::sqrt(eps) - 2.0 * eps + eps * eps / 3.0; }

// Energy of Lebesgue measure on [0, 1] under exp(-lambda |t - s|).
double lebesgue_exp(double lambda) { return 2.0 * (lambda - 1.0 + std::exp(-lambda)) / (lambda * lambda); }

// Interval ladder reaching eps ~ 4e-4 with mesh eps/2, so every net stays under the dense cap.
const std::vector<double>& unit_ladder() {
  static const auto l = geometric_ladder(0.0136, 0.5, 6);
  return l;
}

ProfileOptions half_mesh() {
  ProfileOptions o;
  o.mesh_factor = 0.5;
  return o;
}

struct RandomPsdRun {
  std::vector<double> differences;
  std::vector<bool> converged;
  std::vector<bool> kkt;
};

RandomPsdRun random_psd_run(std::uint64_t seed) {
  auto gen = stream(seed, 2);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  RandomPsdRun run;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = size(gen);
    const auto k = trial % 2 ? random_subordinator_kernel(n, gen) : random_psd(n, gen);
    EnergyResult r;
    bool converged = true;
    try {
      r = min_energy(k);
    } catch (const MaxIterExceeded& e) {
      r = e.best();
      converged = false;
    }
    run.differences.push_back(std::abs(r.value - min_energy_bruteforce(k)));
    run.converged.push_back(converged);
    run.kkt.push_back(kkt_certificate(k, r.weights, 1e-5).ok);
  }
  return run;
}

CriterionResult c1() {
  auto r = titled(1, "two-point energy closed form");
  r.time_limit = 1.0;
  bool pass = true;
  Json rows = Json::array();
  for (double k : {0.0, 0.25, 0.5, 0.9}) {
    const auto res = min_energy(KernelMatrix::from_entries(2, {1.0, k, k, 1.0}));
    const double dz = std::abs(res.value - (1.0 + k) / 2.0);
    const double dw = std::max(std::abs(res.weights.w[0] - 0.5), std::abs(res.weights.w[1] - 0.5));
    pass = pass && dz <= 1e-10 && dw <= 1e-10;
    rows.push_back({{"k", k}, {"Z", res.value}, {"w0", res.weights.w[0]}, {"w1", res.weights.w[1]}});
  }
  r.pass = pass;
  r.values = rows;
  return r;
}

CriterionResult c2(std::uint64_t seed) {
  auto r = titled(2, "min_energy agrees with brute force on 50 random PSD kernels");
  r.time_limit = 30.0;
  const auto run = random_psd_run(seed);
  const double worst = *std::max_element(run.differences.begin(), run.differences.end());
  r.pass = worst <= 1e-3;
  r.values = {{"kernels", run.differences.size()}, {"max_difference", worst}};
  return r;
}

CriterionResult c3(std::uint64_t seed) {
  auto r = titled(3, "KKT certificate on every converged output of criterion 2");
  const auto run = random_psd_run(seed);
  std::size_t checked = 0, held = 0;
  for (std::size_t i = 0; i < run.kkt.size(); ++i) {
    if (!run.converged[i]) continue;
    ++checked;
    if (run.kkt[i]) ++held;
  }
  r.pass = checked > 0 && held == checked;
  r.values = {{"converged", checked}, {"certified", held}};
  return r;
}

CriterionResult c4(std::uint64_t seed) {
  auto r = titled(4, "capacity exactness");
  const auto net = discretize(CompactSet::interval(0.0, 1.0), 1.0 / 4096.0);
  bool pass = true;
  Json caps = Json::array();
  for (int k : {4, 8, 16}) {
    const auto cap = kolmogorov_capacity(net, 1.0 / k);
    pass = pass && cap == static_cast<std::size_t>(k + 1);
    caps.push_back({{"r", 1.0 / k}, {"K", cap}});
  }
  auto gen = stream(seed, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 20);
  std::size_t agree = 0, total = 0;
  for (int trial = 0; trial < 30; ++trial) {
    PointCloud cloud;
    cloud.coords.resize(static_cast<std::size_t>(size(gen)));
    for (double& x : cloud.coords) x = u(gen);
    for (double rad : {0.03, 0.1, 0.25}) {
      ++total;
      if (kolmogorov_capacity(cloud, rad) == exhaustive_capacity(cloud.coords, rad)) ++agree;
    }
  }
  r.pass = pass && agree == total;
  r.values = {{"interval", caps}, {"random_sets", 30}, {"greedy_equals_exhaustive", agree}, {"comparisons", total}};
  return r;
}

CriterionResult c5() {
  auto r = titled(5, "Minkowski estimates of the interval and the Cantor set");
  r.time_limit = 10.0;
  const auto unit = discretize(CompactSet::interval(0.0, 1.0), std::ldexp(1.0, -16));
  const double interval = minkowski_dim_estimate(unit, binary_radii(4, 12)).slope;
  const auto cantor = ifs_cylinder_net(std::get<IfsAttractor>(CompactSet::middle_third_cantor().kind()), 12);
  std::vector<double> triadic;
  for (int k = 2; k <= 10; ++k) triadic.push_back(std::pow(3.0, -k));
  const double c = minkowski_dim_estimate(cantor, triadic).slope;
  r.pass = near(interval, 1.0, 0.02) && near(c, std::log(2.0) / std::log(3.0), 0.03);
  r.values = {{"interval", interval}, {"cantor", c}};
  return r;
}

CriterionResult c6() {
  auto r = titled(6, "FH profile at s = 1.5 equals the packing dimension");
  const auto unit = fh_profile(CompactSet::interval(0.0, 1.0), 1.5, unit_ladder(), half_mesh());
  const auto cantor = fh_profile(CompactSet::middle_third_cantor(), 1.5, geometric_ladder(0.1, 0.5, 8));
  r.pass = near(unit.estimate, 1.0, 0.05) && near(cantor.estimate, std::log(2.0) / std::log(3.0), 0.05);
  r.values = {{"interval", unit.estimate}, {"cantor", cantor.estimate}};
  return r;
}

CriterionResult c7() {
  auto r = titled(7, "FH profile of the interval at s = 0.5 against the uniform-measure energy");
  const auto& lad = unit_ladder();
  const auto prof = fh_profile(CompactSet::interval(0.0, 1.0), 0.5, lad, half_mesh());
  std::vector<double> x, y, vals;
  bool bounded = true;
  for (std::size_t i = 0; i < lad.size(); ++i) {
    vals.push_back(lebesgue_fh_half(lad[i]));
    x.push_back(-std::log(lad[i]));
    y.push_back(-std::log(vals.back()));
    bounded = bounded && prof.points[i].energy <= vals[i] * (1.0 + 1e-3);
  }
  const double oracle = make_estimate(lad, vals, x, y, SlopeMode::Upper).slope;
  r.pass = near(prof.estimate, 0.5, 0.05) && near(prof.estimate, oracle, 0.05) && bounded;
  r.values = {{"estimate", prof.estimate}, {"uniform_measure_slope", oracle}, {"below_uniform_energy", bounded}};
  return r;
}

CriterionResult c8() {
  auto r = titled(8, "subordinator criterion on the interval");
  r.time_limit = 60.0;
  const auto unit = CompactSet::interval(0.0, 1.0);
  bool pass = true;
  Json rows = Json::array();
  for (double beta : {0.3, 0.5, 0.8}) {
    const auto phi = LaplaceExponent::stable(beta);
    const auto rep = subordinator_box_dim(phi, unit, subordinator_ladder(phi, 499.0, std::sqrt(2.0), 8));
    pass = pass && near(rep.estimate, beta, 0.05);
    rows.push_back({{"beta", beta}, {"estimate", rep.estimate}});
  }
  const auto drift = LaplaceExponent::stable(1.0);
  const auto lad = subordinator_ladder(drift, 499.0, std::sqrt(2.0), 8);
  const auto rep = subordinator_box_dim(drift, unit, lad);
  std::vector<double> x, y, vals;
  bool bounded = true;
  for (std::size_t i = 0; i < lad.size(); ++i) {
    vals.push_back(lebesgue_exp(lad[i]));
    x.push_back(std::log(lad[i]));
    y.push_back(-std::log(vals.back()));
    bounded = bounded && rep.points[i].energy <= vals[i];
  }
  const double exact = make_estimate(lad, vals, x, y, SlopeMode::Upper).slope;
  pass = pass && near(rep.estimate, 1.0, 0.02) && near(rep.estimate, exact, 0.02) && bounded;
  r.pass = pass;
  r.values = {{"stable", rows},
              {"drift", {{"estimate", rep.estimate}, {"lebesgue_slope", exact}, {"below_lebesgue_energy", bounded}}}};
  return r;
}

CriterionResult c9() {
  auto r = titled(9, "theta index and the predicted FH profile");
  bool pass = true;
  Json rows = Json::array();
  for (auto [beta, s] : {std::pair{0.5, 0.7}, std::pair{0.5, 0.5}, std::pair{0.8, 0.5}}) {
    const auto phi = LaplaceExponent::stable(beta);
    const double theta = theta_index(phi, s);
    const double pred = fh_subordinator_predicted(phi, s);
    pass = pass && near(theta, std::max(0.0, 1.0 - beta / s), 0.02) && near(pred, std::min(beta, s), 0.02);
    rows.push_back({{"beta", beta}, {"s", s}, {"theta", theta}, {"predicted", pred}});
  }
  r.pass = pass;
  r.values = rows;
  return r;
}

CriterionResult c10(std::uint64_t seed) {
  auto r = titled(10, "Cauchy-weighted energy of a subordinator equals the exponential energy");
  auto gen = stream(seed, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& phi : {LaplaceExponent::stable(0.5), LaplaceExponent::gamma(1.0, 1.0),
                          LaplaceExponent::compound_poisson_drift(2.0, 0.5, 0.3)}) {
    const auto psi = LevyModel::subordinator(phi).char_exponent();
    // Quadrature target well inside the tolerance. A drift term leaves an undamped oscillation
    // under the Cauchy weight, and 1e-7 is out of reach there.
    const double target = phi.family() == LaplaceFamily::CompoundPoissonDrift ? 1e-6 : 1e-7;
    for (int net = 0; net < 3; ++net) {
      std::vector<double> t(10);
      for (double& v : t) v = u(gen);
      const auto w = SimplexWeights::uniform(10);
      for (double eps : {0.1, 0.01}) {
        double direct = 0.0;
        for (std::size_t i = 0; i < 10; ++i)
          for (std::size_t j = 0; j < 10; ++j) direct += 0.01 * std::exp(-std::abs(t[i] - t[j]) * phi(1.0 / eps));
        worst = std::max(worst, std::abs(cauchy_weighted_energy(t, w, psi, eps, target) - direct));
        ++cases;
      }
    }
  }
  r.pass = worst <= 1e-6;
  r.values = {{"cases", cases}, {"max_difference", worst}};
  return r;
}

CriterionResult c11(std::uint64_t seed) {
  auto r = titled(11, "stable kernel energy is bounded by 2 pi times the Cauchy-weighted energy");
  auto gen = stream(seed, 11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::size_t held = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = trial < 10 ? 1.0 : 2.0;
    const auto psi = LevyModel::stable(alpha, 1.0, 1).char_exponent();
    std::vector<double> t(size(gen));
    for (double& v : t) v = u(gen);
    const auto w = random_weights(t.size(), gen);
    const double eps = std::exp(std::log(0.01) + (std::log(0.5) - std::log(0.01)) * u(gen));
    double lhs = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j)
        lhs += w.w[i] * w.w[j] * kappa_stable_1d(alpha, 1.0, eps, std::abs(t[i] - t[j]));
    const double rhs = 2.0 * pi * cauchy_weighted_energy(t, w, psi, eps);
    if (lhs <= rhs) ++held;
    worst_ratio = std::max(worst_ratio, lhs / rhs);
  }
  r.pass = held == 20;
  r.values = {{"measures", 20}, {"held", held}, {"max_lhs_over_rhs", worst_ratio}};
  return r;
}

CriterionResult c12(std::uint64_t seed) {
  auto r = titled(12, "simulated image dimensions");
  r.time_limit = 300.0;
  const auto unit = CompactSet::interval(0.0, 1.0);
  const auto radii = binary_radii(3, 9);
  struct Case {
    const char* name;
    LevyModel model;
    double target;
  };
  const Case cases[] = {{"brownian", LevyModel::stable(2.0, 1.0, 1), 1.0},
                        {"stable_0.8", LevyModel::stable(0.8, 1.0, 1), 0.8},
                        {"stable_subordinator_0.5", LevyModel::subordinator(LaplaceExponent::stable(0.5)), 0.5}};
  bool pass = true;
  Json rows = Json::object();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = cases[i];
    const auto e = image_dim_experiment(c.model, unit, 32, radii, seed + i);
    pass = pass && near(e.median, c.target, 0.1);
    rows[c.name] = {{"target", c.target}, {"median", e.median}, {"q1", e.q1}, {"q3", e.q3}};
  }
  r.pass = pass;
  r.values = rows;
  return r;
}

CriterionResult c13(std::uint64_t seed) {
  auto r = titled(13, "fast suite is byte-identical across runs");
  const auto a = suite_report(Suite::Fast, seed, run_suite(Suite::Fast, seed)).dump(2);
  const auto b = suite_report(Suite::Fast, seed, run_suite(Suite::Fast, seed)).dump(2);
  r.pass = a == b;
  r.values = {{"bytes", a.size()}, {"identical", a == b}};
  return r;
}

}  // namespace

Suite suite_from_string(const std::string& text) {
  if (text == "fast") return Suite::Fast;
  if (text == "full") return Suite::Full;
  throw InvalidArgument("suite: expected fast or full, got '" + text + "'");
}

std::string to_string(Suite suite) { return suite == Suite::Fast ? "fast" : "full"; }

std::vector<int> suite_criteria(Suite suite) {
  if (suite == Suite::Fast) return {1, 2, 3, 4, 5, 9, 10, 11};
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = c1(); break;
    case 2: r = c2(seed); break;
    case 3: r = c3(seed); break;
    case 4: r = c4(seed); break;
    case 5: r = c5(); break;
    case 6: r = c6(); break;
    case 7: r = c7(); break;
    case 8: r = c8(); break;
    case 9: r = c9(); break;
    case 10: r = c10(seed); break;
    case 11: r = c11(seed); break;
    case 12: r = c12(seed); break;
    case 13: r = c13(seed); break;
    default: throw InvalidArgument("criterion: no criterion " + std::to_string(id));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_suite(Suite suite, std::uint64_t seed, const Progress& progress) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) {
    CriterionResult r;
    try {
      r = run_criterion(id, seed);
    } catch (const std::exception& e) {
      // a criterion that throws fails; the message is deterministic
      r.id = id;
      r.title = "criterion " + std::to_string(id);
      r.pass = false;
      r.values = {{"error", e.what()}};
    }
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

Json suite_report(Suite suite, std::uint64_t seed, const std::vector<CriterionResult>& results) {
  Json rows = Json::array();
  bool all = true;
  for (const auto& r : results) {
    rows.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"values", r.values}});
    all = all && r.pass;
  }
  return {{"suite", to_string(suite)}, {"seed", seed}, {"criteria", rows}, {"pass", all}};
}

Json suite_timings(const std::vector<CriterionResult>& results) {
  Json rows = Json::array();
  for (const auto& r : results) {
    Json row = {{"id", r.id}, {"seconds", r.seconds}, {"within_limit", r.within_time()}};
    if (r.time_limit > 0.0) row["limit_seconds"] = r.time_limit;
    rows.push_back(row);
  }
  return {{"criteria", rows}};
}

std::string summary_line(const CriterionResult& r) {
  std::string id = std::to_string(r.id);
  if (id.size() < 2) id = " " + id;
  return std::string(r.pass ? "PASS" : "FAIL") + "  " + id + "  " + r.title + "  " + r.values.dump();
}

}  // namespace fracdim
