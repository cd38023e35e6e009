#include "fracdim/energy_min.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracdim/random.hpp"

namespace fracdim {
namespace {

constexpr double kSupportFloor = 1e-10;
constexpr std::size_t kResyncEvery = 2000;
constexpr double kBruteforceNodeCap = 4e8;

void check_net(const DeltaNet& net, std::size_t max_n) {
  if (net.points.empty()) throw InvalidArgument("kernel needs a nonempty net");
  if (net.points.size() > max_n) {
    throw NetTooLarge("net of " + std::to_string(net.points.size()) + " points exceeds the dense cap of " +
                      std::to_string(max_n));
  }
}

KernelMatrix blank(const KernelFamily& family, double scale, std::size_t n) {
  KernelMatrix k;
  k.n = n;
  k.data.assign(n * n, 0.0);
  k.scale = scale;
  k.family = family.tag();
  k.known_psd = family.known_psd();
  return k;
}

void fill_row(KernelMatrix& k, const KernelFamily& family, const std::vector<double>& pts, std::size_t i) {
  const std::size_t n = k.n;
  k.data[i * n + i] = 1.0;
  for (std::size_t j = i + 1; j < n; ++j) {
    const double v = kernel_eval(family, k.scale, std::abs(pts[j] - pts[i]));
    k.data[i * n + j] = v;
    k.data[j * n + i] = v;
  }
}

std::vector<double> potentials(const KernelMatrix& k, const std::vector<double>& w) {
  std::vector<double> g(k.n, 0.0);
  for (std::size_t i = 0; i < k.n; ++i) {
    const double* row = k.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < k.n; ++j) s += row[j] * w[j];
    g[i] = s;
  }
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

SimplexWeights dirichlet_start(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  auto gen = task_stream(seed, index);
  SimplexWeights w{std::vector<double>(n)};
  double total = 0.0;
  for (double& x : w.w) {
    x = -std::log(open_uniform(gen));
    total += x;
  }
  for (double& x : w.w) x /= total;
  return w;
}

void renormalize(std::vector<double>& w) {
  double total = 0.0;
  for (double& x : w) {
    if (x < 0.0) x = 0.0;
    total += x;
  }
  for (double& x : w) x /= total;
}

}  // namespace

KernelMatrix KernelMatrix::from_entries(std::size_t n, std::vector<double> entries, bool known_psd) {
  if (n == 0 || entries.size() != n * n) throw InvalidArgument("kernel entries must form an n x n matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i * n + i] != 1.0) throw InvalidArgument("kernel diagonal must be identically 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries[i * n + j];
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("kernel entries must lie in [0, 1]");
      if (v != entries[j * n + i]) throw InvalidArgument("kernel must be symmetric");
    }
  }
  KernelMatrix k;
  k.n = n;
  k.data = std::move(entries);
  k.scale = 0.0;
  k.family = "explicit";
  k.known_psd = known_psd;
  return k;
}

KernelMatrix build_kernel(const KernelFamily& family, double scale, const DeltaNet& net, std::size_t max_n) {
  check_net(net, max_n);
  KernelMatrix k = blank(family, scale, net.points.size());
  const auto n = static_cast<long>(k.n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) fill_row(k, family, net.points, static_cast<std::size_t>(i));
  return k;
}

KernelMatrix build_kernel_serial(const KernelFamily& family, double scale, const DeltaNet& net, std::size_t max_n) {
  check_net(net, max_n);
  KernelMatrix k = blank(family, scale, net.points.size());
  for (std::size_t i = 0; i < k.n; ++i) fill_row(k, family, net.points, i);
  return k;
}

bool is_psd(const KernelMatrix& k, double tol) {
  const auto n = static_cast<Eigen::Index>(k.n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(k.data.data(), n, n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double largest = std::max(1.0, d.cwiseAbs().maxCoeff());
  return d.minCoeff() >= -tol * largest;
}

double quadratic_energy(const KernelMatrix& k, const SimplexWeights& w) { return dot(w.w, potentials(k, w.w)); }

EnergyResult frank_wolfe(const KernelMatrix& k, SimplexWeights start, double tol, std::size_t max_iter) {
  start.validate();
  if (start.size() != k.n) throw InvalidArgument("start weights do not match the kernel size");
  const std::size_t n = k.n;
  std::vector<double> w = std::move(start.w);
  std::vector<double> g = potentials(k, w);
  double f = dot(w, g);

  std::size_t it = 0;
  for (;; ++it) {
    // lowest index wins ties in both oracles
    std::size_t fw = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (g[i] < g[fw]) fw = i;
    if (2.0 * (f - g[fw]) <= tol * f || it >= max_iter) break;

    std::size_t away = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] > 0.0 && (away == n || g[i] > g[away])) away = i;
    }
    // pairwise step: move mass from the away atom to the Frank-Wolfe atom
    const double descent = g[away] - g[fw];
    const double curvature = k(fw, fw) - 2.0 * k(fw, away) + k(away, away);
    double gamma = w[away];
    if (curvature > 0.0) gamma = std::min(gamma, descent / curvature);
    const double* col_fw = k.row(fw);
    const double* col_away = k.row(away);
    for (std::size_t i = 0; i < n; ++i) g[i] += gamma * (col_fw[i] - col_away[i]);
    w[fw] += gamma;
    w[away] = gamma == w[away] ? 0.0 : w[away] - gamma;
    if (w[away] < 1e-300) w[away] = 0.0;

    if ((it + 1) % kResyncEvery == 0) {
      renormalize(w);
      g = potentials(k, w);
    }
    f = dot(w, g);
  }
  renormalize(w);
  g = potentials(k, w);

  EnergyResult out;
  out.value = dot(w, g);
  double gmin = g[0];
  for (double x : g) gmin = std::min(gmin, x);
  out.duality_gap = std::max(0.0, 2.0 * (out.value - gmin));
  out.iterations = it;
  out.weights = SimplexWeights{std::move(w)};
  return out;
}

EnergyResult min_energy(const KernelMatrix& k, const EnergyOptions& options) {
  if (k.n == 0) throw InvalidArgument("empty kernel");
  const bool certified_psd = k.known_psd || (k.n <= options.psd_check_max && is_psd(k));
  const auto converged = [&](const EnergyResult& r) { return r.duality_gap <= options.tol * r.value; };

  EnergyResult best = frank_wolfe(k, SimplexWeights::uniform(k.n), options.tol, options.max_iter);
  bool any_converged = converged(best);
  std::size_t total_iterations = best.iterations;

  int used = 0;
  if (!certified_psd) {
    best.flagged_nonconvex = true;
    for (int r = 0; r < options.restarts; ++r) {
      EnergyResult candidate =
          frank_wolfe(k, dirichlet_start(k.n, options.seed, static_cast<std::uint64_t>(r)), options.tol, options.max_iter);
      total_iterations += candidate.iterations;
      ++used;
      const bool ok = converged(candidate);
      // Prefer converged stationary points, then lower energy; ties keep the earlier start.
      if ((ok && !any_converged) || (ok == any_converged && candidate.value < best.value)) {
        best = std::move(candidate);
        best.flagged_nonconvex = true;
      }
      any_converged = any_converged || ok;
    }
  }
  best.iterations = total_iterations;
  best.restarts_used = used;
  if (!any_converged) {
    throw MaxIterExceeded("Frank-Wolfe did not reach relative gap " + std::to_string(options.tol) + " within " +
                              std::to_string(options.max_iter) + " iterations",
                          best);
  }
  return best;
}

double min_energy_bruteforce(const KernelMatrix& k, double resolution) {
  const std::size_t n = k.n;
  if (n > 8) throw TooLarge("lattice enumeration supports n <= 8");
  const double units_d = std::round(1.0 / resolution);
  if (!(units_d >= 1.0) || std::abs(units_d * resolution - 1.0) > 1e-9) {
    throw InvalidArgument("resolution must be 1/N for a positive integer N");
  }
  const auto units = static_cast<long>(units_d);
  if (n == 1) return k(0, 0);

  // Number of prefixes (u_0..u_{n-3}) with sum <= N is C(N + n - 2, n - 2).
  double nodes = 1.0;
  for (std::size_t i = 1; i <= n - 2; ++i) nodes = nodes * static_cast<double>(units + static_cast<long>(i)) / static_cast<double>(i);
  if (nodes > kBruteforceNodeCap) {
    throw TooLarge("lattice enumeration would visit " + std::to_string(nodes) + " prefixes");
  }

  const std::size_t a = n - 2;
  const std::size_t b = n - 1;
  const double kaa = k(a, a), kbb = k(b, b), kab = k(a, b);
  double best = std::numeric_limits<double>::infinity();

  // p = K u_prefix, e0 = u_prefix^T K u_prefix in integer units.
  std::vector<double> p(n, 0.0);
  double e0 = 0.0;

  // Remaining mass m splits as x on a and m - x on b; the energy is quadratic in x.
  auto close_out = [&](long m) {
    const double pa = p[a], pb = p[b];
    const double md = static_cast<double>(m);
    const double qa = kaa + kbb - 2.0 * kab;
    const double qb = 2.0 * pa - 2.0 * pb - 2.0 * md * kbb + 2.0 * md * kab;
    const double qc = e0 + 2.0 * md * pb + md * md * kbb;
    auto value = [&](long x) {
      const double xd = static_cast<double>(x);
      return qa * xd * xd + qb * xd + qc;
    };
    double local = std::min(value(0), value(m));
    if (qa > 0.0) {
      const double xs = -qb / (2.0 * qa);
      const long lo = std::clamp(static_cast<long>(std::floor(xs)), 0L, m);
      const long hi = std::clamp(lo + 1, 0L, m);
      local = std::min({local, value(lo), value(hi)});
    }
    best = std::min(best, local);
  };

  auto add_unit = [&](std::size_t i, long times) {
    const double t = static_cast<double>(times);
    // (u + t e_i)^T K (u + t e_i) = e0 + 2 t p_i + t^2 K_ii
    e0 += 2.0 * t * p[i] + t * t * k(i, i);
    const double* col = k.row(i);
    for (std::size_t j = 0; j < n; ++j) p[j] += t * col[j];
  };

  auto recurse = [&](auto&& self, std::size_t depth, long remaining) -> void {
    if (depth == a) {
      close_out(remaining);
      return;
    }
    for (long u = 0; u <= remaining; ++u) {
      if (u > 0) add_unit(depth, 1);
      self(self, depth + 1, remaining - u);
    }
    if (remaining > 0) add_unit(depth, -remaining);
  };
  recurse(recurse, 0, units);
  return best / (units_d * units_d);
}

KktReport kkt_certificate(const KernelMatrix& k, const SimplexWeights& w, double tol) {
  w.validate();
  if (w.size() != k.n) throw InvalidArgument("weights do not match the kernel size");
  const std::vector<double> g = potentials(k, w.w);
  KktReport r;
  r.energy = dot(w.w, g);
  r.min_potential = g[0];
  bool ok = true;
  for (std::size_t i = 0; i < k.n; ++i) {
    if (g[i] < r.min_potential) r.min_potential = g[i];
    if (g[i] < r.energy - tol) {
      ok = false;
      r.worst_index = i;
    }
    if (w.w[i] > kSupportFloor) {
      const double dev = std::abs(g[i] - r.energy);
      if (dev > r.max_support_deviation) r.max_support_deviation = dev;
      if (dev > tol) {
        ok = false;
        r.worst_index = i;
      }
    }
  }
  r.ok = ok;
  return r;
}

}  // namespace fracdim
