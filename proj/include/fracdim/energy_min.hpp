#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracdim/errors.hpp"
#include "fracdim/measure.hpp"
#include "fracdim/process_models.hpp"
#include "fracdim/set_models.hpp"

namespace fracdim {

inline constexpr std::size_t kDenseKernelCap = 5000;

// Dense symmetric kernel matrix over a net, row-major.
struct KernelMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double scale = 0.0;
  std::string family;
  bool known_psd = false;

  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  const double* row(std::size_t i) const { return data.data() + i * n; }

  // Wraps explicit entries; checks symmetry, unit diagonal and the [0, 1] range.
  static KernelMatrix from_entries(std::size_t n, std::vector<double> entries, bool known_psd = false);
};

// Fills the upper triangle (n(n+1)/2 kernel evaluations) and mirrors it. The OpenMP
// version splits rows across threads; both produce identical matrices.
KernelMatrix build_kernel(const KernelFamily& family, double scale, const DeltaNet& net,
                          std::size_t max_n = kDenseKernelCap);
KernelMatrix build_kernel_serial(const KernelFamily& family, double scale, const DeltaNet& net,
                                 std::size_t max_n = kDenseKernelCap);

// Pivoted LDL^T succeeds with no pivot below -tol * max diagonal.
bool is_psd(const KernelMatrix& k, double tol = 1e-10);

struct EnergyOptions {
  double tol = 1e-6;            // relative duality gap
  std::size_t max_iter = 1000000;
  int restarts = 8;             // random Dirichlet starts after the uniform one
  std::uint64_t seed = 1;
  std::size_t psd_check_max = 400;
};

struct EnergyResult {
  double value = 1.0;
  SimplexWeights weights;
  double duality_gap = 0.0;
  std::size_t iterations = 0;
  int restarts_used = 0;
  bool flagged_nonconvex = false;
};

class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, EnergyResult best) : Error(what), best_(std::move(best)) {}
  const EnergyResult& best() const { return best_; }

 private:
  EnergyResult best_;
};

// Minimizes w^T K w over the probability simplex by pairwise Frank-Wolfe with exact line
// search. Matrices not known to be PSD are multi-started and flagged.
EnergyResult min_energy(const KernelMatrix& k, const EnergyOptions& options = {});

// Single Frank-Wolfe run from `start`; does not throw on the iteration limit.
EnergyResult frank_wolfe(const KernelMatrix& k, SimplexWeights start, double tol, std::size_t max_iter);

// Exact minimum of w^T K w over the lattice {w : w_i in resolution * Z}. n <= 8.
double min_energy_bruteforce(const KernelMatrix& k, double resolution = 1.0 / 200.0);

struct KktReport {
  bool ok = false;
  double energy = 0.0;
  double min_potential = 0.0;
  double max_support_deviation = 0.0;
  std::size_t worst_index = 0;
};

// Equilibrium-potential test: (Kw)_i >= w^T K w - tol everywhere and
// |(Kw)_i - w^T K w| <= tol on the support.
KktReport kkt_certificate(const KernelMatrix& k, const SimplexWeights& w, double tol);

double quadratic_energy(const KernelMatrix& k, const SimplexWeights& w);

}  // namespace fracdim
