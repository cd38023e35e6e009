#include "fracdim/measure.hpp"

#include <cmath>
#include <numeric>

#include "fracdim/errors.hpp"

namespace fracdim {

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform weights need at least one point");
  return SimplexWeights{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void SimplexWeights::validate() const {
  if (w.empty()) throw InvalidArgument("empty weight vector");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("weights must be finite and nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1");
}

}  // namespace fracdim
