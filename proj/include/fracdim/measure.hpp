#pragma once

#include <span>
#include <vector>

namespace fracdim {

// Discrete probability measure aligned to the points of a net.
struct SimplexWeights {
  std::vector<double> w;

  static SimplexWeights uniform(std::size_t n);
  // Throws InvalidArgument unless entries are nonnegative and sum to 1 within 1e-12.
  void validate() const;
  std::size_t size() const { return w.size(); }
};

}  // namespace fracdim
