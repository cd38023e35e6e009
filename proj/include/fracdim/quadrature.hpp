#pragma once

#include <functional>

namespace fracdim {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]: the interval with the largest
// error estimate is bisected until the summed estimate drops below `abs_target` or
// `max_intervals` is reached. Never throws.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double abs_target, int max_intervals = 4000);

// As integrate_gk, but throws NonConvergedQuadrature when the target is missed.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_target, int max_intervals = 4000);

}  // namespace fracdim
