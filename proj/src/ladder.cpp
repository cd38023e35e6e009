#include "fracdim/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracdim/errors.hpp"

namespace fracdim {

std::string to_string(SlopeMode mode) {
  switch (mode) {
    case SlopeMode::LeastSquares: return "least_squares";
    case SlopeMode::Upper: return "upper";
    case SlopeMode::Lower: return "lower";
  }
  return "";
}

SlopeMode slope_mode_from_string(const std::string& text) {
  if (text == "least_squares" || text == "lsq") return SlopeMode::LeastSquares;
  if (text == "upper") return SlopeMode::Upper;
  if (text == "lower") return SlopeMode::Lower;
  throw InvalidArgument("unknown slope mode '" + text + "'");
}

Line fit_line(const std::vector<double>& x, const std::vector<double>& y, SlopeMode mode) {
  const std::size_t m = x.size();
  if (m < 3 || y.size() != m) throw InvalidArgument("slope fit needs at least 3 matched points");
  if (mode == SlopeMode::LeastSquares) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
  }
  const std::size_t h = m / 2;  // == ceil((m - 1) / 2)
  Line best{mode == SlopeMode::Upper ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity(),
            0.0};
  for (std::size_t j = h; j < m; ++j) {
    const std::size_t i = j - h;
    const double s = (y[j] - y[i]) / (x[j] - x[i]);
    const bool better = mode == SlopeMode::Upper ? s > best.slope : s < best.slope;
    if (better) best = {s, y[j] - s * x[j]};
  }
  return best;
}

Line LadderEstimate::recompute(SlopeMode m) const { return fit_line(x, y, m); }

LadderEstimate make_estimate(std::vector<double> scales, std::vector<double> values, std::vector<double> x,
                             std::vector<double> y, SlopeMode mode) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("ladder contains non-finite values");
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidArgument("ladder abscissae must be strictly increasing");
  }
  LadderEstimate e;
  e.scales = std::move(scales);
  e.values = std::move(values);
  e.x = std::move(x);
  e.y = std::move(y);
  e.mode = mode;
  const Line ls = fit_line(e.x, e.y, SlopeMode::LeastSquares);
  e.least_squares = ls.slope;
  e.upper = fit_line(e.x, e.y, SlopeMode::Upper).slope;
  e.lower = fit_line(e.x, e.y, SlopeMode::Lower).slope;
  const Line chosen = e.recompute(mode);
  e.slope = chosen.slope;
  e.intercept = chosen.intercept;
  for (std::size_t i = 0; i < e.x.size(); ++i) {
    e.max_residual = std::max(e.max_residual, std::abs(e.y[i] - (ls.slope * e.x[i] + ls.intercept)));
  }
  return e;
}

std::vector<double> geometric_ladder(double start, double ratio, int count) {
  if (!(start > 0.0) || !(ratio > 0.0) || ratio == 1.0 || count < 1) {
    throw InvalidArgument("geometric ladder needs start > 0, ratio > 0 and != 1, count >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = start * std::pow(ratio, k);
  return out;
}

}  // namespace fracdim
