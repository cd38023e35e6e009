#pragma once

#include <string>
#include <vector>

namespace fracdim {

enum class SlopeMode { LeastSquares, Upper, Lower };

std::string to_string(SlopeMode mode);
SlopeMode slope_mode_from_string(const std::string& text);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

// Regression record of y against x, where x is the log of the resolution
// (log 1/r, log 1/eps or log lambda) and the slope is the dimension-type index.
//
// Envelope modes look at chords of fixed length h = ceil((m-1)/2) ladder steps whose
// right end lies in the finer half of the ladder; Upper takes the steepest such chord
// and Lower the flattest. Least squares fits all points.
struct LadderEstimate {
  std::vector<double> scales;
  std::vector<double> values;
  std::vector<double> x;
  std::vector<double> y;
  SlopeMode mode = SlopeMode::Upper;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double least_squares = 0.0;
  double upper = 0.0;
  double lower = 0.0;

  // Refit from the stored points; reproduces `slope` exactly.
  Line recompute(SlopeMode m) const;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y, SlopeMode mode);

// Builds the record; x and y must have equal length >= 3 with strictly increasing x.
LadderEstimate make_estimate(std::vector<double> scales, std::vector<double> values,
                             std::vector<double> x, std::vector<double> y, SlopeMode mode);

// start, start*ratio, ..., count terms.
std::vector<double> geometric_ladder(double start, double ratio, int count);

}  // namespace fracdim
