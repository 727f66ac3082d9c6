#pragma once

#include <cstddef>
#include <span>

namespace holdercover {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the residuals
  std::size_t points = 0;
  bool degenerate = false;  // y has zero variance
};

/// Ordinary least squares y ~ slope * x + intercept. Needs >= 2 points with
/// distinct x; throws DomainError otherwise.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Sample mean and standard error of the mean.
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};
MeanEstimate mean_with_error(std::span<const double> values);

}  // namespace holdercover
