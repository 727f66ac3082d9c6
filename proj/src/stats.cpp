#include "holdercover/stats.hpp"

#include "holdercover/errors.hpp"

#include <cmath>

namespace holdercover {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("least_squares: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("least_squares: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: x has zero variance");
  LinearFit fit;
  fit.points = n;
  fit.degenerate = syy == 0.0;
  fit.slope = fit.degenerate ? 0.0 : sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

MeanEstimate mean_with_error(std::span<const double> values) {
  MeanEstimate est;
  est.samples = values.size();
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return est;
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  const double variance = ss / static_cast<double>(values.size() - 1);
  est.std_error = std::sqrt(variance / static_cast<double>(values.size()));
  return est;
}

}  // namespace holdercover
