#pragma once

// Estimates with standard errors and weighted log-log power-law fits.

#include <span>
#include <vector>

namespace fklab {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long n_samples = 0;
  double autocorr_time = 0.5;  // integrated, in units of the sampling interval
};

/// Batch-means estimate of a correlated series. The integrated autocorrelation
/// time is read off the ratio of the batch-means variance to the naive one.
Estimate batch_means(std::span<const double> series, int batches = 32);

/// Combined standard error of a difference of independent estimates.
double combined_se(const Estimate& a, const Estimate& b);

struct PowerLawPoint {
  double x = 0.0;
  double y = 0.0;
  double se = 0.0;
};

struct PowerLawFit {
  double exponent = 0.0;  // slope of log y against log x
  double intercept = 0.0;
  double stderr_ = 0.0;
  double r_squared = 1.0;
  double x_min = 0.0;  // fit window
  double x_max = 0.0;
};

/// Weighted least squares on (log x, log y) with weights 1/(se/y)^2 (delta
/// method); unweighted when every se is zero. Throws Error(degenerate_input)
/// for fewer than three points or non-positive values.
PowerLawFit fit_power_law(std::span<const PowerLawPoint> points);

/// As above, dropping the smallest x once when r² falls below `min_r2`.
PowerLawFit fit_power_law_windowed(std::span<const PowerLawPoint> points, double min_r2 = 0.98);

}  // namespace fklab
