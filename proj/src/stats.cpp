#include "fklab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "fklab/error.hpp"

namespace fklab {

Estimate batch_means(std::span<const double> xs, int batches) {
  Estimate e;
  const std::size_t n = xs.size();
  e.n_samples = static_cast<long long>(n);
  if (n == 0) return e;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  e.mean = mean;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 2)), n);
  const std::size_t len = n / nb;
  if (len == 0 || nb < 2 || var == 0.0) {
    e.std_error = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    return e;
  }
  std::vector<double> bm(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t k = 0; k < len; ++k) bm[b] += xs[b * len + k];
    bm[b] /= static_cast<double>(len);
  }
  double bmean = 0.0;
  for (double v : bm) bmean += v;
  bmean /= static_cast<double>(nb);
  double bvar = 0.0;
  for (double v : bm) bvar += (v - bmean) * (v - bmean);
  bvar /= static_cast<double>(nb - 1);
  const double naive = var / static_cast<double>(n);
  const double se2 = std::max(bvar / static_cast<double>(nb), naive);
  e.std_error = std::sqrt(se2);
  e.autocorr_time = 0.5 * se2 / naive;
  return e;
}

double combined_se(const Estimate& a, const Estimate& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

PowerLawFit fit_power_law(std::span<const PowerLawPoint> pts) {
  if (pts.size() < 3) throw Error(ErrorCode::degenerate_input, "power-law fit needs at least three points");
  double min_rel = 0.0;
  bool weighted = false;
  for (const auto& p : pts) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) throw Error(ErrorCode::degenerate_input, "power-law fit needs positive values");
    if (p.se > 0.0) {
      weighted = true;
      const double rel = p.se / p.y;
      min_rel = min_rel == 0.0 ? rel : std::min(min_rel, rel);
    }
  }
  std::vector<double> lx, ly, w;
  for (const auto& p : pts) {
    lx.push_back(std::log(p.x));
    ly.push_back(std::log(p.y));
    const double rel = weighted ? (p.se > 0.0 ? p.se / p.y : min_rel) : 1.0;
    w.push_back(1.0 / (rel * rel));
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sw += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
    syy += w[i] * (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorCode::degenerate_input, "power-law fit needs distinct x values");
  PowerLawFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.exponent * lx[i]);
    chi2 += w[i] * r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - chi2 / syy : 1.0;
  const double dof = static_cast<double>(lx.size() - 2);
  // Scale by the reduced chi-square when the scatter exceeds the error bars.
  const double scale = weighted ? std::max(1.0, chi2 / dof) : chi2 / dof;
  f.stderr_ = std::sqrt(scale / sxx);
  f.x_min = pts.front().x;
  f.x_max = pts.front().x;
  for (const auto& p : pts) {
    f.x_min = std::min(f.x_min, p.x);
    f.x_max = std::max(f.x_max, p.x);
  }
  return f;
}

PowerLawFit fit_power_law_windowed(std::span<const PowerLawPoint> pts, double min_r2) {
  PowerLawFit f = fit_power_law(pts);
  if (f.r_squared >= min_r2 || pts.size() < 4) return f;
  std::vector<PowerLawPoint> rest(pts.begin(), pts.end());
  rest.erase(std::min_element(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.x < b.x; }));
  return fit_power_law(rest);
}

}  // namespace fklab
