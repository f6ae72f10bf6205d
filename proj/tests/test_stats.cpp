#include <cmath>
#include <random>

#include "doctest.h"

#include "fklab/error.hpp"
#include "fklab/stats.hpp"

using namespace fklab;

TEST_CASE("fit_power_law on exact power laws") {
  const std::vector<PowerLawPoint> half{{1, 1, 0}, {2, std::pow(2, -0.5), 0}, {4, std::pow(4, -0.5), 0}};
  CHECK(fit_power_law(half).exponent == doctest::Approx(-0.5).epsilon(1e-14));
  const std::vector<PowerLawPoint> flat{{1, 1, 0}, {2, 1, 0}, {4, 1, 0}};
  CHECK(std::abs(fit_power_law(flat).exponent) < 1e-15);
  std::vector<PowerLawPoint> eighth;
  for (int n = 8; n <= 128; n *= 2) eighth.push_back({double(n), 3.0 * std::pow(n, -0.125), 0.01});
  const PowerLawFit f = fit_power_law(eighth);
  CHECK(std::abs(f.exponent + 0.125) < 1e-12);
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.x_min == 8);
  CHECK(f.x_max == 128);
}

TEST_CASE("fit_power_law rejects degenerate input") {
  const std::vector<PowerLawPoint> two{{1, 1, 0}, {2, 1, 0}};
  const std::vector<PowerLawPoint> zero{{1, 1, 0}, {2, 0, 0}, {4, 1, 0}};
  for (const auto* pts : {&two, &zero}) {
    try {
      fit_power_law(*pts);
      FAIL("expected degenerate_input");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_input);
    }
  }
}

TEST_CASE("weights follow the delta method") {
  // A wild point with a huge SE barely moves the fit.
  std::vector<PowerLawPoint> pts{{1, 1, 1e-6}, {2, 0.5, 1e-6}, {4, 0.25, 1e-6}, {8, 10.0, 1e3}};
  CHECK(fit_power_law(pts).exponent == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("windowed fit drops the smallest size only when r² is low") {
  std::vector<PowerLawPoint> pts{{4, 5.0, 0}, {8, std::pow(8, -0.5), 0}, {16, 0.25, 0}, {32, std::pow(32, -0.5), 0}};
  const PowerLawFit f = fit_power_law_windowed(pts);
  CHECK(f.x_min == 8);
  CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-12));
  pts[0].y = 0.5;
  CHECK(fit_power_law_windowed(pts).x_min == 4);
}

TEST_CASE("batch means: iid series and a correlated series") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> iid(64000);
  for (double& x : iid) x = n(rng);
  const Estimate e = batch_means(iid);
  CHECK(e.std_error == doctest::Approx(1.0 / std::sqrt(64000.0)).epsilon(0.3));
  CHECK(e.autocorr_time < 1.5);
  // AR(1) with phi = 0.9: tau_int = (1 + phi) / (2 (1 - phi)) = 9.5.
  std::vector<double> ar(200000);
  double x = 0;
  for (double& v : ar) v = x = 0.9 * x + n(rng);
  const Estimate a = batch_means(ar);
  CHECK(a.autocorr_time == doctest::Approx(9.5).epsilon(0.35));
  const std::vector<double> constant(100, 2.0);
  CHECK(batch_means(constant).std_error == 0.0);
  CHECK(combined_se({0, 3, 1}, {0, 4, 1}) == doctest::Approx(5.0));
}
