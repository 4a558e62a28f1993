#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critspace/noise.hpp"

using namespace critspace;

TEST_CASE("keyed gaussian statistics and determinism") {
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = keyed_gaussian(12345, 0, i, 0, 0);
    sum += g;
    sum2 += g * g;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt((double)n));          // 3 sigma
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));       // 3 sigma of chi^2

  // bit-identical reproduction
  for (int i = 0; i < 50; ++i)
    CHECK(keyed_gaussian(12345, 3, i, 7, 1) == keyed_gaussian(12345, 3, i, 7, 1));
  // distinct keys decorrelate
  CHECK(keyed_gaussian(12345, 0, 0) != keyed_gaussian(12346, 0, 0));
  CHECK(keyed_gaussian(12345, 0, 0) != keyed_gaussian(12345, 1, 0));
}

TEST_CASE("wiener bank increments") {
  WienerBank bank{2, 1e-3, 99, 0, 1.0};
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double dw = bank.increment(0, i);
    sum += dw;
    sum2 += dw * dw;
  }
  double mean = sum / n, var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(bank.dt / n));
  CHECK(std::abs(var - bank.dt) < 3.0 * bank.dt * std::sqrt(2.0 / n));
  CHECK_THROWS_AS(bank.increment(2, 0), std::domain_error);

  auto table = sample_increments(bank, 10, 20);
  REQUIRE(table.size() == 2);
  REQUIRE(table[0].size() == 10);
  CHECK(table[0][0] == bank.increment(0, 10));
  CHECK(table[1][9] == bank.increment(1, 19));
}

TEST_CASE("ito integral isometry") {
  WienerBank bank{1, 1e-2, 0, 0, 1.0};
  long long nSteps = 100;  // T = 1

  // G == 0 integrates to zero
  double zero = ito_integral_scalar(
      [](long long, const AdaptedIncrements&) { return std::vector<double>{0.0}; },
      bank, nSteps);
  CHECK(zero == 0.0);

  // G == 1: E[(int dW)^2] = T
  const int paths = 4000;
  double acc = 0.0;
  for (int p = 0; p < paths; ++p) {
    WienerBank b = bank;
    b.pathIndex = p;
    double v = ito_integral_scalar(
        [](long long, const AdaptedIncrements&) { return std::vector<double>{1.0}; },
        b, nSteps);
    acc += v * v;
  }
  double meanSq = acc / paths;
  double se = std::sqrt(2.0) * 1.0 / std::sqrt((double)paths);  // var of W_1^2 is 2
  CHECK(std::abs(meanSq - 1.0) < 3.0 * se);

  // step-function integrand: isometry sum_i g_i^2 dt
  std::vector<double> gvals(nSteps);
  for (long long i = 0; i < nSteps; ++i) gvals[i] = (i < nSteps / 2) ? 2.0 : 0.5;
  double expect = 0.0;
  for (double gv : gvals) expect += gv * gv * bank.dt;
  acc = 0.0;
  for (int p = 0; p < paths; ++p) {
    WienerBank b = bank;
    b.pathIndex = p + 100000;
    double v = ito_integral_scalar(
        [&](long long i, const AdaptedIncrements&) {
          return std::vector<double>{gvals[i]};
        },
        b, nSteps);
    acc += v * v;
  }
  meanSq = acc / paths;
  se = std::sqrt(2.0) * expect / std::sqrt((double)paths);
  CHECK(std::abs(meanSq - expect) < 3.0 * se);
}

TEST_CASE("adaptedness contract") {
  WienerBank bank{1, 1e-2, 0, 0, 1.0};
  AdaptedIncrements past(bank, 5);
  CHECK_NOTHROW(past.increment(0, 4));
  CHECK_THROWS_AS(past.increment(0, 5), std::logic_error);
  CHECK_THROWS_AS(past.increment(0, 6), std::logic_error);

  // an integrand peeking at its own step is rejected
  CHECK_THROWS_AS(
      ito_integral_scalar(
          [](long long i, const AdaptedIncrements& w) {
            return std::vector<double>{w.increment(0, i)};
          },
          bank, 10),
      std::logic_error);
}

TEST_CASE("driver rescaling") {
  WienerBank bank{1, 1e-2, 5, 0, 1.0};
  WienerBank same = rescale_driver(bank, 1.0);
  CHECK(same.dt == bank.dt);
  CHECK(same.amplitude == bank.amplitude);
  CHECK(same.increment(0, 3) == bank.increment(0, 3));

  double lambda = 4.0;
  WienerBank fast = rescale_driver(bank, lambda);
  CHECK(fast.dt == Catch::Approx(bank.dt / lambda));
  const int n = 100000;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    WienerBank b = fast;
    b.pathIndex = i;
    double dw = b.increment(0, 0);
    sum2 += dw * dw;
  }
  double var = sum2 / n;
  CHECK(std::abs(var - fast.dt) < 3.0 * fast.dt * std::sqrt(2.0 / n));

  // quadratic variation over [0,1] for both banks
  auto qv = [](const WienerBank& b) {
    long long steps = static_cast<long long>(std::llround(1.0 / b.dt));
    double acc = 0.0;
    for (long long i = 0; i < steps; ++i) {
      double dw = b.increment(0, i);
      acc += dw * dw;
    }
    return acc;
  };
  // 3-sigma bands: Var(qv) = 2 dt^2 * steps, so sd = sqrt(2 dt) = 0.141
  // for the coarse bank and 0.071 for the rescaled one.
  CHECK(std::abs(qv(bank) - 1.0) < 0.45);
  CHECK(std::abs(qv(fast) - 1.0) < 0.25);
}

TEST_CASE("colored spatial noise") {
  TorusGrid g{1, 32, 2 * M_PI};
  WienerBank bank{1, 1e-2, 17, 0, 1.0};

  // realness of physical samples
  SpectralField f = colored_spatial_field(1.0, g, bank, 0);
  SpectralField conj = f;
  conj.symmetrize();
  for (int n = 0; n < g.N; ++n) CHECK(std::abs(f.at(0, n) - conj.at(0, n)) < 1e-15);

  // per-mode variance (1+k^2)^{-delta} dt
  const int samples = 20000;
  double delta = 1.5;
  int mode = 3;
  double k2 = k_squared(g, mode);
  double acc = 0.0;
  for (int p = 0; p < samples; ++p) {
    WienerBank b = bank;
    b.pathIndex = p;
    SpectralField x = colored_spatial_field(delta, g, b, 0);
    acc += std::norm(x.at(0, mode));
  }
  double var = acc / samples;
  double expect = std::pow(1.0 + k2, -delta) * bank.dt;
  CHECK(std::abs(var - expect) < 4.0 * expect / std::sqrt((double)samples));

  // delta -> infinity kills every mode except k=0 (k=1 sd = 2^{-100} sqrt(dt))
  SpectralField flat = colored_spatial_field(200.0, g, bank, 0);
  double zero = std::abs(flat.at(0, 0));
  for (int n = 1; n < g.N; ++n) CHECK(std::abs(flat.at(0, n)) < 1e-12 * std::max(zero, 1.0));

  // white noise is 1-d only
  TorusGrid g2{2, 8, 2 * M_PI};
  CHECK_THROWS_AS(colored_spatial_field(0.0, g2, bank, 0), std::domain_error);
  CHECK_NOTHROW(colored_spatial_field(0.0, g, bank, 0));
}
