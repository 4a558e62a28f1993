#pragma once

// Seeded Wiener drivers, Ito integration with an enforced adaptedness
// contract, driver rescaling, and spatially colored noise fields.
//
// All randomness is counter-based (Philox4x32-10) keyed by
// (seed, driver, step, path, lane), so paths are reproducible and
// parallelizable without shared stream state.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "critspace/field.hpp"

namespace critspace {

namespace rngdetail {

struct U128x4 {
  std::uint32_t v[4];
};

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  constexpr std::uint64_t M0 = 0xD2511F53ull, M1 = 0xCD9E8D57ull;
  std::uint64_t p0 = M0 * ctr[0];
  std::uint64_t p1 = M1 * ctr[2];
  std::uint32_t out[4];
  out[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
  out[1] = static_cast<std::uint32_t>(p1);
  out[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
  out[3] = static_cast<std::uint32_t>(p0);
  for (int i = 0; i < 4; ++i) ctr[i] = out[i];
}

inline U128x4 philox(std::uint64_t key64, std::uint64_t c0, std::uint64_t c1) {
  std::uint32_t ctr[4] = {static_cast<std::uint32_t>(c0),
                          static_cast<std::uint32_t>(c0 >> 32),
                          static_cast<std::uint32_t>(c1),
                          static_cast<std::uint32_t>(c1 >> 32)};
  std::uint32_t key[2] = {static_cast<std::uint32_t>(key64),
                          static_cast<std::uint32_t>(key64 >> 32)};
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return U128x4{{ctr[0], ctr[1], ctr[2], ctr[3]}};
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) / 9007199254740992.0;
}

// Two standard normals from one Philox block (Box-Muller).
inline void gauss_pair(std::uint64_t seed, std::uint64_t c0, std::uint64_t c1,
                       double& g0, double& g1) {
  U128x4 r = philox(seed, c0, c1);
  double u1 = to_open_unit(r.v[0], r.v[1]);
  double u2 = to_open_unit(r.v[2], r.v[3]);
  double rad = std::sqrt(-2.0 * std::log(u1));
  g0 = rad * std::cos(2.0 * M_PI * u2);
  g1 = rad * std::sin(2.0 * M_PI * u2);
}

}  // namespace rngdetail

// Standard normal keyed by (seed, driver, step, path, lane in {0,1}).
inline double keyed_gaussian(std::uint64_t seed, std::uint64_t driver,
                             std::uint64_t step, std::uint64_t path = 0,
                             int lane = 0) {
  double g0, g1;
  std::uint64_t c0 = (driver << 40) ^ step;
  std::uint64_t c1 = (path << 8) ^ static_cast<std::uint64_t>(lane >> 1);
  rngdetail::gauss_pair(seed, c0, c1, g0, g1);
  return (lane & 1) == 0 ? g0 : g1;
}

// A finite bank of independent Brownian drivers with lazy, reproducible
// increments.
struct WienerBank {
  int nDrivers = 1;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t pathIndex = 0;
  double amplitude = 1.0;  // rescaling factor applied to every increment

  double increment(int driver, long long step) const {
    if (driver < 0 || driver >= nDrivers)
      throw std::domain_error("WienerBank: driver index out of range");
    return amplitude * std::sqrt(dt) *
           keyed_gaussian(seed, static_cast<std::uint64_t>(driver),
                          static_cast<std::uint64_t>(step), pathIndex, 0);
  }
};

// Dense increment table for a step range.
inline std::vector<std::vector<double>> sample_increments(const WienerBank& bank,
                                                          long long stepBegin,
                                                          long long stepEnd) {
  if (stepEnd < stepBegin) throw std::domain_error("sample_increments: bad range");
  std::vector<std::vector<double>> out(bank.nDrivers);
  for (int n = 0; n < bank.nDrivers; ++n) {
    out[n].reserve(stepEnd - stepBegin);
    for (long long i = stepBegin; i < stepEnd; ++i) out[n].push_back(bank.increment(n, i));
  }
  return out;
}

// b^n_{t,lambda} = lambda^{-1/2} w^n_{lambda t}: a driver with the same law on
// the accelerated clock.  The per-step variance amplitude^2 * dt / lambda is
// produced by the sqrt(dt) factor in increment() alone, so only dt changes.
inline WienerBank rescale_driver(const WienerBank& bank, double lambda) {
  if (!(lambda > 0)) throw std::domain_error("rescale_driver: lambda must be positive");
  WienerBank out = bank;
  out.dt = bank.dt / lambda;
  return out;
}

// Read-only view of a bank that refuses to reveal future increments; handed
// to Ito integrands to enforce adaptedness.
class AdaptedIncrements {
 public:
  AdaptedIncrements(const WienerBank& bank, long long limit)
      : bank_(bank), limit_(limit) {}
  double increment(int driver, long long step) const {
    if (step >= limit_)
      throw std::logic_error(
          "adaptedness contract violation: integrand requested increment of a "
          "future step");
    return bank_.increment(driver, step);
  }

 private:
  const WienerBank& bank_;
  long long limit_;
};

// Discrete Ito integral sum_i sum_n G_n(t_i) dw^n_i.  The integrand for step
// i is evaluated before increment i is consumed; it may inspect strictly
// earlier increments only.
inline SpectralField ito_integral(
    const std::function<std::vector<SpectralField>(long long, const AdaptedIncrements&)>&
        integrand,
    const WienerBank& bank, long long nSteps, const TorusGrid& grid) {
  SpectralField acc = SpectralField::zero(grid);
  for (long long i = 0; i < nSteps; ++i) {
    AdaptedIncrements past(bank, i);
    std::vector<SpectralField> g = integrand(i, past);
    if (static_cast<int>(g.size()) > bank.nDrivers)
      throw std::domain_error("ito_integral: more integrand slots than drivers");
    for (std::size_t n = 0; n < g.size(); ++n) {
      SpectralField term = g[n];
      term *= bank.increment(static_cast<int>(n), i);
      acc += term;
    }
  }
  return acc;
}

// Scalar convenience variant used by the statistical tests.
inline double ito_integral_scalar(
    const std::function<std::vector<double>(long long, const AdaptedIncrements&)>& integrand,
    const WienerBank& bank, long long nSteps) {
  double acc = 0.0;
  for (long long i = 0; i < nSteps; ++i) {
    AdaptedIncrements past(bank, i);
    std::vector<double> g = integrand(i, past);
    for (std::size_t n = 0; n < g.size(); ++n)
      acc += g[n] * bank.increment(static_cast<int>(n), i);
  }
  return acc;
}

enum class NoiseKind { gradientBank, multiplicativeBank, coloredSpatial, whiteSpatial };

struct NoiseModel {
  NoiseKind kind = NoiseKind::coloredSpatial;
  std::vector<double> b;      // gradient coefficients per driver (d=1 layout)
  double gScale = 0.0;        // multiplicative amplitude
  double delta = 1.0;         // spatial color; 0 means white
};

// One increment of the spatially colored driver: mode-k coefficient
// (1+|k|^2)^{-delta/2} xi_k sqrt(dt) with iid standard complex Gaussians
// under Hermitian symmetry.  delta=0 is truncated space-time white noise
// and is restricted to d=1.
inline SpectralField colored_spatial_field(double delta, const TorusGrid& grid,
                                           const WienerBank& bank, long long step) {
  grid.validate();
  if (delta < 0) throw std::domain_error("colored_spatial_field: delta must be >= 0");
  if (delta == 0.0 && grid.d != 1)
    throw std::domain_error("white spatial noise is only supported on the 1-d torus");
  SpectralField f = SpectralField::zero(grid);
  int N = grid.N;
  double rootDt = bank.amplitude * std::sqrt(bank.dt);
  auto conjSlot = [&](std::size_t n) -> std::size_t {
    if (grid.d == 1) return (N - static_cast<int>(n)) % N;
    int nx = static_cast<int>(n) / N, ny = static_cast<int>(n) % N;
    return static_cast<std::size_t>((N - nx) % N) * N + (N - ny) % N;
  };
  for (std::size_t n = 0; n < grid.total(); ++n) {
    std::size_t m = conjSlot(n);
    if (n > m) continue;
    double color = std::pow(1.0 + k_squared(grid, n), -0.5 * delta);
    // driver slot offset: spatial modes live above the scalar drivers
    std::uint64_t key = 0x10000u + n;
    double g0 = keyed_gaussian(bank.seed, key, static_cast<std::uint64_t>(step),
                               bank.pathIndex, 0);
    if (n == m) {
      f.coeffs[0][n] = Complex(color * g0 * rootDt, 0.0);
    } else {
      double g1 = keyed_gaussian(bank.seed, key, static_cast<std::uint64_t>(step),
                                 bank.pathIndex, 1);
      Complex xi(g0 * M_SQRT1_2, g1 * M_SQRT1_2);  // E|xi|^2 = 1
      f.coeffs[0][n] = color * xi * rootDt;
      f.coeffs[0][m] = std::conj(f.coeffs[0][n]);
    }
  }
  return f;
}

}  // namespace critspace
