#pragma once

// Exact rational scaling-exponent algebra.  The scaling convention is
// uniform across families: u_lambda(t,x) = lambda^a u(lambda^{order/2} t,
// lambda^{1/2} x), so the spatial dilation factor is always lambda^{1/2}
// and homogeneous-norm exponents are affine in the smoothness with slope 1/2.

#include <cmath>
#include <stdexcept>
#include <variant>

#include "critspace/criticality.hpp"
#include "critspace/rational.hpp"
#include "critspace/simulate.hpp"

namespace critspace {

struct ScalingLaw {
  Rat amplitudePower;  // the exponent a above
  int operatorOrder = 2;
};

struct PowerMatch {
  Rat driftPower;
  Rat noisePower;
  bool match = false;
};

// The amplitude power that makes the family's drift scaling-invariant.
inline ScalingLaw scaling_law(const EquationFamily& family) {
  if (const auto* f = std::get_if<ConservativeRD>(&family))
    return ScalingLaw{1 / (2 * (f->h - 1)), 2};
  if (const auto* f = std::get_if<ReactionDiffusion>(&family))
    return ScalingLaw{1 / (f->m - 1), 2};
  if (const auto* f = std::get_if<GradientRD>(&family))
    return ScalingLaw{-(f->m - 2) / (2 * (f->m - 1)), 2};
  if (const auto* f = std::get_if<BurgersWhite>(&family))
    return ScalingLaw{1 / (2 * (f->h - 1)), 2};
  if (std::get_if<AllenCahn>(&family)) return ScalingLaw{Rat(1, 2), 2};
  if (const auto* f = std::get_if<CahnHilliard>(&family))
    return ScalingLaw{1 / (f->h - 1), 4};
  throw std::domain_error("scaling_law: family has no scaling law here");
}

// Drift vs. noise amplitude powers under the parabolic rescaling; the two
// agree exactly when the noise growth saturates the drift scaling.
inline PowerMatch drift_noise_power_match(const EquationFamily& family) {
  if (const auto* f = std::get_if<ReactionDiffusion>(&family)) {
    Rat drift = 1 / (f->m - 1);
    Rat noise = f->h / (f->m - 1) - Rat(1, 2);
    return PowerMatch{drift, noise, drift == noise};
  }
  if (const auto* f = std::get_if<ConservativeRD>(&family)) {
    Rat a = 1 / (2 * (f->h - 1));
    return PowerMatch{a, a, true};
  }
  if (const auto* f = std::get_if<GradientRD>(&family)) {
    Rat a = -(f->m - 2) / (2 * (f->m - 1));
    return PowerMatch{a, a, true};
  }
  throw std::domain_error("drift_noise_power_match: unsupported family");
}

// Net lambda-power of the homogeneous Besov norm of the rescaled initial
// datum at smoothness sc: amplitude power + sc/2 - d/(2q) (the last term is
// the volume factor of the lambda^{1/2} dilation).  Vanishes exactly at the
// family's critical smoothness.
inline Rat besov_scaling_exponent_at(const EquationFamily& family, const Rat& q,
                                     long long d, const Rat& sc) {
  ScalingLaw law = scaling_law(family);
  return law.amplitudePower + sc / 2 - Rat(d) / (2 * q);
}

inline Rat besov_scaling_exponent(const EquationFamily& family, const Rat& q,
                                  const Rat& /*p*/, long long d) {
  Rat sc = std::visit(
      [&](const auto& fam) -> Rat {
        using T = std::decay_t<decltype(fam)>;
        Rat dd(d);
        if constexpr (std::is_same_v<T, ConservativeRD>)
          return dd / q - 1 / (fam.h - 1);
        else if constexpr (std::is_same_v<T, ReactionDiffusion>)
          return dd / q - 2 / (fam.m - 1);
        else if constexpr (std::is_same_v<T, GradientRD>)
          return dd / q + (fam.m - 2) / (fam.m - 1);
        else if constexpr (std::is_same_v<T, BurgersWhite>)
          return dd / q - 1 / (fam.h - 1);
        else if constexpr (std::is_same_v<T, AllenCahn>)
          return dd / q - 1;
        else if constexpr (std::is_same_v<T, CahnHilliard>)
          return dd / q - 2 / (fam.h - 1);
        else
          throw std::domain_error("besov_scaling_exponent: unsupported family");
      },
      family);
  return besov_scaling_exponent_at(family, q, d, sc);
}

// u_lambda(t,x) = lambda^a u(lambda t, lambda^{1/2} x) on the same grid:
// lambda = j^2 with integer j so that the dilation maps the torus period to
// itself; spectrally, mode m moves to mode j*m (modes leaving the band drop).
inline TimeSeries rescale_solution(const TimeSeries& series, double lambda,
                                   double amplitudePower) {
  series.validate();
  double j = std::sqrt(lambda);
  if (!(lambda >= 1.0) || std::abs(j - std::llround(j)) > 1e-12)
    throw std::domain_error(
        "rescale_solution: lambda must be j^2 for an integer j so the spatial "
        "dilation preserves the period");
  long long ji = std::llround(j);
  double amp = std::pow(lambda, amplitudePower);
  TimeSeries out;
  out.weight = series.weight;
  const TorusGrid& g = series.states.front().grid;
  if (g.d != 1) throw std::domain_error("rescale_solution: 1-d series only");
  for (std::size_t i = 0; i < series.mesh.size(); ++i) {
    out.mesh.push_back(series.mesh[i] / lambda);
    SpectralField v = SpectralField::zero(g, series.states[i].components);
    for (int c = 0; c < v.components; ++c)
      for (int n = 0; n < g.N; ++n) {
        long long m = g.freq(n);
        long long tgt = m * ji;
        if (tgt < -(g.N / 2 - 1) || tgt > g.N / 2) continue;
        int slot = static_cast<int>((tgt + g.N) % g.N);
        v.coeffs[c][slot] = amp * series.states[i].coeffs[c][n];
      }
    out.states.push_back(v);
  }
  // rescaling t -> t/lambda can collapse the mesh only if lambda <= 0, which
  // is excluded above, so the result is a valid series.
  return out;
}

// Discrete strong-identity defect of the rescaled deterministic solution: the
// rescaled path solves the same equation, so the residual is pure scheme
// error, O(dt) + spectral-truncation terms.
inline double scaling_residual(SimFamily family, const SpectralField& u0,
                               double lambda, double dt, double T,
                               double amplitudePower) {
  EquationRHS rhs = build_equation(family, SimParams{}, NoiseSetup{}, u0.grid, &u0);
  StepperConfig cfg;
  cfg.scheme = Scheme::exponentialEuler;
  cfg.dt = dt;
  cfg.T = T;
  WienerBank bank{1, dt, 0, 0, 1.0};
  PathResult res = simulate_path(cfg, rhs, u0, bank);
  if (res.blewUp) throw std::runtime_error("scaling_residual: path blew up");
  TimeSeries scaled = rescale_solution(res.series, lambda, amplitudePower);
  return strong_residual(scaled, rhs, bank, NormIndex{0.0, 2.0});
}

}  // namespace critspace
