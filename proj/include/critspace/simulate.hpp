#pragma once

// Time-stepping of the example equations on the torus, strong-formulation
// residuals, stop rules, and empirical probes of the maximal-regularity
// constants.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "critspace/field.hpp"
#include "critspace/noise.hpp"
#include "critspace/parabolicity.hpp"

namespace critspace {

struct BlowUpSignal : std::runtime_error {
  long long stepIndex;
  explicit BlowUpSignal(long long step)
      : std::runtime_error("blow-up detected at step " + std::to_string(step)),
        stepIndex(step) {}
};

struct EquationRHS {
  TorusGrid grid;
  std::vector<double> linearSymbol;  // per mode, real, bounded above
  std::function<SpectralField(const SpectralField&)> nonlinearDrift;  // may be empty
  // Full noise increment at one step (already multiplied by the increments).
  std::function<SpectralField(const SpectralField&, const WienerBank&, long long)>
      noiseOperator;  // may be empty
  double parabolicityMargin = 1.0;
};

enum class SimFamily {
  heat,
  burgers,
  conservativeRD,
  reactionDiffusion,
  gradientRD,
  allenCahn,
  massAllenCahn,
  cahnHilliard,
  porousMedia
};

struct SimParams {
  double h = 2.0;
  double m = 3.0;
  double r = 3.0;
  double eta = 0.5;
};

struct NoiseSetup {
  std::vector<double> gradB;        // gradient coefficients, layout [n*d + j]
  double multiplicativeScale = 0.0; // g_n(u) = scale * u on driver 0
  double coloredDelta = -1.0;       // >= 0 enables additive colored noise
  bool skipParabolicityCheck = false;  // for deliberate ill-posedness studies
};

namespace simdetail {

// Pointwise nonlinearity evaluated on the 2/3-truncated physical grid.
inline SpectralField pointwise(const SpectralField& u,
                               const std::function<double(double)>& fn) {
  SpectralField t = u;
  int N = u.grid.N, cut = N / 3;
  for (std::size_t n = 0; n < t.coeffs[0].size(); ++n) {
    bool keep;
    if (t.grid.d == 1) {
      keep = std::abs(t.grid.freq(static_cast<int>(n))) <= cut;
    } else {
      int nx = static_cast<int>(n) / N, ny = static_cast<int>(n) % N;
      keep = std::abs(t.grid.freq(nx)) <= cut && std::abs(t.grid.freq(ny)) <= cut;
    }
    if (!keep) t.coeffs[0][n] = Complex(0, 0);
  }
  auto phys = to_physical(t, 0);
  for (auto& v : phys) v = fn(v);
  SpectralField out = from_physical(u.grid, phys);
  for (std::size_t n = 0; n < out.coeffs[0].size(); ++n) {
    bool keep;
    if (out.grid.d == 1) {
      keep = std::abs(out.grid.freq(static_cast<int>(n))) <= cut;
    } else {
      int nx = static_cast<int>(n) / N, ny = static_cast<int>(n) % N;
      keep = std::abs(out.grid.freq(nx)) <= cut && std::abs(out.grid.freq(ny)) <= cut;
    }
    if (!keep) out.coeffs[0][n] = Complex(0, 0);
  }
  return out;
}

inline SpectralField multiply_symbol(const SpectralField& u,
                                     const std::function<double(double)>& symOfK2) {
  SpectralField out = u;
  for (std::size_t n = 0; n < out.coeffs[0].size(); ++n)
    out.coeffs[0][n] *= symOfK2(k_squared(u.grid, n));
  return out;
}

inline double oddpow(double v, double expo) {
  return v >= 0 ? std::pow(v, expo) : -std::pow(-v, expo);
}

}  // namespace simdetail

// Gradient-noise parabolicity margin for the scalar torus setting: drift a=I.
inline double gradient_noise_margin(int d, const std::vector<double>& gradB) {
  if (gradB.empty()) return 1.0;
  int nDrivers = static_cast<int>(gradB.size()) / d;
  NoiseCoeff b;
  b.d = d;
  b.N = 1;
  b.nMax = nDrivers;
  b.b.assign(d * nDrivers, 0.0);
  for (int n = 0; n < nDrivers; ++n)
    for (int j = 0; j < d; ++j) b.b[j * nDrivers + n] = gradB[n * d + j];
  DiffusionCoeff a;
  a.d = d;
  a.N = 1;
  a.blocks.assign(d * d, Eigen::MatrixXd::Zero(1, 1));
  for (int i = 0; i < d; ++i) a.blocks[i * d + i](0, 0) = 1.0;
  return ellipticity_margin(a, b);
}

inline EquationRHS build_equation(SimFamily family, const SimParams& params,
                                  const NoiseSetup& noise, const TorusGrid& grid,
                                  const SpectralField* u0 = nullptr) {
  grid.validate();
  EquationRHS rhs;
  rhs.grid = grid;

  bool fourthOrder = family == SimFamily::cahnHilliard;
  rhs.linearSymbol.resize(grid.total());
  for (std::size_t n = 0; n < grid.total(); ++n) {
    double k2 = k_squared(grid, n);
    rhs.linearSymbol[n] = fourthOrder ? -k2 * k2 : -k2;
  }

  double h = params.h, m = params.m, r = params.r;
  switch (family) {
    case SimFamily::heat:
      break;
    case SimFamily::burgers:
      rhs.nonlinearDrift = [](const SpectralField& u) {
        SpectralField sq = dealias_product(u, u);
        SpectralField out = derivative(sq, 0);
        out *= -1.0;
        return out;
      };
      break;
    case SimFamily::conservativeRD:
      rhs.nonlinearDrift = [h](const SpectralField& u) {
        SpectralField f = simdetail::pointwise(
            u, [h](double v) { return simdetail::oddpow(v, 1.0) * std::pow(std::abs(v), h - 1.0); });
        return simdetail::multiply_symbol(
            f, [&](double k2) { return -k2; });
      };
      break;
    case SimFamily::reactionDiffusion:
      rhs.nonlinearDrift = [m](const SpectralField& u) {
        SpectralField f = simdetail::pointwise(
            u, [m](double v) { return -v * std::pow(std::abs(v), m - 1.0); });
        return f;
      };
      break;
    case SimFamily::gradientRD: {
      double eta = params.eta;
      rhs.nonlinearDrift = [m, eta](const SpectralField& u) {
        SpectralField g = derivative(u, 0);
        SpectralField f = simdetail::pointwise(
            g, [m, eta](double v) { return -eta * simdetail::oddpow(v, 1.0) *
                                           std::pow(std::abs(v), m - 1.0); });
        return f;
      };
      break;
    }
    case SimFamily::allenCahn:
      rhs.nonlinearDrift = [](const SpectralField& u) {
        return simdetail::pointwise(u, [](double v) { return v - v * v * v; });
      };
      break;
    case SimFamily::massAllenCahn:
      rhs.nonlinearDrift = [](const SpectralField& u) {
        SpectralField f = simdetail::pointwise(u, [](double v) { return v - v * v * v; });
        f.coeffs[0][0] = Complex(0, 0);  // subtract the spatial mean exactly
        return f;
      };
      break;
    case SimFamily::cahnHilliard:
      rhs.nonlinearDrift = [](const SpectralField& u) {
        SpectralField f = simdetail::pointwise(u, [](double v) { return v * v * v - v; });
        return simdetail::multiply_symbol(f, [](double k2) { return -k2; });
      };
      break;
    case SimFamily::porousMedia: {
      if (u0 != nullptr) {
        auto phys = to_physical(*u0, 0);
        double mn = phys[0];
        for (double v : phys) mn = std::min(mn, v);
        if (!(mn > 0))
          throw std::domain_error(
              "porous media requires uniformly positive initial data");
      }
      rhs.nonlinearDrift = [r](const SpectralField& u) {
        // r|u|^{r-1} Lap u + r(r-1) u |u|^{r-3} |grad u|^2, minus the
        // constant-coefficient part already in the linear symbol.
        SpectralField lap = simdetail::multiply_symbol(u, [](double k2) { return -k2; });
        SpectralField coeff = simdetail::pointwise(
            u, [r](double v) { return r * std::pow(std::abs(v), r - 1.0) - 1.0; });
        SpectralField t1 = dealias_product(coeff, lap);
        SpectralField gx = derivative(u, 0);
        SpectralField g2 = dealias_product(gx, gx);
        if (u.grid.d == 2) {
          SpectralField gy = derivative(u, 1);
          g2 += dealias_product(gy, gy);
        }
        SpectralField c2 = simdetail::pointwise(u, [r](double v) {
          return r * (r - 1.0) * v * std::pow(std::abs(v), r - 3.0);
        });
        t1 += dealias_product(c2, g2);
        return t1;
      };
      break;
    }
  }

  double margin = gradient_noise_margin(grid.d, noise.gradB);
  rhs.parabolicityMargin = margin;
  if (!noise.skipParabolicityCheck && !(margin > 0))
    throw std::domain_error("parabolicity failure: ellipticity margin " +
                            std::to_string(margin));

  bool haveGrad = !noise.gradB.empty();
  bool haveMult = noise.multiplicativeScale != 0.0;
  bool haveColored = noise.coloredDelta >= 0.0;
  if (haveGrad || haveMult || haveColored) {
    std::vector<double> gradB = noise.gradB;
    double gScale = noise.multiplicativeScale;
    double delta = noise.coloredDelta;
    int d = grid.d;
    rhs.noiseOperator = [gradB, gScale, delta, d](const SpectralField& u,
                                                  const WienerBank& bank,
                                                  long long step) {
      SpectralField acc = SpectralField::zero(u.grid);
      int nGrad = static_cast<int>(gradB.size()) / std::max(1, d);
      for (int n = 0; n < nGrad; ++n) {
        SpectralField term = SpectralField::zero(u.grid);
        for (int j = 0; j < d; ++j) {
          if (gradB[n * d + j] == 0.0) continue;
          SpectralField dj = derivative(u, j);
          dj *= gradB[n * d + j];
          term += dj;
        }
        term *= bank.increment(n, step);
        acc += term;
      }
      if (gScale != 0.0) {
        SpectralField term = u;
        term *= gScale * bank.increment(nGrad, step);
        acc += term;
      }
      if (delta >= 0.0) acc += colored_spatial_field(delta, u.grid, bank, step);
      return acc;
    };
  }
  return rhs;
}

enum class Scheme { semiImplicitEuler, exponentialEuler };

inline double phi1(double z) {
  if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

inline SpectralField step(const SpectralField& state, const EquationRHS& rhs,
                          const WienerBank& bank, double dt, Scheme scheme,
                          long long stepIndex) {
  SpectralField drift = rhs.nonlinearDrift ? rhs.nonlinearDrift(state)
                                           : SpectralField::zero(state.grid);
  SpectralField noise = rhs.noiseOperator
                            ? rhs.noiseOperator(state, bank, stepIndex)
                            : SpectralField::zero(state.grid);
  SpectralField next = SpectralField::zero(state.grid, state.components);
  for (int c = 0; c < state.components; ++c)
    for (std::size_t n = 0; n < state.coeffs[c].size(); ++n) {
      double sym = rhs.linearSymbol[n];
      Complex u = state.coeffs[c][n];
      Complex nl = drift.coeffs[c][n];
      Complex nz = noise.coeffs[c][n];
      if (scheme == Scheme::semiImplicitEuler) {
        next.coeffs[c][n] = (u + dt * nl + nz) / (1.0 - dt * sym);
      } else {
        double e = std::exp(dt * sym);
        next.coeffs[c][n] = e * u + phi1(dt * sym) * dt * nl + e * nz;
      }
    }
  if (!next.finite()) throw BlowUpSignal(stepIndex);
  return next;
}

struct StopRule {
  std::function<double(const TimeSeries&)> functional;  // monotone in t
  double threshold = std::numeric_limits<double>::infinity();
};

struct StepperConfig {
  Scheme scheme = Scheme::exponentialEuler;
  double dt = 1e-3;
  double T = 1.0;
  TimeWeight weight;
};

struct PathResult {
  TimeSeries series;
  std::optional<long long> hittingIndex;
  bool blewUp = false;
  long long blowStep = -1;
};

inline PathResult simulate_path(const StepperConfig& config, const EquationRHS& rhs,
                                const SpectralField& u0, const WienerBank& bank,
                                const StopRule* stop = nullptr) {
  PathResult res;
  res.series.weight = config.weight;
  res.series.mesh.push_back(0.0);
  res.series.states.push_back(u0);
  long long nSteps = static_cast<long long>(std::llround(config.T / config.dt));
  SpectralField u = u0;
  if (stop != nullptr && stop->functional(res.series) >= stop->threshold) {
    res.hittingIndex = 0;
    return res;
  }
  for (long long i = 0; i < nSteps; ++i) {
    try {
      u = step(u, rhs, bank, config.dt, config.scheme, i);
    } catch (const BlowUpSignal& b) {
      res.blewUp = true;
      res.blowStep = b.stepIndex;
      return res;
    }
    double norm0 = sobolev_norm(u, NormIndex{0.0, 2.0});
    if (norm0 > 1e12) {
      res.blewUp = true;
      res.blowStep = i;
      return res;
    }
    res.series.mesh.push_back((i + 1) * config.dt);
    res.series.states.push_back(u);
    if (stop != nullptr && stop->functional(res.series) >= stop->threshold) {
      res.hittingIndex = i + 1;
      return res;
    }
  }
  return res;
}

// Max over mesh points of the X0-norm of the defect in the integrated strong
// identity, with left-endpoint quadrature of the drift and the stepper's own
// noise increments.
inline double strong_residual(const TimeSeries& series, const EquationRHS& rhs,
                              const WienerBank& bank, const NormIndex& x0Idx) {
  series.validate();
  SpectralField accum = SpectralField::zero(series.states.front().grid);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < series.states.size(); ++i) {
    double dt = series.mesh[i + 1] - series.mesh[i];
    const SpectralField& u = series.states[i];
    SpectralField inc = SpectralField::zero(u.grid);
    for (std::size_t n = 0; n < u.coeffs[0].size(); ++n)
      inc.coeffs[0][n] = rhs.linearSymbol[n] * u.coeffs[0][n] * dt;
    if (rhs.nonlinearDrift) {
      SpectralField d = rhs.nonlinearDrift(u);
      d *= dt;
      inc += d;
    }
    if (rhs.noiseOperator) inc += rhs.noiseOperator(u, bank, static_cast<long long>(i));
    accum += inc;
    SpectralField defect = series.states[i + 1] - series.states.front() - accum;
    worst = std::max(worst, sobolev_norm(defect, x0Idx));
  }
  return worst;
}

// Spatial mean (mode-0 coefficient) per time.
inline std::vector<double> mean_functional(const TimeSeries& series) {
  std::vector<double> out;
  out.reserve(series.states.size());
  for (const auto& f : series.states) out.push_back(f.coeffs[0][0].real());
  return out;
}

struct SmrProbe {
  std::function<SpectralField(double)> forcing;  // t -> field
  bool stochastic = false;
};

struct SmrEstimate {
  double kDet = 0.0;
  double kSto = 0.0;
};

// Empirical lower bound for the maximal-regularity constants: max over the
// probe set of the ratio between the solution's fractional-time surrogate
// norm in X_{1-theta} plus its weighted Lp(X_1) norm, and the input norm.
// Comparative diagnostic only (the surrogate's equivalence constants are
// unknown).
inline SmrEstimate estimate_smr_constants(const EquationRHS& rhs, const TimeWeight& tw,
                                          double theta, const std::vector<SmrProbe>& probes,
                                          double T, double dt, const PairIndex& pair,
                                          std::uint64_t seed = 7) {
  SmrEstimate est;
  long long nSteps = static_cast<long long>(std::llround(T / dt));
  NormIndex x0{pair.x0s, pair.q};
  NormIndex x1{pair.x1s, pair.q};
  NormIndex xOneMinusTheta{theta * pair.x0s + (1.0 - theta) * pair.x1s, pair.q};
  NormIndex xHalf{0.5 * (pair.x0s + pair.x1s), pair.q};
  for (const auto& probe : probes) {
    WienerBank bank{1, dt, seed, 0, 1.0};
    TimeSeries input;
    input.weight = tw;
    TimeSeries sol;
    sol.weight = tw;
    SpectralField u = SpectralField::zero(rhs.grid);
    sol.mesh.push_back(0.0);
    sol.states.push_back(u);
    input.mesh.push_back(0.0);
    input.states.push_back(probe.forcing(0.0));
    for (long long i = 0; i < nSteps; ++i) {
      SpectralField f = probe.forcing(i * dt);
      SpectralField next = SpectralField::zero(rhs.grid);
      for (std::size_t n = 0; n < u.coeffs[0].size(); ++n) {
        double sym = rhs.linearSymbol[n];
        double e = std::exp(dt * sym);
        Complex force = f.coeffs[0][n];
        if (probe.stochastic) {
          next.coeffs[0][n] = e * (u.coeffs[0][n] + force * bank.increment(0, i));
        } else {
          next.coeffs[0][n] = e * u.coeffs[0][n] + phi1(dt * sym) * dt * force;
        }
      }
      u = next;
      sol.mesh.push_back((i + 1) * dt);
      sol.states.push_back(u);
      if (i + 1 < nSteps || true) {
        input.mesh.push_back((i + 1) * dt);
        input.states.push_back(probe.forcing((i + 1) * dt));
      }
    }
    double outNorm = gagliardo_time_seminorm(sol, theta, xOneMinusTheta) +
                     weighted_time_norm(sol, x1);
    double inNorm = probe.stochastic ? weighted_time_norm(input, xHalf)
                                     : weighted_time_norm(input, x0);
    if (inNorm > 0) {
      double ratio = outNorm / inNorm;
      if (probe.stochastic)
        est.kSto = std::max(est.kSto, ratio);
      else
        est.kDet = std::max(est.kDet, ratio);
    }
  }
  return est;
}

}  // namespace critspace
