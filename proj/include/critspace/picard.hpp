#pragma once

// The truncation functions of the fixed-point construction, the truncated
// right-hand side, the linear solution operator, and Picard iteration with
// contraction measurement.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "critspace/field.hpp"
#include "critspace/noise.hpp"
#include "critspace/simulate.hpp"

namespace critspace {

// Piecewise-linear cutoff: 1 on [0,lambda], linear down to 0 on
// [lambda,2*lambda], Lipschitz with constant 1/lambda.
inline double xi_cutoff(double x, double lambda) {
  if (!(lambda > 0)) throw std::domain_error("xi_cutoff: lambda must be positive");
  if (x <= lambda) return 1.0;
  if (x >= 2.0 * lambda) return 0.0;
  return (2.0 * lambda - x) / lambda;
}

// Norm bookkeeping a truncation needs along a discrete path: all prefix
// functionals are monotone nondecreasing in the time index.
struct RunningFunctionals {
  std::vector<double> mixedNorm;     // ||u||_{X(t_i)} (mixed space-time norm)
  std::vector<double> supTraceDist;  // sup_{s<=t_i} ||u(s)-x||_Tr
  std::vector<double> supTrace;      // sup_{s<=t_i} ||u(s)||_Tr
  std::vector<double> weightedX1;    // ||u||_{L^p(I_{t_i}, w; X_1)}
};

struct ZNormSpec {
  std::vector<MixedNormTerm> xTerms;
  PairIndex pair;
  NormIndex traceIdx;  // surrogate norm for the trace space
  NormIndex x1Idx;
  double auxiliaryM = 0.0;  // weight of the extra L^p(w;X_0) term
  NormIndex x0Idx;
};

inline RunningFunctionals running_functionals(const TimeSeries& series,
                                              const SpectralField& reference,
                                              const ZNormSpec& spec) {
  series.validate();
  RunningFunctionals rf;
  std::size_t n = series.mesh.size();
  rf.mixedNorm.resize(n);
  rf.supTraceDist.resize(n);
  rf.supTrace.resize(n);
  rf.weightedX1.resize(n);
  double supD = 0.0, supT = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    supD = std::max(supD, sobolev_norm(series.states[i] - reference, spec.traceIdx));
    supT = std::max(supT, sobolev_norm(series.states[i], spec.traceIdx));
    rf.supTraceDist[i] = supD;
    rf.supTrace[i] = supT;
    TimeSeries prefix;
    prefix.weight = series.weight;
    prefix.mesh.assign(series.mesh.begin(), series.mesh.begin() + i + 1);
    prefix.states.assign(series.states.begin(), series.states.begin() + i + 1);
    rf.mixedNorm[i] = i == 0 ? 0.0 : mathfrakX_norm(prefix, spec.xTerms, spec.pair);
    rf.weightedX1[i] = i == 0 ? 0.0 : weighted_time_norm(prefix, spec.x1Idx);
  }
  return rf;
}

// Theta_lambda(t_i): cutoff of mixed norm + running trace distance.
inline double theta_truncation(const RunningFunctionals& rf, std::size_t i, double lambda) {
  return xi_cutoff(rf.mixedNorm[i] + rf.supTraceDist[i], lambda);
}

// Psi_lambda(t_i): cutoff of running trace distance + weighted X1 norm.
inline double psi_truncation(const RunningFunctionals& rf, std::size_t i, double lambda) {
  return xi_cutoff(rf.supTraceDist[i] + rf.weightedX1[i], lambda);
}

// Phi_n(t_i): cutoff of weighted X1 norm + running trace norm at level n.
inline double phi_n_truncation(const RunningFunctionals& rf, std::size_t i, int n) {
  if (n < 1) throw std::domain_error("phi_n_truncation: n must be >= 1");
  return xi_cutoff(rf.weightedX1[i] + rf.supTrace[i], static_cast<double>(n));
}

// Declaration of the critical / trace / globally-Lipschitz split of a drift.
struct SemilinearSplit {
  std::function<SpectralField(const SpectralField&, double)> Fc;   // critical part
  std::function<SpectralField(const SpectralField&, double)> FTr;  // trace part
  std::function<SpectralField(const SpectralField&, double)> FL;   // Lipschitz part
  // Quasilinear difference (A(x)-A(u))u; zero for semilinear problems.
  std::function<SpectralField(const SpectralField&, const SpectralField&, double)> quasiDiff;
};

struct TruncatedRhs {
  // Truncated nonlinearity evaluated along a path prefix at mesh index i.
  std::function<SpectralField(const TimeSeries&, const RunningFunctionals&, std::size_t)>
      Ftilde;
  // The shifted deterministic forcing f + F_c(.,0) + F_Tr(.,u0).
  std::function<SpectralField(double)> ftilde;
};

// Builds F_tilde_lambda = Theta_lambda (F_c(u)-F_c(0)) + Psi_lambda [(A(x)-A(u))u
// + F_Tr(u)-F_Tr(x)] + F_L(u) and the shifted forcing.
inline TruncatedRhs truncated_rhs(const SpectralField& reference, double lambda,
                                  const SemilinearSplit& split,
                                  const std::function<SpectralField(double)>& baseForcing,
                                  const TorusGrid& grid) {
  if (!split.Fc && !split.FTr && !split.FL)
    throw std::domain_error("truncated_rhs: the F split must declare at least one part");
  TruncatedRhs out;
  SpectralField x = reference;
  out.Ftilde = [x, lambda, split, grid](const TimeSeries& series,
                                        const RunningFunctionals& rf, std::size_t i) {
    double t = series.mesh[i];
    const SpectralField& u = series.states[i];
    SpectralField acc = SpectralField::zero(grid);
    if (split.Fc) {
      SpectralField centered =
          split.Fc(u, t) - split.Fc(SpectralField::zero(grid), t);
      centered *= theta_truncation(rf, i, lambda);
      acc += centered;
    }
    bool quasi = static_cast<bool>(split.quasiDiff);
    if (split.FTr || quasi) {
      SpectralField part = SpectralField::zero(grid);
      if (quasi) part += split.quasiDiff(x, u, t);
      if (split.FTr) part += split.FTr(u, t) - split.FTr(x, t);
      part *= psi_truncation(rf, i, lambda);
      acc += part;
    }
    if (split.FL) acc += split.FL(u, t);
    return acc;
  };
  out.ftilde = [x, split, baseForcing, grid](double t) {
    SpectralField acc = baseForcing ? baseForcing(t) : SpectralField::zero(grid);
    if (split.Fc) acc += split.Fc(SpectralField::zero(grid), t);
    if (split.FTr) acc += split.FTr(x, t);
    return acc;
  };
  return out;
}

// Pathwise Galerkin solution of the linear problem with supplied forcings via
// the exponential integrator; exactly linear in (w0, f, g).
inline TimeSeries linear_solve(
    const SpectralField& w0, const std::function<SpectralField(std::size_t)>& f,
    const std::function<SpectralField(std::size_t)>& gNoise, const EquationRHS& rhs,
    double dt, long long nSteps, const TimeWeight& tw) {
  TimeSeries series;
  series.weight = tw;
  series.mesh.push_back(0.0);
  series.states.push_back(w0);
  SpectralField u = w0;
  for (long long i = 0; i < nSteps; ++i) {
    SpectralField force = f ? f(static_cast<std::size_t>(i))
                            : SpectralField::zero(rhs.grid);
    SpectralField noise = gNoise ? gNoise(static_cast<std::size_t>(i))
                                 : SpectralField::zero(rhs.grid);
    SpectralField next = SpectralField::zero(rhs.grid);
    for (std::size_t n = 0; n < u.coeffs[0].size(); ++n) {
      double sym = rhs.linearSymbol[n];
      double e = std::exp(dt * sym);
      next.coeffs[0][n] = e * (u.coeffs[0][n] + noise.coeffs[0][n]) +
                          phi1(dt * sym) * dt * force.coeffs[0][n];
    }
    u = next;
    if (!u.finite()) throw BlowUpSignal(i);
    series.mesh.push_back((i + 1) * dt);
    series.states.push_back(u);
  }
  return series;
}

inline double z_norm(const TimeSeries& series, const ZNormSpec& spec) {
  double v = mathfrakX_norm(series, spec.xTerms, spec.pair) +
             weighted_time_norm(series, spec.x1Idx);
  double sup = 0.0;
  for (const auto& st : series.states)
    sup = std::max(sup, sobolev_norm(st, spec.traceIdx));
  v += sup;
  if (spec.auxiliaryM > 0.0)
    v += spec.auxiliaryM * weighted_time_norm(series, spec.x0Idx);
  return v;
}

struct PicardResult {
  TimeSeries fixedPoint;
  std::vector<double> diffs;   // ||v^{k+1}-v^k|| in the Z norm
  std::vector<double> ratios;  // consecutive quotients
  bool converged = false;
  bool diverged = false;       // ratio > 1 three times in a row
  int iterations = 0;
};

// v^{k+1} = R(w0, F_tilde(v^k) + f_tilde, g_tilde), sharing one noise
// realization across iterations.
inline PicardResult picard_iterate(
    const SpectralField& w0, const TruncatedRhs& trunc,
    const std::function<SpectralField(std::size_t)>& gNoise, const EquationRHS& rhs,
    double dt, long long nSteps, const ZNormSpec& spec, const TimeWeight& tw,
    int maxIters, double tol) {
  PicardResult res;
  TimeSeries v;
  v.weight = tw;
  v.mesh.resize(nSteps + 1);
  for (long long i = 0; i <= nSteps; ++i) v.mesh[i] = i * dt;
  v.states.assign(nSteps + 1, w0);

  int badStreak = 0;
  for (int iter = 0; iter < maxIters; ++iter) {
    RunningFunctionals rf = running_functionals(v, w0, spec);
    auto forcing = [&](std::size_t i) {
      SpectralField f = trunc.Ftilde(v, rf, i);
      f += trunc.ftilde(v.mesh[i]);
      return f;
    };
    TimeSeries next = linear_solve(w0, forcing, gNoise, rhs, dt, nSteps, tw);
    TimeSeries diff = next;
    for (std::size_t i = 0; i < diff.states.size(); ++i) diff.states[i] -= v.states[i];
    double dz = z_norm(diff, spec);
    res.diffs.push_back(dz);
    if (res.diffs.size() >= 2) {
      double prev = res.diffs[res.diffs.size() - 2];
      double ratio = prev > 0 ? dz / prev : 0.0;
      res.ratios.push_back(ratio);
      if (ratio > 1.0) {
        if (++badStreak >= 3) {
          res.diverged = true;
          res.fixedPoint = next;
          res.iterations = iter + 1;
          return res;
        }
      } else {
        badStreak = 0;
      }
    }
    v = next;
    res.iterations = iter + 1;
    if (dz < tol) {
      res.converged = true;
      break;
    }
  }
  res.fixedPoint = v;
  return res;
}

// Worst consecutive-difference quotient after the second iteration.
inline double contraction_factor(const std::vector<double>& diffHistory) {
  if (diffHistory.size() < 3)
    throw std::domain_error("contraction_factor: need at least three differences");
  double worst = 0.0;
  for (std::size_t i = 2; i < diffHistory.size(); ++i)
    if (diffHistory[i - 1] > 0)
      worst = std::max(worst, diffHistory[i] / diffHistory[i - 1]);
  return worst;
}

}  // namespace critspace
