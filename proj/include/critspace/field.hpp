#pragma once

// Real fields on the torus stored as Hermitian-symmetric Fourier
// coefficients, with fractional-smoothness spatial norms, weighted-in-time
// norms, and the mixed space-time norm controlling critical nonlinearities.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace critspace {

using Complex = std::complex<double>;

struct TorusGrid {
  int d = 1;          // 1 or 2
  int N = 8;          // modes per axis, power of two, >= 8
  double L = 2 * M_PI;  // period

  void validate() const {
    if (d != 1 && d != 2) throw std::domain_error("TorusGrid: d must be 1 or 2");
    if (N < 8 || (N & (N - 1)) != 0)
      throw std::domain_error("TorusGrid: N must be a power of two >= 8");
    if (!(L > 0)) throw std::domain_error("TorusGrid: period must be positive");
  }

  std::size_t total() const { return d == 1 ? N : static_cast<std::size_t>(N) * N; }

  // Integer frequency of storage slot n along one axis.
  int freq(int n) const { return n <= N / 2 ? n : n - N; }

  // Physical wavenumber of an integer frequency.
  double wavenumber(int m) const { return 2.0 * M_PI * m / L; }

  bool operator==(const TorusGrid& o) const { return d == o.d && N == o.N && L == o.L; }
};

namespace fftdetail {

struct PlanKey {
  int d, N, sign;
  bool operator<(const PlanKey& o) const {
    return std::tie(d, N, sign) < std::tie(o.d, o.N, o.sign);
  }
};

// Plans are cached per grid shape; FFTW_UNALIGNED lets them run on any buffer.
inline fftw_plan plan_for(int d, int N, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  PlanKey key{d, N, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t total = d == 1 ? N : static_cast<std::size_t>(N) * N;
  std::vector<Complex> buf(total);
  auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan p = d == 1 ? fftw_plan_dft_1d(N, raw, raw, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED)
                       : fftw_plan_dft_2d(N, N, raw, raw, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

inline void transform(std::vector<Complex>& data, int d, int N, int sign) {
  auto* raw = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(d, N, sign), raw, raw);
}

}  // namespace fftdetail

// A real field; coefficients follow the convention u(x) = sum_k c_k e^{ikx}.
struct SpectralField {
  TorusGrid grid;
  int components = 1;
  std::vector<std::vector<Complex>> coeffs;  // per component, FFTW slot order

  static SpectralField zero(const TorusGrid& g, int comps = 1) {
    g.validate();
    SpectralField f;
    f.grid = g;
    f.components = comps;
    f.coeffs.assign(comps, std::vector<Complex>(g.total(), Complex(0, 0)));
    return f;
  }

  Complex& at(int c, int n) { return coeffs[c][n]; }
  const Complex& at(int c, int n) const { return coeffs[c][n]; }
  Complex& at2(int c, int nx, int ny) { return coeffs[c][static_cast<std::size_t>(nx) * grid.N + ny]; }

  bool sameShape(const SpectralField& o) const {
    return grid == o.grid && components == o.components;
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (int c = 0; c < components; ++c)
      for (std::size_t n = 0; n < coeffs[c].size(); ++n) coeffs[c][n] += o.coeffs[c][n];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (int c = 0; c < components; ++c)
      for (std::size_t n = 0; n < coeffs[c].size(); ++n) coeffs[c][n] -= o.coeffs[c][n];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& comp : coeffs)
      for (auto& z : comp) z *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool finite() const {
    for (const auto& comp : coeffs)
      for (const auto& z : comp)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  // Projects onto the Hermitian-symmetric (real-field) part.
  void symmetrize() {
    int N = grid.N;
    for (int c = 0; c < components; ++c) {
      if (grid.d == 1) {
        for (int n = 0; n <= N / 2; ++n) {
          int m = (N - n) % N;
          Complex avg = 0.5 * (coeffs[c][n] + std::conj(coeffs[c][m]));
          coeffs[c][n] = avg;
          coeffs[c][m] = std::conj(avg);
          if (n == m) coeffs[c][n] = Complex(avg.real(), 0);
        }
      } else {
        for (int nx = 0; nx < N; ++nx)
          for (int ny = 0; ny < N; ++ny) {
            int mx = (N - nx) % N, my = (N - ny) % N;
            std::size_t a = static_cast<std::size_t>(nx) * N + ny;
            std::size_t b = static_cast<std::size_t>(mx) * N + my;
            if (a > b) continue;
            Complex avg = 0.5 * (coeffs[c][a] + std::conj(coeffs[c][b]));
            coeffs[c][a] = avg;
            coeffs[c][b] = std::conj(avg);
            if (a == b) coeffs[c][a] = Complex(avg.real(), 0);
          }
      }
    }
  }
};

// |k|^2 of storage slot n.
inline double k_squared(const TorusGrid& g, std::size_t n) {
  if (g.d == 1) {
    double k = g.wavenumber(g.freq(static_cast<int>(n)));
    return k * k;
  }
  int nx = static_cast<int>(n) / g.N, ny = static_cast<int>(n) % g.N;
  double kx = g.wavenumber(g.freq(nx)), ky = g.wavenumber(g.freq(ny));
  return kx * kx + ky * ky;
}

// Multiplier (1 + |k|^2)^{s/2}; bessel_potential(-s) inverts bessel_potential(s).
inline SpectralField bessel_potential(const SpectralField& f, double s) {
  SpectralField out = f;
  for (int c = 0; c < f.components; ++c)
    for (std::size_t n = 0; n < f.coeffs[c].size(); ++n)
      out.coeffs[c][n] *= std::pow(1.0 + k_squared(f.grid, n), 0.5 * s);
  return out;
}

// d/dx_axis as the multiplier i*k.
inline SpectralField derivative(const SpectralField& f, int axis = 0) {
  SpectralField out = f;
  int N = f.grid.N;
  for (int c = 0; c < f.components; ++c)
    for (std::size_t n = 0; n < f.coeffs[c].size(); ++n) {
      int m;
      if (f.grid.d == 1) m = f.grid.freq(static_cast<int>(n));
      else m = f.grid.freq(axis == 0 ? static_cast<int>(n) / N : static_cast<int>(n) % N);
      out.coeffs[c][n] *= Complex(0, f.grid.wavenumber(m));
    }
  return out;
}

// Physical samples of one component on an oversampled uniform grid
// (zero-padded spectrum).  factor=1 gives the native grid.
inline std::vector<double> to_physical(const SpectralField& f, int component,
                                       int factor = 1) {
  f.grid.validate();
  int N = f.grid.N, M = N * factor;
  if (f.grid.d == 1) {
    std::vector<Complex> buf(M, Complex(0, 0));
    for (int n = 0; n < N; ++n) {
      int m = f.grid.freq(n);
      buf[(m + M) % M] = f.coeffs[component][n];
    }
    fftdetail::transform(buf, 1, M, FFTW_BACKWARD);
    std::vector<double> out(M);
    for (int i = 0; i < M; ++i) out[i] = buf[i].real();
    return out;
  }
  std::vector<Complex> buf(static_cast<std::size_t>(M) * M, Complex(0, 0));
  for (int nx = 0; nx < N; ++nx)
    for (int ny = 0; ny < N; ++ny) {
      int mx = (f.grid.freq(nx) + M) % M, my = (f.grid.freq(ny) + M) % M;
      buf[static_cast<std::size_t>(mx) * M + my] =
          f.coeffs[component][static_cast<std::size_t>(nx) * N + ny];
    }
  fftdetail::transform(buf, 2, M, FFTW_BACKWARD);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

// Builds a field from physical samples on the native grid.
inline SpectralField from_physical(const TorusGrid& g, const std::vector<double>& values,
                                   int components = 1) {
  g.validate();
  std::size_t total = g.total();
  if (values.size() != total * components)
    throw std::domain_error("from_physical: sample count mismatch");
  SpectralField f = SpectralField::zero(g, components);
  for (int c = 0; c < components; ++c) {
    std::vector<Complex> buf(total);
    for (std::size_t i = 0; i < total; ++i) buf[i] = Complex(values[c * total + i], 0);
    fftdetail::transform(buf, g.d, g.N, FFTW_FORWARD);
    double scale = 1.0 / static_cast<double>(total);
    for (std::size_t i = 0; i < total; ++i) f.coeffs[c][i] = buf[i] * scale;
  }
  return f;
}

struct NormIndex {
  double s = 0.0;
  double q = 2.0;
};

// H^{s,q} norm.  q=2: exact Plancherel sum.  q!=2: Bessel multiplier, 4x
// oversampled inverse transform, composite quadrature (components enter
// through a pointwise l2 sum).
inline double sobolev_norm(const SpectralField& f, const NormIndex& idx) {
  if (idx.q < 2) throw std::domain_error("sobolev_norm: q must be >= 2");
  if (idx.q == 2.0) {
    double acc = 0.0;
    for (int c = 0; c < f.components; ++c)
      for (std::size_t n = 0; n < f.coeffs[c].size(); ++n)
        acc += std::pow(1.0 + k_squared(f.grid, n), idx.s) * std::norm(f.coeffs[c][n]);
    return std::sqrt(acc * std::pow(f.grid.L, f.grid.d));
  }
  SpectralField g = bessel_potential(f, idx.s);
  const int factor = 4;
  int M = f.grid.N * factor;
  std::size_t total = f.grid.d == 1 ? M : static_cast<std::size_t>(M) * M;
  std::vector<std::vector<double>> phys(f.components);
  for (int c = 0; c < f.components; ++c) phys[c] = to_physical(g, c, factor);
  double cell = std::pow(f.grid.L / M, f.grid.d);
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    double e2 = 0.0;
    for (int c = 0; c < f.components; ++c) e2 += phys[c][i] * phys[c][i];
    acc += std::pow(e2, idx.q / 2.0);
  }
  return std::pow(acc * cell, 1.0 / idx.q);
}

// gamma-norm of an l2 bank: pointwise l2 over the bank, then the H^{s,q}
// machinery in space.
inline double ell2_block_norm(const std::vector<SpectralField>& bank, const NormIndex& idx) {
  if (bank.empty()) return 0.0;
  SpectralField stacked = SpectralField::zero(bank.front().grid,
                                              static_cast<int>(bank.size()));
  for (std::size_t n = 0; n < bank.size(); ++n) {
    if (bank[n].components != 1)
      throw std::domain_error("ell2_block_norm: bank entries must be scalar fields");
    stacked.coeffs[n] = bank[n].coeffs[0];
  }
  return sobolev_norm(stacked, idx);
}

struct TimeWeight {
  double p = 2.0;
  double kappa = 0.0;
};

struct TimeSeries {
  std::vector<double> mesh;         // strictly increasing, starting at t0 >= 0
  std::vector<SpectralField> states;
  TimeWeight weight;

  void validate() const {
    if (mesh.empty()) throw std::domain_error("TimeSeries: empty mesh");
    if (mesh.size() != states.size())
      throw std::domain_error("TimeSeries: mesh/state count mismatch");
    for (std::size_t i = 1; i < mesh.size(); ++i)
      if (!(mesh[i] > mesh[i - 1]))
        throw std::domain_error("TimeSeries: mesh must be strictly increasing");
  }
};

// Graded mesh t_i = T (i/M)^gamma with gamma = max(1, 2/(1+kappa)): the
// weight pushes mass away from 0 but the solution is roughest there.
inline std::vector<double> graded_mesh(double T, int M, double kappa) {
  if (M < 1 || !(T > 0)) throw std::domain_error("graded_mesh: bad parameters");
  double gamma = std::max(1.0, 2.0 / (1.0 + kappa));
  std::vector<double> mesh(M + 1);
  for (int i = 0; i <= M; ++i) mesh[i] = T * std::pow(static_cast<double>(i) / M, gamma);
  return mesh;
}

namespace quaddetail {

// 8-point Gauss-Legendre on [-1,1].
inline const double kNodes[8] = {-0.9602898564975363, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
inline const double kWeights[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};

// integral of |interp(n0,n1)(t)|^P * t^kappa over [t0,t1] with n linear.
inline double cell_integral(double t0, double t1, double n0, double n1, double P,
                            double kappa) {
  double h = t1 - t0, acc = 0.0;
  for (int j = 0; j < 8; ++j) {
    double t = t0 + 0.5 * h * (1.0 + kNodes[j]);
    double frac = (t - t0) / h;
    double n = n0 + (n1 - n0) * frac;
    acc += kWeights[j] * std::pow(std::abs(n), P) * std::pow(t, kappa);
  }
  return acc * 0.5 * h;
}

}  // namespace quaddetail

// (int_0^T ||u(t)||_X^P t^kappa dt)^{1/P}; P defaults to the series' own p.
// The norm trajectory is interpolated linearly between mesh points.
inline double weighted_time_norm(const TimeSeries& series, const NormIndex& idx,
                                 std::optional<double> exponent = std::nullopt) {
  series.validate();
  double P = exponent.value_or(series.weight.p);
  double kappa = series.weight.kappa;
  std::vector<double> norms(series.mesh.size());
  for (std::size_t i = 0; i < series.states.size(); ++i)
    norms[i] = sobolev_norm(series.states[i], idx);
  double acc = 0.0;
  if (series.mesh.front() > 0.0)  // leading gap from 0: extend the first value
    acc += quaddetail::cell_integral(0.0, series.mesh.front(), norms.front(),
                                     norms.front(), P, kappa);
  for (std::size_t i = 0; i + 1 < series.mesh.size(); ++i)
    acc += quaddetail::cell_integral(series.mesh[i], series.mesh[i + 1], norms[i],
                                     norms[i + 1], P, kappa);
  return std::pow(acc, 1.0 / P);
}

// Diagnostic surrogate for the fractional time-smoothness norm: discretized
// double integral of ||u(t)-u(tau)||^p / |t-tau|^{1+theta p} * t^kappa plus
// the weighted L^p term.  Equivalence constants to the interpolation-space
// norm are unknown; comparative use only.
inline double gagliardo_time_seminorm(const TimeSeries& series, double theta,
                                      const NormIndex& idx) {
  series.validate();
  double p = series.weight.p, kappa = series.weight.kappa;
  std::size_t n = series.mesh.size();
  std::vector<double> w(n, 0.0);  // trapezoid weights
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double h = series.mesh[i + 1] - series.mesh[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  double dbl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double diff = sobolev_norm(series.states[i] - series.states[j], idx);
      double dt = std::abs(series.mesh[i] - series.mesh[j]);
      dbl += w[i] * w[j] * std::pow(diff, p) / std::pow(dt, 1.0 + theta * p) *
             std::pow(series.mesh[i], kappa);
    }
  double lp = weighted_time_norm(series, idx);
  return std::pow(dbl + std::pow(lp, p), 1.0 / p);
}

// Even reflection about t=T onto [0,2T]; restriction to [0,T] is the input.
inline TimeSeries extend_reflect(const TimeSeries& series, double T) {
  series.validate();
  if (std::abs(series.mesh.back() - T) > 1e-12 * std::max(1.0, T))
    throw std::domain_error("extend_reflect: series must end at T");
  TimeSeries out = series;
  for (std::size_t i = series.mesh.size() - 1; i-- > 0;) {
    out.mesh.push_back(2.0 * T - series.mesh[i]);
    out.states.push_back(series.states[i]);
  }
  return out;
}

// One term of the mixed space-time norm: the time exponents and the two
// interpolation levels it pairs.
struct MixedNormTerm {
  double timeExponentBeta;  // p * r_j
  double timeExponentPhi;   // rho*_j * p * r'_j
  double beta;
  double phi;
};

struct PairIndex {
  double x0s = -1.0;
  double x1s = 1.0;
  double q = 2.0;
};

// The norm of the space controlling the critical nonlinearities: for each
// term, a weighted time norm at the beta level plus one at the phi level.
inline double mathfrakX_norm(const TimeSeries& series,
                             const std::vector<MixedNormTerm>& terms,
                             const PairIndex& pair) {
  double acc = 0.0;
  for (const auto& t : terms) {
    NormIndex betaIdx{(1.0 - t.beta) * pair.x0s + t.beta * pair.x1s, pair.q};
    NormIndex phiIdx{(1.0 - t.phi) * pair.x0s + t.phi * pair.x1s, pair.q};
    acc += weighted_time_norm(series, betaIdx, t.timeExponentBeta);
    if (t.timeExponentPhi > 0)
      acc += weighted_time_norm(series, phiIdx, t.timeExponentPhi);
  }
  return acc;
}

// Pointwise product with the 2/3-rule: exact whenever the true product fits
// the retained band.
inline SpectralField dealias_product(const SpectralField& f, const SpectralField& g) {
  if (!f.sameShape(g) || f.components != 1)
    throw std::domain_error("dealias_product: scalar fields on one grid required");
  int N = f.grid.N;
  int cut = N / 3;
  auto truncate = [&](SpectralField& h) {
    for (std::size_t n = 0; n < h.coeffs[0].size(); ++n) {
      bool keep;
      if (h.grid.d == 1) {
        keep = std::abs(h.grid.freq(static_cast<int>(n))) <= cut;
      } else {
        int nx = static_cast<int>(n) / N, ny = static_cast<int>(n) % N;
        keep = std::abs(h.grid.freq(nx)) <= cut && std::abs(h.grid.freq(ny)) <= cut;
      }
      if (!keep) h.coeffs[0][n] = Complex(0, 0);
    }
  };
  SpectralField a = f, b = g;
  truncate(a);
  truncate(b);
  auto pa = to_physical(a, 0), pb = to_physical(b, 0);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  SpectralField prod = from_physical(f.grid, pa);
  truncate(prod);
  return prod;
}

// ---- serialization ---------------------------------------------------------

// Flat layout: header (d, N, L, components) + row-major coefficient pairs.
inline void write_field_binary(const SpectralField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::int32_t d = f.grid.d, N = f.grid.N, comps = f.components;
  double L = f.grid.L;
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  out.write(reinterpret_cast<const char*>(&N), sizeof N);
  out.write(reinterpret_cast<const char*>(&L), sizeof L);
  out.write(reinterpret_cast<const char*>(&comps), sizeof comps);
  for (const auto& comp : f.coeffs)
    for (const auto& z : comp) {
      double re = z.real(), im = z.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

inline SpectralField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::int32_t d = 0, N = 0, comps = 0;
  double L = 0;
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  in.read(reinterpret_cast<char*>(&N), sizeof N);
  in.read(reinterpret_cast<char*>(&L), sizeof L);
  in.read(reinterpret_cast<char*>(&comps), sizeof comps);
  TorusGrid g{d, N, L};
  SpectralField f = SpectralField::zero(g, comps);
  for (auto& comp : f.coeffs)
    for (auto& z : comp) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      z = Complex(re, im);
    }
  if (!in) throw std::runtime_error("truncated field file " + path);
  return f;
}

}  // namespace critspace
