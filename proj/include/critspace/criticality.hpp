#pragma once

// Growth-condition bookkeeping: per-family admissibility gates, critical
// time-weights, critical trace spaces, and brute-force region scans.
//
// Two independent evaluation paths are kept on purpose:
//   * critical_weight builds the growth triples (rho, phi, beta) of each
//     family from the underlying embedding exponents and feeds them through
//     the generic growth inequality rho*(phi - 1 + (1+kappa)/p) + beta <= 1;
//   * region_scan evaluates the per-family closed-form inequalities exactly
//     as they appear in the admissibility statements.
// The two must agree on every point; the tests enforce this.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "critspace/rational.hpp"
#include "critspace/space_index.hpp"

namespace critspace {

struct GrowthTerm {
  Rat rho;   // growth exponent, >= 0
  Rat phi;   // interpolation exponent of the argument space
  Rat beta;  // interpolation exponent of the target-side space
  bool strictInequality = false;  // noise-side terms that forbid equality

  void validate() const {
    if (rho < 0) throw std::domain_error("GrowthTerm: rho must be >= 0");
    if (beta <= 0 || beta > phi || phi >= 1)
      throw std::domain_error("GrowthTerm: need 0 < beta <= phi < 1");
  }
};

struct GrowthSpec {
  std::vector<GrowthTerm> fTerms;
  std::vector<GrowthTerm> gTerms;
  double lipschitzF = 0.0;
  double lipschitzG = 0.0;
};

struct ParamPoint {
  long long d = 1;  // spatial dimension
  Rat p;            // temporal integrability
  Rat q;            // spatial integrability
  Rat kappa;        // time-weight power
  Rat s;            // auxiliary smoothness parameter (family-specific)
};

// ---- equation families ------------------------------------------------------

struct ConservativeRD { Rat h; };        // divergence-form reaction-diffusion
struct ReactionDiffusion { Rat m, h; };  // drift growth m, noise growth h
struct GradientRD { Rat m, eta; };       // gradient nonlinearity, growth m
struct BurgersWhite { Rat h, m; };       // 1-d conservative drift + rough noise
struct AllenCahn {};                     // cubic double-well drift
struct CahnHilliard { Rat h; };          // fourth order, drift growth h
struct PorousMedia { Rat r, m; };        // quasilinear degenerate diffusion
struct WeightedDomainQND { Rat delta, alpha; };  // power-weighted domain setting

using EquationFamily =
    std::variant<ConservativeRD, ReactionDiffusion, GradientRD, BurgersWhite,
                 AllenCahn, CahnHilliard, PorousMedia, WeightedDomainQND>;

struct CriticalReport {
  bool admissible = false;
  std::vector<std::string> failedConditions;
  std::optional<Rat> kappaCrit;
  std::optional<BesovIndex> traceSpace;  // generic real-interpolation value
  std::optional<Rat> traceClosedForm;    // family closed-form smoothness
  bool isCritical = false;
  int bindingTerm = -1;  // index of the term whose inequality saturates
};

// ---- generic growth-condition operations -----------------------------------

// rho*(phi - 1 + (1+kappa)/p) + beta <= 1 (strict if the term demands it).
inline bool subcritical_ok(const GrowthTerm& term, const TimeWeightIndex& tw) {
  term.validate();
  Rat slack = term.phi - 1 + (1 + tw.kappa) / tw.p;
  if (slack <= 0 && term.beta > 1 - (1 + tw.kappa) / tw.p)
    throw std::domain_error("subcritical_ok: term invalid relative to (p,kappa)");
  Rat lhs = term.rho * slack + term.beta;
  return term.strictInequality ? lhs < 1 : lhs <= 1;
}

// The growth exponent that makes the condition above an equality.
inline Rat rho_star(const GrowthTerm& term, const TimeWeightIndex& tw) {
  term.validate();
  Rat den = term.phi - 1 + (1 + tw.kappa) / tw.p;
  if (den <= 0) throw std::domain_error("rho_star: phi must exceed 1 - (1+kappa)/p");
  if (term.beta >= 1) throw std::domain_error("rho_star: beta must be below 1");
  return (1 - term.beta) / den;
}

struct HolderPair {
  Rat invR;       // 1/r
  Rat invRprime;  // 1/r'
};

// The conjugate exponents splitting the time integrability between the
// beta-level and phi-level norms; they always sum to one.
inline HolderPair holder_exponents(const GrowthTerm& term, const TimeWeightIndex& tw) {
  Rat tail = (1 + tw.kappa) / tw.p;
  if (tail <= 0) throw std::domain_error("holder_exponents: degenerate weight tail");
  Rat rs = rho_star(term, tw);
  Rat invRprime = rs * (term.phi - 1 + tail) / tail;
  Rat invR = (term.beta - 1 + tail) / tail;
  if (invR + invRprime != Rat(1))
    throw std::domain_error("holder_exponents: internal conjugacy violated");
  return HolderPair{invR, invRprime};
}

// ---- stand-alone gate checks -----------------------------------------------

// Power-weighted domain window: 2p-1-p/(p(1-delta)+delta) < alpha < 2p-d-2,
// with p > d+2.
inline bool weighted_domain_alpha_ok(const Rat& p, long long d, const Rat& delta,
                                     const Rat& alpha) {
  if (delta <= 0 || delta > 1)
    throw std::domain_error("weighted_domain_alpha_ok: delta must lie in (0,1]");
  if (p <= d + 2) return false;
  Rat lower = 2 * p - 1 - p / (p * (1 - delta) + delta);
  Rat upper = 2 * p - Rat(d) - 2;
  return lower < alpha && alpha < upper;
}

// Degenerate-diffusion gate: r >= 3 and p > 2(1+kappa)+d.
inline bool porous_media_ok(const Rat& r, const ParamPoint& pt) {
  return r >= 3 && pt.p > 2 * (1 + pt.kappa) + Rat(pt.d);
}

// Contraction precondition C1*(L_F*K_det + L_G*K_sto) < 1.
inline bool smallness_condition(const GrowthSpec& spec, double kDet, double kSto,
                                double c1) {
  return c1 * (spec.lipschitzF * kDet + spec.lipschitzG * kSto) < 1.0;
}

// ---- family data -----------------------------------------------------------

namespace detail {

struct GateList {
  std::vector<std::string> failed;
  void require(bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  }
  bool pass() const { return failed.empty(); }
};

// Everything critical_weight / region_scan need about a family at a point.
struct FamilyData {
  std::vector<std::string> structuralFailures;  // parameter/range gates
  std::vector<GrowthTerm> terms;                // generic growth triples
  std::vector<Rat> printedRhs;   // closed-form right-hand sides for (1+kappa)/p
  std::vector<bool> printedStrict;
  SpacePair pair;                // interpolation couple of the family
  Rat traceClosedForm;           // closed-form critical trace smoothness
  Rat criticalRhs;               // E with (1+kappa_crit)/p = E
  int bindingTerm = 0;
  bool supportsCritical = true;
  std::vector<std::string> criticalOnlyFailures;  // extra gates for kappa_crit
};

inline bool twValid(const ParamPoint& pt) {
  if (pt.p < 2) return false;
  if (pt.p == Rat(2)) return pt.kappa == Rat(0);
  return pt.kappa >= 0 && pt.kappa < pt.p / 2 - 1;
}

inline SpacePair makePair(const Rat& lo, const Rat& hi, const Rat& q, int order,
                          ScaleTag tag) {
  return SpacePair{SobolevIndex{lo, q}, SobolevIndex{hi, q}, order, tag};
}

inline FamilyData familyData(const ConservativeRD& fam, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat d(pt.d), h = fam.h, s = pt.s, q = pt.q;
  g.require(pt.d >= 2, "d>=2");
  g.require(h > 1, "h>1");
  g.require(s >= 0 && s < 1, "s in [0,1)");
  g.require(q >= 2, "q>=2");
  if (g.pass()) {
    g.require(q > d * (h - 1) / (h - s * (h - 1)), "q above d(h-1)/(h-s(h-1))");
    if (s > 0) g.require(q < d * (h - 1) / s, "q below d(h-1)/s");
    g.require(pt.p == Rat(2) ? q == Rat(2) : true, "p=2 requires q=2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = ((d / q + s) * (1 - 1 / h) + 1) / 2;
  fd.terms = {GrowthTerm{h - 1, beta1, beta1}};
  fd.criticalRhs = h / (2 * (h - 1)) - (d / q + s) / 2;
  fd.printedRhs = {fd.criticalRhs};
  fd.printedStrict = {false};
  fd.pair = makePair(-1 - s, 1 - s, q, 2, ScaleTag::periodic);
  fd.traceClosedForm = d / q - 1 / (h - 1);
  return fd;
}

inline FamilyData familyData(const ReactionDiffusion& fam, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat d(pt.d), m = fam.m, h = fam.h, q = pt.q;
  g.require(pt.d >= 2, "d>=2");
  g.require(m > 1 + Rat(2) / d, "m>1+2/d");
  g.require(h > 1, "h>1");
  g.require(q >= 2, "q>=2");
  g.require(!(pt.d == 2 && q == Rat(2)), "q!=2 when d=2");
  if (g.pass()) {
    g.require(q > d * (m - 1) / (m + 1), "q above d(m-1)/(m+1)");
    g.require(q < d * (m - 1), "q below d(m-1)");
    g.require(q > d * (h - 1) / h, "q above d(h-1)/h");
    g.require(pt.p == Rat(2) ? q == Rat(2) : true, "p=2 requires q=2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = (d / q + 1) * (1 - 1 / m) / 2;
  Rat beta2 = Rat(1, 2) + (d / (2 * q)) * (1 - 1 / h);
  fd.terms = {GrowthTerm{m - 1, beta1, beta1}, GrowthTerm{h - 1, beta2, beta2}};
  Rat rhsF = m / (m - 1) - (d / q + 1) / 2;
  Rat rhsG = h / (2 * (h - 1)) - d / (2 * q);
  fd.printedRhs = {rhsF, rhsG};
  fd.printedStrict = {false, false};
  fd.pair = makePair(-1, 1, q, 2, ScaleTag::periodic);
  fd.traceClosedForm = d / q - 2 / (m - 1);
  fd.criticalRhs = rhsF;
  fd.bindingTerm = 0;
  GateList c;
  c.require(h == (m + 1) / 2, "criticality requires h=(m+1)/2");
  c.require(m > 1 + Rat(4) / d, "m>1+4/d");
  fd.criticalOnlyFailures = c.failed;
  return fd;
}

inline FamilyData familyData(const GradientRD& fam, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat d(pt.d), m = fam.m, q = pt.q;
  g.require(m > 2, "m>2");
  g.require(fam.eta > 0 && fam.eta < 1, "eta in (0,1)");
  g.require(pt.d >= 2 || m > 3 ||
                (pt.d == 1 && m == Rat(3) && pt.p == Rat(2) && pt.q == Rat(2)),
            "d>=2, or d=1 with m>3, or the d=1,m=3,p=q=2 endpoint");
  g.require(q >= 2, "q>=2");
  if (g.pass()) {
    g.require(q > d * (m - 1) / m, "q above d(m-1)/m");
    g.require(pt.p == Rat(2) ? q == Rat(2) : true, "p=2 requires q=2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = Rat(1, 2) + (d / (2 * q)) * (m - 1) / m;
  fd.terms = {GrowthTerm{m - 1, beta1, beta1}};
  fd.criticalRhs = m / (2 * (m - 1)) - d / (2 * q);
  fd.printedRhs = {fd.criticalRhs};
  fd.printedStrict = {false};
  fd.pair = makePair(0, 2, q, 2, ScaleTag::periodic);
  fd.traceClosedForm = d / q + (m - 2) / (m - 1);
  return fd;
}

inline FamilyData familyData(const BurgersWhite& fam, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat h = fam.h, m = fam.m, s = pt.s, q = pt.q;
  g.require(pt.d == 1, "d=1");
  g.require(s > Rat(1, 2) && s < 1, "s in (1/2,1)");
  g.require(h > 1 / (1 - s), "h>1/(1-s)");
  g.require(m > 1, "m>1");
  g.require(q >= 2, "q>=2");
  if (g.pass()) {
    g.require(q > 1 / (1 - s), "q above 1/(1-s)");
    g.require(q < (h - 1) / s, "q below (h-1)/s");
    g.require(m < h + (1 - h) * (s + 1 / q), "m below h+(1-h)(s+1/q)");
    g.require(pt.p == Rat(2) ? q == Rat(2) : true, "p=2 requires q=2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = ((1 / q + s) * (1 - 1 / h) + 1) / 2;
  Rat beta2 = (1 + s) / 2 + 1 / (2 * q);  // noise side, equality forbidden
  fd.terms = {GrowthTerm{h - 1, beta1, beta1},
              GrowthTerm{m - 1, beta2, beta2, true}};
  Rat rhsF = h / (2 * (h - 1)) - (1 / q + s) / 2;
  Rat rhsG = (m / (2 * (m - 1))) * (1 - s - 1 / q);
  fd.printedRhs = {rhsF, rhsG};
  fd.printedStrict = {false, true};
  fd.pair = makePair(-1 - s, 1 - s, q, 2, ScaleTag::periodic);
  fd.traceClosedForm = 1 / q - 1 / (h - 1);
  fd.criticalRhs = rhsF;
  fd.bindingTerm = 0;
  return fd;
}

inline FamilyData familyData(const AllenCahn&, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat d(pt.d), s = pt.s, q = pt.q;
  g.require(pt.d >= 2, "d>=2");
  g.require(s >= 0 && s < 1, "s in [0,1)");
  g.require(d > 1 + s, "d>1+s");
  g.require(q >= 2, "q>=2");
  if (g.pass()) {
    g.require(q > d / (d - 1 - s), "q above d/(d-1-s)");
    g.require(q > d / (2 - s), "q above d/(2-s)");
    g.require(q < 2 * d / (1 + s), "q below 2d/(1+s)");
    g.require(pt.p > 2, "p>2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = d / (3 * q) + (1 + s) / 3;
  Rat beta2 = (d / q + s) / 4 + Rat(1, 2);
  fd.terms = {GrowthTerm{2, beta1, beta1}, GrowthTerm{1, beta2, beta2}};
  Rat rhs = 1 - d / (2 * q) - s / 2;  // both terms reduce to the same bound
  fd.printedRhs = {rhs, rhs};
  fd.printedStrict = {false, false};
  fd.pair = makePair(-1 - s, 1 - s, q, 2, ScaleTag::dirichlet);
  fd.traceClosedForm = d / q - 1;
  fd.criticalRhs = rhs;
  return fd;
}

inline FamilyData familyData(const CahnHilliard& fam, const ParamPoint& pt) {
  FamilyData fd;
  GateList g;
  Rat d(pt.d), h = fam.h, s = pt.s, q = pt.q;
  g.require(pt.d >= 2, "d>=2");
  g.require(h > 1, "h>1");
  g.require(s >= 0 && s < 2, "s in [0,2)");
  g.require(d > s, "d>s");
  g.require(q >= 2, "q>=2");
  if (g.pass()) {
    g.require(q > d * (h - 1) / (2 * h - s * (h - 1)), "q above d(h-1)/(2h-s(h-1))");
    g.require(q > d / (d - s), "q above d/(d-s)");
    if (s > 0) g.require(q < d * (h - 1) / s, "q below d(h-1)/s");
    g.require(pt.p == Rat(2) ? q == Rat(2) : true, "p=2 requires q=2");
  }
  fd.structuralFailures = g.failed;
  if (!g.pass()) return fd;
  Rat beta1 = (d / q + s) * (1 - 1 / h) / 4 + Rat(1, 2);
  fd.terms = {GrowthTerm{h - 1, beta1, beta1}};
  fd.criticalRhs = h / (2 * (h - 1)) - (s + d / q) / 4;
  fd.printedRhs = {fd.criticalRhs};
  fd.printedStrict = {false};
  fd.pair = makePair(-2 - s, 2 - s, q, 4, ScaleTag::bilaplacian_neumann);
  fd.traceClosedForm = d / q - 2 / (h - 1);
  return fd;
}

}  // namespace detail

// Public access to the growth triples a family generates at a point (used by
// the mixed space-time norm and the fixed-point machinery).
inline std::vector<GrowthTerm> family_growth_terms(const EquationFamily& family,
                                                   const ParamPoint& pt) {
  return std::visit(
      [&](const auto& fam) -> std::vector<GrowthTerm> {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PorousMedia> ||
                      std::is_same_v<T, WeightedDomainQND>) {
          throw std::domain_error("family has no growth-triple representation");
        } else {
          auto fd = detail::familyData(fam, pt);
          if (!fd.structuralFailures.empty())
            throw std::domain_error("family_growth_terms: point fails gate '" +
                                    fd.structuralFailures.front() + "'");
          return fd.terms;
        }
      },
      family);
}

inline CriticalReport critical_weight(const EquationFamily& family, const ParamPoint& pt) {
  CriticalReport rep;

  // The two gate-only families short-circuit.
  if (const auto* pm = std::get_if<PorousMedia>(&family)) {
    rep.admissible = porous_media_ok(pm->r, pt);
    if (!rep.admissible) rep.failedConditions.push_back("r>=3 and p>2(1+kappa)+d");
    return rep;
  }
  if (const auto* wq = std::get_if<WeightedDomainQND>(&family)) {
    rep.admissible = weighted_domain_alpha_ok(pt.p, pt.d, wq->delta, wq->alpha);
    if (!rep.admissible)
      rep.failedConditions.push_back("alpha window for the weighted domain");
    return rep;
  }

  auto fd = std::visit(
      [&](const auto& fam) -> detail::FamilyData {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PorousMedia> ||
                      std::is_same_v<T, WeightedDomainQND>) {
          return detail::FamilyData{};  // unreachable
        } else {
          return detail::familyData(fam, pt);
        }
      },
      family);

  rep.failedConditions = fd.structuralFailures;
  bool twOk = detail::twValid(pt);
  if (!twOk) rep.failedConditions.push_back("kappa in [0,p/2-1) (0 if p=2)");
  if (!rep.failedConditions.empty()) {
    rep.admissible = false;
    return rep;
  }

  TimeWeightIndex tw{pt.p, pt.kappa};
  rep.traceSpace = trace_space(fd.pair, tw);

  // Generic growth-condition admissibility of the supplied point.
  bool allOk = true;
  for (size_t j = 0; j < fd.terms.size(); ++j) {
    if (!subcritical_ok(fd.terms[j], tw)) {
      allOk = false;
      rep.failedConditions.push_back("growth condition of term " + std::to_string(j));
    }
  }
  rep.admissible = allOk;

  // Critical weight: the value of kappa making the binding inequality an
  // equality, when that value lies in the admissible range.
  rep.traceClosedForm = fd.traceClosedForm;
  if (fd.supportsCritical && fd.criticalOnlyFailures.empty()) {
    Rat e = fd.criticalRhs;  // target value of (1+kappa_crit)/p
    bool inRange = e >= 1 / pt.p && e < Rat(1, 2);
    if (pt.p == Rat(2)) inRange = (e == Rat(1, 2));
    if (inRange) {
      Rat kc = pt.p == Rat(2) ? Rat(0) : pt.p * e - 1;
      rep.kappaCrit = kc;
      rep.bindingTerm = fd.bindingTerm;
      rep.isCritical = rep.admissible && pt.kappa == kc;
    } else {
      rep.failedConditions.push_back(
          pt.p == Rat(2) ? "p=2 criticality needs exact equality of the growth bound"
                    : "kappa_crit outside [0,p/2-1)");
    }
  } else {
    for (const auto& f : fd.criticalOnlyFailures) rep.failedConditions.push_back(f);
  }
  return rep;
}

struct ScanEntry {
  ParamPoint point;
  bool admissible = false;
};

// Brute-force oracle: evaluates the printed closed-form inequalities of the
// family statement at every grid point, independently of critical_weight.
inline std::vector<ScanEntry> region_scan(const EquationFamily& family,
                                          const std::vector<Rat>& ps,
                                          const std::vector<Rat>& qs,
                                          const std::vector<Rat>& kappas,
                                          const std::vector<Rat>& ss,
                                          long long d) {
  std::vector<ScanEntry> out;
  for (const auto& p : ps)
    for (const auto& q : qs)
      for (const auto& kappa : kappas)
        for (const auto& s : ss) {
          ParamPoint pt{d, p, q, kappa, s};
          ScanEntry e{pt, false};
          bool ok = detail::twValid(pt);
          if (ok) {
            auto fd = std::visit(
                [&](const auto& fam) -> detail::FamilyData {
                  using T = std::decay_t<decltype(fam)>;
                  if constexpr (std::is_same_v<T, PorousMedia> ||
                                std::is_same_v<T, WeightedDomainQND>) {
                    throw std::domain_error("region_scan: family not supported");
                  } else {
                    return detail::familyData(fam, pt);
                  }
                },
                family);
            ok = fd.structuralFailures.empty();
            if (ok) {
              Rat tail = (1 + kappa) / p;
              for (size_t j = 0; j < fd.printedRhs.size() && ok; ++j)
                ok = fd.printedStrict[j] ? tail < fd.printedRhs[j]
                                         : tail <= fd.printedRhs[j];
            }
          }
          e.admissible = ok;
          out.push_back(e);
        }
  return out;
}

}  // namespace critspace
