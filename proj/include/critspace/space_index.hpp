#pragma once

// Exact arithmetic over function-space indices: interpolation, trace spaces,
// Sobolev and temporal embeddings, and scale-identification thresholds.

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>

#include "critspace/rational.hpp"

namespace critspace {

struct SobolevIndex {
  Rat s;  // smoothness
  Rat q;  // integrability exponent, > 1

  void validate() const {
    if (q <= 1) throw std::domain_error("SobolevIndex: q must exceed 1");
  }
};

struct BesovIndex {
  Rat s;  // smoothness
  Rat q;  // integrability exponent, > 1
  Rat p;  // microscopic parameter, > 1

  void validate() const {
    if (q <= 1 || p <= 1) throw std::domain_error("BesovIndex: q,p must exceed 1");
  }
};

struct TimeWeightIndex {
  Rat p;      // temporal integrability, >= 2
  Rat kappa;  // power of the weight t^kappa

  void validate() const {
    if (p < 2) throw std::domain_error("TimeWeightIndex: p must be >= 2");
    if (p == Rat(2)) {
      if (kappa != Rat(0)) throw std::domain_error("TimeWeightIndex: p=2 requires kappa=0");
    } else if (kappa < 0 || kappa >= p / 2 - 1) {
      throw std::domain_error("TimeWeightIndex: kappa must lie in [0, p/2-1)");
    }
  }
};

enum class ScaleTag { periodic, dirichlet, neumann, bilaplacian_neumann };

// An interpolation couple X_1 -> X_0 on a fixed smoothness scale.  The tag
// carries no operator data; it only gates the identification thresholds.
struct SpacePair {
  SobolevIndex x0;
  SobolevIndex x1;
  int operatorOrder = 2;  // 2 or 4
  ScaleTag scaleTag = ScaleTag::periodic;

  void validate() const {
    x0.validate();
    x1.validate();
    if (operatorOrder != 2 && operatorOrder != 4)
      throw std::domain_error("SpacePair: operator order must be 2 or 4");
    if (x0.q != x1.q) throw std::domain_error("SpacePair: endpoints must share q");
    if (x1.s - x0.s != Rat(operatorOrder))
      throw std::domain_error("SpacePair: smoothness gap must equal operator order");
  }
};

// [X_0, X_1]_theta on a Bessel scale: affine interpolation of smoothness.
inline SobolevIndex complex_interpolate(const SpacePair& pair, const Rat& theta) {
  pair.validate();
  if (theta <= 0 || theta >= 1)
    throw std::domain_error("complex_interpolate: theta must lie in (0,1)");
  return SobolevIndex{(1 - theta) * pair.x0.s + theta * pair.x1.s, pair.x0.q};
}

// (X_0, X_1)_{1-(1+kappa)/p, p}: the space of admissible initial data.
inline BesovIndex trace_space(const SpacePair& pair, const TimeWeightIndex& tw) {
  pair.validate();
  tw.validate();
  Rat s = pair.x1.s - Rat(pair.operatorOrder) * (1 + tw.kappa) / tw.p;
  return BesovIndex{s, pair.x0.q, tw.p};
}

// H^{a.s, a.q} embeds in H^{b.s, b.q} on a d-dimensional domain.
inline bool sobolev_embeds(long long d, const SobolevIndex& a, const SobolevIndex& b) {
  if (d < 1) throw std::domain_error("sobolev_embeds: d must be >= 1");
  a.validate();
  b.validate();
  return a.q <= b.q && a.s - Rat(d) / a.q >= b.s - Rat(d) / b.q;
}

// Weighted temporal Sobolev embedding H^{s0,p0}(w_{k0}) -> H^{s1,p1}(w_{k1}),
// with constant independent of the interval length.
// Pure index arithmetic: boundary weights are accepted here so the predicate
// can be evaluated on its own.
inline bool time_embeds(const TimeWeightIndex& tw0, const Rat& s0,
                        const TimeWeightIndex& tw1, const Rat& s1) {
  return tw0.p <= tw1.p && tw1.kappa / tw1.p <= tw0.kappa / tw0.p &&
         s0 - (1 + tw0.kappa) / tw0.p >= s1 - (1 + tw1.kappa) / tw1.p;
}

struct MixedIndex {
  Rat p;
  Rat kappa;
  Rat s;
};

// Index arithmetic of the mixed-derivative inequality: interpolation of the
// temporal integrability, weight, and smoothness between two endpoints.
inline MixedIndex mixed_derivative_index(const Rat& p0, const Rat& k0, const Rat& s0,
                                         const Rat& p1, const Rat& k1, const Rat& s1,
                                         const Rat& theta) {
  if (theta < 0 || theta > 1)
    throw std::domain_error("mixed_derivative_index: theta must lie in [0,1]");
  if (p0 <= 0 || p1 <= 0) throw std::domain_error("mixed_derivative_index: p must be positive");
  Rat s = (1 - theta) * s0 + theta * s1;
  Rat invP = (1 - theta) / p0 + theta / p1;
  Rat p = 1 / invP;
  Rat kappa = (1 - theta) * (p / p0) * k0 + theta * (p / p1) * k1;
  return MixedIndex{p, kappa, s};
}

// Continuous trace onto X_theta exists iff theta > (1+kappa)/p, strictly.
// The equality case is systematically excluded.
inline bool trace_embedding_ok(const Rat& theta, const TimeWeightIndex& tw) {
  return theta > (1 + tw.kappa) / tw.p;
}

// Unweighted variant: theta > 1/p.
inline bool trace_embedding_ok_unweighted(const Rat& theta, const Rat& p) {
  if (p <= 1) throw std::domain_error("trace_embedding_ok_unweighted: p must exceed 1");
  return theta > 1 / p;
}

struct ScaleIdentification {
  bool identified = false;
  std::string label;  // symbolic description, or the reason it is unidentified
};

// Identification of the extrapolation-interpolation scales with concrete
// function spaces.  Thresholds themselves are reported as unidentified.
inline ScaleIdentification identify_scale_space(ScaleTag tag, const Rat& s, const Rat& q) {
  if (q <= 1) throw std::domain_error("identify_scale_space: q must exceed 1");
  Rat invQ = 1 / q;
  auto plain = [&](const std::string& extra) {
    return ScaleIdentification{true, "plain H^{s,q}" + extra};
  };
  if (s < 0) {
    // Negative smoothness resolves by duality against the adjoint scale.
    return ScaleIdentification{true, "dual of the adjoint-scale space of smoothness -s"};
  }
  switch (tag) {
    case ScaleTag::periodic:
      return plain(" (periodic)");
    case ScaleTag::dirichlet: {
      if (s < 0 || s > 2) throw std::domain_error("dirichlet scale: s must lie in [0,2]");
      if (s == Rat(0)) return plain("");
      if (s == invQ) return ScaleIdentification{false, "unidentified: s equals the threshold 1/q"};
      if (s < invQ) return plain("");
      if (s == Rat(2)) return ScaleIdentification{true, "zero-trace subspace of H^{2,q}"};
      return ScaleIdentification{true, "zero-trace subspace of H^{s,q}"};
    }
    case ScaleTag::neumann: {
      if (s < 0 || s > 2) throw std::domain_error("neumann scale: s must lie in [0,2]");
      if (s == Rat(0)) return plain("");
      Rat thr = 1 + invQ;
      if (s == thr) return ScaleIdentification{false, "unidentified: s equals the threshold 1+1/q"};
      if (s < thr) return plain("");
      return ScaleIdentification{true, "zero-normal-derivative subspace of H^{s,q}"};
    }
    case ScaleTag::bilaplacian_neumann: {
      if (s < 0 || s > 4) throw std::domain_error("bilaplacian-neumann scale: s must lie in [0,4]");
      if (s == Rat(0)) return plain("");
      Rat thr1 = 1 + invQ;
      Rat thr2 = 3 + invQ;
      if (s == thr1) return ScaleIdentification{false, "unidentified: s equals the threshold 1+1/q"};
      if (s == thr2) return ScaleIdentification{false, "unidentified: s equals the threshold 3+1/q"};
      if (s < thr1) return plain("");
      if (s < thr2)
        return ScaleIdentification{true, "zero-normal-derivative subspace of H^{s,q}"};
      return ScaleIdentification{
          true, "subspace of H^{s,q} with vanishing normal derivatives of u and of its laplacian"};
    }
  }
  throw std::domain_error("identify_scale_space: unknown scale tag");
}

}  // namespace critspace
