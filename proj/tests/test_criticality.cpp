#include <catch2/catch_amalgamated.hpp>

#include "critspace/criticality.hpp"

using namespace critspace;

TEST_CASE("growth condition arithmetic") {
  TimeWeightIndex tw{rat(4), rat(1)};
  // rho=0: the condition degenerates to beta <= 1.
  CHECK(subcritical_ok(GrowthTerm{rat(0), rat(9, 10), rat(9, 10)}, tw));
  // rho=3, phi=beta=0.9, (1+kappa)/p=1/2: 3*(0.4)+0.9 = 2.1 > 1.
  CHECK_FALSE(subcritical_ok(GrowthTerm{rat(3), rat(9, 10), rat(9, 10)}, tw));
  // Equality passes for non-strict terms and fails for strict ones.
  GrowthTerm eq{rat(2), rat(3, 4), rat(3, 4)};
  // 2*(3/4 - 1 + 1/2) + 3/4 = 1/2 + 3/4 != 1; build an exact equality instead:
  // rho*(phi-1+tail)+beta = 1 with phi=beta=4/5, tail=1/2: rho = (1/5)/(3/10) = 2/3.
  GrowthTerm ex{rat(2, 3), rat(4, 5), rat(4, 5)};
  CHECK(subcritical_ok(ex, tw));
  GrowthTerm exStrict = ex;
  exStrict.strictInequality = true;
  CHECK_FALSE(subcritical_ok(exStrict, tw));
  (void)eq;
}

TEST_CASE("critical growth exponent rho_star") {
  TimeWeightIndex tw{rat(4), rat(1)};  // (1+kappa)/p = 1/2
  GrowthTerm t{rat(2), rat(3, 4), rat(1, 2)};
  CHECK(rho_star(t, tw) == rat(2));  // (1/2)/(1/4)
  // idempotence at criticality: phi=beta saturating the bound returns rho.
  GrowthTerm crit{rat(2, 3), rat(4, 5), rat(4, 5)};
  CHECK(rho_star(crit, tw) == rat(2, 3));
  // beta -> 1 drives rho_star -> 0.
  GrowthTerm nearOne{rat(1), rat(999, 1000), rat(999, 1000)};
  CHECK(rho_star(nearOne, tw) < rat(1, 100));
}

TEST_CASE("holder exponents are conjugate") {
  TimeWeightIndex tw{rat(4), rat(1)};
  GrowthTerm t{rat(2), rat(3, 4), rat(1, 2)};
  HolderPair hp = holder_exponents(t, tw);
  CHECK(hp.invR + hp.invRprime == rat(1));
  CHECK(hp.invRprime == rat(1));  // boundary: all mass on the phi level
  CHECK(hp.invR == rat(0));

  TimeWeightIndex tw2{rat(4), rat(0)};
  GrowthTerm t2{rat(2), rat(5, 6), rat(1, 2)};
  HolderPair hp2 = holder_exponents(t2, tw2);
  CHECK(hp2.invR + hp2.invRprime == rat(1));
}

TEST_CASE("intro cubic reaction-diffusion closed form") {
  // d=4, q=3, p=4, cubic drift with h=(m+1)/2=2.
  ReactionDiffusion fam{rat(3), rat(2)};
  ParamPoint pt{4, rat(4), rat(3), rat(1, 3), rat(0)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  REQUIRE(rep.kappaCrit.has_value());
  CHECK(*rep.kappaCrit == rat(1, 3));  // p(1 - d/(2q)) - 1 = 4*(1/3) - 1
  CHECK(rep.isCritical);
  REQUIRE(rep.traceSpace.has_value());
  CHECK(rep.traceSpace->s == rat(1, 3));  // 1 - 2(1+1/3)/4
  CHECK(*rep.traceClosedForm == rat(1, 3));  // d/q - 2/(m-1) = 4/3 - 1
}

TEST_CASE("conservative reaction-diffusion critical weight") {
  ConservativeRD fam{rat(2)};
  ParamPoint pt{3, rat(4), rat(4), rat(1, 2), rat(1, 2)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  REQUIRE(rep.kappaCrit.has_value());
  CHECK(*rep.kappaCrit == rat(1, 2));
  REQUIRE(rep.traceSpace.has_value());
  CHECK(rep.traceSpace->s == rat(-1, 4));
  CHECK(*rep.traceClosedForm == rat(-1, 4));  // d/q - 1/(h-1) = 3/4 - 1
  CHECK(rep.traceSpace->s == *rep.traceClosedForm);
}

TEST_CASE("gradient nonlinearity critical weight") {
  GradientRD fam{rat(3), rat(1, 2)};
  ParamPoint pt{2, rat(4), rat(3), rat(2, 3), rat(0)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  REQUIRE(rep.kappaCrit.has_value());
  CHECK(*rep.kappaCrit == rat(2, 3));
  REQUIRE(rep.traceSpace.has_value());
  CHECK(rep.traceSpace->s == rat(7, 6));  // d/q + (m-2)/(m-1) = 2/3 + 1/2
  CHECK(*rep.traceClosedForm == rat(7, 6));
}

TEST_CASE("double-well drift critical weight") {
  AllenCahn fam{};
  ParamPoint pt{3, rat(12), rat(2), rat(0), rat(1, 3)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  REQUIRE(rep.kappaCrit.has_value());
  CHECK(*rep.kappaCrit == rat(0));
  REQUIRE(rep.traceSpace.has_value());
  CHECK(rep.traceSpace->s == rat(1, 2));  // d/q - 1 = 3/2 - 1
  CHECK(*rep.traceClosedForm == rat(1, 2));
}

TEST_CASE("fourth-order drift at the hilbert point") {
  // p=q=2, d=3, s=0 forces h = 1 + 4/(2s+d) = 7/3 and kappa_crit = 0.
  CahnHilliard fam{rat(7, 3)};
  ParamPoint pt{3, rat(2), rat(2), rat(0), rat(0)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  REQUIRE(rep.kappaCrit.has_value());
  CHECK(*rep.kappaCrit == rat(0));
  CHECK(rep.isCritical);
  // any other h misses the exact-equality requirement at p=2.
  CahnHilliard off{rat(5, 2)};
  CriticalReport rep2 = critical_weight(off, pt);
  CHECK_FALSE(rep2.kappaCrit.has_value());
}

TEST_CASE("one-dimensional rough-noise drift family") {
  // h=4, s=3/5, q=4, p large enough; m inside the admissible window.
  BurgersWhite fam{rat(4), rat(6, 5)};
  ParamPoint pt{1, rat(10), rat(4), rat(0), rat(3, 5)};
  CriticalReport rep = critical_weight(fam, pt);
  CHECK(rep.admissible);
  CHECK(*rep.traceClosedForm == rat(1, 4) - rat(1, 3));
  // q outside (h-1)/s = 5 fails the window.
  ParamPoint bad = pt;
  bad.q = rat(6);
  CHECK_FALSE(critical_weight(fam, bad).admissible);
}

TEST_CASE("trace space matches the closed form at the critical weight") {
  // For each family with a critical weight in range, the generic
  // real-interpolation trace at kappa_crit equals the family closed form.
  auto check = [](const EquationFamily& fam, ParamPoint pt) {
    CriticalReport pre = critical_weight(fam, pt);
    REQUIRE(pre.kappaCrit.has_value());
    pt.kappa = *pre.kappaCrit;
    CriticalReport rep = critical_weight(fam, pt);
    REQUIRE(rep.traceSpace.has_value());
    CHECK(rep.traceSpace->s == *rep.traceClosedForm);
  };
  check(ConservativeRD{rat(2)}, ParamPoint{3, rat(4), rat(4), rat(0), rat(1, 2)});
  check(ReactionDiffusion{rat(3), rat(2)}, ParamPoint{4, rat(4), rat(3), rat(0), rat(0)});
  check(GradientRD{rat(3), rat(1, 2)}, ParamPoint{2, rat(4), rat(3), rat(0), rat(0)});
  check(AllenCahn{}, ParamPoint{3, rat(12), rat(2), rat(0), rat(1, 3)});
}

TEST_CASE("region scan agrees with the generic growth conditions") {
  ConservativeRD fam{rat(2)};
  std::vector<Rat> ps = {rat(3), rat(4), rat(6)};
  std::vector<Rat> qs = {rat(2), rat(3), rat(4), rat(8)};
  std::vector<Rat> kappas = {rat(0), rat(1, 4), rat(1, 2), rat(1)};
  std::vector<Rat> ss = {rat(0), rat(1, 4), rat(1, 2)};
  auto scan = region_scan(fam, ps, qs, kappas, ss, 3);
  CHECK(scan.size() == ps.size() * qs.size() * kappas.size() * ss.size());
  for (const auto& e : scan) {
    CriticalReport rep = critical_weight(fam, e.point);
    CHECK(rep.admissible == e.admissible);
  }
}

TEST_CASE("region scan q-window exclusion") {
  // conservative RD with q below d(h-1)/(h-s(h-1)) is excluded.
  ConservativeRD fam{rat(2)};
  auto scan = region_scan(fam, {rat(4)}, {rat(2)}, {rat(0)}, {rat(1, 2)}, 3);
  REQUIRE(scan.size() == 1);
  // window: q > 3*1/(2-1/2) = 2 fails at q=2.
  CHECK_FALSE(scan[0].admissible);
  auto ok = region_scan(fam, {rat(4)}, {rat(4)}, {rat(0)}, {rat(1, 2)}, 3);
  CHECK(ok[0].admissible);
}

TEST_CASE("gate-only families") {
  ParamPoint pt{1, rat(6), rat(2), rat(0), rat(0)};
  CHECK(porous_media_ok(rat(3), pt));   // 6 > 2+1
  CHECK_FALSE(porous_media_ok(rat(5, 2), pt));
  ParamPoint boundary{1, rat(3), rat(2), rat(0), rat(0)};
  CHECK_FALSE(porous_media_ok(rat(3), boundary));  // p = 2(1+kappa)+d exactly

  CHECK(weighted_domain_alpha_ok(rat(8), 3, rat(1), rat(10)));  // 7 < 10 < 11
  CHECK_FALSE(weighted_domain_alpha_ok(rat(5), 3, rat(1), rat(4)));  // p = d+2
  // delta = 1 reduces the lower bound to p-1.
  CHECK_FALSE(weighted_domain_alpha_ok(rat(8), 3, rat(1), rat(7)));

  CriticalReport pm = critical_weight(EquationFamily{PorousMedia{rat(3), rat(2)}}, pt);
  CHECK(pm.admissible);
  CriticalReport wq =
      critical_weight(EquationFamily{WeightedDomainQND{rat(1), rat(10)}},
                      ParamPoint{3, rat(8), rat(2), rat(0), rat(0)});
  CHECK(wq.admissible);
}

TEST_CASE("smallness condition") {
  GrowthSpec spec;
  CHECK(smallness_condition(spec, 5.0, 5.0, 10.0));  // zero Lipschitz constants
  spec.lipschitzF = spec.lipschitzG = 0.2;
  CHECK(smallness_condition(spec, 2.0, 2.0, 1.0));   // 0.8 < 1
  spec.lipschitzF = 0.5;
  spec.lipschitzG = 0.0;
  CHECK_FALSE(smallness_condition(spec, 2.0, 0.0, 1.0));  // boundary = 1
}

TEST_CASE("family growth terms surface the binding data") {
  ReactionDiffusion fam{rat(3), rat(2)};
  ParamPoint pt{4, rat(4), rat(3), rat(1, 3), rat(0)};
  auto terms = family_growth_terms(fam, pt);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].rho == rat(2));
  CHECK(terms[1].rho == rat(1));
  CHECK(terms[0].phi == terms[0].beta);
  CHECK_THROWS_AS(
      family_growth_terms(EquationFamily{PorousMedia{rat(3), rat(2)}}, pt),
      std::domain_error);
}
