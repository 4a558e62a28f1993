// Command-line front end: exposes the library as subcommands with
// reproducible configuration and machine-readable reports.
//
// Exit codes: 0 success, 1 misconfiguration, 2 run-level failure
// (blow-up or non-contraction).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "critspace/criticality.hpp"
#include "critspace/field.hpp"
#include "critspace/noise.hpp"
#include "critspace/parabolicity.hpp"
#include "critspace/picard.hpp"
#include "critspace/scaling.hpp"
#include "critspace/simulate.hpp"
#include "critspace/space_index.hpp"
#include "critspace/version.hpp"

using nlohmann::json;
using namespace critspace;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string configPath;
  std::uint64_t seed = 0;
  std::string outDir;
  int paths = 1;
  double dt = 1e-3;
  int modes = 64;
  bool scan = false;
};

json load_config(const CommonOpts& opts) {
  json cfg = json::object();
  if (!opts.configPath.empty()) {
    std::ifstream in(opts.configPath);
    if (!in) throw std::runtime_error("cannot open config file " + opts.configPath);
    in >> cfg;
  }
  return cfg;
}

void apply_env_overrides(CommonOpts& opts) {
  if (const char* v = std::getenv("CRITSPACE_SEED")) opts.seed = std::stoull(v);
  if (const char* v = std::getenv("CRITSPACE_OUT")) opts.outDir = v;
  if (const char* v = std::getenv("CRITSPACE_PATHS")) opts.paths = std::stoi(v);
  if (const char* v = std::getenv("CRITSPACE_DT")) opts.dt = std::stod(v);
  if (const char* v = std::getenv("CRITSPACE_MODES")) opts.modes = std::stoi(v);
}

void emit_report(const CommonOpts& opts, const std::string& name, json report,
                 const json& configEcho,
                 std::chrono::steady_clock::time_point start) {
  auto dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  report["config"] = configEcho;
  report["seed"] = opts.seed;
  report["version"] = kVersion;
  report["durationSeconds"] = dur.count();
  std::string text = report.dump(2) + "\n";
  if (opts.outDir.empty()) {
    std::cout << text;
  } else {
    std::filesystem::create_directories(opts.outDir);
    std::ofstream out(std::filesystem::path(opts.outDir) / (name + ".json"));
    out << text;
    std::cout << text;
  }
}

Rat jrat(const json& j, const std::string& key, const std::string& fallback) {
  if (j.contains(key)) {
    if (j[key].is_string()) return parse_rational(j[key].get<std::string>());
    if (j[key].is_number_integer()) return Rat(j[key].get<long long>(), 1);
    throw std::runtime_error("config key '" + key + "' must be a rational string");
  }
  return parse_rational(fallback);
}

EquationFamily parse_family(const json& cfg) {
  std::string name = cfg.value("family", "conservativeRD");
  if (name == "conservativeRD") return ConservativeRD{jrat(cfg, "h", "2")};
  if (name == "reactionDiffusion")
    return ReactionDiffusion{jrat(cfg, "m", "3"), jrat(cfg, "hNoise", "2")};
  if (name == "gradientRD") return GradientRD{jrat(cfg, "m", "3"), jrat(cfg, "eta", "1/2")};
  if (name == "burgersWhite")
    return BurgersWhite{jrat(cfg, "h", "6"), jrat(cfg, "mNoise", "2")};
  if (name == "allenCahn") return AllenCahn{};
  if (name == "cahnHilliard") return CahnHilliard{jrat(cfg, "h", "3")};
  if (name == "porousMedia") return PorousMedia{jrat(cfg, "r", "3"), jrat(cfg, "m", "3")};
  if (name == "weightedDomainQND")
    return WeightedDomainQND{jrat(cfg, "delta", "1"), jrat(cfg, "alpha", "10")};
  throw std::runtime_error("unknown family '" + name + "'");
}

json report_from(const CriticalReport& rep) {
  json j;
  j["admissible"] = rep.admissible;
  j["failedConditions"] = rep.failedConditions;
  if (rep.kappaCrit) j["kappaCrit"] = format_rational(*rep.kappaCrit);
  if (rep.traceSpace) {
    j["traceSpace"] = {{"s", format_rational(rep.traceSpace->s)},
                       {"q", format_rational(rep.traceSpace->q)},
                       {"p", format_rational(rep.traceSpace->p)}};
  }
  if (rep.traceClosedForm) j["traceClosedForm"] = format_rational(*rep.traceClosedForm);
  j["isCritical"] = rep.isCritical;
  j["bindingTerm"] = rep.bindingTerm;
  return j;
}

std::vector<Rat> parse_axis(const json& j) {
  std::vector<Rat> out;
  for (const auto& v : j) {
    if (v.is_string()) out.push_back(parse_rational(v.get<std::string>()));
    else out.push_back(Rat(v.get<long long>(), 1));
  }
  return out;
}

int run_critical(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  EquationFamily fam = parse_family(cfg);
  if (opts.scan) {
    auto ps = parse_axis(cfg.at("pGrid"));
    auto qs = parse_axis(cfg.at("qGrid"));
    auto ks = parse_axis(cfg.at("kappaGrid"));
    auto ss = parse_axis(cfg.at("sGrid"));
    long long d = cfg.value("d", 3);
    auto entries = region_scan(fam, ps, qs, ks, ss, d);
    std::string csv = "p,q,kappa,s,admissible,kappaCrit\n";
    for (const auto& e : entries) {
      auto rep = critical_weight(fam, e.point);
      csv += format_rational(e.point.p) + "," + format_rational(e.point.q) + "," +
             format_rational(e.point.kappa) + "," + format_rational(e.point.s) + "," +
             (e.admissible ? "1" : "0") + "," +
             (rep.kappaCrit ? format_rational(*rep.kappaCrit) : "") + "\n";
    }
    if (!opts.outDir.empty()) {
      std::filesystem::create_directories(opts.outDir);
      std::ofstream out(std::filesystem::path(opts.outDir) / "critical_scan.csv");
      out << csv;
    } else {
      std::cout << csv;
    }
    json rep;
    rep["points"] = entries.size();
    emit_report(opts, "critical", rep, cfg, start);
    return 0;
  }
  ParamPoint pt{cfg.value("d", 3ll), jrat(cfg, "p", "4"), jrat(cfg, "q", "4"),
                jrat(cfg, "kappa", "0"), jrat(cfg, "s", "0")};
  auto rep = critical_weight(fam, pt);
  emit_report(opts, "critical", report_from(rep), cfg, start);
  return 0;
}

int run_parabolicity(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  int d = cfg.value("d", 2);
  DiffusionCoeff a;
  a.d = d;
  a.N = 1;
  a.blocks.assign(d * d, Eigen::MatrixXd::Zero(1, 1));
  if (cfg.contains("a")) {
    auto rows = cfg["a"];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a.blocks[i * d + j](0, 0) = rows[i][j].get<double>();
  } else {
    for (int i = 0; i < d; ++i) a.blocks[i * d + i](0, 0) = 1.0;
  }
  NoiseCoeff b;
  b.d = d;
  b.N = 1;
  std::vector<double> flat;
  if (cfg.contains("b"))
    for (const auto& row : cfg["b"])
      for (const auto& v : row) flat.push_back(v.get<double>());
  b.nMax = d > 0 ? static_cast<int>(flat.size()) / d : 0;
  b.b = flat;
  b.b.resize(d * b.nMax, 0.0);
  double margin = ellipticity_margin(a, b);
  double brute = brute_force_margin(a, b, 20000);
  json rep;
  rep["margin"] = margin;
  rep["bruteForceMargin"] = brute;
  rep["pass"] = margin > 0;
  emit_report(opts, "parabolicity", rep, cfg, start);
  return margin > 0 ? 0 : 2;
}

SimFamily parse_sim_family(const std::string& name) {
  if (name == "heat") return SimFamily::heat;
  if (name == "burgers") return SimFamily::burgers;
  if (name == "conservativeRD") return SimFamily::conservativeRD;
  if (name == "reactionDiffusion") return SimFamily::reactionDiffusion;
  if (name == "gradientRD") return SimFamily::gradientRD;
  if (name == "allenCahn") return SimFamily::allenCahn;
  if (name == "massAllenCahn") return SimFamily::massAllenCahn;
  if (name == "cahnHilliard") return SimFamily::cahnHilliard;
  if (name == "porousMedia") return SimFamily::porousMedia;
  throw std::runtime_error("unknown simulation family '" + name + "'");
}

SpectralField initial_field(const TorusGrid& grid, const json& cfg) {
  SpectralField u0 = SpectralField::zero(grid);
  double amp = cfg.value("amplitude", 1.0);
  int mode = cfg.value("mode", 1);
  double offset = cfg.value("offset", 0.0);
  u0.coeffs[0][0] = Complex(offset, 0);
  if (grid.d == 1) {
    u0.coeffs[0][mode] = Complex(0, -0.5 * amp);  // amp * sin(mode * 2pi x / L)
    u0.coeffs[0][grid.N - mode] = Complex(0, 0.5 * amp);
  } else {
    u0.at2(0, mode, 0) = Complex(0, -0.5 * amp);
    u0.at2(0, grid.N - mode, 0) = Complex(0, 0.5 * amp);
  }
  return u0;
}

int run_simulate(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  TorusGrid grid{cfg.value("d", 1), opts.modes, cfg.value("L", 2 * M_PI)};
  SimFamily fam = parse_sim_family(cfg.value("family", "heat"));
  SimParams params;
  params.h = cfg.value("h", 2.0);
  params.m = cfg.value("m", 3.0);
  params.r = cfg.value("r", 3.0);
  NoiseSetup noise;
  if (cfg.contains("gradB")) for (const auto& v : cfg["gradB"]) noise.gradB.push_back(v.get<double>());
  noise.multiplicativeScale = cfg.value("multiplicativeScale", 0.0);
  noise.coloredDelta = cfg.value("coloredDelta", -1.0);
  noise.skipParabolicityCheck = cfg.value("skipParabolicityCheck", false);

  SpectralField u0 = initial_field(grid, cfg);
  EquationRHS rhs = build_equation(fam, params, noise, grid, &u0);
  StepperConfig sc;
  sc.scheme = cfg.value("scheme", std::string("exponentialEuler")) == "semiImplicitEuler"
                  ? Scheme::semiImplicitEuler
                  : Scheme::exponentialEuler;
  sc.dt = opts.dt;
  sc.T = cfg.value("T", 1.0);
  sc.weight = TimeWeight{cfg.value("p", 2.0), cfg.value("kappa", 0.0)};

  std::string csv = "path,t,l2norm,mean\n";
  json rep;
  bool anyBlowUp = false;
  for (int path = 0; path < opts.paths; ++path) {
    WienerBank bank{cfg.value("nDrivers", 4), sc.dt, opts.seed,
                    static_cast<std::uint64_t>(path), 1.0};
    PathResult pr = simulate_path(sc, rhs, u0, bank);
    anyBlowUp = anyBlowUp || pr.blewUp;
    auto means = mean_functional(pr.series);
    for (std::size_t i = 0; i < pr.series.mesh.size(); ++i) {
      csv += std::to_string(path) + "," + fmt17(pr.series.mesh[i]) + "," +
             fmt17(sobolev_norm(pr.series.states[i], NormIndex{0, 2})) + "," +
             fmt17(means[i]) + "\n";
    }
  }
  if (!opts.outDir.empty()) {
    std::filesystem::create_directories(opts.outDir);
    std::ofstream out(std::filesystem::path(opts.outDir) / "simulate.csv");
    out << csv;
  }
  rep["paths"] = opts.paths;
  rep["blowUp"] = anyBlowUp;
  rep["parabolicityMargin"] = rhs.parabolicityMargin;
  emit_report(opts, "simulate", rep, cfg, start);
  return anyBlowUp ? 2 : 0;
}

int run_picard(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  TorusGrid grid{1, opts.modes, cfg.value("L", 2 * M_PI)};
  double T = cfg.value("T", 0.05);
  double lambda = cfg.value("lambda", 0.5);
  double dt = opts.dt;
  long long nSteps = static_cast<long long>(std::llround(T / dt));
  double s = cfg.value("s", 0.75);
  double q = cfg.value("q", 2.0);
  double p = cfg.value("p", 8.0);

  EquationRHS rhs = build_equation(SimFamily::heat, SimParams{}, NoiseSetup{}, grid);
  SemilinearSplit split;
  split.Fc = [](const SpectralField& u, double) {
    SpectralField sq = dealias_product(u, u);
    SpectralField out = derivative(sq, 0);
    out *= -1.0;
    return out;
  };
  SpectralField u0 = initial_field(grid, cfg);
  TruncatedRhs trunc = truncated_rhs(u0, lambda, split, nullptr, grid);

  WienerBank bank{1, dt, opts.seed, 0, 1.0};
  double noiseAmp = cfg.value("noiseAmplitude", 1e-3);
  auto gNoise = [&](std::size_t i) {
    SpectralField f = colored_spatial_field(1.0, grid, bank, static_cast<long long>(i));
    f *= noiseAmp;
    return f;
  };

  ZNormSpec spec;
  spec.pair = PairIndex{-1 - s, 1 - s, q};
  spec.traceIdx = NormIndex{cfg.value("traceSmoothness", 1.0 / q - 0.2), q};
  spec.x1Idx = NormIndex{1 - s, q};
  spec.x0Idx = NormIndex{-1 - s, q};
  spec.xTerms = {MixedNormTerm{2 * p, 2 * p, 0.8, 0.8}};
  TimeWeight tw{p, 0.0};

  PicardResult pr = picard_iterate(u0, trunc, gNoise, rhs, dt, nSteps, spec, tw,
                                   cfg.value("maxIters", 12), cfg.value("tol", 1e-10));
  json rep;
  rep["diffs"] = pr.diffs;
  rep["ratios"] = pr.ratios;
  rep["converged"] = pr.converged;
  rep["diverged"] = pr.diverged;
  rep["iterations"] = pr.iterations;
  emit_report(opts, "picard", rep, cfg, start);
  return pr.diverged ? 2 : 0;
}

int run_scaling(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  EquationFamily fam = parse_family(cfg);
  json rep;
  try {
    PowerMatch pm = drift_noise_power_match(fam);
    rep["driftPower"] = format_rational(pm.driftPower);
    rep["noisePower"] = format_rational(pm.noisePower);
    rep["match"] = pm.match;
  } catch (const std::domain_error&) {
    rep["match"] = nullptr;
  }
  Rat q = jrat(cfg, "q", "4");
  long long d = cfg.value("d", 3ll);
  rep["besovScalingExponent"] =
      format_rational(besov_scaling_exponent(fam, q, jrat(cfg, "p", "4"), d));
  emit_report(opts, "scaling", rep, cfg, start);
  return 0;
}

int run_smr_probe(const CommonOpts& opts) {
  auto start = std::chrono::steady_clock::now();
  json cfg = load_config(opts);
  TorusGrid grid{1, opts.modes, 2 * M_PI};
  EquationRHS rhs = build_equation(SimFamily::heat, SimParams{}, NoiseSetup{}, grid);
  double theta = cfg.value("theta", 0.25);
  TimeWeight tw{cfg.value("p", 4.0), cfg.value("kappa", 0.0)};
  std::vector<SmrProbe> probes;
  for (int mode : {1, 2}) {
    probes.push_back(SmrProbe{[grid, mode](double t) {
                                SpectralField f = SpectralField::zero(grid);
                                f.coeffs[0][mode] = Complex(0, -0.5 * std::cos(t));
                                f.coeffs[0][grid.N - mode] = Complex(0, 0.5 * std::cos(t));
                                return f;
                              },
                              false});
  }
  SmrEstimate est = estimate_smr_constants(rhs, tw, theta, probes, cfg.value("T", 1.0),
                                           opts.dt, PairIndex{-1, 1, 2}, opts.seed);
  json rep;
  rep["kDet"] = est.kDet;
  rep["kSto"] = est.kSto;
  emit_report(opts, "smr_probe", rep, cfg, start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " - critical-space calculus and desk-scale spectral simulation"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.configPath, "JSON configuration file");
  app.add_option("--seed", opts.seed, "RNG seed");
  app.add_option("--out", opts.outDir, "output directory");
  app.add_option("--paths", opts.paths, "number of Monte Carlo paths");
  app.add_option("--dt", opts.dt, "time step");
  app.add_option("--modes", opts.modes, "modes per axis");
  app.add_flag("--scan", opts.scan, "grid scan mode (critical subcommand)");

  auto* cCritical = app.add_subcommand("critical", "admissibility and critical weights");
  auto* cParab = app.add_subcommand("parabolicity", "coercivity margin checks");
  auto* cSim = app.add_subcommand("simulate", "spectral time stepping");
  auto* cPicard = app.add_subcommand("picard", "truncated fixed-point iteration");
  auto* cScaling = app.add_subcommand("scaling", "scaling-exponent algebra");
  auto* cSmr = app.add_subcommand("smr_probe", "empirical regularity constants");

  CLI11_PARSE(app, argc, argv);
  try {
    apply_env_overrides(opts);
    if (cCritical->parsed()) return run_critical(opts);
    if (cParab->parsed()) return run_parabolicity(opts);
    if (cSim->parsed()) return run_simulate(opts);
    if (cPicard->parsed()) return run_picard(opts);
    if (cScaling->parsed()) return run_scaling(opts);
    if (cSmr->parsed()) return run_smr_probe(opts);
  } catch (const BlowUpSignal& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
