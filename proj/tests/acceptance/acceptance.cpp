// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ioprobe/conic.hpp"
#include "ioprobe/error.hpp"
#include "ioprobe/flows.hpp"
#include "ioprobe/gain.hpp"
#include "ioprobe/lti.hpp"
#include "ioprobe/passivity.hpp"
#include "ioprobe/probe.hpp"
#include "ioprobe/spectra.hpp"
#include "ioprobe/trace.hpp"
#include "ioprobe_cli/config.hpp"
#include "ioprobe_cli/experiment.hpp"

namespace {

using namespace ioprobe;
namespace fs = std::filesystem;

namespace tol {
constexpr double kGradient = 1e-6;
constexpr double kGainAccuracy = 1e-3;
constexpr std::size_t kGainSamples = 500;
constexpr double kPgSampleRatio = 0.55;
constexpr int kPgPlantsNeeded = 16;
constexpr double kOscLow = 0.06, kOscHigh = 0.08;
constexpr std::size_t kOscEarlySamples = 24;
constexpr std::size_t kOscSamples = 3000;
constexpr double kOscRel = 0.10;
constexpr double kConeRel = 0.02;
constexpr double kConeAlpha = 0.002;
constexpr double kNoiseRel = 0.10;
constexpr int kNoiseSeedsNeeded = 8;
constexpr double kNoiseAlpha = 0.01;
constexpr double kNoiseEpsilon = 0.5;
constexpr double kUnbiasedSigmas = 4.0;
constexpr int kUnbiasedDraws = 10000;
constexpr double kFlowRel = 1e-4;
constexpr double kOjaRhs = 1e-12;
constexpr double kSphere = 1e-12;
constexpr double kTangency = 1e-10;
constexpr double kAdjoint = 1e-12;
constexpr double kConvexity = 1e-10;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Signal random_unit(std::mt19937_64& rng, std::size_t channels, std::size_t n) {
  std::normal_distribution<double> normal;
  Signal u(channels, n);
  for (auto& x : u.values()) x = normal(rng);
  return normalized(u);
}

Signal random_tangent(std::mt19937_64& rng, const Signal& u) {
  Signal d = random_unit(rng, u.channels(), u.length());
  axpy(-dot(d, u), u, d);
  return normalized(d);
}

double along_circle(const std::function<double(const Signal&)>& f, const Signal& u, const Signal& d,
                    double h) {
  auto at = [&](double t) {
    Signal x = std::cos(t) * u;
    axpy(std::sin(t), d, x);
    return f(x);
  };
  return (at(h) - at(-h)) / (2.0 * h);
}

/// Samples spent when the trace first reaches rel_tol of `truth`.
std::optional<std::size_t> samples_to(const EstimateTrace& trace, double truth, double rel_tol) {
  for (const auto& row : trace.rows()) {
    if (rel(row.estimate, truth) <= rel_tol) return row.samples;
  }
  return std::nullopt;
}

// --- 1 -------------------------------------------------------------------

Outcome gradients() {
  const std::size_t lengths[] = {16, 64, 256};
  double worst = 0.0;
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> cdist(-2.0, 2.0);
  for (int p = 0; p < 10; ++p) {
    const std::size_t n = lengths[p % 3];
    ProbeSession s(random_stable_plant(100 + p, 1 + p, n));
    const Signal u = random_unit(rng, 1, n);
    const double c = cdist(rng);

    const Rho1Probe r1 = rho1(s, u);
    const Signal g1 = grad_rho1(u, r1.gram_u, r1.value);
    const Rho2Probe r2 = rho2(s, u);
    const Signal g2 = grad_rho2(u, r2.sym_u, r2.gram_u, r2.value);
    const Rho3Probe r3 = rho3(s, c, u);
    const Signal g3 = grad_u_rho3(c, u, r3.sym_u, r3.gramgram_u, r3.value);
    const double gc = grad_c_rho3(c, u, r3.sym_u);

    for (int k = 0; k < 5; ++k) {
      const Signal d = random_tangent(rng, u);
      const double h = 1e-5;
      const double fd1 = along_circle([&](const Signal& x) { return rho1(s, x).value; }, u, d, h);
      const double fd2 = along_circle([&](const Signal& x) { return rho2(s, x).value; }, u, d, h);
      const double fd3 = along_circle([&](const Signal& x) { return rho3(s, c, x).value; }, u, d, h);
      worst = std::max(worst, std::abs(fd1 - dot(g1, d)) / g1.norm());
      worst = std::max(worst, std::abs(fd2 - dot(g2, d)) / g2.norm());
      worst = std::max(worst, std::abs(fd3 - dot(g3, d)) / g3.norm());
    }
    const double hc = 1e-4 * std::max(1.0, std::abs(c));
    const double fdc = (rho3(s, c + hc, u).value - rho3(s, c - hc, u).value) / (2.0 * hc);
    worst = std::max(worst, std::abs(fdc - gc) / std::max(std::abs(gc), 1e-300));
  }
  return {worst <= tol::kGradient, "worst relative error " + fmt("%.2e", worst)};
}

// --- 2 -------------------------------------------------------------------

Outcome oracle_gain() {
  int both_reach = 0, pg_cheaper = 0;
  double worst_ratio = 0.0, best_ratio = 1e300;
  for (int p = 0; p < 20; ++p) {
    const Plant plant(random_stable_plant(1 + p, 20, 200));
    const double gamma = true_gain(plant).gamma;
    GainConfig cfg;
    cfg.init = {InitialInputKind::white, 1, {}};
    cfg.stop.rel_tol = 0.0;
    cfg.stop.grad_tol = 0.0;
    cfg.stop.max_samples = tol::kGainSamples;
    ProbeSession a(plant), b(plant);
    cfg.method = GainMethod::power;
    const GainEstimate power = estimate_gain(a, cfg);
    cfg.method = GainMethod::pg_power;
    const GainEstimate pg = estimate_gain(b, cfg);
    const auto ns_power = samples_to(power.trace, gamma, tol::kGainAccuracy);
    const auto ns_pg = samples_to(pg.trace, gamma, tol::kGainAccuracy);
    if (ns_power && ns_pg) {
      ++both_reach;
      const double ratio = double(*ns_pg) / double(*ns_power);
      worst_ratio = std::max(worst_ratio, ratio);
      best_ratio = std::min(best_ratio, ratio);
      if (ratio <= tol::kPgSampleRatio) ++pg_cheaper;
    }
  }
  const bool a_ok = both_reach == 20;
  const bool b_ok = pg_cheaper >= tol::kPgPlantsNeeded;
  std::ostringstream d;
  d << "(a) " << (a_ok ? "pass" : "FAIL") << ": " << both_reach
    << "/20 plants reach 1e-3 within 500 samples for both methods; (b) " << (b_ok ? "pass" : "FAIL")
    << ": pg/power sample ratio <= 0.55 on " << pg_cheaper << "/20 (ratios "
    << fmt("%.2f", best_ratio) << ".." << fmt("%.2f", worst_ratio) << ")";
  return {a_ok && b_ok, d.str()};
}

// --- 3 -------------------------------------------------------------------

Outcome oscillator() {
  const Plant plant(zoh_discretize(example_oscillator(), 0.01, 1000));
  const double s_true = true_passivity(plant).s;
  const bool a_ok = s_true >= tol::kOscLow && s_true <= tol::kOscHigh;

  PassivityConfig cfg;
  cfg.method = PassivityMethod::gradient_descent_linesearch;
  cfg.init = {InitialInputKind::ones, 1, {}};
  cfg.stop.rel_tol = 0.0;
  cfg.stop.grad_tol = 0.0;
  cfg.stop.max_iterations = 7;
  ProbeSession early(plant);
  const PassivityEstimate e = estimate_passivity(early, cfg);
  std::optional<std::size_t> first_positive;
  for (const auto& row : e.trace.rows()) {
    if (row.estimate > 0.0) {
      first_positive = row.samples;
      break;
    }
  }
  const bool b_ok = first_positive && *first_positive <= tol::kOscEarlySamples;

  cfg.stop.max_iterations = 0;
  cfg.stop.max_samples = tol::kOscSamples;
  ProbeSession full(plant);
  const PassivityEstimate f = estimate_passivity(full, cfg);
  const double err = rel(f.s_hat, s_true);
  const bool c_ok = err <= tol::kOscRel;

  std::ostringstream d;
  d << "(a) s=" << fmt("%.6f", s_true) << (a_ok ? " pass" : " FAIL") << "; (b) s_hat>0 at "
    << (first_positive ? std::to_string(*first_positive) + " samples" : std::string("never"))
    << (b_ok ? " pass" : " FAIL") << "; (c) s_hat=" << fmt("%.6f", f.s_hat) << " after "
    << full.samples_used() << " samples, rel " << fmt("%.2e", err) << (c_ok ? " pass" : " FAIL");
  return {a_ok && b_ok && c_ok, d.str()};
}

// --- 4 -------------------------------------------------------------------

Outcome cone() {
  int admitted = 0, good = 0;
  double worst = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  while (admitted < 10) {
    ++seed;
    const Plant plant(random_stable_plant(seed, 20, 500));
    const DenseOperators ops = materialize(plant);
    const ConeTruth truth = true_cone(ops);
    const Eigen::VectorXd ev = symmetric_eigen(cone_matrix(ops, truth.c_star), false).eigenvalues;
    if (!(tol::kConeAlpha * (ev(0) - ev(ev.size() - 1)) < 1.0)) continue;
    ++admitted;
    seeds.push_back(seed);
    const double gamma = true_gain(ops, 1).gamma;
    // Default stopping rule (rel_tol 1e-6, patience 3).
    ConeConfig cfg;
    cfg.method = ConeMethod::uzawa;
    cfg.alpha = tol::kConeAlpha;
    cfg.stop.max_samples = 300000;
    ProbeSession s(plant);
    const ConeEstimate est = estimate_cone(s, cfg);
    const double err = rel(est.r_hat, truth.r_min);
    worst = std::max(worst, err);
    if (err <= tol::kConeRel && truth.r_min < gamma) ++good;
  }
  std::ostringstream d;
  d << good << "/10 admitted plants within 2% with r_min < gamma (worst rel " << fmt("%.2e", worst)
    << "; seeds";
  for (auto s : seeds) d << ' ' << s;
  d << ")";
  return {good == 10, d.str()};
}

// --- 5 -------------------------------------------------------------------

/// First seed whose G^T G satisfies alpha * (lambda_1 - lambda_n) < 1.
std::uint64_t admitted_noise_plant() {
  for (std::uint64_t seed = 1;; ++seed) {
    const Plant plant(random_stable_plant(seed, 20, 2000));
    if (tol::kNoiseAlpha * conditioning(plant, PropertyProblem::gain).lipschitz_L < 1.0) return seed;
  }
}

Outcome noise() {
  const std::uint64_t seed = admitted_noise_plant();
  const Plant plant(random_stable_plant(seed, 20, 2000));
  const double gamma = true_gain(plant).gamma;
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t ns = 1; ns <= 10; ++ns) {
    GainConfig cfg;
    cfg.method = GainMethod::gradient_ascent;
    cfg.alpha = tol::kNoiseAlpha;
    cfg.init = {InitialInputKind::sine, 1, {}};
    cfg.stop.rel_tol = 0.0;
    cfg.stop.grad_tol = 0.0;
    cfg.stop.max_iterations = 10;
    ProbeSession s(plant, NoiseModel::multiplicative(tol::kNoiseEpsilon, ns));
    const double err = rel(estimate_gain(s, cfg).gamma_hat, gamma);
    worst = std::max(worst, err);
    if (err <= tol::kNoiseRel) ++good;
  }

  const std::size_t n = plant.horizon();
  const Signal u = make_initial_input({InitialInputKind::sine, 1, {}}, 1, n);
  ProbeSession clean(plant);
  const Rho1Probe p0 = rho1(clean, u);
  const Signal g0 = grad_rho1(u, p0.gram_u, p0.value);
  ProbeSession noisy(plant, NoiseModel::multiplicative(tol::kNoiseEpsilon, 77));
  std::vector<double> mean(n, 0.0), sq(n, 0.0);
  for (int i = 0; i < tol::kUnbiasedDraws; ++i) {
    const Rho1Probe p = rho1(noisy, u);
    const Signal g = grad_rho1(u, p.gram_u, p.value);
    for (std::size_t j = 0; j < n; ++j) {
      mean[j] += g[j];
      sq[j] += g[j] * g[j];
    }
  }
  std::size_t outside = 0;
  double worst_z = 0.0;
  const double draws = tol::kUnbiasedDraws;
  for (std::size_t j = 0; j < n; ++j) {
    const double m = mean[j] / draws;
    const double se = std::sqrt(std::max(sq[j] / draws - m * m, 0.0)) / std::sqrt(draws);
    const double dev = std::abs(m - g0[j]);
    if (dev > tol::kUnbiasedSigmas * se + 1e-14) ++outside;
    if (se > 0.0) worst_z = std::max(worst_z, dev / se);
  }
  const bool fixed_ok = good >= tol::kNoiseSeedsNeeded;
  const bool unbiased_ok = outside == 0;
  std::ostringstream d;
  d << "plant seed " << seed << ": " << good << "/10 noise seeds within 10% (worst rel "
    << fmt("%.3f", worst) << ")" << (fixed_ok ? " pass" : " FAIL") << "; unbiasedness: " << outside
    << "/" << n << " components beyond 4 s.e. (max z " << fmt("%.2f", worst_z) << ")"
    << (unbiased_ok ? " pass" : " FAIL");
  return {fixed_ok && unbiased_ok, d.str()};
}

// --- 6 -------------------------------------------------------------------

bool monotone(const std::vector<FlowPoint>& traj, double rel_tol, bool increasing) {
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj[k].tau - traj[k - 1].tau;
    const double slack = 10.0 * rel_tol * std::max(1.0, std::abs(traj[k - 1].objective)) * std::max(dt, 1.0);
    const double step = traj[k].objective - traj[k - 1].objective;
    if (increasing ? step < -slack : step > slack) return false;
  }
  return true;
}

Outcome flows() {
  const Plant plant(random_stable_plant(1, 20, 200));
  const double gamma = true_gain(plant).gamma;
  const double s_true = true_passivity(plant).s;

  // Horizons: the objective error of the gain flow decays like 1/(lambda_1 t),
  // the passivity flow is slower (its speed is scaled by 1/u^T G^T G u).
  FlowConfig cfg;
  cfg.rhs = FlowRhs::gain_ascent;
  cfg.t_end = 20.0;
  cfg.max_rhs_evals = 200000;
  ProbeSession sg(plant);
  const Signal u0 = make_initial_input({InitialInputKind::white, 1, {}}, 1, plant.horizon());
  const FlowResult rg = integrate_flow(sg, {0.0, u0}, cfg);
  const double err_g = rel(rg.final_objective, gamma * gamma);
  const bool mono_g = monotone(rg.trajectory, cfg.rel_tol, true);

  cfg.rhs = FlowRhs::passivity_descent;
  cfg.t_end = 1000.0;
  ProbeSession sp(plant);
  const FlowResult rp = integrate_flow(sp, {0.0, u0}, cfg);
  const double err_p = rel(flow_estimate(FlowRhs::passivity_descent, rp.final_objective), s_true);
  const bool mono_p = monotone(rp.trajectory, cfg.rel_tol, false);

  std::mt19937_64 rng(6);
  ProbeSession so(plant);
  double worst_rhs = 0.0;
  for (int k = 0; k < 20; ++k) {
    const FlowState x{0.0, random_unit(rng, 1, plant.horizon())};
    const FlowDerivative a = flow_rhs(so, FlowRhs::oja, x);
    const FlowDerivative b = flow_rhs(so, FlowRhs::gain_ascent, x);
    worst_rhs = std::max(worst_rhs, (a.du - b.du).norm() / std::max(1.0, a.du.norm()));
  }

  const bool ok = err_g <= tol::kFlowRel && err_p <= tol::kFlowRel && mono_g && mono_p &&
                  worst_rhs <= tol::kOjaRhs;
  std::ostringstream d;
  d << "gain rel " << fmt("%.2e", err_g) << (mono_g ? " monotone" : " NOT monotone")
    << "; passivity rel " << fmt("%.2e", err_p) << (mono_p ? " monotone" : " NOT monotone")
    << "; oja/gradient rhs diff " << fmt("%.1e", worst_rhs);
  return {ok, d.str()};
}

// --- 7 -------------------------------------------------------------------

Outcome invariants() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  std::mt19937_64 rng(7);

  // Sphere preservation over estimator iterates.
  {
    const Plant plant(random_stable_plant(3, 8, 120));
    GainConfig g;
    g.method = GainMethod::gradient_ascent_linesearch;
    g.stop.max_iterations = 30;
    ProbeSession s1(plant);
    check(std::abs(estimate_gain(s1, g).u_current.norm() - 1.0) <= tol::kSphere, "sphere gain");
    PassivityConfig p;
    p.stop.max_iterations = 30;
    ProbeSession s2(plant);
    check(std::abs(estimate_passivity(s2, p).u_current.norm() - 1.0) <= tol::kSphere, "sphere passivity");
    ConeConfig c;
    c.stop.max_iterations = 30;
    ProbeSession s3(plant);
    check(std::abs(estimate_cone(s3, c).u_current.norm() - 1.0) <= tol::kSphere, "sphere cone");
    for (int k = 0; k < 20; ++k) {
      const Signal u = random_unit(rng, 1, 120);
      const Signal step = 0.3 * random_tangent(rng, u);
      check(std::abs(retract(u, step).norm() - 1.0) <= tol::kSphere, "sphere retract");
    }
  }

  // Gradient tangency.
  {
    ProbeSession s(random_stable_plant(4, 6, 80));
    for (int k = 0; k < 20; ++k) {
      const Signal u = random_unit(rng, 1, 80);
      const Rho1Probe r1 = rho1(s, u);
      check(std::abs(dot(grad_rho1(u, r1.gram_u, r1.value), u)) <= tol::kTangency, "tangency rho1");
      const Rho2Probe r2 = rho2(s, u);
      check(std::abs(dot(grad_rho2(u, r2.sym_u, r2.gram_u, r2.value), u)) <= tol::kTangency,
            "tangency rho2");
      const Rho3Probe r3 = rho3(s, 0.5, u);
      check(std::abs(dot(grad_u_rho3(0.5, u, r3.sym_u, r3.gramgram_u, r3.value), u)) <=
                tol::kTangency,
            "tangency rho3");
    }
  }

  // Adjoint identity, 100 pairs.
  {
    ProbeSession s(random_stable_plant(5, 10, 300));
    for (int k = 0; k < 100; ++k) {
      const Signal u = random_unit(rng, 1, 300), v = random_unit(rng, 1, 300);
      check(std::abs(dot(s.evaluate(u), v) - dot(u, s.adjoint_apply(v))) <= tol::kAdjoint,
            "adjoint identity");
    }
  }

  // MIMO adjoint against the dense transpose.
  for (std::size_t m : {2u, 3u}) {
    const Plant plant = random_mimo_plant(9 + m, m, 4, 40);
    const Eigen::MatrixXd g = dense_operator(plant);
    ProbeSession s(plant);
    for (int k = 0; k < 5; ++k) {
      const Signal y = random_unit(rng, m, 40);
      const std::size_t before = s.samples_used();
      const Signal got = s.mimo_adjoint_apply(y);
      check(s.samples_used() - before == m * m, "mimo adjoint cost");
      const Eigen::VectorXd want =
          g.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data().data(), Eigen::Index(y.size()));
      double diff = 0.0;
      for (std::size_t i = 0; i < got.size(); ++i) diff = std::max(diff, std::abs(got[i] - want(Eigen::Index(i))));
      check(diff <= 1e-12 * std::max(1.0, want.norm()), "mimo adjoint m=" + std::to_string(m));
    }
  }

  // Sample accounting.
  {
    const Plant plant(random_stable_plant(6, 6, 50));
    ProbeSession s(plant);
    const Signal u = random_unit(rng, 1, 50);
    std::size_t before = s.samples_used();
    rho1(s, u);
    check(s.samples_used() - before == 2, "cost rho1");
    before = s.samples_used();
    rho2(s, u);
    check(s.samples_used() - before == 3, "cost rho2");
    before = s.samples_used();
    rho3(s, 0.3, u);
    check(s.samples_used() - before == 3, "cost rho3");
    for (std::size_t m : {2u, 3u}) {
      ProbeSession sm(random_mimo_plant(2, m, 3, 20));
      rho1(sm, random_unit(rng, m, 20));
      check(sm.samples_used() == m * m + 1, "cost mimo rho1");
    }

    GainConfig g;
    g.stop.rel_tol = 0.0;
    g.stop.grad_tol = 0.0;
    g.stop.max_iterations = 10;
    const std::pair<GainMethod, std::size_t> per_iter[] = {{GainMethod::power, 2},
                                                           {GainMethod::pg_power, 1},
                                                           {GainMethod::gradient_ascent, 2}};
    for (const auto& [method, cost] : per_iter) {
      g.method = method;
      ProbeSession sg(plant);
      const GainEstimate est = estimate_gain(sg, g);
      bool ok = true;
      for (const auto& row : est.trace.rows()) ok = ok && row.samples == cost * (row.k + 1);
      check(ok, "cost gain " + std::to_string(int(method)));
    }

    PassivityConfig p;
    p.stop.rel_tol = 0.0;
    p.stop.grad_tol = 0.0;
    p.stop.max_iterations = 10;
    ProbeSession sp(plant);
    bool ok = true;
    for (const auto& row : estimate_passivity(sp, p).trace.rows()) ok = ok && row.samples == 3 + 3 * row.k;
    check(ok, "cost passivity 3+3k");

    for (ConeMethod method : {ConeMethod::uzawa, ConeMethod::arrow_hurwicz}) {
      ConeConfig c;
      c.method = method;
      c.stop.rel_tol = 0.0;
      c.stop.grad_tol = 0.0;
      c.stop.max_iterations = 10;
      ProbeSession sc(plant);
      bool cone_ok = true;
      for (const auto& row : estimate_cone(sc, c).trace.rows()) cone_ok = cone_ok && row.samples == 3 * (row.k + 1);
      check(cone_ok, "cost cone");
    }
  }

  // Midpoint convexity of lambda_1(A(c)).
  {
    const DenseOperators ops = materialize(Plant(random_stable_plant(8, 8, 60)));
    auto lambda1 = [&](double c) { return symmetric_eigen(cone_matrix(ops, c), false).eigenvalues[0]; };
    std::uniform_real_distribution<double> cd(-5.0, 5.0);
    for (int k = 0; k < 50; ++k) {
      const double c1 = cd(rng), c2 = cd(rng);
      check(lambda1(0.5 * (c1 + c2)) <= 0.5 * lambda1(c1) + 0.5 * lambda1(c2) + tol::kConvexity,
            "convexity");
    }
  }

  std::sort(failures.begin(), failures.end());
  failures.erase(std::unique(failures.begin(), failures.end()), failures.end());
  std::string detail = "sphere, tangency, adjoint, MIMO adjoint m=2,3, sample costs, convexity";
  if (!failures.empty()) {
    detail = "failed:";
    for (const auto& f : failures) detail += " [" + f + "]";
  }
  return {failures.empty(), detail};
}

// --- 8 -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path configs = IOPROBE_CONFIG_DIR;
  const fs::path scratch = fs::temp_directory_path() / "ioprobe_acceptance_determinism";
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(configs)) {
    if (entry.path().extension() == ".cfg") names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const auto& name : names) {
    const auto cfg = cli::load_experiment(configs / name);
    const fs::path a = scratch / (name + ".a"), b = scratch / (name + ".b");
    fs::remove_all(a);
    fs::remove_all(b);
    for (const auto& dir : {a, b}) {
      if (cfg.compare_methods.empty()) {
        cli::run_experiment(cfg, dir);
      } else {
        cli::compare_experiment(cfg, dir);
      }
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      if (slurp(entry.path()) != slurp(b / entry.path().filename())) {
        differing.push_back(name + ":" + entry.path().filename().string());
      }
    }
  }
  fs::remove_all(scratch);
  std::ostringstream d;
  d << names.size() << " configs, " << files << " files compared, " << differing.size() << " differ";
  for (const auto& f : differing) d << ' ' << f;
  return {differing.empty() && !names.empty(), d.str()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  std::printf("pinned tolerances: gradient %.0e | gain %.0e within %zu samples, pg ratio %.2f on %d/20 |"
              " oscillator s in [%.2f, %.2f], s_hat>0 by %zu samples, %.0f%% after %zu |"
              " cone %.0f%% at alpha %.3f | noise %.0f%% on %d/10 at eps %.1f alpha %.2f, %.0f s.e. over %d |"
              " flow %.0e, rhs %.0e | sphere %.0e, tangency %.0e, adjoint %.0e, convexity %.0e\n",
              tol::kGradient, tol::kGainAccuracy, tol::kGainSamples, tol::kPgSampleRatio,
              tol::kPgPlantsNeeded, tol::kOscLow, tol::kOscHigh, tol::kOscEarlySamples,
              100 * tol::kOscRel, tol::kOscSamples, 100 * tol::kConeRel, tol::kConeAlpha,
              100 * tol::kNoiseRel, tol::kNoiseSeedsNeeded, tol::kNoiseEpsilon, tol::kNoiseAlpha,
              tol::kUnbiasedSigmas, tol::kUnbiasedDraws, tol::kFlowRel, tol::kOjaRhs, tol::kSphere,
              tol::kTangency, tol::kAdjoint, tol::kConvexity);

  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 10, gradients},
      {2, "oracle equivalence (gain)", 60, oracle_gain},
      {3, "oscillator reproduction", 120, oscillator},
      {4, "cone estimation", 120, cone},
      {5, "noise robustness", 180, noise},
      {6, "flow correctness", 60, flows},
      {7, "invariant suite", 60, invariants},
      {8, "determinism", 600, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d %s: %s (%.1f s of %.0f s%s) %s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                secs, c.limit_s, in_time ? "" : ", over time", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
