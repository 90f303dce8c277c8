#include "ioprobe/flows.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ioprobe/conic.hpp"
#include "ioprobe/gain.hpp"
#include "ioprobe/passivity.hpp"

namespace ioprobe {

FlowDerivative flow_rhs(ProbeSession& session, FlowRhs rhs, const FlowState& x) {
  const double uu = dot(x.u, x.u);
  if (!(uu > 0.0)) throw DomainError("flow state has a zero u-part");
  FlowDerivative d;
  switch (rhs) {
    case FlowRhs::gain_ascent: {
      const Rho1Probe p = rho1(session, x.u);
      d.objective = p.value;
      // Gradient of the quotient itself, valid off the sphere inside RK stages.
      d.du = (2.0 / uu) * p.gram_u;
      axpy(-2.0 * p.value / uu, x.u, d.du);
      break;
    }
    case FlowRhs::oja: {
      const Rho1Probe p = rho1(session, x.u);
      d.objective = p.value;
      d.du = 2.0 * p.gram_u;
      axpy(-2.0 * dot(x.u, p.gram_u), x.u, d.du);
      break;
    }
    case FlowRhs::passivity_descent: {
      const Rho2Probe p = rho2(session, x.u);
      d.objective = p.value;
      d.du = grad_rho2(x.u, p.sym_u, p.gram_u, p.value);
      d.du *= -1.0;
      break;
    }
    case FlowRhs::conic_saddle: {
      const Rho3Probe p = rho3(session, x.c, x.u);
      d.objective = p.value;
      d.dc = -(2.0 * x.c - dot(x.u, p.sym_u) / uu);
      d.du = (2.0 / uu) * p.gramgram_u;
      axpy(-2.0 * x.c / uu, p.sym_u, d.du);
      axpy(2.0 * (x.c * x.c - p.value) / uu, x.u, d.du);
      break;
    }
  }
  return d;
}

double flow_estimate(FlowRhs rhs, double objective) {
  if (rhs == FlowRhs::passivity_descent) return -objective;
  return std::sqrt(std::max(objective, 0.0));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

Eigen::VectorXd to_eigen(const Signal& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.data().data(), static_cast<Eigen::Index>(u.size()));
}

Signal to_signal(const Eigen::VectorXd& v, std::size_t channels) {
  return Signal(std::vector<double>(v.data(), v.data() + v.size()), channels);
}

struct Stage {
  double c = 0.0;
  Eigen::VectorXd u;
};

Stage to_stage(const FlowState& x) { return {x.c, to_eigen(x.u)}; }

}  // namespace

FlowResult integrate_flow(ProbeSession& session, const FlowState& x0, const FlowConfig& cfg) {
  cfg.validate();
  if (std::abs(x0.u.norm() - 1.0) > 1e-8) throw DomainError("flow needs a unit-norm start");
  const std::size_t channels = session.channels();
  const bool has_c = cfg.rhs == FlowRhs::conic_saddle;

  FlowResult res;
  FlowState x = x0;
  auto eval = [&](const FlowState& s) {
    if (res.rhs_evals >= cfg.max_rhs_evals) {
      res.final_state = x;
      throw FlowFailure("flow exceeded max_rhs_evals = " + std::to_string(cfg.max_rhs_evals), res);
    }
    ++res.rhs_evals;
    return flow_rhs(session, cfg.rhs, s);
  };
  auto record = [&](double tau, const FlowState& s, double objective) {
    res.trajectory.push_back(
        {tau, s.c, objective, flow_estimate(cfg.rhs, objective), session.samples_used()});
  };

  const double h_max = cfg.t_end / static_cast<double>(std::max<std::size_t>(cfg.min_points, 1));
  double tau = 0.0;
  FlowDerivative k1 = eval(x);
  record(tau, x, k1.objective);
  const double fnorm = std::hypot(k1.du.norm(), k1.dc);
  double h = fnorm > 0.0 ? std::min(h_max, 0.01 / fnorm) : h_max;

  std::array<Stage, 7> k;
  while (tau < cfg.t_end * (1.0 - 1e-12)) {
    h = std::min({h, h_max, cfg.t_end - tau});
    if (h < 1e-12 * std::max(1.0, tau)) {
      res.final_state = x;
      throw FlowFailure("flow step size underflow at tau = " + std::to_string(tau), res);
    }
    const Stage y = to_stage(x);
    k[0] = {k1.dc, to_eigen(k1.du)};
    for (int i = 1; i < 7; ++i) {
      Stage s = y;
      for (int j = 0; j < i; ++j) {
        if (kA[i][j] == 0.0) continue;
        s.c += h * kA[i][j] * k[j].c;
        s.u += h * kA[i][j] * k[j].u;
      }
      const FlowDerivative d = eval({s.c, to_signal(s.u, channels)});
      k[i] = {d.dc, to_eigen(d.du)};
    }
    Stage y5 = y, err{0.0, Eigen::VectorXd::Zero(y.u.size())};
    for (int i = 0; i < 7; ++i) {
      y5.c += h * kB5[i] * k[i].c;
      y5.u += h * kB5[i] * k[i].u;
      err.c += h * (kB5[i] - kB4[i]) * k[i].c;
      err.u += h * (kB5[i] - kB4[i]) * k[i].u;
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.u.size(); ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.u(i)), std::abs(y5.u(i)));
      sum += (err.u(i) / sc) * (err.u(i) / sc);
    }
    std::size_t count = static_cast<std::size_t>(y.u.size());
    if (has_c) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y.c), std::abs(y5.c));
      sum += (err.c / sc) * (err.c / sc);
      ++count;
    }
    const double enorm = std::sqrt(sum / static_cast<double>(count));

    if (enorm <= 1.0) {
      tau += h;
      const double norm = y5.u.norm();
      res.max_sphere_drift = std::max(res.max_sphere_drift, std::abs(norm - 1.0));
      x.c = y5.c;
      x.u = to_signal(y5.u / norm, channels);
      ++res.accepted_steps;
      k1 = eval(x);
      record(tau, x, k1.objective);
    } else {
      ++res.rejected_steps;
    }
    const double factor = enorm > 0.0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  res.final_state = x;
  res.final_objective = k1.objective;
  return res;
}

}  // namespace ioprobe
