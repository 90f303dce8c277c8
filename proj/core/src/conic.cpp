#include "ioprobe/conic.hpp"

#include <cmath>

#include "ioprobe/flows.hpp"

namespace ioprobe {

Rho3Probe rho3(ProbeSession& session, double c, const Signal& u) {
  if (!(dot(u, u) > 0.0)) throw DomainError("rho3 needs a nonzero input");
  session.require(1 + 2 * session.adjoint_cost());
  Signal y = session.evaluate(u);
  Signal sym_u = session.adjoint_apply(u);
  Signal gramgram_u = session.adjoint_apply(y);
  sym_u += y;
  const double value = rho3_at(c, u, sym_u, gramgram_u);
  return {value, std::move(y), std::move(sym_u), std::move(gramgram_u)};
}

double rho3_at(double c, const Signal& u, const Signal& sym_u, const Signal& gramgram_u) {
  const double uu = dot(u, u);
  return (dot(u, gramgram_u) - c * dot(u, sym_u)) / uu + c * c;
}

double grad_c_rho3(double c, const Signal& u, const Signal& sym_u) {
  return 2.0 * c - dot(u, sym_u);
}

Signal grad_u_rho3(double c, const Signal& u, const Signal& sym_u, const Signal& gramgram_u,
                   double value) {
  Signal g = 2.0 * gramgram_u;
  axpy(-2.0 * c, sym_u, g);
  axpy(2.0 * (c * c - value), u, g);
  return g;
}

SaddleStep arrow_hurwicz_step(ProbeSession& session, double c, const Signal& u, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("step size must be positive");
  const Rho3Probe p = rho3(session, c, u);
  const double gc = grad_c_rho3(c, u, p.sym_u);
  const Signal gu = grad_u_rho3(c, u, p.sym_u, p.gramgram_u, p.value);
  return {c - alpha * gc, retract(u, alpha * gu), p.value, gc, gu.norm()};
}

SaddleStep uzawa_step(ProbeSession& session, const Signal& u, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("step size must be positive");
  const Rho3Probe p = rho3(session, 0.0, u);
  const double c = 0.5 * dot(u, p.sym_u);
  const double value = rho3_at(c, u, p.sym_u, p.gramgram_u);
  const Signal gu = grad_u_rho3(c, u, p.sym_u, p.gramgram_u, value);
  return {c, retract(u, alpha * gu), value, grad_c_rho3(c, u, p.sym_u), gu.norm()};
}

namespace {

class ConeRun {
 public:
  ConeRun(ProbeSession& s, const ConeConfig& cfg)
      : s_(s), cfg_(cfg), start_(s.samples_used()), monitor_(cfg.stop) {}

  ConeEstimate run() {
    try {
      if (cfg_.method == ConeMethod::continuous_flow) {
        flow();
      } else {
        iterate();
      }
    } catch (const BudgetError& e) {
      throw EstimationBudgetError(e.what(), out_.trace);
    }
    if (out_.trace.empty()) {
      throw EstimationBudgetError("sample allowance too small for a single probe", out_.trace);
    }
    return std::move(out_);
  }

 private:
  void iterate() {
    const std::size_t cost = 1 + 2 * s_.adjoint_cost();
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    double c = cfg_.c0;
    std::optional<double> first;
    std::optional<double> last_c;
    int c_streak = 0;
    for (std::size_t k = 0; s_.samples_used() - start_ + cost <= cfg_.stop.max_samples; ++k) {
      const bool uzawa = cfg_.method == ConeMethod::uzawa;
      SaddleStep step = uzawa ? uzawa_step(s_, u, cfg_.alpha)
                              : arrow_hurwicz_step(s_, c, u, cfg_.alpha);
      // The probed point: (c', u_k) for Uzawa, (c_k, u_k) for Arrow-Hurwicz.
      const double probed_c = uzawa ? step.c : c;
      const double r = std::sqrt(std::max(step.value, 0.0));
      out_.trace.append({k, step.value, r, cfg_.alpha, s_.samples_used(), probed_c, r});
      out_.c_hat = probed_c;
      out_.r_hat = r;
      out_.u_current = u;

      // Uzawa records min_c rho3(c, u_k) <= r_min^2, which cannot run away;
      // a rise from a poorly aligned start is ordinary ascent.
      if (!first) first = step.value;
      if (!uzawa && *first > 0.0 && step.value > cfg_.divergence_factor * *first) {
        throw ConeDivergenceError("rho3 exceeded " + std::to_string(cfg_.divergence_factor) +
                                      "x its initial value; reduce the step size",
                                  out_.trace);
      }

      const bool value_done = monitor_.update(step.value);
      if (last_c) {
        const double tol = cfg_.stop.rel_tol * std::max(1.0, std::abs(probed_c));
        c_streak = std::abs(probed_c - *last_c) <= tol ? c_streak + 1 : 0;
      }
      last_c = probed_c;
      const bool c_done = uzawa || c_streak >= cfg_.stop.patience;
      const bool stationary =
          step.grad_u_norm <= cfg_.stop.grad_tol && std::abs(step.grad_c) <= cfg_.stop.grad_tol;
      const bool capped = cfg_.stop.max_iterations != 0 && k >= cfg_.stop.max_iterations;
      if ((value_done && c_done) || stationary || capped) break;
      c = step.c;
      u = std::move(step.u);
    }
  }

  void flow() {
    FlowConfig fc = cfg_.flow;
    fc.rhs = FlowRhs::conic_saddle;
    const FlowState x0{cfg_.c0, make_initial_input(cfg_.init, s_.channels(), s_.horizon())};
    FlowResult res = integrate_flow(s_, x0, fc);
    for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
      const FlowPoint& pt = res.trajectory[k];
      out_.trace.append({k, pt.objective, pt.estimate, std::nullopt, pt.samples, pt.c, pt.estimate});
    }
    out_.c_hat = res.final_state.c;
    out_.r_hat = std::sqrt(std::max(res.final_objective, 0.0));
    out_.u_current = res.final_state.u;
    out_.flow = std::move(res.trajectory);
  }

  ProbeSession& s_;
  const ConeConfig& cfg_;
  std::size_t start_;
  ConvergenceMonitor monitor_;
  ConeEstimate out_;
};

}  // namespace

ConeEstimate estimate_cone(ProbeSession& session, const ConeConfig& cfg) {
  return ConeRun(session, cfg).run();
}

}  // namespace ioprobe
