#include "ioprobe/passivity.hpp"

#include <cmath>

#include "ioprobe/flows.hpp"

namespace ioprobe {

namespace {

double checked_denominator(const ProbeSession& session, double denom) {
  if (denom > 0.0) return denom;
  if (session.noise().is_noiseless()) {
    throw SingularOperatorError("u^T G^T G u <= 0: G^T G is singular (g0 = 0?)");
  }
  throw NoisyRetryError("noisy u^T G^T G u <= 0; redraw the noise and retry");
}

}  // namespace

Rho2Probe rho2(ProbeSession& session, const Signal& u) {
  const double uu = dot(u, u);
  if (!(uu > 0.0)) throw DomainError("rho2 needs a nonzero input");
  session.require(1 + 2 * session.adjoint_cost());
  Signal y = session.evaluate(u);
  Signal sym_u = session.adjoint_apply(u);
  Signal gram_u = session.adjoint_apply(y);
  sym_u += y;
  const double denom = checked_denominator(session, dot(u, gram_u));
  const double value = 0.5 * dot(u, sym_u) / denom;
  return {value, std::move(y), std::move(sym_u), std::move(gram_u)};
}

Signal grad_rho2(const Signal& u, const Signal& sym_u, const Signal& gram_u, double value) {
  const double denom = dot(u, gram_u);
  Signal g = sym_u;
  axpy(-2.0 * value, gram_u, g);
  g *= 1.0 / denom;
  return g;
}

DirectionProbe probe_direction(ProbeSession& session, const Signal& p) {
  session.require(1 + 2 * session.adjoint_cost());
  const Signal gp = session.evaluate(p);
  Signal sym = session.adjoint_apply(p);
  Signal gram = session.adjoint_apply(gp);
  sym += gp;
  return {std::move(sym), std::move(gram)};
}

LineSearchResult exact_line_search(ProbeSession& session, const Signal& u, const Signal& p,
                                   const Signal& sym_u, const Signal& gram_u,
                                   double fallback_alpha) {
  LineSearchResult out;
  if (p.norm() == 0.0) {
    out.alpha = fallback_alpha;
    out.fallback = true;
    out.direction = {Signal(p.channels(), p.length()), Signal(p.channels(), p.length())};
    return out;
  }
  out.direction = probe_direction(session, p);
  const DirectionProbe& d = out.direction;
  Eigen::Matrix2d m, n;
  const double m01 = 0.25 * (dot(p, sym_u) + dot(u, d.sym));
  const double n01 = 0.5 * (dot(p, gram_u) + dot(u, d.gram));
  m << 0.5 * dot(u, sym_u), m01, m01, 0.5 * dot(p, d.sym);
  n << dot(u, gram_u), n01, n01, dot(p, d.gram);
  const auto alpha = pencil_step(m, n, false);
  out.alpha = alpha.value_or(fallback_alpha);
  out.fallback = !alpha.has_value();
  return out;
}

namespace {

Signal sym_apply(ProbeSession& s, const Signal& u) {
  s.require(1 + s.adjoint_cost());
  Signal sym = s.evaluate(u);
  sym += s.adjoint_apply(u);
  return sym;
}

class PassivityRun {
 public:
  PassivityRun(ProbeSession& s, const PassivityConfig& cfg)
      : s_(s), cfg_(cfg), start_(s.samples_used()), monitor_(cfg.stop) {}

  PassivityEstimate run() {
    try {
      switch (cfg_.method) {
        case PassivityMethod::gradient_descent: descent(); break;
        case PassivityMethod::gradient_descent_linesearch: descent_linesearch(); break;
        case PassivityMethod::continuous_flow: flow(); break;
      }
    } catch (const BudgetError& e) {
      throw EstimationBudgetError(e.what(), out_.trace);
    }
    if (out_.trace.empty()) {
      throw EstimationBudgetError("sample allowance too small for a single probe", out_.trace);
    }
    if (cfg_.estimate_nu) {
      NuEstimate nu = estimate_nu(s_, cfg_.init, cfg_.nu_stop, cfg_.alpha);
      out_.nu_hat = nu.nu_hat;
      out_.nu_trace = std::move(nu.trace);
    }
    return std::move(out_);
  }

 private:
  std::size_t probe_cost() const { return 1 + 2 * s_.adjoint_cost(); }
  bool affordable(std::size_t cost) const {
    return s_.samples_used() - start_ + cost <= cfg_.stop.max_samples;
  }
  bool at_iteration_cap(std::size_t k) const {
    return cfg_.stop.max_iterations != 0 && k >= cfg_.stop.max_iterations;
  }
  void record(std::size_t k, double value, std::optional<double> alpha) {
    out_.trace.append({k, value, -value, alpha, s_.samples_used(), std::nullopt, std::nullopt});
    out_.s_hat = -value;
  }

  void descent() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    for (std::size_t k = 0; affordable(probe_cost()); ++k) {
      Rho2Probe p = rho2(s_, u);
      record(k, p.value, cfg_.alpha);
      const Signal g = grad_rho2(u, p.sym_u, p.gram_u, p.value);
      out_.u_current = u;
      out_.sym_u = std::move(p.sym_u);
      out_.gram_u = std::move(p.gram_u);
      if (monitor_.update(p.value) || g.norm() <= cfg_.stop.grad_tol || at_iteration_cap(k)) break;
      u = retract(u, -cfg_.alpha * g);
    }
  }

  void descent_linesearch() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    if (!affordable(probe_cost())) return;
    Rho2Probe p = rho2(s_, u);
    Signal sym_u = std::move(p.sym_u);
    Signal gram_u = std::move(p.gram_u);
    double value = p.value;
    record(0, value, std::nullopt);
    monitor_.update(value);
    for (std::size_t k = 1;; ++k) {
      out_.u_current = u;
      out_.sym_u = sym_u;
      out_.gram_u = gram_u;
      Signal dir = grad_rho2(u, sym_u, gram_u, value);
      dir *= -1.0;
      if (dir.norm() <= cfg_.stop.grad_tol || at_iteration_cap(k - 1)) break;
      if (!affordable(probe_cost())) break;
      LineSearchResult ls = exact_line_search(s_, u, dir, sym_u, gram_u, cfg_.alpha);

      Signal next = u;
      axpy(ls.alpha, dir, next);
      const double norm = next.norm();
      if (!(norm > 0.0)) throw DegenerateInputError("line search step cancelled the iterate");
      u = (1.0 / norm) * next;
      axpy(ls.alpha, ls.direction.sym, sym_u);
      axpy(ls.alpha, ls.direction.gram, gram_u);
      sym_u *= 1.0 / norm;
      gram_u *= 1.0 / norm;
      value = 0.5 * dot(u, sym_u) / checked_denominator(s_, dot(u, gram_u));
      out_.sym_p = std::move(ls.direction.sym);
      out_.gram_p = std::move(ls.direction.gram);
      record(k, value, ls.alpha);
      if (monitor_.update(value)) {
        out_.u_current = u;
        out_.sym_u = sym_u;
        out_.gram_u = gram_u;
        break;
      }
    }
  }

  void flow() {
    FlowConfig fc = cfg_.flow;
    fc.rhs = FlowRhs::passivity_descent;
    const FlowState x0{0.0, make_initial_input(cfg_.init, s_.channels(), s_.horizon())};
    FlowResult r = integrate_flow(s_, x0, fc);
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
      const FlowPoint& pt = r.trajectory[k];
      out_.trace.append({k, pt.objective, pt.estimate, std::nullopt, pt.samples, std::nullopt,
                         std::nullopt});
    }
    out_.s_hat = -r.final_objective;
    out_.u_current = r.final_state.u;
    out_.flow = std::move(r.trajectory);
  }

  ProbeSession& s_;
  const PassivityConfig& cfg_;
  std::size_t start_;
  ConvergenceMonitor monitor_;
  PassivityEstimate out_;
};

}  // namespace

PassivityEstimate estimate_passivity(ProbeSession& session, const PassivityConfig& cfg) {
  return PassivityRun(session, cfg).run();
}

NuEstimate estimate_nu(ProbeSession& session, const InitialInput& init, const StoppingRule& stop,
                       double fallback_alpha) {
  NuEstimate out;
  const std::size_t start = session.samples_used();
  const std::size_t cost = 1 + session.adjoint_cost();
  auto affordable = [&] { return session.samples_used() - start + cost <= stop.max_samples; };
  ConvergenceMonitor monitor(stop);
  try {
    Signal u = make_initial_input(init, session.channels(), session.horizon());
    if (!affordable()) throw BudgetError("sample allowance too small for a single probe");
    Signal sym_u = sym_apply(session, u);
    double value = 0.5 * dot(u, sym_u);
    out.trace.append({0, value, value, std::nullopt, session.samples_used(), std::nullopt, std::nullopt});
    out.nu_hat = value;
    out.u_current = u;
    monitor.update(value);
    for (std::size_t k = 1;; ++k) {
      Signal dir = sym_u;
      axpy(-dot(u, sym_u), u, dir);
      dir *= -1.0;
      if (dir.norm() <= stop.grad_tol) break;
      if ((stop.max_iterations != 0 && k - 1 >= stop.max_iterations) || !affordable()) break;
      const Signal sym_p = sym_apply(session, dir);
      Eigen::Matrix2d m, n;
      const double m01 = 0.25 * (dot(dir, sym_u) + dot(u, sym_p));
      m << 0.5 * dot(u, sym_u), m01, m01, 0.5 * dot(dir, sym_p);
      n << dot(u, u), dot(u, dir), dot(u, dir), dot(dir, dir);
      const double alpha = pencil_step(m, n, false).value_or(fallback_alpha);
      Signal next = u;
      axpy(alpha, dir, next);
      const double norm = next.norm();
      if (!(norm > 0.0)) throw DegenerateInputError("line search step cancelled the iterate");
      u = (1.0 / norm) * next;
      axpy(alpha, sym_p, sym_u);
      sym_u *= 1.0 / norm;
      value = 0.5 * dot(u, sym_u);
      out.trace.append({k, value, value, alpha, session.samples_used(), std::nullopt, std::nullopt});
      if (value < out.nu_hat) {
        out.nu_hat = value;
        out.u_current = u;
      }
      if (monitor.update(value)) break;
    }
  } catch (const BudgetError& e) {
    throw EstimationBudgetError(e.what(), out.trace);
  }
  return out;
}

}  // namespace ioprobe
