#include "ioprobe/gain.hpp"

#include <cmath>

#include "ioprobe/flows.hpp"

namespace ioprobe {

Rho1Probe rho1(ProbeSession& session, const Signal& u) {
  const double uu = dot(u, u);
  if (!(uu > 0.0)) throw DomainError("rho1 needs a nonzero input");
  GramProbe g = session.gram_apply(u);
  const double value = dot(u, g.gram_u) / uu;
  return {value, std::move(g.y), std::move(g.gram_u)};
}

Signal grad_rho1(const Signal& u, const Signal& gram_u, double value) {
  Signal g = 2.0 * gram_u;
  axpy(-2.0 * value, u, g);
  return g;
}

Signal power_step(ProbeSession& session, const Signal& u) {
  const GramProbe g = session.gram_apply(u);
  const double norm = g.gram_u.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw DegenerateInputError("G^T G u vanished; restart from another input");
  }
  return (1.0 / norm) * g.gram_u;
}

PgPowerStep pg_power_step(ProbeSession& session, const Signal& u) {
  if (session.channels() != 1) throw DimensionError("pg_power needs a SISO plant");
  const double un = u.norm();
  if (!(un > 0.0)) throw DomainError("pg_power_step needs a nonzero input");
  Signal v = reverse(session.evaluate(u));
  const double norm = v.norm();
  if (!(norm > 1e-300) || !std::isfinite(norm)) {
    throw DegenerateInputError("PGu vanished; restart from another input");
  }
  const double rayleigh = dot(u, v) / (un * un);
  return {(1.0 / norm) * v, rayleigh, norm / un};
}

namespace {

class GainRun {
 public:
  GainRun(ProbeSession& s, const GainConfig& cfg)
      : s_(s), cfg_(cfg), start_(s.samples_used()), monitor_(cfg.stop) {}

  GainEstimate run() {
    try {
      switch (cfg_.method) {
        case GainMethod::power: power(); break;
        case GainMethod::pg_power: pg_power(); break;
        case GainMethod::gradient_ascent: ascent(); break;
        case GainMethod::gradient_ascent_linesearch: ascent_linesearch(); break;
        case GainMethod::continuous_flow: flow(); break;
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
  bool affordable(std::size_t cost) const {
    return s_.samples_used() - start_ + cost <= cfg_.stop.max_samples;
  }
  bool at_iteration_cap(std::size_t k) const {
    return cfg_.stop.max_iterations != 0 && k >= cfg_.stop.max_iterations;
  }
  void record(std::size_t k, double rho, double estimate, std::optional<double> alpha,
              const Signal& u) {
    out_.trace.append({k, rho, estimate, alpha, s_.samples_used(), std::nullopt, std::nullopt});
    out_.gamma_hat = estimate;
    out_.u_current = u;
  }

  void power() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    for (std::size_t k = 0; affordable(s_.gram_cost()); ++k) {
      const Rho1Probe p = rho1(s_, u);
      record(k, p.value, std::sqrt(std::max(p.value, 0.0)), std::nullopt, u);
      const double gnorm = grad_rho1(u, p.gram_u, p.value).norm();
      if (monitor_.update(p.value) || gnorm <= cfg_.stop.grad_tol || at_iteration_cap(k)) break;
      const double norm = p.gram_u.norm();
      if (!(norm > 1e-300)) throw DegenerateInputError("G^T G u vanished; restart from another input");
      u = (1.0 / norm) * p.gram_u;
    }
  }

  void pg_power() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    for (std::size_t k = 0; affordable(1); ++k) {
      const PgPowerStep step = pg_power_step(s_, u);
      const double rho = step.output_norm * step.output_norm;
      record(k, rho, step.output_norm, std::nullopt, u);
      // Eigen-residual of PG in place of a gradient.
      Signal residual = step.next;
      axpy(-dot(u, step.next), u, residual);
      if (monitor_.update(step.output_norm) || residual.norm() <= cfg_.stop.grad_tol ||
          at_iteration_cap(k)) {
        break;
      }
      u = step.next;
    }
  }

  void ascent() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    for (std::size_t k = 0; affordable(s_.gram_cost()); ++k) {
      const Rho1Probe p = rho1(s_, u);
      record(k, p.value, std::sqrt(std::max(p.value, 0.0)), cfg_.alpha, u);
      const Signal g = grad_rho1(u, p.gram_u, p.value);
      if (monitor_.update(p.value) || g.norm() <= cfg_.stop.grad_tol || at_iteration_cap(k)) break;
      u = retract(u, cfg_.alpha * g);
    }
  }

  void ascent_linesearch() {
    Signal u = make_initial_input(cfg_.init, s_.channels(), s_.horizon());
    if (!affordable(s_.gram_cost())) return;
    Rho1Probe p = rho1(s_, u);
    Signal gram_u = std::move(p.gram_u);
    double value = p.value;
    record(0, value, std::sqrt(std::max(value, 0.0)), std::nullopt, u);
    monitor_.update(value);
    for (std::size_t k = 1;; ++k) {
      const Signal dir = grad_rho1(u, gram_u, value);
      if (dir.norm() <= cfg_.stop.grad_tol || at_iteration_cap(k - 1)) break;
      if (!affordable(s_.gram_cost())) break;
      const GramProbe gp = s_.gram_apply(dir);
      Eigen::Matrix2d m, n;
      const double off = 0.5 * (dot(dir, gram_u) + dot(u, gp.gram_u));
      m << dot(u, gram_u), off, off, dot(dir, gp.gram_u);
      n << dot(u, u), dot(u, dir), dot(u, dir), dot(dir, dir);
      const double alpha = pencil_step(m, n, true).value_or(cfg_.alpha);

      Signal next = u;
      axpy(alpha, dir, next);
      const double norm = next.norm();
      if (!(norm > 0.0)) throw DegenerateInputError("line search step cancelled the iterate");
      axpy(alpha, gp.gram_u, gram_u);
      u = (1.0 / norm) * next;
      gram_u *= 1.0 / norm;
      value = dot(u, gram_u);
      record(k, value, std::sqrt(std::max(value, 0.0)), alpha, u);
      if (monitor_.update(value)) break;
    }
  }

  void flow() {
    FlowConfig fc = cfg_.flow;
    if (fc.rhs != FlowRhs::oja) fc.rhs = FlowRhs::gain_ascent;
    const FlowState x0{0.0, make_initial_input(cfg_.init, s_.channels(), s_.horizon())};
    FlowResult r = integrate_flow(s_, x0, fc);
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
      const FlowPoint& pt = r.trajectory[k];
      out_.trace.append({k, pt.objective, pt.estimate, std::nullopt, pt.samples, std::nullopt,
                         std::nullopt});
    }
    out_.gamma_hat = std::sqrt(std::max(r.final_objective, 0.0));
    out_.u_current = r.final_state.u;
    out_.flow = std::move(r.trajectory);
  }

  ProbeSession& s_;
  const GainConfig& cfg_;
  std::size_t start_;
  ConvergenceMonitor monitor_;
  GainEstimate out_;
};

}  // namespace

GainEstimate estimate_gain(ProbeSession& session, const GainConfig& cfg) {
  return GainRun(session, cfg).run();
}

}  // namespace ioprobe
