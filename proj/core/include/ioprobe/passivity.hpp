#pragma once

#include <optional>
#include <vector>

#include "ioprobe/probe.hpp"
#include "ioprobe/trace.hpp"

namespace ioprobe {

struct Rho2Probe {
  double value = 0.0;
  Signal y;       ///< Gu
  Signal sym_u;   ///< Gu + PGPu
  Signal gram_u;  ///< (PG)^2 u
};

/// Generalized Rayleigh quotient 1/2 u^T (G + G^T) u / u^T G^T G u.
/// Three experiments: Gu, PGPu and PG(PGu). A non-positive denominator raises
/// SingularOperatorError (noiseless) or NoisyRetryError (noisy session).
Rho2Probe rho2(ProbeSession& session, const Signal& u);

/// (sym_u - 2 value gram_u) / (u^T gram_u). No samples.
Signal grad_rho2(const Signal& u, const Signal& sym_u, const Signal& gram_u, double value);

/// (G + G^T) v and G^T G v for a reusable direction.
struct DirectionProbe {
  Signal sym;
  Signal gram;
};

/// Probes (p, Gp), (Pp, GPp), (PGp, GPGp): three experiments.
DirectionProbe probe_direction(ProbeSession& session, const Signal& p);

struct LineSearchResult {
  double alpha = 0.0;
  bool fallback = false;
  DirectionProbe direction;
};

/// Minimizes rho2 over span{u, p} through the 2x2 pencil built from cached
/// quantities plus three new experiments for p. Falls back to
/// `fallback_alpha` (flagged) when the pencil is degenerate. p = 0 costs
/// nothing.
LineSearchResult exact_line_search(ProbeSession& session, const Signal& u, const Signal& p,
                                   const Signal& sym_u, const Signal& gram_u,
                                   double fallback_alpha);

enum class PassivityMethod { gradient_descent, gradient_descent_linesearch, continuous_flow };

struct PassivityConfig {
  PassivityMethod method = PassivityMethod::gradient_descent_linesearch;
  double alpha = 0.01;
  StoppingRule stop;
  InitialInput init{InitialInputKind::ones, 1, {}};
  FlowConfig flow{FlowRhs::passivity_descent};
  bool estimate_nu = false;
  StoppingRule nu_stop;
};

struct PassivityEstimate {
  double s_hat = 0.0;
  std::optional<double> nu_hat;
  Signal u_current;
  /// (G+G^T)u, G^T G u for u_current; (G+G^T)p, G^T G p for the last direction.
  Signal sym_u, gram_u, sym_p, gram_p;
  EstimateTrace trace;
  EstimateTrace nu_trace;
  std::vector<FlowPoint> flow;
};

PassivityEstimate estimate_passivity(ProbeSession& session, const PassivityConfig& cfg);

struct NuEstimate {
  double nu_hat = 0.0;
  Signal u_current;
  EstimateTrace trace;
};

/// Smallest eigenvalue of 1/2 (G + G^T) by Rayleigh-quotient descent with an
/// exact line search and probe reuse (two experiments per iteration SISO).
NuEstimate estimate_nu(ProbeSession& session, const InitialInput& init, const StoppingRule& stop,
                       double fallback_alpha);

}  // namespace ioprobe
