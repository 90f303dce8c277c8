#pragma once

#include <optional>
#include <vector>

#include "ioprobe/probe.hpp"
#include "ioprobe/trace.hpp"

namespace ioprobe {

struct Rho1Probe {
  double value = 0.0;
  Signal y;       ///< Gu
  Signal gram_u;  ///< G^T G u
};

/// u^T G^T G u / ||u||^2 from one gram probe (2 samples SISO, m^2 + 1 MIMO).
Rho1Probe rho1(ProbeSession& session, const Signal& u);

/// 2 gram_u - 2 value u. No samples.
Signal grad_rho1(const Signal& u, const Signal& gram_u, double value);

/// G^T G u / ||G^T G u||; throws DegenerateInputError if that vanishes.
Signal power_step(ProbeSession& session, const Signal& u);

struct PgPowerStep {
  Signal next;         ///< P G u / ||P G u||
  double rayleigh;     ///< u^T P G u (signed)
  double output_norm;  ///< ||G u|| for unit u
};

/// One-sample power step on the symmetric operator PG (SISO only).
PgPowerStep pg_power_step(ProbeSession& session, const Signal& u);

enum class GainMethod { power, pg_power, gradient_ascent, gradient_ascent_linesearch, continuous_flow };

struct GainConfig {
  GainMethod method = GainMethod::power;
  double alpha = 0.01;
  StoppingRule stop;
  InitialInput init;
  FlowConfig flow;
};

struct GainEstimate {
  double gamma_hat = 0.0;
  Signal u_current;
  EstimateTrace trace;
  std::vector<FlowPoint> flow;  ///< continuous_flow only
};

/// Iterates cfg.method until the stopping rule fires. Budget exhaustion raises
/// EstimationBudgetError with the partial trace.
GainEstimate estimate_gain(ProbeSession& session, const GainConfig& cfg);

}  // namespace ioprobe
