#pragma once

#include <optional>
#include <vector>

#include "ioprobe/probe.hpp"
#include "ioprobe/trace.hpp"

namespace ioprobe {

struct Rho3Probe {
  double value = 0.0;
  Signal y;           ///< Gu
  Signal sym_u;       ///< Gu + PGPu
  Signal gramgram_u;  ///< PGPGu = G^T G u
};

/// u^T (G^T G - c (G + G^T) + c^2 I) u / ||u||^2 = ||y - c u||^2 / ||u||^2.
/// Three experiments; the probed vectors do not depend on c.
Rho3Probe rho3(ProbeSession& session, double c, const Signal& u);

/// rho3 at another center from an existing probe. No samples.
double rho3_at(double c, const Signal& u, const Signal& sym_u, const Signal& gramgram_u);

/// 2c - u^T sym_u
double grad_c_rho3(double c, const Signal& u, const Signal& sym_u);

/// 2 (gramgram_u - c sym_u + c^2 u) - 2 value u
Signal grad_u_rho3(double c, const Signal& u, const Signal& sym_u, const Signal& gramgram_u,
                   double value);

struct SaddleStep {
  double c = 0.0;        ///< next center
  Signal u;              ///< next input
  double value = 0.0;    ///< rho3 at the probed point (see each step)
  double grad_c = 0.0;
  double grad_u_norm = 0.0;
};

/// c' = c - alpha grad_c, u' = retract(u + alpha grad_u); value = rho3(c, u).
SaddleStep arrow_hurwicz_step(ProbeSession& session, double c, const Signal& u, double alpha);

/// c' = 1/2 u^T (Gu + PGPu), u' = retract(u + alpha grad_u rho3(c', u));
/// value = rho3(c', u).
SaddleStep uzawa_step(ProbeSession& session, const Signal& u, double alpha);

enum class ConeMethod { arrow_hurwicz, uzawa, continuous_flow };

struct ConeConfig {
  ConeMethod method = ConeMethod::uzawa;
  double alpha = 0.002;
  double c0 = 0.0;
  StoppingRule stop;
  InitialInput init;
  FlowConfig flow{FlowRhs::conic_saddle};
  /// Arrow-Hurwicz: rho3 above this multiple of its first value halts with
  /// DivergenceError.
  double divergence_factor = 10.0;
};

struct ConeEstimate {
  double c_hat = 0.0;
  double r_hat = 0.0;
  Signal u_current;
  EstimateTrace trace;
  std::vector<FlowPoint> flow;
};

/// Divergence halts carry the trace so far.
class ConeDivergenceError : public DivergenceError {
 public:
  ConeDivergenceError(const std::string& what, EstimateTrace partial)
      : DivergenceError(what), partial_(std::move(partial)) {}
  const EstimateTrace& partial_trace() const { return partial_; }

 private:
  EstimateTrace partial_;
};

ConeEstimate estimate_cone(ProbeSession& session, const ConeConfig& cfg);

}  // namespace ioprobe
