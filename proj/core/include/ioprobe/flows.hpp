#pragma once

#include <vector>

#include "ioprobe/probe.hpp"
#include "ioprobe/trace.hpp"

namespace ioprobe {

struct FlowState {
  double c = 0.0;  ///< conic center; unused by the other flows
  Signal u;
};

struct FlowDerivative {
  double dc = 0.0;
  Signal du;
  double objective = 0.0;  ///< rho at the evaluated state
};

/// Right-hand side at `x`: gain_ascent +grad rho1, oja 2(G^T G - u^T G^T G u I) u,
/// passivity_descent -grad rho2, conic_saddle (-grad_c rho3, +grad_u rho3).
FlowDerivative flow_rhs(ProbeSession& session, FlowRhs rhs, const FlowState& x);

/// Objective to reported estimate: sqrt for gain/oja/conic, negation for passivity.
double flow_estimate(FlowRhs rhs, double objective);

struct FlowResult {
  std::vector<FlowPoint> trajectory;
  FlowState final_state;
  double final_objective = 0.0;
  double max_sphere_drift = 0.0;  ///< max |‖u‖ - 1| before re-projection
  std::size_t rhs_evals = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Thrown on RHS budget overrun or step-size underflow; keeps the trajectory.
class FlowFailure : public FlowError {
 public:
  FlowFailure(const std::string& what, FlowResult partial)
      : FlowError(what), partial_(std::move(partial)) {}
  const FlowResult& partial() const { return partial_; }

 private:
  FlowResult partial_;
};

/// Dormand-Prince 5(4) on [0, t_end] with the u-part re-normalized after
/// every accepted step. Steps are capped at t_end / min_points so that at
/// least that many points are recorded.
FlowResult integrate_flow(ProbeSession& session, const FlowState& x0, const FlowConfig& cfg);

}  // namespace ioprobe
