#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "ioprobe/error.hpp"
#include "ioprobe/signal.hpp"

namespace ioprobe {

struct TraceRow {
  std::size_t k = 0;
  double rho = 0.0;
  double estimate = 0.0;
  std::optional<double> alpha;
  std::size_t samples = 0;
  std::optional<double> c;
  std::optional<double> r;
};

/// Per-iteration record. Cumulative sample counts must strictly increase.
class EstimateTrace {
 public:
  /// Throws std::logic_error when samples do not increase.
  void append(TraceRow row);

  const std::vector<TraceRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const TraceRow& back() const { return rows_.back(); }

 private:
  std::vector<TraceRow> rows_;
};

/// Columns k,rho,estimate,alpha,samples (+ c,r when `cone_columns`).
void write_trace_csv(std::ostream& out, const EstimateTrace& trace, bool cone_columns = false);

/// Budget exhaustion inside an estimator; carries what was computed so far.
class EstimationBudgetError : public BudgetError {
 public:
  EstimationBudgetError(const std::string& what, EstimateTrace partial)
      : BudgetError(what), partial_(std::move(partial)) {}
  const EstimateTrace& partial_trace() const { return partial_; }

 private:
  EstimateTrace partial_;
};

/// Halts when the objective's relative change stays below rel_tol for
/// `patience` consecutive iterations, when the gradient norm drops below
/// grad_tol, or when the estimator's own sample allowance is spent.
struct StoppingRule {
  double rel_tol = 1e-6;
  int patience = 3;
  double grad_tol = 1e-8;
  std::size_t max_samples = 10000;
  /// 0 means unlimited.
  std::size_t max_iterations = 0;
};

class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(const StoppingRule& rule) : rule_(rule) {}
  /// Feeds the latest objective; true once the patience run is complete.
  bool update(double value);
  int streak() const { return streak_; }

 private:
  StoppingRule rule_;
  std::optional<double> last_;
  int streak_ = 0;
};

enum class InitialInputKind { sine, sine_offset, ones, white, custom };

struct InitialInput {
  InitialInputKind kind = InitialInputKind::sine;
  std::uint64_t seed = 1;
  Signal custom;
};

/// Unit-norm start signal. sine: sin(t), t = 1..n per channel; sine_offset:
/// sin(t) + 0.25; ones: constant; white: seeded standard normal.
Signal make_initial_input(const InitialInput& init, std::size_t channels, std::size_t length);

enum class FlowRhs { gain_ascent, passivity_descent, conic_saddle, oja };

struct FlowConfig {
  FlowRhs rhs = FlowRhs::gain_ascent;
  double t_end = 10.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::size_t max_rhs_evals = 20000;
  /// Lower bound on recorded trajectory points.
  std::size_t min_points = 100;

  /// Throws DomainError for tolerances outside (0, 1) or non-positive t_end.
  void validate() const;
};

struct FlowPoint {
  double tau = 0.0;
  double c = 0.0;
  double objective = 0.0;
  double estimate = 0.0;
  std::size_t samples = 0;
};

/// Columns tau,objective,estimate,samples.
void write_flow_csv(std::ostream& out, const std::vector<FlowPoint>& trajectory);

/// Minimizer (largest = false) or maximizer of the 2x2 generalized Rayleigh
/// quotient x^T M x / x^T N x, as the step alpha of x = (1, alpha). nullopt
/// when N is not positive definite or the eigenvector's first entry vanishes.
std::optional<double> pencil_step(const Eigen::Matrix2d& m, const Eigen::Matrix2d& n, bool largest);

/// (u + step) / ||u + step||; throws DomainError for a zero sum.
Signal retract(const Signal& u, const Signal& step);

}  // namespace ioprobe
