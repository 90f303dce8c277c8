#include "ioprobe/trace.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ioprobe/csv.hpp"

namespace ioprobe {

void EstimateTrace::append(TraceRow row) {
  if (!rows_.empty() && row.samples <= rows_.back().samples) {
    throw std::logic_error("trace sample counts must strictly increase");
  }
  rows_.push_back(row);
}

void write_trace_csv(std::ostream& out, const EstimateTrace& trace, bool cone_columns) {
  out << "k,rho,estimate,alpha,samples";
  if (cone_columns) out << ",c,r";
  out << '\n';
  for (const auto& r : trace.rows()) {
    out << r.k << ',' << format_double(r.rho) << ',' << format_double(r.estimate) << ','
        << format_optional(r.alpha) << ',' << r.samples;
    if (cone_columns) out << ',' << format_optional(r.c) << ',' << format_optional(r.r);
    out << '\n';
  }
}

bool ConvergenceMonitor::update(double value) {
  if (last_) {
    const double scale = std::max(std::abs(*last_), std::numeric_limits<double>::min());
    streak_ = std::abs(value - *last_) <= rule_.rel_tol * scale ? streak_ + 1 : 0;
  }
  last_ = value;
  return streak_ >= rule_.patience;
}

Signal make_initial_input(const InitialInput& init, std::size_t channels, std::size_t length) {
  Signal u(channels, length);
  switch (init.kind) {
    case InitialInputKind::sine:
    case InitialInputKind::sine_offset: {
      const double offset = init.kind == InitialInputKind::sine_offset ? 0.25 : 0.0;
      for (std::size_t j = 0; j < channels; ++j) {
        auto ch = u.channel(j);
        for (std::size_t t = 0; t < length; ++t) ch[t] = std::sin(static_cast<double>(t + 1)) + offset;
      }
      break;
    }
    case InitialInputKind::ones:
      for (auto& x : u.values()) x = 1.0;
      break;
    case InitialInputKind::white: {
      std::mt19937_64 rng(init.seed);
      std::normal_distribution<double> normal;
      for (auto& x : u.values()) x = normal(rng);
      break;
    }
    case InitialInputKind::custom:
      if (init.custom.channels() != channels || init.custom.length() != length) {
        throw DimensionError("custom initial input does not match the plant");
      }
      u = init.custom;
      break;
  }
  return normalized(u);
}

void FlowConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0) || !(abs_tol > 0.0 && abs_tol < 1.0)) {
    throw DomainError("flow tolerances must lie in (0, 1)");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("flow t_end must be positive");
  if (max_rhs_evals == 0) throw DomainError("flow max_rhs_evals must be positive");
}

void write_flow_csv(std::ostream& out, const std::vector<FlowPoint>& trajectory) {
  out << "tau,objective,estimate,samples\n";
  for (const auto& p : trajectory) {
    out << format_double(p.tau) << ',' << format_double(p.objective) << ','
        << format_double(p.estimate) << ',' << p.samples << '\n';
  }
}

std::optional<double> pencil_step(const Eigen::Matrix2d& m, const Eigen::Matrix2d& n, bool largest) {
  const double det_n = n(0, 0) * n(1, 1) - n(0, 1) * n(1, 0);
  if (!(n(0, 0) > 0.0) || !(det_n > 1e-14 * n(0, 0) * n(1, 1))) return std::nullopt;

  // det(M - lambda N) = a lambda^2 + b lambda + c
  const double a = det_n;
  const double b = -(m(0, 0) * n(1, 1) + m(1, 1) * n(0, 0) - 2.0 * m(0, 1) * n(0, 1));
  const double c = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
  const double disc = std::max(b * b - 4.0 * a * c, 0.0);
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  const double lambda = largest ? r2 : r1;

  // Null vector of M - lambda N from whichever row is better conditioned.
  const double e00 = m(0, 0) - lambda * n(0, 0);
  const double e01 = m(0, 1) - lambda * n(0, 1);
  const double e11 = m(1, 1) - lambda * n(1, 1);
  Eigen::Vector2d v = std::hypot(e00, e01) >= std::hypot(e01, e11) ? Eigen::Vector2d(-e01, e00)
                                                                  : Eigen::Vector2d(e11, -e01);
  if (v.norm() == 0.0) return std::nullopt;
  v.normalize();
  if (std::abs(v(0)) < 1e-12) return std::nullopt;
  return v(1) / v(0);
}

Signal retract(const Signal& u, const Signal& step) {
  if (!u.same_shape(step)) throw DimensionError("retract: shape mismatch");
  return normalized(u + step);
}

}  // namespace ioprobe
