#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

#include "ioprobe/lti.hpp"
#include "ioprobe/signal.hpp"

namespace ioprobe {

enum class NoiseKind { none, additive_gaussian, multiplicative_uniform };

/// Output measurement noise. Additive: y + sigma * N(0, 1) per sample.
/// Multiplicative: y * (1 + eps) with eps ~ U[-epsilon_bar, epsilon_bar].
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
  double epsilon_bar = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel additive(double sigma, std::uint64_t seed) {
    return {NoiseKind::additive_gaussian, sigma, 0.0, seed};
  }
  static NoiseModel multiplicative(double epsilon_bar, std::uint64_t seed) {
    return {NoiseKind::multiplicative_uniform, 0.0, epsilon_bar, seed};
  }

  /// Throws DomainError for negative or non-finite parameters.
  void validate() const;
  bool is_noiseless() const;
};

/// Counter-based uniform in [0, 1): a pure function of (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Noise value for sample `index` of physical evaluation `evaluation`, where
/// index runs channel-major, time-minor. For multiplicative noise this is eps,
/// for additive noise the additive term.
double noise_draw(const NoiseModel& noise, std::uint64_t evaluation, std::uint64_t index,
                  std::uint64_t samples_per_evaluation);

struct GramProbe {
  Signal y;       ///< Gu
  Signal gram_u;  ///< G^T G u
};

/// The black-box boundary. Estimators interact with a plant exclusively
/// through a session: every physical experiment goes through evaluate(),
/// which counts it and corrupts its output with the session's noise.
///
/// A session is single-owner mutable state and must not be shared across
/// threads; independent sessions over one plant may run concurrently.
class ProbeSession {
 public:
  explicit ProbeSession(Plant plant, NoiseModel noise = {},
                        std::optional<std::size_t> budget = std::nullopt);

  ProbeSession(ProbeSession&&) noexcept = default;
  ProbeSession& operator=(ProbeSession&&) noexcept = default;
  ProbeSession(const ProbeSession&) = delete;
  ProbeSession& operator=(const ProbeSession&) = delete;

  std::size_t channels() const { return plant_->channels(); }
  std::size_t horizon() const { return plant_->horizon(); }
  const NoiseModel& noise() const { return noise_; }
  std::size_t samples_used() const { return samples_used_; }
  std::optional<std::size_t> budget() const { return budget_; }
  /// Remaining evaluations, or nullopt without a budget.
  std::optional<std::size_t> remaining() const;

  /// Cost of one adjoint application: 1 for SISO, m^2 for MIMO.
  std::size_t adjoint_cost() const { return channels() * channels(); }
  std::size_t gram_cost() const { return 1 + adjoint_cost(); }

  /// One experiment: noise(G u). Costs 1.
  Signal evaluate(const Signal& u);

  /// G^T y. SISO: P G P y (1 experiment). MIMO: mimo_adjoint_apply (m^2).
  Signal adjoint_apply(const Signal& y);

  /// (G u, G^T G u) where the second experiment re-injects the measured
  /// (noisy) first output. Costs 1 + adjoint_cost().
  GramProbe gram_apply(const Signal& u);

  /// Gamma^T Y = sum_{i,j} (E_ij kron P) Gamma (E_ij kron P) Y: for every (i, j)
  /// the reversed channel j of Y drives input i alone, output j is reversed
  /// and accumulated into channel i. Costs m^2.
  Signal mimo_adjoint_apply(const Signal& y);

  /// Throws BudgetError if `cost` more experiments would exceed the budget.
  void require(std::size_t cost) const;

 private:
  Signal experiment(const Signal& u);
  void check_input(const Signal& u) const;

  std::shared_ptr<const Plant> plant_;
  NoiseModel noise_;
  std::optional<std::size_t> budget_;
  std::size_t samples_used_ = 0;
};

}  // namespace ioprobe
