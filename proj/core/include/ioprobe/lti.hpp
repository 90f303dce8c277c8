#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ioprobe/signal.hpp"

namespace ioprobe {

/// Impulse response taps g_0 ... g_{n-1} of a causal SISO LTI system. The
/// horizon n is the number of taps; the induced operator is the n x n lower
/// triangular Toeplitz matrix with first column g.
class ImpulseResponse {
 public:
  ImpulseResponse() = default;
  /// Throws DomainError for an empty or non-finite tap sequence.
  explicit ImpulseResponse(std::vector<double> taps);

  /// Taps shorter than `horizon` are zero-padded; longer ones are rejected.
  static ImpulseResponse padded(std::vector<double> taps, std::size_t horizon);
  static ImpulseResponse identity(std::size_t horizon);
  static ImpulseResponse static_gain(double beta, std::size_t horizon);
  /// Pure k-step delay.
  static ImpulseResponse delay(std::size_t steps, std::size_t horizon);

  std::size_t horizon() const { return taps_.size(); }
  std::span<const double> taps() const { return taps_; }
  double operator[](std::size_t k) const { return taps_[k]; }

  ImpulseResponse scaled(double beta) const;

  friend bool operator==(const ImpulseResponse&, const ImpulseResponse&) = default;

 private:
  std::vector<double> taps_;
};

enum class TimeDomain { continuous, discrete };

/// Single-input single-output state-space model (A, B, C, D). Construction
/// checks dimensions and stability.
///
/// Continuous models are rejected when an eigenvalue of A has positive real
/// part or sits at the origin (integrator). Undamped oscillatory modes are
/// accepted: the operators here are always truncated to a finite horizon.
/// Discrete models follow the same rule: no pole outside the unit circle and
/// none at z = 1; poles on the circle (the image of undamped modes) pass.
class StateSpaceModel {
 public:
  StateSpaceModel(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c, double d,
                  TimeDomain domain);

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::RowVectorXd& c() const { return c_; }
  double d() const { return d_; }
  TimeDomain domain() const { return domain_; }
  std::size_t order() const { return static_cast<std::size_t>(a_.rows()); }

  /// max |lambda_i(A)|
  double spectral_radius() const;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::RowVectorXd c_;
  double d_;
  TimeDomain domain_;
};

/// Square m x m block operator; block(i, j) maps input j to output i. All
/// blocks share one horizon.
class MimoPlant {
 public:
  MimoPlant() = default;
  /// `blocks` is row-major, size channels^2.
  MimoPlant(std::size_t channels, std::vector<ImpulseResponse> blocks);
  /// SISO plant as a 1 x 1 block operator.
  MimoPlant(ImpulseResponse siso);  // NOLINT(google-explicit-constructor)

  std::size_t channels() const { return channels_; }
  std::size_t horizon() const { return horizon_; }
  const ImpulseResponse& block(std::size_t i, std::size_t j) const {
    return blocks_[i * channels_ + j];
  }
  bool is_siso() const { return channels_ == 1; }

 private:
  std::size_t channels_ = 0;
  std::size_t horizon_ = 0;
  std::vector<ImpulseResponse> blocks_;
};

/// Plants are handled as block operators throughout; a SISO impulse
/// response is the 1 x 1 case.
using Plant = MimoPlant;

/// y(t) = sum_{k<=t} g_k u(t-k) on the truncated horizon.
Signal toeplitz_apply(const ImpulseResponse& h, const Signal& u);

/// Y_i = sum_j G_ij U_j.
Signal mimo_apply(const MimoPlant& p, const Signal& u);

/// Exact zero-order-hold pair (A_d, B_d) of a continuous model.
StateSpaceModel zoh_model(const StateSpaceModel& continuous, double dt);

/// First n impulse-response samples of the ZOH discretization:
/// g_0 = D, g_k = C A_d^{k-1} B_d.
ImpulseResponse zoh_discretize(const StateSpaceModel& continuous, double dt, std::size_t n);

/// Impulse response of a discrete model by direct state recursion.
ImpulseResponse impulse_response(const StateSpaceModel& discrete, std::size_t n);

/// Reproducible random discrete model.
///
/// Recipe (fixed so that derived reference numbers are reproducible):
/// * generator: std::mt19937_64 seeded with `seed`; uniforms are the top 53
///   bits scaled to [0,1); normals use Box-Muller (cosine branch, one normal
///   per pair of uniforms);
/// * poles: slots are filled left to right; while two or more slots remain,
///   with probability 1/2 a complex pair r e^{+-i theta} is placed as the real
///   2x2 block [[a, b], [-b, a]], with r = 0.95 sqrt(U) and theta = pi U
///   (uniform in the upper half of the disk of radius 0.95); otherwise a real
///   pole 0.95 (2U - 1);
/// * B, C entries and D are standard normal, drawn in that order;
///   |D| < 1e-3 is replaced by copysign(1e-3, D) so that g_0 != 0;
/// * the model is then replaced by its minimum-phase counterpart: every zero
///   z of D + C (zI - A)^{-1} B with |z| > 1 moves to 1 / conj(z) and the
///   gain is multiplied by |z|. |H| on the unit circle is unchanged and G is
///   well conditioned (its causal inverse is stable).
/// * the result is realized as a cascade of first/second order sections
///   (real pole and zero factors paired in sorted order), so A is block lower
///   triangular rather than the modal matrix drawn above.
StateSpaceModel random_stable_model(std::uint64_t seed, std::size_t order);

/// n taps of random_stable_model(seed, order).
ImpulseResponse random_stable_plant(std::uint64_t seed, std::size_t order, std::size_t n);

/// m x m plant whose block (i, j) is random_stable_plant(seed * 7919 + i * m + j + 1, ...).
MimoPlant random_mimo_plant(std::uint64_t seed, std::size_t channels, std::size_t order,
                            std::size_t n);

/// The lightly damped oscillator used as the passivity example:
/// A = [[-0.1, 1], [-1, 0.1]], B = (0, 1)^T, C = (0, 1), D = 0.01 (continuous time).
StateSpaceModel example_oscillator();

}  // namespace ioprobe
