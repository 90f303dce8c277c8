#include "ioprobe/lti.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include <unsupported/Eigen/MatrixFunctions>

#include "ioprobe/convolution.hpp"
#include "ioprobe/error.hpp"

namespace ioprobe {

ImpulseResponse::ImpulseResponse(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw DomainError("impulse response needs at least one tap");
  for (double g : taps_) {
    if (!std::isfinite(g)) throw DomainError("impulse response taps must be finite");
  }
}

ImpulseResponse ImpulseResponse::padded(std::vector<double> taps, std::size_t horizon) {
  if (taps.size() > horizon) throw DimensionError("more taps than the horizon");
  taps.resize(horizon, 0.0);
  return ImpulseResponse(std::move(taps));
}

ImpulseResponse ImpulseResponse::identity(std::size_t horizon) { return static_gain(1.0, horizon); }

ImpulseResponse ImpulseResponse::static_gain(double beta, std::size_t horizon) {
  std::vector<double> g(horizon, 0.0);
  if (!g.empty()) g[0] = beta;
  return ImpulseResponse(std::move(g));
}

ImpulseResponse ImpulseResponse::delay(std::size_t steps, std::size_t horizon) {
  if (steps >= horizon) throw DomainError("delay exceeds horizon");
  std::vector<double> g(horizon, 0.0);
  g[steps] = 1.0;
  return ImpulseResponse(std::move(g));
}

ImpulseResponse ImpulseResponse::scaled(double beta) const {
  std::vector<double> g(taps_);
  for (double& v : g) v *= beta;
  return ImpulseResponse(std::move(g));
}

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c,
                                 double d, TimeDomain domain)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d), domain_(domain) {
  const auto nx = a_.rows();
  if (nx == 0 || a_.cols() != nx || b_.size() != nx || c_.size() != nx) {
    throw DimensionError("state-space matrices have inconsistent dimensions");
  }
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !std::isfinite(d_)) {
    throw DomainError("state-space matrices must be finite");
  }
  const Eigen::VectorXcd eig = a_.eigenvalues();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, a_.cwiseAbs().rowwise().sum().maxCoeff());
  if (domain_ == TimeDomain::discrete) {
    for (const auto& l : eig) {
      if (std::abs(l) > 1.0 + tol) throw StabilityError("discrete model has a pole outside the unit circle");
      if (std::abs(l - 1.0) <= tol) throw StabilityError("discrete model has a pole at z = 1 (integrator)");
    }
  } else {
    for (const auto& l : eig) {
      if (l.real() > tol) throw StabilityError("continuous model has a pole in the right half plane");
      if (std::abs(l) <= tol) throw StabilityError("continuous model has a pole at the origin (integrator)");
    }
  }
}

double StateSpaceModel::spectral_radius() const {
  return a_.eigenvalues().cwiseAbs().maxCoeff();
}

MimoPlant::MimoPlant(std::size_t channels, std::vector<ImpulseResponse> blocks)
    : channels_(channels), blocks_(std::move(blocks)) {
  if (channels_ == 0 || blocks_.size() != channels_ * channels_) {
    throw DimensionError("MIMO plant needs channels^2 blocks");
  }
  horizon_ = blocks_.front().horizon();
  for (const auto& b : blocks_) {
    if (b.horizon() != horizon_ || horizon_ == 0) throw DimensionError("MIMO blocks must share one horizon");
  }
}

MimoPlant::MimoPlant(ImpulseResponse siso) : MimoPlant(1, std::vector<ImpulseResponse>{std::move(siso)}) {}

Signal toeplitz_apply(const ImpulseResponse& h, const Signal& u) {
  if (u.channels() != 1 || u.length() != h.horizon()) {
    throw DimensionError("toeplitz_apply: input length must equal the horizon");
  }
  Signal y(1, h.horizon());
  convolve(h.taps(), u.values(), y.values(), false);
  return y;
}

Signal mimo_apply(const MimoPlant& p, const Signal& u) {
  const std::size_t m = p.channels();
  if (u.channels() != m || u.length() != p.horizon()) {
    throw DimensionError("mimo_apply: signal shape does not match plant");
  }
  Signal y(m, p.horizon());
  for (std::size_t j = 0; j < m; ++j) {
    const auto uj = u.channel(j);
    if (std::all_of(uj.begin(), uj.end(), [](double v) { return v == 0.0; })) continue;
    for (std::size_t i = 0; i < m; ++i) {
      convolve(p.block(i, j).taps(), uj, y.channel(i), true);
    }
  }
  return y;
}

StateSpaceModel zoh_model(const StateSpaceModel& continuous, double dt) {
  if (continuous.domain() != TimeDomain::continuous) throw DomainError("zoh: model must be continuous-time");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("zoh: dt must be positive");
  const auto nx = static_cast<Eigen::Index>(continuous.order());
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(nx + 1, nx + 1);
  aug.topLeftCorner(nx, nx) = continuous.a() * dt;
  aug.topRightCorner(nx, 1) = continuous.b() * dt;
  const Eigen::MatrixXd e = aug.exp();
  return StateSpaceModel(e.topLeftCorner(nx, nx), e.topRightCorner(nx, 1), continuous.c(),
                         continuous.d(), TimeDomain::discrete);
}

ImpulseResponse impulse_response(const StateSpaceModel& discrete, std::size_t n) {
  if (discrete.domain() != TimeDomain::discrete) throw DomainError("impulse_response: model must be discrete-time");
  if (n == 0) throw DomainError("horizon must be positive");
  std::vector<double> g(n);
  g[0] = discrete.d();
  Eigen::VectorXd x = discrete.b();
  for (std::size_t k = 1; k < n; ++k) {
    g[k] = discrete.c().dot(x);
    x = discrete.a() * x;
  }
  return ImpulseResponse(std::move(g));
}

ImpulseResponse zoh_discretize(const StateSpaceModel& continuous, double dt, std::size_t n) {
  return impulse_response(zoh_model(continuous, dt), n);
}

namespace {

class PlantRng {
 public:
  explicit PlantRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

namespace {

using Complex = std::complex<double>;

/// Monic real factor of degree 1 (z + c0) or 2 (z^2 + c1 z + c0).
struct Factor {
  int degree;
  double c1;
  double c0;
};

/// Groups roots into monic real factors: conjugate pairs and pairs of real
/// roots become quadratics, an odd real root is left linear.
std::vector<Factor> real_factors(std::vector<Complex> roots) {
  std::vector<Factor> out;
  std::vector<double> reals;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const Complex z = roots[i];
    const double tol = 1e-9 * std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol) {
      used[i] = true;
      reals.push_back(z.real());
      continue;
    }
    std::size_t best = roots.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(roots[j] - std::conj(z));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == roots.size()) throw Error("random_stable_model: unpaired complex root");
    used[i] = used[best] = true;
    const double re = 0.5 * (z.real() + roots[best].real());
    const double im = 0.5 * (std::abs(z.imag()) + std::abs(roots[best].imag()));
    out.push_back({2, -2.0 * re, re * re + im * im});
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    out.push_back({2, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
  }
  if (reals.size() % 2 == 1) out.push_back({1, 0.0, -reals.back()});
  std::stable_sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) { return a.degree > b.degree; });
  return out;
}

struct Realization {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double d = 1.0;
};

/// num/den with equal-degree monic factors, as 1 + (num - den)/den.
Realization section(const Factor& num, const Factor& den) {
  Realization r;
  if (den.degree == 1) {
    r.a = Eigen::MatrixXd::Constant(1, 1, -den.c0);
    r.b = Eigen::VectorXd::Ones(1);
    r.c = Eigen::RowVectorXd::Constant(1, num.c0 - den.c0);
    return r;
  }
  r.a.resize(2, 2);
  r.a << 0.0, 1.0, -den.c0, -den.c1;
  r.b = Eigen::Vector2d(0.0, 1.0);
  r.c.resize(2);
  r.c << num.c0 - den.c0, num.c1 - den.c1;
  return r;
}

/// `second` driven by the output of `first`.
Realization series(const Realization& first, const Realization& second) {
  const Eigen::Index n1 = first.a.rows(), n2 = second.a.rows();
  Realization r;
  r.a = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  r.a.topLeftCorner(n1, n1) = first.a;
  r.a.bottomLeftCorner(n2, n1) = second.b * first.c;
  r.a.bottomRightCorner(n2, n2) = second.a;
  r.b.resize(n1 + n2);
  r.b << first.b, second.b * first.d;
  r.c.resize(n1 + n2);
  r.c << second.d * first.c, second.c;
  r.d = second.d * first.d;
  return r;
}

}  // namespace

StateSpaceModel random_stable_model(std::uint64_t seed, std::size_t order) {
  if (order == 0) throw DomainError("random_stable_model: order must be >= 1");
  constexpr double kRadius = 0.95;
  PlantRng rng(seed);
  const auto nx = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nx, nx);
  std::vector<Complex> poles;
  Eigen::Index i = 0;
  while (i < nx) {
    if (nx - i >= 2 && rng.uniform() < 0.5) {
      const double r = kRadius * std::sqrt(rng.uniform());
      const double theta = std::numbers::pi * rng.uniform();
      const double re = r * std::cos(theta);
      const double im = r * std::sin(theta);
      a(i, i) = re;
      a(i, i + 1) = im;
      a(i + 1, i) = -im;
      a(i + 1, i + 1) = re;
      poles.emplace_back(re, im);
      poles.emplace_back(re, -im);
      i += 2;
    } else {
      a(i, i) = kRadius * (2.0 * rng.uniform() - 1.0);
      poles.emplace_back(a(i, i), 0.0);
      i += 1;
    }
  }
  Eigen::VectorXd b(nx);
  Eigen::RowVectorXd c(nx);
  for (Eigen::Index k = 0; k < nx; ++k) b(k) = rng.normal();
  for (Eigen::Index k = 0; k < nx; ++k) c(k) = rng.normal();
  double d = rng.normal();
  if (std::abs(d) < 1e-3) d = std::copysign(1e-3, d == 0.0 ? 1.0 : d);

  // Zeros of d + c (zI - a)^{-1} b; those outside the unit circle move to
  // 1 / conj(z) with the gain rescaled, which keeps |H| on the circle.
  const Eigen::MatrixXd inverse_a = a - b * c / d;
  const Eigen::VectorXcd zeros = inverse_a.eigenvalues();
  std::vector<Complex> reflected;
  double gain = d;
  for (const Complex& z : zeros) {
    if (std::abs(z) > 1.0) {
      gain *= std::abs(z);
      reflected.push_back(1.0 / std::conj(z));
    } else {
      reflected.push_back(z);
    }
  }

  const std::vector<Factor> den = real_factors(poles);
  const std::vector<Factor> num = real_factors(reflected);
  Realization total = section(num[0], den[0]);
  total.b *= gain;
  total.d *= gain;
  for (std::size_t k = 1; k < den.size(); ++k) total = series(total, section(num[k], den[k]));
  return StateSpaceModel(std::move(total.a), std::move(total.b), std::move(total.c), total.d,
                         TimeDomain::discrete);
}

ImpulseResponse random_stable_plant(std::uint64_t seed, std::size_t order, std::size_t n) {
  return impulse_response(random_stable_model(seed, order), n);
}

MimoPlant random_mimo_plant(std::uint64_t seed, std::size_t channels, std::size_t order,
                            std::size_t n) {
  std::vector<ImpulseResponse> blocks;
  blocks.reserve(channels * channels);
  for (std::size_t i = 0; i < channels; ++i) {
    for (std::size_t j = 0; j < channels; ++j) {
      blocks.push_back(random_stable_plant(seed * 7919 + i * channels + j + 1, order, n));
    }
  }
  return MimoPlant(channels, std::move(blocks));
}

StateSpaceModel example_oscillator() {
  Eigen::MatrixXd a(2, 2);
  a << -0.1, 1.0, -1.0, 0.1;
  Eigen::VectorXd b(2);
  b << 0.0, 1.0;
  Eigen::RowVectorXd c(2);
  c << 0.0, 1.0;
  return StateSpaceModel(std::move(a), std::move(b), std::move(c), 0.01, TimeDomain::continuous);
}

}  // namespace ioprobe
