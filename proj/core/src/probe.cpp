#include "ioprobe/probe.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ioprobe/error.hpp"

namespace ioprobe {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be >= 0");
  if (!(epsilon_bar >= 0.0) || !std::isfinite(epsilon_bar)) {
    throw DomainError("noise epsilon_bar must be >= 0");
  }
}

bool NoiseModel::is_noiseless() const {
  switch (kind) {
    case NoiseKind::none: return true;
    case NoiseKind::additive_gaussian: return sigma == 0.0;
    case NoiseKind::multiplicative_uniform: return epsilon_bar == 0.0;
  }
  return true;
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix(splitmix(seed) ^ counter);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double noise_draw(const NoiseModel& noise, std::uint64_t evaluation, std::uint64_t index,
                  std::uint64_t samples_per_evaluation) {
  const std::uint64_t slot = evaluation * samples_per_evaluation + index;
  switch (noise.kind) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::multiplicative_uniform:
      return noise.epsilon_bar * (2.0 * counter_uniform(noise.seed, slot) - 1.0);
    case NoiseKind::additive_gaussian: {
      // Box-Muller on two counter draws.
      const double u1 = 1.0 - counter_uniform(noise.seed, 2 * slot);
      const double u2 = counter_uniform(noise.seed, 2 * slot + 1);
      return noise.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  return 0.0;
}

ProbeSession::ProbeSession(Plant plant, NoiseModel noise, std::optional<std::size_t> budget)
    : plant_(std::make_shared<const Plant>(std::move(plant))), noise_(noise), budget_(budget) {
  noise_.validate();
  if (budget_ && *budget_ == 0) throw DomainError("session budget must be positive");
}

std::optional<std::size_t> ProbeSession::remaining() const {
  if (!budget_) return std::nullopt;
  return *budget_ - samples_used_;
}

void ProbeSession::require(std::size_t cost) const {
  if (budget_ && samples_used_ + cost > *budget_) {
    throw BudgetError("sample budget exhausted: " + std::to_string(samples_used_) + " used, " +
                      std::to_string(cost) + " more requested, budget " + std::to_string(*budget_));
  }
}

void ProbeSession::check_input(const Signal& u) const {
  if (u.channels() != channels() || u.length() != horizon()) {
    throw DimensionError("probe input shape does not match the plant");
  }
  if (!u.all_finite()) throw DomainError("probe input must be finite");
}

Signal ProbeSession::experiment(const Signal& u) {
  Signal y = mimo_apply(*plant_, u);
  if (noise_.kind != NoiseKind::none) {
    const std::uint64_t per_eval = y.size();
    auto v = y.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double e = noise_draw(noise_, samples_used_, i, per_eval);
      if (noise_.kind == NoiseKind::multiplicative_uniform) {
        v[i] *= 1.0 + e;
      } else {
        v[i] += e;
      }
    }
  }
  ++samples_used_;
  return y;
}

Signal ProbeSession::evaluate(const Signal& u) {
  check_input(u);
  require(1);
  return experiment(u);
}

Signal ProbeSession::adjoint_apply(const Signal& y) {
  if (channels() > 1) return mimo_adjoint_apply(y);
  check_input(y);
  require(1);
  return reverse(experiment(reverse(y)));
}

GramProbe ProbeSession::gram_apply(const Signal& u) {
  check_input(u);
  require(gram_cost());
  Signal y = experiment(u);
  Signal gram_u = adjoint_apply(y);
  return {std::move(y), std::move(gram_u)};
}

Signal ProbeSession::mimo_adjoint_apply(const Signal& y) {
  check_input(y);
  const std::size_t m = channels();
  require(m * m);
  const Signal reversed = reverse(y);
  Signal out(m, horizon());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Signal drive(m, horizon());
      const auto src = reversed.channel(j);
      std::copy(src.begin(), src.end(), drive.channel(i).begin());
      const Signal response = experiment(drive);
      const auto yj = response.channel(j);
      auto dst = out.channel(i);
      const std::size_t n = horizon();
      for (std::size_t t = 0; t < n; ++t) dst[t] += yj[n - 1 - t];
    }
  }
  return out;
}

}  // namespace ioprobe
