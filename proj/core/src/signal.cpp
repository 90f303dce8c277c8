#include "ioprobe/signal.hpp"

#include <algorithm>
#include <cmath>

#include "ioprobe/error.hpp"

namespace ioprobe {

Signal::Signal(std::size_t channels, std::size_t length)
    : channels_(channels), length_(length), data_(channels * length, 0.0) {}

Signal::Signal(std::vector<double> samples, std::size_t channels)
    : channels_(channels), data_(std::move(samples)) {
  if (channels == 0 || data_.size() % channels != 0) {
    throw DimensionError("signal length is not a multiple of the channel count");
  }
  length_ = data_.size() / channels;
}

std::span<double> Signal::channel(std::size_t j) {
  return std::span<double>(data_).subspan(j * length_, length_);
}

std::span<const double> Signal::channel(std::size_t j) const {
  return std::span<const double>(data_).subspan(j * length_, length_);
}

double Signal::norm() const { return std::sqrt(dot(*this, *this)); }

bool Signal::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Signal& Signal::operator+=(const Signal& other) {
  axpy(1.0, other, *this);
  return *this;
}

Signal& Signal::operator-=(const Signal& other) {
  axpy(-1.0, other, *this);
  return *this;
}

Signal& Signal::operator*=(double alpha) {
  for (double& v : data_) v *= alpha;
  return *this;
}

double dot(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  const auto x = a.values();
  const auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double alpha, Signal a) { return a *= alpha; }
Signal operator*(Signal a, double alpha) { return a *= alpha; }

void axpy(double alpha, const Signal& x, Signal& y) {
  if (!x.same_shape(y)) throw DimensionError("axpy: shape mismatch");
  auto out = y.values();
  const auto in = x.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] += alpha * in[i];
}

Signal normalized(const Signal& u) {
  const double n = u.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("cannot normalize a zero or non-finite signal");
  return (1.0 / n) * u;
}

Signal reverse(const Signal& u) {
  Signal r = u;
  for (std::size_t j = 0; j < r.channels(); ++j) {
    auto c = r.channel(j);
    std::reverse(c.begin(), c.end());
  }
  return r;
}

Signal unit_impulse(std::size_t channels, std::size_t length, std::size_t at, std::size_t channel) {
  if (at >= length || channel >= channels) throw DomainError("unit_impulse: index out of range");
  Signal e(channels, length);
  e.channel(channel)[at] = 1.0;
  return e;
}

}  // namespace ioprobe
