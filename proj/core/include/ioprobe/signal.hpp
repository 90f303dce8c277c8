#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ioprobe {

/// A finite real sample sequence, `channels` blocks of `length` samples each
/// stored channel-major. SISO signals have one channel.
class Signal {
 public:
  Signal() = default;
  Signal(std::size_t channels, std::size_t length);
  /// Wraps `samples` as `channels` equal-length blocks.
  explicit Signal(std::vector<double> samples, std::size_t channels = 1);

  std::size_t channels() const { return channels_; }
  std::size_t length() const { return length_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> channel(std::size_t j);
  std::span<const double> channel(std::size_t j) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Euclidean norm over all channels concatenated.
  double norm() const;
  bool all_finite() const;
  bool same_shape(const Signal& other) const {
    return channels_ == other.channels_ && length_ == other.length_;
  }

  Signal& operator+=(const Signal& other);
  Signal& operator-=(const Signal& other);
  Signal& operator*=(double alpha);

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<double> data_;
};

double dot(const Signal& a, const Signal& b);
Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double alpha, Signal a);
Signal operator*(Signal a, double alpha);

/// y += alpha * x
void axpy(double alpha, const Signal& x, Signal& y);

/// u / ||u||; throws DomainError for a zero vector.
Signal normalized(const Signal& u);

/// Time reversal per channel (the involutory permutation P).
Signal reverse(const Signal& u);

/// Unit impulse in channel `channel` at sample `at` (0-based).
Signal unit_impulse(std::size_t channels, std::size_t length, std::size_t at,
                    std::size_t channel = 0);

}  // namespace ioprobe
