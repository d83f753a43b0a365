// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aqft {

/// Exact exponent `a = numerator / 2^denom_log` of the phase gate
/// Z^a = diag(1, exp(i*pi*a)).
///
/// Values are reduced modulo 2 (the period of Z^a) into (-1, 1] and stored in
/// lowest terms, so two phases describe the same gate iff they compare equal.
/// Zero is stored as 0/2^0 and one as 1/2^0.
class DyadicPhase {
 public:
  static constexpr std::uint32_t kMaxDenomLog = 60;

  constexpr DyadicPhase() = default;

  constexpr DyadicPhase(std::int64_t numerator, std::uint32_t denom_log)
      : numerator_(numerator), denom_log_(denom_log) {
    if (denom_log > kMaxDenomLog) {
      throw std::invalid_argument("DyadicPhase: denominator 2^" + std::to_string(denom_log) +
                                  " exceeds 2^" + std::to_string(kMaxDenomLog));
    }
    normalize();
  }

  /// 1/2^m.
  static constexpr DyadicPhase inverse_power(std::uint32_t m) { return {1, m}; }

  constexpr std::int64_t numerator() const { return numerator_; }
  constexpr std::uint32_t denom_log() const { return denom_log_; }
  constexpr bool is_zero() const { return numerator_ == 0; }
  /// True for phases that are a Clifford+T gate on their own (multiples of 1/4).
  constexpr bool is_clifford_t() const { return denom_log_ <= 2; }

  double value() const {
    return static_cast<double>(numerator_) / std::ldexp(1.0, static_cast<int>(denom_log_));
  }
  /// The angle pi*a in radians.
  double radians() const { return std::numbers::pi * value(); }

  constexpr DyadicPhase operator-() const { return {-numerator_, denom_log_}; }

  friend constexpr DyadicPhase operator+(DyadicPhase lhs, DyadicPhase rhs) {
    const std::uint32_t m = lhs.denom_log_ > rhs.denom_log_ ? lhs.denom_log_ : rhs.denom_log_;
    const std::int64_t a = lhs.numerator_ * (std::int64_t{1} << (m - lhs.denom_log_));
    const std::int64_t b = rhs.numerator_ * (std::int64_t{1} << (m - rhs.denom_log_));
    return {a + b, m};
  }
  friend constexpr DyadicPhase operator-(DyadicPhase lhs, DyadicPhase rhs) { return lhs + (-rhs); }

  friend constexpr bool operator==(const DyadicPhase&, const DyadicPhase&) = default;

  /// "k/2^m", e.g. "-1/2^3".
  std::string to_string() const {
    return std::to_string(numerator_) + "/2^" + std::to_string(denom_log_);
  }

  /// Accepts "k/2^m", "k/N" with N a power of two, or an integer "k".
  static DyadicPhase parse(std::string_view text) {
    auto fail = [&](const char* why) {
      return std::invalid_argument("bad phase '" + std::string(text) + "': " + why);
    };
    const auto slash = text.find('/');
    std::int64_t num = 0;
    const auto num_text = text.substr(0, slash);
    if (num_text.empty()) throw fail("missing numerator");
    {
      auto first = num_text.data();
      auto last = num_text.data() + num_text.size();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, num);
      if (ec != std::errc() || ptr != last) throw fail("numerator is not an integer");
    }
    if (slash == std::string_view::npos) return {num, 0};
    auto den_text = text.substr(slash + 1);
    std::uint64_t m = 0;
    if (den_text.starts_with("2^")) {
      den_text.remove_prefix(2);
      auto [ptr, ec] = std::from_chars(den_text.data(), den_text.data() + den_text.size(), m);
      if (ec != std::errc() || ptr != den_text.data() + den_text.size() || den_text.empty()) {
        throw fail("exponent is not a non-negative integer");
      }
    } else {
      std::uint64_t den = 0;
      auto [ptr, ec] = std::from_chars(den_text.data(), den_text.data() + den_text.size(), den);
      if (ec != std::errc() || ptr != den_text.data() + den_text.size() || den_text.empty()) {
        throw fail("denominator is not a positive integer");
      }
      if (den == 0 || (den & (den - 1)) != 0) throw fail("denominator must be a power of two");
      while ((std::uint64_t{1} << m) != den) ++m;
    }
    if (m > kMaxDenomLog) throw fail("denominator too large");
    return {num, static_cast<std::uint32_t>(m)};
  }

 private:
  constexpr void normalize() {
    if (numerator_ == 0) {
      denom_log_ = 0;
      return;
    }
    while (denom_log_ > 0 && (numerator_ % 2) == 0) {
      numerator_ /= 2;
      --denom_log_;
    }
    // Reduce into (-2^m, 2^m], i.e. the value into (-1, 1].
    const std::int64_t period = std::int64_t{1} << (denom_log_ + 1);
    const std::int64_t half = std::int64_t{1} << denom_log_;
    numerator_ %= period;
    if (numerator_ <= -half) numerator_ += period;
    if (numerator_ > half) numerator_ -= period;
    if (numerator_ == 0) {
      denom_log_ = 0;
      return;
    }
    // Reduction modulo an even period cannot make an odd numerator even,
    // except for the value 1 which lands on 2^m / 2^m.
    while (denom_log_ > 0 && (numerator_ % 2) == 0) {
      numerator_ /= 2;
      --denom_log_;
    }
  }

  std::int64_t numerator_ = 0;
  std::uint32_t denom_log_ = 0;
};

}  // namespace aqft
