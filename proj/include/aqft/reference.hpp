// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "aqft/builder.hpp"
#include "aqft/simulator.hpp"

// Reference unitaries for checking the builders. The builders omit the final
// bit-reversal swaps, so their circuits realize R * F where F is the DFT
// below and R reverses qubit order.

namespace aqft {

inline constexpr std::uint32_t kMaxReferenceQubits = 12;

namespace detail {
inline void check_reference_size(std::uint32_t n) {
  if (n < 1 || n > kMaxReferenceQubits) {
    throw std::invalid_argument("reference matrices need 1 <= n <= " + std::to_string(kMaxReferenceQubits));
  }
}
}  // namespace detail

/// F[j][k] = omega^{jk} / sqrt(2^n), omega = exp(2 pi i / 2^n).
inline Matrix qft_matrix(std::uint32_t n) {
  detail::check_reference_size(n);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix f(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const auto e = static_cast<std::uint64_t>(j * k) % static_cast<std::uint64_t>(dim);
      f(j, k) = std::polar(scale, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(dim));
    }
  }
  return f;
}

/// Permutation reversing the order of n qubits.
inline Matrix bit_reversal(std::uint32_t n) {
  detail::check_reference_size(n);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Matrix r = Matrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::Index y = 0;
    for (std::uint32_t i = 0; i < n; ++i)
      if ((x >> i) & 1) y |= Eigen::Index{1} << (n - 1 - i);
    r(y, x) = 1.0;
  }
  return r;
}

/// Unitary of build_textbook_qft(n), i.e. bit_reversal(n) * qft_matrix(n).
inline Matrix qft_circuit_matrix(std::uint32_t n) {
  detail::check_reference_size(n);
  return unitary_of(build_textbook_qft(n));
}

/// Unitary of build_standard_aqft(n, b), in the builders' convention.
inline Matrix aqft_matrix(std::uint32_t n, std::uint32_t b) {
  detail::check_reference_size(n);
  return unitary_of(build_standard_aqft(n, b));
}

}  // namespace aqft
