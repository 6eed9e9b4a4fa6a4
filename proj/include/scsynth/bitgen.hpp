#pragma once

// Stochastic number generation and decoding.
//
// An SN of length N is produced by a comparator: bit[n] = seq[n] < value, where
// seq is a deterministic sequence in [0, 1) chosen by (kind, correlation class).
// SNs that share kind and class share seq and are therefore positively
// correlated; different classes select decorrelated sequences:
//
//   * LFSR: class c starts the maximal-length register at phase
//     c * floor(0.618 * period) from state 1.
//   * Van der Corput / Halton-3: class c reads the radical inverse of the cycle
//     index with its low ceil(log2 N) bits rotated left by
//     round(0.382 * c * width) (mod width). Class 0 is the plain sequence and
//     bit rotation is a permutation, so power-of-two N keeps exact
//     quantization for every class.

#include "scsynth/ir.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scsynth {

class Bitstream {
public:
  Bitstream() = default;
  explicit Bitstream(std::size_t length, bool fill = false) : bits_(length, fill ? 1 : 0) {}
  explicit Bitstream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
      b = b ? 1 : 0;
    }
  }

  /// "01000011" -> bits, first character is cycle 0.
  static Bitstream from_string(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') {
        throw error("bitstream literal must contain only 0 and 1: '" + std::string(s) + "'");
      }
      bits.push_back(c == '1');
    }
    return Bitstream(std::move(bits));
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t n) const { return bits_[n] != 0; }
  void set(std::size_t n, bool v) { bits_[n] = v ? 1 : 0; }

  std::size_t count_ones() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) {
      s.push_back(b ? '1' : '0');
    }
    return s;
  }

  bool operator==(const Bitstream&) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

inline double decode_unipolar(const Bitstream& s) {
  if (s.size() == 0) {
    throw error("cannot decode an empty bitstream");
  }
  return static_cast<double>(s.count_ones()) / static_cast<double>(s.size());
}

inline double decode_bipolar(const Bitstream& s) {
  if (s.size() == 0) {
    throw error("cannot decode an empty bitstream");
  }
  const auto ones = static_cast<double>(s.count_ones());
  const auto zeros = static_cast<double>(s.size()) - ones;
  return (ones - zeros) / static_cast<double>(s.size());
}

/// Digit reversal of n in `base` placed after the radix point.
inline double radical_inverse(std::uint64_t n, std::uint32_t base) {
  if (base < 2) {
    throw error("radical inverse base must be at least 2");
  }
  double result = 0.0;
  double scale = 1.0 / base;
  while (n > 0) {
    result += static_cast<double>(n % base) * scale;
    n /= base;
    scale /= base;
  }
  return result;
}

// -- LFSR --------------------------------------------------------------------

inline constexpr std::uint32_t lfsr_min_width = 3;
inline constexpr std::uint32_t lfsr_max_width = 16;

/// Feedback taps (1-based bit positions) of primitive polynomials, XAPP052.
inline std::span<const std::uint32_t> lfsr_taps(std::uint32_t width) {
  static constexpr std::uint32_t t3[] = {3, 2};
  static constexpr std::uint32_t t4[] = {4, 3};
  static constexpr std::uint32_t t5[] = {5, 3};
  static constexpr std::uint32_t t6[] = {6, 5};
  static constexpr std::uint32_t t7[] = {7, 6};
  static constexpr std::uint32_t t8[] = {8, 6, 5, 4};
  static constexpr std::uint32_t t9[] = {9, 5};
  static constexpr std::uint32_t t10[] = {10, 7};
  static constexpr std::uint32_t t11[] = {11, 9};
  static constexpr std::uint32_t t12[] = {12, 6, 4, 1};
  static constexpr std::uint32_t t13[] = {13, 4, 3, 1};
  static constexpr std::uint32_t t14[] = {14, 5, 3, 1};
  static constexpr std::uint32_t t15[] = {15, 14};
  static constexpr std::uint32_t t16[] = {16, 15, 13, 4};
  switch (width) {
  case 3: return t3;
  case 4: return t4;
  case 5: return t5;
  case 6: return t6;
  case 7: return t7;
  case 8: return t8;
  case 9: return t9;
  case 10: return t10;
  case 11: return t11;
  case 12: return t12;
  case 13: return t13;
  case 14: return t14;
  case 15: return t15;
  case 16: return t16;
  default:
    throw error("unsupported LFSR width " + std::to_string(width) + " (supported: 3..16)");
  }
}

/// One Fibonacci step: shift left, feed back the XOR of the tap bits.
inline std::uint32_t lfsr_next(std::uint32_t state, std::uint32_t width) {
  const auto taps = lfsr_taps(width);
  const std::uint32_t mask = (1u << width) - 1u;
  if ((state & mask) == 0) {
    throw error("LFSR state must be nonzero");
  }
  std::uint32_t fb = 0;
  for (auto t : taps) {
    fb ^= (state >> (t - 1)) & 1u;
  }
  return ((state << 1) | fb) & mask;
}

// -- sequences ---------------------------------------------------------------

enum class SequenceKind : std::uint8_t { lfsr, van_der_corput, halton3 };

inline std::string_view to_string(SequenceKind k) noexcept {
  switch (k) {
  case SequenceKind::lfsr: return "lfsr";
  case SequenceKind::van_der_corput: return "vdc";
  case SequenceKind::halton3: return "halton3";
  }
  return "?";
}

inline std::optional<SequenceKind> sequence_kind_from_string(std::string_view s) {
  if (s == "lfsr") return SequenceKind::lfsr;
  if (s == "vdc" || s == "van_der_corput") return SequenceKind::van_der_corput;
  if (s == "halton3" || s == "halton") return SequenceKind::halton3;
  return std::nullopt;
}

struct CorrelationClass {
  std::uint32_t id = 0;
  constexpr auto operator<=>(const CorrelationClass&) const = default;
};

namespace detail {

inline std::uint32_t index_width(std::size_t n) {
  return n <= 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

inline std::uint64_t rotate_low_bits(std::uint64_t v, std::uint32_t width, std::uint32_t by) {
  if (width == 0 || by % width == 0) {
    return v;
  }
  by %= width;
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  const std::uint64_t low = v & mask;
  const std::uint64_t rotated = ((low << by) | (low >> (width - by))) & mask;
  return (v & ~mask) | rotated;
}

} // namespace detail

/// Threshold sequence seq[0..N) for one (kind, class) pair.
inline std::vector<double> comparator_sequence(SequenceKind kind, CorrelationClass cls, std::size_t length) {
  if (length == 0) {
    throw error("SN length must be at least 1");
  }
  std::vector<double> seq(length);
  if (kind == SequenceKind::lfsr) {
    if (!std::has_single_bit(length)) {
      throw error("LFSR streams need a power-of-two length, got " + std::to_string(length));
    }
    const auto width = static_cast<std::uint32_t>(std::countr_zero(length));
    lfsr_taps(width); // range check
    const std::uint64_t period = (std::uint64_t{1} << width) - 1;
    const std::uint64_t phase = (cls.id * static_cast<std::uint64_t>(0.618 * static_cast<double>(period))) % period;
    std::uint32_t state = 1;
    for (std::uint64_t i = 0; i < phase; ++i) {
      state = lfsr_next(state, width);
    }
    const double scale = 1.0 / static_cast<double>(length);
    for (std::size_t n = 0; n < length; ++n) {
      seq[n] = static_cast<double>(state) * scale;
      state = lfsr_next(state, width);
    }
    return seq;
  }
  const std::uint32_t base = kind == SequenceKind::van_der_corput ? 2 : 3;
  const auto width = detail::index_width(length);
  const auto rot = static_cast<std::uint32_t>(std::lround(0.382 * cls.id * width));
  for (std::size_t n = 0; n < length; ++n) {
    seq[n] = radical_inverse(detail::rotate_low_bits(n, width, rot), base);
  }
  return seq;
}

inline Bitstream generate_sn(double value, std::span<const double> sequence) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw error("SN value must lie in [0, 1], got " + std::to_string(value));
  }
  Bitstream s(sequence.size());
  for (std::size_t n = 0; n < sequence.size(); ++n) {
    s.set(n, sequence[n] < value);
  }
  return s;
}

inline Bitstream generate_sn(double value, std::size_t length, SequenceKind kind, CorrelationClass cls) {
  const auto seq = comparator_sequence(kind, cls, length);
  return generate_sn(value, seq);
}

} // namespace scsynth
