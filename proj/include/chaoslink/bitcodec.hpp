#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chaoslink::bits {

using Bit = std::uint8_t;
using BitSequence = std::vector<Bit>;

/// m carrier bits per frame scramble n information bits, r = m / n each.
class FrameSpec {
  public:
    /// Throws ParameterError unless 0 < n <= m and n divides m.
    FrameSpec(std::size_t m, std::size_t n);

    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t r() const noexcept { return m_ / n_; }

    friend bool operator==(const FrameSpec&, const FrameSpec&) = default;

  private:
    std::size_t m_;
    std::size_t n_;
};

inline constexpr double kDecisionThreshold = 0.5;

/// Repeats each of the n info bits r times. Throws LengthError if info.size() != n.
BitSequence spread(std::span<const Bit> info, const FrameSpec& spec);

/// Elementwise exclusive-or; an involution for a fixed carrier.
BitSequence mask_bits(std::span<const Bit> bits, std::span<const Bit> carrier);

/// Block means s_p = (1/r) sum of R_s over block p, p = 1 .. n.
std::vector<double> correlate(std::span<const Bit> received, const FrameSpec& spec);

/// 1 where mean > threshold; a tie decides 0.
BitSequence decide(std::span<const double> block_means, double threshold = kDecisionThreshold);

/// Least-significant bit of each 16-bit state (two's complement).
BitSequence carrier_from_states(std::span<const std::int16_t> states);

/// Throws ParameterError if any element is not 0 or 1.
void check_alphabet(std::span<const Bit> bits);

} // namespace chaoslink::bits
