#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chaoslink::fx {

/// Signed fixed-point layout: total_bits wide with frac_bits fractional bits.
class QFormat {
  public:
    QFormat(int total_bits, int frac_bits);

    int total_bits() const noexcept { return total_bits_; }
    int frac_bits() const noexcept { return frac_bits_; }
    std::int64_t one() const noexcept { return std::int64_t{1} << frac_bits_; }

  private:
    int total_bits_;
    int frac_bits_;
};

/// Coefficient format for mu and rho: Q4.12 in 16 bits.
inline const QFormat kCoefficientFormat{16, 12};

/// State scale: the integer 1024 plays the role of k.
inline constexpr std::int32_t kScale = 1024;

struct FixedState {
    std::int16_t value = 0;

    constexpr auto operator<=>(const FixedState&) const = default;
};

template <class T>
struct Saturating {
    T value;
    bool saturated = false;
};

/// Quantized mu and rho (Q4.12 raw integers) with k = 1024.
class FixedParams {
  public:
    /// Throws ParameterError unless mu_q / 4096 lies in (0, 4] and rho_q fits 16 bits.
    FixedParams(std::int32_t mu_q, std::int32_t rho_q);

    /// Rounds mu and rho to the nearest Q4.12 value.
    static FixedParams from_real(double mu, double rho);

    std::int32_t mu_q() const noexcept { return mu_q_; }
    std::int32_t rho_q() const noexcept { return rho_q_; }
    std::int32_t k() const noexcept { return kScale; }
    double mu() const noexcept;
    double rho() const noexcept;

  private:
    std::int32_t mu_q_;
    std::int32_t rho_q_;
};

/// Round x * 1024 / k to nearest (ties away from zero), saturating to 16 bits.
Saturating<FixedState> fx_from_real(double x, double k);

inline double fx_to_real(FixedState s, double k) noexcept {
    return static_cast<double>(s.value) * k / static_cast<double>(kScale);
}

/// Clamp a wide value into int16 range.
Saturating<std::int16_t> saturate16(std::int64_t v) noexcept;

/// floor(a / b) for b > 0.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    const std::int64_t q = a / b;
    return (a % b != 0 && a < 0) ? q - 1 : q;
}

/// mu_q x (k - x) >> 12, then floored division by k; saturating.
Saturating<FixedState> fx_step(const FixedParams& p, FixedState x) noexcept;

/// [mu_q (e + 2d - k) + rho_q k] e / (k 2^12), floored; saturating to 16 bits.
/// e is 32-bit since y - d spans 17 bits.
Saturating<std::int64_t> fx_control(const FixedParams& p, std::int32_t e, FixedState d) noexcept;

/// Response update y' = sat16(fx_step(y) + fx_control(y - d, d)).
Saturating<FixedState> fx_step_response(const FixedParams& p, FixedState y, FixedState d) noexcept;

struct FxSyncTrace {
    std::vector<FixedState> x;
    std::vector<FixedState> y;
    std::optional<std::size_t> first_equal; ///< first step with x == y
    bool held = false;                      ///< equality persisted to the end
    std::size_t saturation_events = 0;      ///< response/control saturations
    std::size_t divergence_events = 0;      ///< steps after first_equal with x != y
};

/// Runs drive and response for `steps` steps (steps + 1 samples).
/// Throws BasinEscapeError if the drive leaves (0, 1024).
FxSyncTrace fx_run_sync(const FixedParams& p, FixedState x0, FixedState y0, std::size_t steps);

/// 16-character two's-complement binary string.
std::string to_binary16(FixedState s);

/// Logic-analyzer style CSV: step,x_bin,x,y_bin,y,equal
void write_analyzer_csv(std::ostream& os, const FxSyncTrace& trace);

} // namespace chaoslink::fx
