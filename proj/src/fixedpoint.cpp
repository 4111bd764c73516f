#include "chaoslink/fixedpoint.hpp"

#include "chaoslink/errors.hpp"

#include <bitset>
#include <cmath>
#include <limits>
#include <ostream>

namespace chaoslink::fx {

namespace {

constexpr int kFracBits = 12;
constexpr std::int64_t kCoefOne = std::int64_t{1} << kFracBits;
constexpr std::int64_t kMin16 = std::numeric_limits<std::int16_t>::min();
constexpr std::int64_t kMax16 = std::numeric_limits<std::int16_t>::max();

// Worst-case magnitudes: |mu_q| <= 2^14, |rho_q| <= 2^15, |e| <= 2^16, |d| <= 2^15.
// Control bracket <= 2^14 * (2^16 + 2^16 + 2^10) + 2^15 * 2^10 < 2^32, times |e| < 2^48.
// Step product <= 2^14 * 2^15 * (2^15 + 2^10) < 2^45. Both fit int64 with margin.
static_assert(sizeof(std::int64_t) * 8 >= 48);

} // namespace

QFormat::QFormat(int total_bits, int frac_bits) : total_bits_(total_bits), frac_bits_(frac_bits) {
    if (frac_bits <= 0 || frac_bits >= total_bits || total_bits > 32) {
        throw ParameterError("Q format needs 0 < frac_bits < total_bits <= 32");
    }
}

FixedParams::FixedParams(std::int32_t mu_q, std::int32_t rho_q) : mu_q_(mu_q), rho_q_(rho_q) {
    if (mu_q <= 0 || mu_q > 4 * kCoefOne) {
        throw ParameterError("mu_q/4096 must lie in (0, 4], got mu_q=" + std::to_string(mu_q));
    }
    if (rho_q < kMin16 || rho_q > kMax16) {
        throw ParameterError("rho_q must fit in 16 bits, got " + std::to_string(rho_q));
    }
}

FixedParams FixedParams::from_real(double mu, double rho) {
    const double mu_scaled = std::round(mu * static_cast<double>(kCoefOne));
    const double rho_scaled = std::round(rho * static_cast<double>(kCoefOne));
    if (!std::isfinite(mu_scaled) || !std::isfinite(rho_scaled) || std::abs(mu_scaled) > 1e9 ||
        std::abs(rho_scaled) > 1e9) {
        throw ParameterError("mu/rho not representable in Q4.12");
    }
    return FixedParams(static_cast<std::int32_t>(mu_scaled), static_cast<std::int32_t>(rho_scaled));
}

double FixedParams::mu() const noexcept {
    return static_cast<double>(mu_q_) / static_cast<double>(kCoefOne);
}

double FixedParams::rho() const noexcept {
    return static_cast<double>(rho_q_) / static_cast<double>(kCoefOne);
}

Saturating<std::int16_t> saturate16(std::int64_t v) noexcept {
    if (v > kMax16) {
        return {static_cast<std::int16_t>(kMax16), true};
    }
    if (v < kMin16) {
        return {static_cast<std::int16_t>(kMin16), true};
    }
    return {static_cast<std::int16_t>(v), false};
}

Saturating<FixedState> fx_from_real(double x, double k) {
    if (!(k > 0.0)) {
        throw ParameterError("fx_from_real needs k > 0");
    }
    const double scaled = std::round(x * (static_cast<double>(kScale) / k));
    if (std::isnan(scaled)) {
        return {FixedState{0}, true};
    }
    if (scaled > static_cast<double>(kMax16)) {
        return {FixedState{static_cast<std::int16_t>(kMax16)}, true};
    }
    if (scaled < static_cast<double>(kMin16)) {
        return {FixedState{static_cast<std::int16_t>(kMin16)}, true};
    }
    return {FixedState{static_cast<std::int16_t>(scaled)}, false};
}

Saturating<FixedState> fx_step(const FixedParams& p, FixedState x) noexcept {
    const std::int64_t xv = x.value;
    const std::int64_t product = std::int64_t{p.mu_q()} * xv * (kScale - xv);
    // >> on a negative int64 is an arithmetic (flooring) shift in C++20.
    const std::int64_t q = floor_div(product >> kFracBits, kScale);
    const auto s = saturate16(q);
    return {FixedState{s.value}, s.saturated};
}

Saturating<std::int64_t> fx_control(const FixedParams& p, std::int32_t e, FixedState d) noexcept {
    const std::int64_t ev = e;
    const std::int64_t bracket = std::int64_t{p.mu_q()} * (ev + 2 * std::int64_t{d.value} - kScale) +
                                 std::int64_t{p.rho_q()} * kScale;
    const std::int64_t q = floor_div((bracket * ev) >> kFracBits, kScale);
    const auto s = saturate16(q);
    return {s.value, s.saturated};
}

Saturating<FixedState> fx_step_response(const FixedParams& p, FixedState y, FixedState d) noexcept {
    const auto base = fx_step(p, y);
    const auto u = fx_control(p, std::int32_t{y.value} - std::int32_t{d.value}, d);
    const auto sum = saturate16(std::int64_t{base.value.value} + u.value);
    return {FixedState{sum.value}, base.saturated || u.saturated || sum.saturated};
}

FxSyncTrace fx_run_sync(const FixedParams& p, FixedState x0, FixedState y0, std::size_t steps) {
    auto in_basin = [](FixedState s) { return s.value > 0 && s.value < kScale; };
    if (!in_basin(x0)) {
        throw BasinEscapeError(0, static_cast<double>(x0.value));
    }
    FxSyncTrace trace;
    trace.x.reserve(steps + 1);
    trace.y.reserve(steps + 1);
    FixedState x = x0;
    FixedState y = y0;
    for (std::size_t n = 0;; ++n) {
        trace.x.push_back(x);
        trace.y.push_back(y);
        if (x == y) {
            if (!trace.first_equal) {
                trace.first_equal = n;
            }
        } else if (trace.first_equal) {
            ++trace.divergence_events;
        }
        if (n == steps) {
            break;
        }
        const auto next_y = fx_step_response(p, y, x);
        const auto next_x = fx_step(p, x);
        if (next_y.saturated) {
            ++trace.saturation_events;
        }
        if (next_x.saturated || !in_basin(next_x.value)) {
            throw BasinEscapeError(n + 1, static_cast<double>(next_x.value.value));
        }
        x = next_x.value;
        y = next_y.value;
    }
    trace.held = trace.first_equal.has_value() && trace.divergence_events == 0;
    return trace;
}

std::string to_binary16(FixedState s) {
    return std::bitset<16>(static_cast<std::uint16_t>(s.value)).to_string();
}

void write_analyzer_csv(std::ostream& os, const FxSyncTrace& trace) {
    os << "step,x_bin,x,y_bin,y,equal\n";
    for (std::size_t n = 0; n < trace.x.size(); ++n) {
        const auto x = trace.x[n];
        const auto y = trace.y[n];
        os << n << ',' << to_binary16(x) << ',' << x.value << ',' << to_binary16(y) << ','
           << y.value << ',' << (x == y ? 1 : 0) << '\n';
    }
}

} // namespace chaoslink::fx
