#pragma once

#include "chaoslink/chaos_core.hpp"

#include <cmath>
#include <cstddef>
#include <string_view>

namespace chaoslink {

enum class Stability {
    GloballyAsymptotic, ///< |rho| < 1
    Marginal,           ///< |rho| == 1: error preserved, not decaying
    Unstable,           ///< |rho| > 1
};

std::string_view to_string(Stability s) noexcept;

/// Feedback gain plus the map parameters shared by drive and response.
/// rho is deliberately unrestricted; use stability() to classify it.
struct ControllerGains {
    double rho;
    LogisticParams params;

    Stability stability() const noexcept;
};

/// Drive state x (basin-confined) and response state y (any real).
struct CoupledState {
    double x;
    double y;
};

/// e := y - x
inline double error(double y, double x) noexcept { return y - x; }

/// Variable feedback control effort u = [mu (e + 2d - k) + rho k] e / k.
/// d is the drive-side value seen by the receiver: x_n when idle, z_n while
/// a symbol is being transmitted.
inline double control(const ControllerGains& g, double e, double d) noexcept {
    const double mu = g.params.mu();
    const double k = g.params.k();
    return (mu * (e + 2.0 * d - k) + g.rho * k) * e / k;
}

/// Next response state y' = mu y (1 - y/k) + u(y - d, d).
/// Satisfies y' - step(d) = rho (y - d) for all real y, d.
inline double step_response(const ControllerGains& g, double y, double d) noexcept {
    return step(g.params, y) + control(g, error(y, d), d);
}

/// Closed-form error after n closed-loop steps: rho^n e0.
inline double predict_error(double rho, double e0, std::size_t n) noexcept {
    return std::pow(rho, static_cast<double>(n)) * e0;
}

/// V = e^2
inline double lyapunov_value(double e) noexcept { return e * e; }

/// V_{n+1} - V_n = -e^2 (1 - rho^2)
inline double lyapunov_delta(double rho, double e) noexcept { return -e * e * (1.0 - rho * rho); }

inline constexpr double kDegenerateTolerance = 1e-12;

/// True iff x + y = k (to 1e-12 k): uncontrolled maps then agree after one step.
inline bool check_degenerate_sync(double x, double y, double k) noexcept {
    return std::abs(x + y - k) < kDegenerateTolerance * k;
}

struct SyncDiagnostics {
    double e;
    double V;
    double dV;
    double u;
};

SyncDiagnostics diagnose(const ControllerGains& g, const CoupledState& s) noexcept;

/// Advances drive and response one step with the controller fed d = x.
CoupledState advance(const ControllerGains& g, const CoupledState& s) noexcept;

} // namespace chaoslink
