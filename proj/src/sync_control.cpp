#include "chaoslink/sync_control.hpp"

namespace chaoslink {

std::string_view to_string(Stability s) noexcept {
    switch (s) {
    case Stability::GloballyAsymptotic:
        return "globally-asymptotic";
    case Stability::Marginal:
        return "marginal";
    case Stability::Unstable:
        return "unstable";
    }
    return "unknown";
}

Stability ControllerGains::stability() const noexcept {
    const double mag = std::abs(rho);
    if (mag < 1.0) {
        return Stability::GloballyAsymptotic;
    }
    if (mag == 1.0) {
        return Stability::Marginal;
    }
    return Stability::Unstable;
}

SyncDiagnostics diagnose(const ControllerGains& g, const CoupledState& s) noexcept {
    const double e = error(s.y, s.x);
    return {e, lyapunov_value(e), lyapunov_delta(g.rho, e), control(g, e, s.x)};
}

CoupledState advance(const ControllerGains& g, const CoupledState& s) noexcept {
    return {step(g.params, s.x), step_response(g, s.y, s.x)};
}

} // namespace chaoslink
