#include "chaoslink/errors.hpp"
#include "chaoslink/scramble.hpp"
#include "chaoslink/simkit.hpp"
#include "chaoslink/sync_control.hpp"
#include "rng.hpp"

#include <cmath>
#include <string>

namespace chaoslink::sim {

namespace {

/// Information bits, one per hold window (analog) or per frame slot (digital).
bits::BitSequence source_bits(const ScenarioConfig& cfg, std::size_t count) {
    bits::BitSequence out(count, 0);
    switch (cfg.source) {
    case SourceKind::Off:
        break;
    case SourceKind::Bernoulli: {
        detail::Rng rng(*cfg.seed);
        for (auto& b : out) {
            b = rng.bernoulli(cfg.p) ? 1 : 0;
        }
        break;
    }
    case SourceKind::Pattern:
        for (std::size_t j = 0; j < count; ++j) {
            out[j] = cfg.pattern[j % cfg.pattern.size()];
        }
        break;
    }
    return out;
}

/// Additive line disturbance; magnitude 0 or an ideal channel returns exactly 0.
class LineChannel {
  public:
    explicit LineChannel(const ScenarioConfig& cfg)
        : magnitude_(cfg.channel == ChannelKind::Disturbance ? cfg.disturbance : 0.0),
          rng_(detail::channel_seed(cfg.seed.value_or(0))) {}

    double apply(double z) {
        if (magnitude_ == 0.0) {
            return z;
        }
        return z + rng_.symmetric(magnitude_);
    }

  private:
    double magnitude_;
    detail::Rng rng_;
};

/// Drive/response pair of the analog link. One call records sample n and
/// advances both units.
class AnalogLink {
  public:
    AnalogLink(const ScenarioConfig& cfg, bool guarded)
        : cfg_(cfg), gains_{cfg.rho, cfg.params()}, op_(OperatorRegistry::builtin().get(cfg.op)),
          channel_(cfg), x_(cfg.x0), y_(cfg.y0), guarded_(guarded) {}

    /// symbol == nullopt: source off (no i / i_hat columns).
    TraceRecord sample(std::size_t n, std::optional<double> symbol) {
        TraceRecord r;
        r.n = static_cast<std::int64_t>(n);
        r.x = x_;
        r.y = y_;
        const double i = symbol.value_or(0.0);
        const MaskedSample z = scramble(x_, InfoSymbol{i}, op_);
        const MaskedSample received{channel_.apply(z.z)};
        r.z = z.z;
        r.e = error(y_, x_);
        r.epsilon = epsilon(y_, received);
        const double u = control(gains_, error(y_, received.z), received.z);
        r.u = u;
        if (symbol) {
            r.i = i;
            r.i_hat = recover_symbol(received, y_, op_);
        }
        last_epsilon_ = *r.epsilon;
        next_x_ = step(gains_.params, x_);
        next_y_ = step(gains_.params, y_) + u;
        return r;
    }

    /// Commits the step prepared by sample(); n is the index being produced.
    void advance(std::size_t n) {
        if (!gains_.params.in_basin(next_x_)) {
            throw BasinEscapeError(n, next_x_);
        }
        if (!std::isfinite(next_y_)) {
            throw DivergenceError("response state is no longer finite at step " + std::to_string(n));
        }
        if (guarded_ && std::abs(next_y_) > cfg_.guard * cfg_.k) {
            throw DivergenceError("response |y| = " + std::to_string(std::abs(next_y_)) +
                                  " exceeded the guard bound " +
                                  std::to_string(cfg_.guard * cfg_.k) + " at step " +
                                  std::to_string(n));
        }
        x_ = next_x_;
        y_ = next_y_;
    }

    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }
    double last_epsilon() const noexcept { return last_epsilon_; }

  private:
    const ScenarioConfig& cfg_;
    ControllerGains gains_;
    const InvertibleOperator& op_;
    LineChannel channel_;
    double x_;
    double y_;
    double next_x_ = 0.0;
    double next_y_ = 0.0;
    double last_epsilon_ = 0.0;
    bool guarded_;
};

SessionTrace run_analog(const ScenarioConfig& cfg, const bits::BitSequence* window_bits,
                        bool guarded) {
    AnalogLink link(cfg, guarded);
    SessionTrace trace;
    trace.records.reserve(cfg.steps + 1);
    for (std::size_t n = 0; n <= cfg.steps; ++n) {
        std::optional<double> symbol;
        if (window_bits) {
            symbol = cfg.amplitude * (*window_bits)[n / cfg.hold];
        }
        trace.records.push_back(link.sample(n, symbol));
        if (n < cfg.steps) {
            link.advance(n + 1);
        }
    }
    return trace;
}

void require_mode(const ScenarioConfig& cfg, Mode mode, std::string_view session) {
    if (cfg.mode != mode) {
        throw ConfigError(std::string(session) + " sessions require mode=" + std::string(to_string(mode)));
    }
}

fx::FixedState fixed_initial(double v, double k) { return fx::fx_from_real(v, k).value; }

SessionResult run_fixed_sync(const ScenarioConfig& cfg) {
    const auto params = fx::FixedParams::from_real(cfg.mu, cfg.rho);
    auto fixed = fx::fx_run_sync(params, fixed_initial(cfg.x0, cfg.k), fixed_initial(cfg.y0, cfg.k),
                                 cfg.steps);
    SessionResult result;
    result.kind = SessionKind::Sync;
    result.trace.records.reserve(fixed.x.size());
    for (std::size_t n = 0; n < fixed.x.size(); ++n) {
        const auto x = fixed.x[n];
        const auto y = fixed.y[n];
        const std::int32_t e = std::int32_t{y.value} - std::int32_t{x.value};
        TraceRecord r;
        r.n = static_cast<std::int64_t>(n);
        r.x = x.value;
        r.y = y.value;
        r.z = x.value;
        r.e = e;
        r.epsilon = e;
        r.u = static_cast<double>(fx::fx_control(params, e, x).value);
        result.trace.records.push_back(r);
    }
    result.fixed = std::move(fixed);
    result.metrics = compute_metrics(result.trace, cfg, SessionKind::Sync);
    return result;
}

} // namespace

SessionResult run_sync_session(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.source != SourceKind::Off) {
        throw ConfigError("sync sessions require source=off");
    }
    if (cfg.mode == Mode::Fixed) {
        return run_fixed_sync(cfg);
    }
    SessionResult result;
    result.kind = SessionKind::Sync;
    result.trace = run_analog(cfg, nullptr, false);
    result.metrics = compute_metrics(result.trace, cfg, SessionKind::Sync);
    return result;
}

SessionResult run_transmit_session(const ScenarioConfig& cfg) {
    cfg.validate();
    require_mode(cfg, Mode::Float, "transmit");
    SessionResult result;
    result.kind = SessionKind::Transmit;
    result.threshold = effective_threshold(cfg);
    if (cfg.source == SourceKind::Off) {
        result.trace = run_analog(cfg, nullptr, true);
        result.metrics = compute_metrics(result.trace, cfg, SessionKind::Transmit);
        return result;
    }

    const std::size_t samples = cfg.steps + 1;
    const auto window_bits = source_bits(cfg, (samples + cfg.hold - 1) / cfg.hold);
    result.trace = run_analog(cfg, &window_bits, true);

    const std::size_t windows = samples / cfg.hold;
    std::vector<double> estimates;
    estimates.reserve(windows * cfg.hold);
    for (std::size_t n = 0; n < windows * cfg.hold; ++n) {
        estimates.push_back(*result.trace.records[n].i_hat);
    }
    const auto decided = threshold_detect(estimates, cfg.hold, result.threshold);
    for (std::size_t n = 0; n < windows * cfg.hold; ++n) {
        result.trace.records[n].bit = decided[n / cfg.hold];
    }
    result.metrics = compute_metrics(result.trace, cfg, SessionKind::Transmit);
    return result;
}

SessionResult run_digital_session(const ScenarioConfig& cfg) {
    cfg.validate();
    require_mode(cfg, Mode::Fixed, "digital");
    if (cfg.source == SourceKind::Off) {
        throw ConfigError("digital sessions need an information source (bernoulli or pattern)");
    }
    const auto spec = cfg.frame();
    const std::size_t r = spec.r();
    const auto params = fx::FixedParams::from_real(cfg.mu, cfg.rho);
    const auto fixed = fx::fx_run_sync(params, fixed_initial(cfg.x0, cfg.k),
                                       fixed_initial(cfg.y0, cfg.k), cfg.steps);

    SessionResult result;
    result.kind = SessionKind::Digital;
    auto& records = result.trace.records;
    records.reserve(fixed.x.size());
    for (std::size_t n = 0; n < fixed.x.size(); ++n) {
        const auto x = fixed.x[n];
        const auto y = fixed.y[n];
        const std::int32_t e = std::int32_t{y.value} - std::int32_t{x.value};
        TraceRecord rec;
        rec.n = static_cast<std::int64_t>(n);
        rec.x = x.value;
        rec.y = y.value;
        rec.e = e;
        rec.u = static_cast<double>(fx::fx_control(params, e, x).value);
        records.push_back(rec);
    }

    const std::size_t frames = fixed.x.size() / spec.m();
    const auto info_bits = source_bits(cfg, frames * spec.n());
    detail::Rng flip_rng(detail::channel_seed(cfg.seed.value_or(0)));
    const std::size_t flips = cfg.channel == ChannelKind::BitFlip ? cfg.flips_per_block : 0;

    std::vector<std::int16_t> tx_states(spec.m());
    std::vector<std::int16_t> rx_states(spec.m());
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t base = f * spec.m();
        FrameRecord frame;
        frame.index = f;
        frame.synced = true;
        for (std::size_t j = 0; j < spec.m(); ++j) {
            tx_states[j] = fixed.x[base + j].value;
            rx_states[j] = fixed.y[base + j].value;
            frame.synced = frame.synced && tx_states[j] == rx_states[j];
        }
        frame.info.assign(info_bits.begin() + static_cast<std::ptrdiff_t>(f * spec.n()),
                          info_bits.begin() + static_cast<std::ptrdiff_t>((f + 1) * spec.n()));
        const auto spread_bits = bits::spread(frame.info, spec);
        frame.carrier = bits::carrier_from_states(tx_states);
        frame.line = bits::mask_bits(spread_bits, frame.carrier);
        for (std::size_t p = 0; p < spec.n() && flips > 0; ++p) {
            // Partial Fisher-Yates: `flips` distinct positions inside block p.
            std::vector<std::size_t> pos(r);
            for (std::size_t j = 0; j < r; ++j) {
                pos[j] = j;
            }
            for (std::size_t j = 0; j < flips; ++j) {
                const std::size_t pick = j + flip_rng.below(r - j);
                std::swap(pos[j], pos[pick]);
                frame.line[p * r + pos[j]] ^= 1;
            }
        }
        const auto unmasked = bits::mask_bits(frame.line, bits::carrier_from_states(rx_states));
        frame.block_means = bits::correlate(unmasked, spec);
        frame.decisions = bits::decide(frame.block_means, cfg.bit_threshold);

        for (std::size_t j = 0; j < spec.m(); ++j) {
            auto& rec = records[base + j];
            rec.z = frame.line[j];
            rec.i = spread_bits[j];
            rec.i_hat = unmasked[j];
            rec.bit = frame.decisions[j / r];
        }
        result.frames.push_back(std::move(frame));
    }
    result.metrics = compute_metrics(result.trace, cfg, SessionKind::Digital);
    return result;
}

SessionResult run_hop_session(const ScenarioConfig& cfg) {
    cfg.validate();
    require_mode(cfg, Mode::Float, "hop");
    const hop::ChannelTable table = cfg.lut ? hop::load_table(*cfg.lut) : hop::build_default_table();
    const std::size_t period = cfg.idle_steps + cfg.tx_steps;
    const std::size_t samples = cfg.steps + 1;
    const auto window_bits = source_bits(cfg, (samples + cfg.hold - 1) / cfg.hold);

    SessionResult result;
    result.kind = SessionKind::Hop;
    AnalogLink link(cfg, true);
    std::vector<double> idle_history;
    std::optional<std::size_t> channel;
    bool selected = false;
    for (std::size_t n = 0; n < samples; ++n) {
        const std::size_t session = n / period;
        const std::size_t phase_pos = n % period;
        const bool idle = phase_pos < cfg.idle_steps;
        if (phase_pos == 0) {
            idle_history.clear();
            selected = false;
        }
        std::optional<double> symbol;
        if (!idle) {
            symbol = cfg.amplitude * window_bits[n / cfg.hold];
        }
        TraceRecord rec = link.sample(n, symbol);
        if (idle && !selected) {
            idle_history.push_back(*rec.epsilon);
            const bool fired = idle_history.size() >= cfg.sync_window &&
                               hop::hop_trigger(idle_history, cfg.sync_tol, cfg.sync_window);
            const bool last_idle = phase_pos + 1 == cfg.idle_steps;
            if (fired || last_idle) {
                const auto sel = hop::hop_session(rec.x, rec.y, cfg.k, table);
                result.hops.push_back({session, n, sel.j_tx, sel.j_rx, sel.error, fired});
                channel = sel.j_tx;
                selected = true;
            }
        }
        rec.channel = channel;
        result.trace.records.push_back(rec);
        if (n < cfg.steps) {
            link.advance(n + 1);
        }
    }
    result.metrics = compute_metrics(result.trace, cfg, SessionKind::Hop, result.hops);
    return result;
}

SessionResult run_session(SessionKind kind, const ScenarioConfig& cfg) {
    switch (kind) {
    case SessionKind::Sync:
        return run_sync_session(cfg);
    case SessionKind::Transmit:
        return run_transmit_session(cfg);
    case SessionKind::Digital:
        return run_digital_session(cfg);
    case SessionKind::Hop:
        return run_hop_session(cfg);
    }
    throw ConfigError("unknown session kind");
}

} // namespace chaoslink::sim
