#include "chaoslink/errors.hpp"
#include "chaoslink/scramble.hpp"
#include "chaoslink/simkit.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace chaoslink::sim {

std::string_view to_string(SourceKind v) noexcept {
    switch (v) {
    case SourceKind::Off:
        return "off";
    case SourceKind::Bernoulli:
        return "bernoulli";
    case SourceKind::Pattern:
        return "pattern";
    }
    return "?";
}

std::string_view to_string(Mode v) noexcept { return v == Mode::Float ? "float" : "fixed"; }

std::string_view to_string(ChannelKind v) noexcept {
    switch (v) {
    case ChannelKind::Ideal:
        return "ideal";
    case ChannelKind::Disturbance:
        return "disturbance";
    case ChannelKind::BitFlip:
        return "bitflip";
    }
    return "?";
}

std::string_view to_string(SessionKind v) noexcept {
    switch (v) {
    case SessionKind::Sync:
        return "sync";
    case SessionKind::Transmit:
        return "transmit";
    case SessionKind::Digital:
        return "digital";
    case SessionKind::Hop:
        return "hop";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) {
        fail(msg);
    }
}

double to_real(std::string_view key, std::string_view v) {
    const auto d = detail::parse_double(v);
    if (!d || !std::isfinite(*d)) {
        fail(std::string(key) + ": expected a finite number, got '" + std::string(v) + "'");
    }
    return *d;
}

std::size_t to_count(std::string_view key, std::string_view v) {
    const auto n = detail::parse_int<std::size_t>(v);
    if (!n) {
        fail(std::string(key) + ": expected a nonnegative integer, got '" + std::string(v) + "'");
    }
    return *n;
}

template <class Enum>
Enum to_enum(std::string_view key, std::string_view v, std::initializer_list<Enum> options) {
    for (Enum e : options) {
        if (to_string(e) == v) {
            return e;
        }
    }
    std::string known;
    for (Enum e : options) {
        known += (known.empty() ? "" : "|") + std::string(to_string(e));
    }
    fail(std::string(key) + ": expected one of " + known + ", got '" + std::string(v) + "'");
}

bits::BitSequence to_pattern(std::string_view v) {
    bits::BitSequence out;
    for (char c : v) {
        if (c != '0' && c != '1') {
            fail("pattern: expected a string of 0 and 1, got '" + std::string(v) + "'");
        }
        out.push_back(static_cast<bits::Bit>(c - '0'));
    }
    return out;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"mu", [](auto& c, auto k, auto v) { c.mu = to_real(k, v); }},
        {"k", [](auto& c, auto k, auto v) { c.k = to_real(k, v); }},
        {"rho", [](auto& c, auto k, auto v) { c.rho = to_real(k, v); }},
        {"x0", [](auto& c, auto k, auto v) { c.x0 = to_real(k, v); }},
        {"y0", [](auto& c, auto k, auto v) { c.y0 = to_real(k, v); }},
        {"steps", [](auto& c, auto k, auto v) { c.steps = to_count(k, v); }},
        {"sample_time", [](auto& c, auto k, auto v) { c.sample_time = to_real(k, v); }},
        {"operator", [](auto& c, auto, auto v) { c.op = std::string(v); }},
        {"amplitude", [](auto& c, auto k, auto v) { c.amplitude = to_real(k, v); }},
        {"hold", [](auto& c, auto k, auto v) { c.hold = to_count(k, v); }},
        {"settle", [](auto& c, auto k, auto v) { c.settle = to_count(k, v); }},
        {"threshold",
         [](auto& c, auto k, auto v) {
             if (v == "auto") {
                 c.threshold.reset();
             } else {
                 c.threshold = to_real(k, v);
             }
         }},
        {"source",
         [](auto& c, auto k, auto v) {
             c.source = to_enum(k, v, {SourceKind::Off, SourceKind::Bernoulli, SourceKind::Pattern});
         }},
        {"p", [](auto& c, auto k, auto v) { c.p = to_real(k, v); }},
        {"seed",
         [](auto& c, auto k, auto v) {
             const auto s = detail::parse_int<std::uint64_t>(v);
             if (!s) {
                 fail(std::string(k) + ": expected an unsigned 64-bit integer");
             }
             c.seed = *s;
         }},
        {"pattern", [](auto& c, auto, auto v) { c.pattern = to_pattern(v); }},
        {"mode", [](auto& c, auto k, auto v) { c.mode = to_enum(k, v, {Mode::Float, Mode::Fixed}); }},
        {"frame_m", [](auto& c, auto k, auto v) { c.frame_m = to_count(k, v); }},
        {"frame_n", [](auto& c, auto k, auto v) { c.frame_n = to_count(k, v); }},
        {"bit_threshold", [](auto& c, auto k, auto v) { c.bit_threshold = to_real(k, v); }},
        {"channel",
         [](auto& c, auto k, auto v) {
             c.channel = to_enum(k, v,
                                 {ChannelKind::Ideal, ChannelKind::Disturbance, ChannelKind::BitFlip});
         }},
        {"disturbance", [](auto& c, auto k, auto v) { c.disturbance = to_real(k, v); }},
        {"flips_per_block", [](auto& c, auto k, auto v) { c.flips_per_block = to_count(k, v); }},
        {"guard", [](auto& c, auto k, auto v) { c.guard = to_real(k, v); }},
        {"sync_tol", [](auto& c, auto k, auto v) { c.sync_tol = to_real(k, v); }},
        {"sync_window", [](auto& c, auto k, auto v) { c.sync_window = to_count(k, v); }},
        {"idle_steps", [](auto& c, auto k, auto v) { c.idle_steps = to_count(k, v); }},
        {"tx_steps", [](auto& c, auto k, auto v) { c.tx_steps = to_count(k, v); }},
        {"lut", [](auto& c, auto, auto v) { c.lut = std::filesystem::path(std::string(v)); }},
    };
    return table;
}

} // namespace

void ScenarioConfig::validate() const {
    try {
        (void)params();
    } catch (const ParameterError& e) {
        fail(e.what());
    }
    require(std::isfinite(rho), "rho must be finite");
    require(steps >= 1, "steps must be at least 1");
    require(settle < steps, "settle must be smaller than steps");
    require(x0 > 0.0 && x0 < k, "x0 must lie in the basin (0, k)");
    require(std::isfinite(y0), "y0 must be finite");
    require(sample_time > 0.0, "sample_time must be positive");
    require(OperatorRegistry::builtin().contains(op), "unknown operator '" + op + "'");
    require(amplitude > 0.0, "amplitude must be positive");
    require(hold >= 1, "hold must be at least 1");
    if (threshold) {
        require(std::isfinite(*threshold), "threshold must be finite");
    }
    if (source == SourceKind::Bernoulli) {
        require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
        require(seed.has_value(), "source=bernoulli requires an explicit seed");
    }
    if (source == SourceKind::Pattern) {
        require(!pattern.empty(), "source=pattern requires a nonempty pattern");
    }
    try {
        (void)frame();
    } catch (const ParameterError& e) {
        fail(e.what());
    }
    require(bit_threshold >= 0.0 && bit_threshold < 1.0, "bit_threshold must lie in [0, 1)");
    if (channel == ChannelKind::Disturbance) {
        require(disturbance >= 0.0, "disturbance must be nonnegative");
        require(disturbance == 0.0 || seed.has_value(), "channel=disturbance requires a seed");
    }
    if (channel == ChannelKind::BitFlip) {
        require(flips_per_block <= frame_m / frame_n, "flips_per_block cannot exceed r = m/n");
        require(flips_per_block == 0 || seed.has_value(), "channel=bitflip requires a seed");
    }
    require(guard > 0.0, "guard must be positive");
    require(sync_tol > 0.0, "sync_tol must be positive");
    require(sync_window >= 1, "sync_window must be at least 1");
    require(idle_steps >= sync_window, "idle_steps must be at least sync_window");
    if (mode == Mode::Fixed) {
        require(!fx::fx_from_real(x0, k).saturated, "x0 is not representable in 16 bits");
        require(!fx::fx_from_real(y0, k).saturated, "y0 is not representable in 16 bits");
        try {
            (void)fx::FixedParams::from_real(mu, rho);
        } catch (const ParameterError& e) {
            fail(e.what());
        }
    }
}

ScenarioConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    for (std::string_view raw : detail::split(text, '\n')) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const auto line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(where + "expected key=value");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            fail(where + "unknown key '" + std::string(key) + "'");
        }
        if (!seen.insert(std::string(key)).second) {
            fail(where + "duplicate key '" + std::string(key) + "'");
        }
        try {
            it->second(cfg, key, value);
        } catch (const ConfigError& e) {
            fail(where + e.what());
        }
    }
    if (seed_override) {
        cfg.seed = seed_override;
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), seed_override);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_config_text(const ScenarioConfig& c) {
    std::ostringstream os;
    auto real = [&](const char* key, double v) { os << key << " = " << detail::format_17g(v) << '\n'; };
    auto count = [&](const char* key, std::size_t v) { os << key << " = " << v << '\n'; };
    real("mu", c.mu);
    real("k", c.k);
    real("rho", c.rho);
    real("x0", c.x0);
    real("y0", c.y0);
    count("steps", c.steps);
    real("sample_time", c.sample_time);
    os << "operator = " << c.op << '\n';
    real("amplitude", c.amplitude);
    count("hold", c.hold);
    count("settle", c.settle);
    if (c.threshold) {
        real("threshold", *c.threshold);
    } else {
        os << "threshold = auto\n";
    }
    os << "source = " << to_string(c.source) << '\n';
    real("p", c.p);
    if (c.seed) {
        os << "seed = " << *c.seed << '\n';
    }
    if (!c.pattern.empty()) {
        os << "pattern = ";
        for (auto b : c.pattern) {
            os << static_cast<char>('0' + b);
        }
        os << '\n';
    }
    os << "mode = " << to_string(c.mode) << '\n';
    count("frame_m", c.frame_m);
    count("frame_n", c.frame_n);
    real("bit_threshold", c.bit_threshold);
    os << "channel = " << to_string(c.channel) << '\n';
    real("disturbance", c.disturbance);
    count("flips_per_block", c.flips_per_block);
    real("guard", c.guard);
    real("sync_tol", c.sync_tol);
    count("sync_window", c.sync_window);
    count("idle_steps", c.idle_steps);
    count("tx_steps", c.tx_steps);
    if (c.lut) {
        os << "lut = " << c.lut->string() << '\n';
    }
    return os.str();
}

double effective_threshold(const ScenarioConfig& cfg) {
    if (cfg.threshold) {
        return *cfg.threshold;
    }
    const double a = cfg.amplitude;
    if (cfg.op == "additive" && std::abs(cfg.rho) < 1.0) {
        return a * (1.0 + cfg.mu * a / cfg.k) / (2.0 * (1.0 - cfg.rho));
    }
    return a / 2.0;
}

} // namespace chaoslink::sim
