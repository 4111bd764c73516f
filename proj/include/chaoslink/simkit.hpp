#pragma once

#include "chaoslink/bitcodec.hpp"
#include "chaoslink/chaos_core.hpp"
#include "chaoslink/fixedpoint.hpp"
#include "chaoslink/hopper.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaoslink::sim {

enum class SourceKind { Off, Bernoulli, Pattern };
enum class Mode { Float, Fixed };
enum class ChannelKind { Ideal, Disturbance, BitFlip };
enum class SessionKind { Sync, Transmit, Digital, Hop };

std::string_view to_string(SourceKind v) noexcept;
std::string_view to_string(Mode v) noexcept;
std::string_view to_string(ChannelKind v) noexcept;
std::string_view to_string(SessionKind v) noexcept;

/// Every experiment knob. Defaults reproduce the source-off scenario with
/// mu = 3.7, k = 1, x0 = 0.1, y0 = -1.0, rho = 0.5 over 50 steps.
struct ScenarioConfig {
    double mu = 3.7;
    double k = 1.0;
    double rho = 0.5;
    double x0 = 0.1;
    double y0 = -1.0;
    std::size_t steps = 50;
    double sample_time = 2.5e-4; ///< seconds; plot-axis metadata only

    std::string op = "additive";
    double amplitude = 1.0;
    std::size_t hold = 8;
    std::size_t settle = 25;
    std::optional<double> threshold; ///< analog detector; see effective_threshold()

    SourceKind source = SourceKind::Off;
    double p = 0.5;
    std::optional<std::uint64_t> seed;
    bits::BitSequence pattern;

    Mode mode = Mode::Float;
    std::size_t frame_m = 16;
    std::size_t frame_n = 4;
    double bit_threshold = bits::kDecisionThreshold;

    ChannelKind channel = ChannelKind::Ideal;
    double disturbance = 0.0;        ///< uniform in [-d, d] added to z
    std::size_t flips_per_block = 0; ///< bit flips per r-bit block (digital)

    double guard = 1e3; ///< transmit aborts once |y| > guard * k
    double sync_tol = 1e-6;
    std::size_t sync_window = 5;

    std::size_t idle_steps = 40;
    std::size_t tx_steps = 64;
    std::optional<std::filesystem::path> lut;

    LogisticParams params() const { return {mu, k}; }
    bits::FrameSpec frame() const { return {frame_m, frame_n}; }

    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses flat key=value text; '#' starts a comment. Unknown or repeated keys
/// are errors. A seed override replaces the file's seed before validation.
ScenarioConfig parse_config(std::string_view text,
                            std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override = std::nullopt);
/// Emits every key in canonical form; parse_config(to_config_text(c)) == c.
std::string to_config_text(const ScenarioConfig& cfg);

/// Detector threshold actually used by analog sessions. An explicit threshold
/// wins. Otherwise, for additive masking with |rho| < 1, half the steady-state
/// level a (1 + mu a / k) / (1 - rho) that a held '1' produces in the recovered
/// estimate when the drive sits at the basin centre; a / 2 in all other cases.
double effective_threshold(const ScenarioConfig& cfg);

struct TraceRecord {
    std::int64_t n = 0;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> z;
    std::optional<double> e;
    std::optional<double> epsilon;
    std::optional<double> u;
    std::optional<double> i;
    std::optional<double> i_hat;
    std::optional<int> bit;
    std::optional<std::size_t> channel;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// steps + 1 records. In fixed mode x, y, e and u are raw 16-bit integers.
struct SessionTrace {
    std::vector<TraceRecord> records;

    friend bool operator==(const SessionTrace&, const SessionTrace&) = default;
};

struct Metrics {
    std::optional<std::size_t> sync_step;
    double max_abs_error = 0.0;
    std::optional<double> ber;
    std::size_t bits_compared = 0;
    std::size_t bit_errors = 0;
    std::optional<std::size_t> channel_error_count;
};

struct FrameRecord {
    std::size_t index = 0;
    bool synced = false; ///< drive and response states equal over the frame
    bits::BitSequence info;
    bits::BitSequence carrier;
    bits::BitSequence line;
    std::vector<double> block_means;
    bits::BitSequence decisions;
};

struct HopRecord {
    std::size_t session = 0;
    std::size_t step = 0;
    std::size_t j_tx = 0;
    std::size_t j_rx = 0;
    long long error = 0;
    bool triggered = false; ///< false: forced at the end of an unsynchronized idle phase
};

struct SessionResult {
    SessionKind kind = SessionKind::Sync;
    SessionTrace trace;
    Metrics metrics;
    double threshold = 0.0; ///< detector threshold used (transmit)
    std::vector<FrameRecord> frames;
    std::vector<HopRecord> hops;
    std::optional<fx::FxSyncTrace> fixed; ///< fixed-mode sync only
};

/// Source off. Float mode steps the coupled maps with d = x; fixed mode runs
/// the 16-bit emulation.
SessionResult run_sync_session(const ScenarioConfig& cfg);
/// Analog masking link: z = x o i, response driven by z, i^ = recover(z, y).
SessionResult run_transmit_session(const ScenarioConfig& cfg);
/// Fixed-point units with framed bit scrambling over drive/response LSBs.
SessionResult run_digital_session(const ScenarioConfig& cfg);
/// Alternating idle/transmit sessions with synchronized channel selection.
SessionResult run_hop_session(const ScenarioConfig& cfg);
SessionResult run_session(SessionKind kind, const ScenarioConfig& cfg);

Metrics compute_metrics(const SessionTrace& trace, const ScenarioConfig& cfg, SessionKind kind,
                        std::span<const HopRecord> hops = {});

inline constexpr std::string_view kTraceHeader = "n,x,y,z,e,epsilon,u,i,i_hat,bit,channel";

void write_trace_csv(std::ostream& os, const SessionTrace& trace);
SessionTrace read_trace_csv(std::istream& is);
void export_csv(const SessionTrace& trace, const std::filesystem::path& path);
SessionTrace import_csv(const std::filesystem::path& path);

void write_frames_csv(std::ostream& os, std::span<const FrameRecord> frames);
void write_hops_csv(std::ostream& os, std::span<const HopRecord> hops);

/// One `key: value` line per metric.
void write_summary(std::ostream& os, const SessionResult& result, const ScenarioConfig& cfg);

} // namespace chaoslink::sim
