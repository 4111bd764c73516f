#include "chaoslink/errors.hpp"
#include "chaoslink/simkit.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace chaoslink::sim {

namespace {

std::optional<std::size_t> sustained_sync_step(const SessionTrace& trace, double tol,
                                               std::size_t window) {
    const auto& recs = trace.records;
    // Start of the final run of sub-tolerance errors.
    std::size_t run_start = recs.size();
    while (run_start > 0) {
        const auto& e = recs[run_start - 1].e;
        if (!e || !(std::abs(*e) < tol)) {
            break;
        }
        --run_start;
    }
    if (recs.size() - run_start < window) {
        return std::nullopt;
    }
    return run_start + window - 1;
}

struct BitTally {
    std::size_t compared = 0;
    std::size_t errors = 0;
};

BitTally tally_analog(const SessionTrace& trace, const ScenarioConfig& cfg) {
    BitTally t;
    const auto& recs = trace.records;
    for (std::size_t start = 0; start + cfg.hold <= recs.size(); start += cfg.hold) {
        const auto& rec = recs[start];
        if (start < cfg.settle || !rec.bit || !rec.i) {
            continue;
        }
        const int source_bit = *rec.i != 0.0 ? 1 : 0;
        ++t.compared;
        t.errors += source_bit != *rec.bit ? 1 : 0;
    }
    return t;
}

BitTally tally_digital(const SessionTrace& trace, const ScenarioConfig& cfg) {
    BitTally t;
    const auto spec = cfg.frame();
    const auto& recs = trace.records;
    for (std::size_t base = 0; base + spec.m() <= recs.size(); base += spec.m()) {
        bool synced = true;
        for (std::size_t j = 0; j < spec.m(); ++j) {
            synced = synced && recs[base + j].x == recs[base + j].y && recs[base + j].bit;
        }
        if (!synced) {
            continue;
        }
        for (std::size_t p = 0; p < spec.n(); ++p) {
            const auto& rec = recs[base + p * spec.r()];
            ++t.compared;
            t.errors += static_cast<int>(*rec.i) != *rec.bit ? 1 : 0;
        }
    }
    return t;
}

std::string cell(const std::optional<double>& v) { return v ? detail::format_17g(*v) : std::string(); }

template <class Int>
std::string cell_int(const std::optional<Int>& v) {
    return v ? std::to_string(*v) : std::string();
}

std::string bit_string(std::span<const bits::Bit> bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) {
        s.push_back(static_cast<char>('0' + b));
    }
    return s;
}

std::optional<double> read_real_cell(std::string_view field, std::size_t line_no) {
    if (field.empty()) {
        return std::nullopt;
    }
    const auto v = detail::parse_double(field);
    if (!v) {
        throw ConfigError("trace line " + std::to_string(line_no) + ": malformed number '" +
                          std::string(field) + "'");
    }
    return v;
}

template <class Int>
std::optional<Int> read_int_cell(std::string_view field, std::size_t line_no) {
    if (field.empty()) {
        return std::nullopt;
    }
    const auto v = detail::parse_int<Int>(field);
    if (!v) {
        throw ConfigError("trace line " + std::to_string(line_no) + ": malformed integer '" +
                          std::string(field) + "'");
    }
    return v;
}

} // namespace

Metrics compute_metrics(const SessionTrace& trace, const ScenarioConfig& cfg, SessionKind kind,
                        std::span<const HopRecord> hops) {
    Metrics m;
    m.sync_step = sustained_sync_step(trace, cfg.sync_tol, cfg.sync_window);
    for (const auto& rec : trace.records) {
        if (rec.e) {
            m.max_abs_error = std::max(m.max_abs_error, std::abs(*rec.e));
        }
    }
    BitTally tally;
    if (kind == SessionKind::Transmit) {
        tally = tally_analog(trace, cfg);
    } else if (kind == SessionKind::Digital) {
        tally = tally_digital(trace, cfg);
    }
    m.bits_compared = tally.compared;
    m.bit_errors = tally.errors;
    if (tally.compared > 0) {
        m.ber = static_cast<double>(tally.errors) / static_cast<double>(tally.compared);
    }
    if (kind == SessionKind::Hop) {
        m.channel_error_count = static_cast<std::size_t>(
            std::count_if(hops.begin(), hops.end(), [](const HopRecord& h) { return h.error != 0; }));
    }
    return m;
}

void write_trace_csv(std::ostream& os, const SessionTrace& trace) {
    os << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
        os << r.n << ',' << detail::format_17g(r.x) << ',' << detail::format_17g(r.y) << ','
           << cell(r.z) << ',' << cell(r.e) << ',' << cell(r.epsilon) << ',' << cell(r.u) << ','
           << cell(r.i) << ',' << cell(r.i_hat) << ',' << cell_int(r.bit) << ','
           << cell_int(r.channel) << '\n';
    }
}

SessionTrace read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || detail::trim(line) != kTraceHeader) {
        throw ConfigError("trace CSV must start with header " + std::string(kTraceHeader));
    }
    SessionTrace trace;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto f = detail::split(detail::trim(line), ',');
        if (f.size() != 11) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": expected 11 fields");
        }
        TraceRecord r;
        const auto n = read_int_cell<std::int64_t>(f[0], line_no);
        const auto x = read_real_cell(f[1], line_no);
        const auto y = read_real_cell(f[2], line_no);
        if (!n || !x || !y) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": n, x and y are required");
        }
        r.n = *n;
        r.x = *x;
        r.y = *y;
        r.z = read_real_cell(f[3], line_no);
        r.e = read_real_cell(f[4], line_no);
        r.epsilon = read_real_cell(f[5], line_no);
        r.u = read_real_cell(f[6], line_no);
        r.i = read_real_cell(f[7], line_no);
        r.i_hat = read_real_cell(f[8], line_no);
        r.bit = read_int_cell<int>(f[9], line_no);
        r.channel = read_int_cell<std::size_t>(f[10], line_no);
        trace.records.push_back(r);
    }
    return trace;
}

void export_csv(const SessionTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_trace_csv(out, trace);
    out.flush();
    if (!out) {
        throw IoError("failed while writing '" + path.string() + "'");
    }
}

SessionTrace import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace '" + path.string() + "'");
    }
    try {
        return read_trace_csv(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_frames_csv(std::ostream& os, std::span<const FrameRecord> frames) {
    os << "frame,info,carrier,line,block_means,decisions,synced\n";
    for (const auto& f : frames) {
        os << f.index << ',' << bit_string(f.info) << ',' << bit_string(f.carrier) << ','
           << bit_string(f.line) << ',';
        for (std::size_t p = 0; p < f.block_means.size(); ++p) {
            os << (p ? ";" : "") << detail::format_shortest(f.block_means[p]);
        }
        os << ',' << bit_string(f.decisions) << ',' << (f.synced ? 1 : 0) << '\n';
    }
}

void write_hops_csv(std::ostream& os, std::span<const HopRecord> hops) {
    os << "session,j_tx,j_rx,error\n";
    for (const auto& h : hops) {
        os << h.session << ',' << h.j_tx << ',' << h.j_rx << ',' << h.error << '\n';
    }
}

void write_summary(std::ostream& os, const SessionResult& result, const ScenarioConfig& cfg) {
    const auto& m = result.metrics;
    os << "session: " << to_string(result.kind) << '\n';
    os << "mode: " << to_string(cfg.mode) << '\n';
    os << "steps: " << cfg.steps << '\n';
    os << "sync_step: " << (m.sync_step ? std::to_string(*m.sync_step) : "unreached") << '\n';
    os << "max_abs_error: " << detail::format_17g(m.max_abs_error) << '\n';
    os << "ber: " << (m.ber ? detail::format_17g(*m.ber) : "n/a") << '\n';
    os << "bits_compared: " << m.bits_compared << '\n';
    os << "bit_errors: " << m.bit_errors << '\n';
    os << "channel_error_count: "
       << (m.channel_error_count ? std::to_string(*m.channel_error_count) : "n/a") << '\n';
    if (result.kind == SessionKind::Transmit) {
        os << "threshold: " << detail::format_17g(result.threshold) << '\n';
    }
    if (result.kind == SessionKind::Digital) {
        const auto synced = std::count_if(result.frames.begin(), result.frames.end(),
                                          [](const FrameRecord& f) { return f.synced; });
        os << "frames: " << result.frames.size() << '\n';
        os << "synced_frames: " << synced << '\n';
    }
    if (result.kind == SessionKind::Hop) {
        std::set<std::size_t> distinct;
        for (const auto& h : result.hops) {
            distinct.insert(h.j_tx);
        }
        os << "hops: " << result.hops.size() << '\n';
        os << "distinct_channels: " << distinct.size() << '\n';
    }
    if (result.fixed) {
        os << "first_equal_step: "
           << (result.fixed->first_equal ? std::to_string(*result.fixed->first_equal) : "unreached")
           << '\n';
        os << "saturation_events: " << result.fixed->saturation_events << '\n';
        os << "divergence_events: " << result.fixed->divergence_events << '\n';
    }
}

} // namespace chaoslink::sim
