#include "chaoslink/hopper.hpp"

#include "chaoslink/errors.hpp"
#include "text_util.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace chaoslink::hop {

namespace {

constexpr std::size_t kDefaultChannels = 100;
// Frequencies in units of 100 kHz, so every table value is one correctly
// rounded division of exact integers.
constexpr long kBaseLow = 600;
constexpr long kWidth = 14;

} // namespace

ChannelTable::ChannelTable(std::vector<ChannelEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw ParameterError("channel table must not be empty");
    }
    for (std::size_t p = 0; p < entries_.size(); ++p) {
        const auto& e = entries_[p];
        const std::string where = "channel " + std::to_string(p + 1);
        if (e.index != p + 1) {
            throw ParameterError(where + ": indices must run 1..C in order");
        }
        if (!(e.f_low < e.f_high)) {
            throw ParameterError(where + ": f_low must be below f_high");
        }
        if (std::abs(e.f_center - 0.5 * (e.f_low + e.f_high)) > 1e-9 * std::abs(e.f_high)) {
            throw ParameterError(where + ": f_center is not the midpoint of the range");
        }
        if (p > 0 && entries_[p - 1].f_high != e.f_low) {
            throw ParameterError(where + ": range does not start where the previous one ends");
        }
    }
}

const ChannelEntry& ChannelTable::at(std::size_t j) const {
    if (j < 1 || j > entries_.size()) {
        throw ParameterError("channel index " + std::to_string(j) + " outside 1.." +
                             std::to_string(entries_.size()));
    }
    return entries_[j - 1];
}

ChannelTable build_default_table() {
    std::vector<ChannelEntry> entries;
    entries.reserve(kDefaultChannels);
    for (std::size_t j = 1; j <= kDefaultChannels; ++j) {
        const long low = kBaseLow + kWidth * static_cast<long>(j - 1);
        entries.push_back({j, static_cast<double>(low) / 10.0,
                           static_cast<double>(low + kWidth) / 10.0,
                           static_cast<double>(2 * low + kWidth) / 20.0});
    }
    return ChannelTable(std::move(entries));
}

void write_table_csv(std::ostream& os, const ChannelTable& table) {
    os << "j,f_low,f_high,f_center\n";
    for (const auto& e : table.entries()) {
        os << e.index << ',' << detail::format_shortest(e.f_low) << ','
           << detail::format_shortest(e.f_high) << ',' << detail::format_shortest(e.f_center)
           << '\n';
    }
}

ChannelTable read_table_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || detail::trim(line) != "j,f_low,f_high,f_center") {
        throw ConfigError("channel table CSV must start with header j,f_low,f_high,f_center");
    }
    std::vector<ChannelEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split(detail::trim(line), ',');
        const std::string where = "channel table line " + std::to_string(line_no);
        if (fields.size() != 4) {
            throw ConfigError(where + ": expected 4 fields");
        }
        const auto j = detail::parse_int<std::size_t>(fields[0]);
        const auto lo = detail::parse_double(fields[1]);
        const auto hi = detail::parse_double(fields[2]);
        const auto mid = detail::parse_double(fields[3]);
        if (!j || !lo || !hi || !mid) {
            throw ConfigError(where + ": malformed number");
        }
        entries.push_back({*j, *lo, *hi, *mid});
    }
    try {
        return ChannelTable(std::move(entries));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("invalid channel table: ") + e.what());
    }
}

ChannelTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open channel table '" + path.string() + "'");
    }
    return read_table_csv(in);
}

std::size_t select_channel(double state, double k, const ChannelTable& table) noexcept {
    const std::size_t c = table.size();
    const double bin = std::floor(static_cast<double>(c) * state / k);
    if (!(bin >= 0.0)) { // also catches NaN
        return 1;
    }
    if (bin >= static_cast<double>(c - 1)) {
        return c;
    }
    return static_cast<std::size_t>(bin) + 1;
}

HopSelection hop_session(double x, double y, double k, const ChannelTable& table) noexcept {
    const std::size_t tx = select_channel(x, k, table);
    const std::size_t rx = select_channel(y, k, table);
    return {tx, rx, static_cast<long long>(tx) - static_cast<long long>(rx)};
}

bool hop_trigger(std::span<const double> epsilon_history, double tol, std::size_t window) {
    if (window == 0) {
        throw ParameterError("hop trigger window must be at least 1");
    }
    if (epsilon_history.size() < window) {
        throw LengthError("hop trigger needs " + std::to_string(window) + " samples of history, got " +
                          std::to_string(epsilon_history.size()));
    }
    for (double eps : epsilon_history.last(window)) {
        if (!(std::abs(eps) < tol)) {
            return false;
        }
    }
    return true;
}

} // namespace chaoslink::hop
