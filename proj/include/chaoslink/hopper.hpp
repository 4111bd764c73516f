#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace chaoslink::hop {

struct ChannelEntry {
    std::size_t index; ///< 1-based channel number j
    double f_low;      ///< MHz
    double f_high;     ///< MHz
    double f_center;   ///< MHz
};

/// Immutable, contiguous channel lookup table.
class ChannelTable {
  public:
    /// Validates 1-based contiguous indices, f_low < f_high, adjacent
    /// f_high == next f_low and f_center == (f_low + f_high) / 2.
    explicit ChannelTable(std::vector<ChannelEntry> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const ChannelEntry& at(std::size_t j) const; ///< 1-based
    std::span<const ChannelEntry> entries() const noexcept { return entries_; }

  private:
    std::vector<ChannelEntry> entries_;
};

/// 100 slots of 1.4 MHz from 60.0 to 200.0 MHz.
ChannelTable build_default_table();

/// CSV with header j,f_low,f_high,f_center.
void write_table_csv(std::ostream& os, const ChannelTable& table);
ChannelTable read_table_csv(std::istream& is);
ChannelTable load_table(const std::filesystem::path& path);

/// j = 1 + floor(C * state / k), clamped to [1, C].
std::size_t select_channel(double state, double k, const ChannelTable& table) noexcept;

struct HopSelection {
    std::size_t j_tx;
    std::size_t j_rx;
    long long error; ///< j_tx - j_rx
};

HopSelection hop_session(double x, double y, double k, const ChannelTable& table) noexcept;

inline constexpr double kTriggerTolerance = 1e-6;
inline constexpr std::size_t kTriggerWindow = 5;

/// True iff the last `window` |epsilon| values are all below tol.
/// Throws LengthError when the history is shorter than the window.
bool hop_trigger(std::span<const double> epsilon_history, double tol = kTriggerTolerance,
                 std::size_t window = kTriggerWindow);

} // namespace chaoslink::hop
