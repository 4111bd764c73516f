#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chaoslink {

/// Parameters of the scaled logistic map x' = mu * x * (1 - x / k).
///
/// Construction rejects k <= 0 and mu outside (0, 4]; above 4 the map ejects
/// orbits from the basin (0, k).
class LogisticParams {
  public:
    LogisticParams(double mu, double k);

    double mu() const noexcept { return mu_; }
    double k() const noexcept { return k_; }

    /// True iff x lies in the open interval (0, k).
    bool in_basin(double x) const noexcept { return x > 0.0 && x < k_; }

    friend bool operator==(const LogisticParams&, const LogisticParams&) = default;

  private:
    double mu_;
    double k_;
};

/// One application of the map. Pure; x may be any real.
inline double step(const LogisticParams& p, double x) noexcept {
    return p.mu() * x * (1.0 - x / p.k());
}

/// A drive orbit x_0 .. x_n, every sample inside (0, k).
struct Orbit {
    std::vector<double> samples;
    LogisticParams params;
};

/// Iterates the map n_steps times from x0. Throws BasinEscapeError if x0 or any
/// iterate is outside (0, k); the error carries the offending step index.
Orbit iterate(const LogisticParams& params, double x0, std::size_t n_steps);

struct LyapunovEstimate {
    double exponent = 0.0;
    std::size_t terms = 0;          ///< terms entering the average
    std::size_t singular_skips = 0; ///< samples exactly at k/2 (log|f'| = -inf)
};

inline constexpr std::size_t kDefaultLyapunovBurnIn = 1000;

/// Time average of ln|mu (1 - 2 x_n / k)| over n_steps samples after burn_in.
LyapunovEstimate lyapunov_exponent(const LogisticParams& params, double x0, std::size_t n_steps,
                                   std::size_t burn_in = kDefaultLyapunovBurnIn);

struct MuRange {
    double lo;
    double hi;
};

struct BifurcationRow {
    double mu;
    std::vector<double> attractor;
};

/// For each of mu_steps evenly spaced mu values in [lo, hi] (inclusive), runs
/// `settle` transient steps then records `keep` states.
std::vector<BifurcationRow> bifurcation_scan(MuRange range, std::size_t mu_steps,
                                             std::size_t settle, std::size_t keep, double x0,
                                             double k);

inline constexpr double kClusterTolerance = 1e-6;

/// Number of clusters in `values` when points closer than tol are merged.
std::size_t count_distinct(std::span<const double> values, double tol = kClusterTolerance);

struct SpectrumReport {
    /// One-sided amplitude spectrum, bins 0 .. N/2. Bin 0 is the (removed) mean.
    std::vector<double> magnitudes;
    /// Geometric over arithmetic mean of the nonzero magnitudes in bins 1 .. N/2.
    double flatness = 0.0;
};

inline constexpr std::size_t kMinSpectrumLength = 64;

/// Rectangular-window DFT amplitude spectrum of the mean-removed sequence.
/// Throws LengthError for fewer than 64 samples.
SpectrumReport amplitude_spectrum(std::span<const double> samples);

/// Spectra of consecutive `window`-long slices advanced by `hop` samples.
std::vector<SpectrumReport> windowed_spectra(std::span<const double> samples, std::size_t window,
                                             std::size_t hop);

} // namespace chaoslink
