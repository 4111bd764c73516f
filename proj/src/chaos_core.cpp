#include "chaoslink/chaos_core.hpp"

#include "chaoslink/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

namespace chaoslink {

LogisticParams::LogisticParams(double mu, double k) : mu_(mu), k_(k) {
    if (!std::isfinite(k) || k <= 0.0) {
        throw ParameterError("scale factor k must be positive, got " + std::to_string(k));
    }
    if (!std::isfinite(mu) || mu <= 0.0 || mu > 4.0) {
        throw ParameterError("mu must lie in (0, 4], got " + std::to_string(mu));
    }
}

Orbit iterate(const LogisticParams& params, double x0, std::size_t n_steps) {
    if (!params.in_basin(x0)) {
        throw BasinEscapeError(0, x0);
    }
    Orbit orbit{{}, params};
    orbit.samples.reserve(n_steps + 1);
    orbit.samples.push_back(x0);
    double x = x0;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        x = step(params, x);
        if (!params.in_basin(x)) {
            throw BasinEscapeError(n, x);
        }
        orbit.samples.push_back(x);
    }
    return orbit;
}

LyapunovEstimate lyapunov_exponent(const LogisticParams& params, double x0, std::size_t n_steps,
                                   std::size_t burn_in) {
    if (!params.in_basin(x0)) {
        throw BasinEscapeError(0, x0);
    }
    if (n_steps == 0) {
        throw ParameterError("lyapunov_exponent needs at least one step");
    }
    const double mu = params.mu();
    const double k = params.k();
    double x = x0;
    std::size_t n = 0;
    for (; n < burn_in; ++n) {
        x = step(params, x);
        if (!params.in_basin(x)) {
            throw BasinEscapeError(n + 1, x);
        }
    }

    LyapunovEstimate est;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i, ++n) {
        const double slope = std::abs(mu * (1.0 - 2.0 * x / k));
        if (slope == 0.0) {
            ++est.singular_skips;
        } else {
            sum += std::log(slope);
            ++est.terms;
        }
        x = step(params, x);
        if (!params.in_basin(x)) {
            throw BasinEscapeError(n + 1, x);
        }
    }
    est.exponent = est.terms > 0 ? sum / static_cast<double>(est.terms) : 0.0;
    return est;
}

std::vector<BifurcationRow> bifurcation_scan(MuRange range, std::size_t mu_steps,
                                             std::size_t settle, std::size_t keep, double x0,
                                             double k) {
    if (!(range.lo > 0.0) || !(range.hi <= 4.0) || range.lo > range.hi) {
        throw ParameterError("mu range must be a nonempty subinterval of (0, 4]");
    }
    if (mu_steps == 0) {
        throw ParameterError("bifurcation scan needs at least one mu value");
    }
    if (settle < 100) {
        throw ParameterError("bifurcation settle must be at least 100 steps");
    }

    std::vector<BifurcationRow> rows;
    rows.reserve(mu_steps);
    for (std::size_t j = 0; j < mu_steps; ++j) {
        double mu = range.lo;
        if (mu_steps > 1) {
            mu = range.lo + (range.hi - range.lo) * static_cast<double>(j) /
                                static_cast<double>(mu_steps - 1);
        }
        const LogisticParams params(mu, k);
        Orbit orbit = iterate(params, x0, settle + keep);
        BifurcationRow row{mu, {}};
        row.attractor.assign(orbit.samples.end() - static_cast<std::ptrdiff_t>(keep),
                             orbit.samples.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t count_distinct(std::span<const double> values, double tol) {
    if (values.empty()) {
        return 0;
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] - sorted[i - 1] > tol) {
            ++clusters;
        }
    }
    return clusters;
}

namespace {

// The FFTW planner is not reentrant; only fftw_execute is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* plan) const noexcept {
        const std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
};

std::unique_ptr<fftw_plan_s, FftwPlanDeleter> make_r2c_plan(std::size_t n, double* in,
                                                            fftw_complex* out) {
    const std::lock_guard lock(planner_mutex());
    // FFTW_ESTIMATE does not touch the arrays during planning.
    return std::unique_ptr<fftw_plan_s, FftwPlanDeleter>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE));
}

struct FftwFree {
    void operator()(void* ptr) const noexcept { fftw_free(ptr); }
};

double spectral_flatness(std::span<const double> mags) {
    double log_sum = 0.0;
    double sum = 0.0;
    std::size_t count = 0;
    for (double m : mags) {
        if (m > 0.0) {
            log_sum += std::log(m);
            sum += m;
            ++count;
        }
    }
    if (count == 0) {
        return 0.0;
    }
    const double n = static_cast<double>(count);
    const double ratio = std::exp(log_sum / n) / (sum / n);
    return std::clamp(ratio, 0.0, 1.0);
}

} // namespace

SpectrumReport amplitude_spectrum(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < kMinSpectrumLength) {
        throw LengthError("amplitude spectrum needs at least 64 samples, got " + std::to_string(n));
    }
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);

    const std::size_t bins = n / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    auto plan = make_r2c_plan(n, in.get(), out.get());
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i] = samples[i] - mean;
    }
    fftw_execute(plan.get());

    SpectrumReport report;
    report.magnitudes.resize(bins);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < bins; ++b) {
        const double re = out.get()[b][0];
        const double im = out.get()[b][1];
        // Interior bins carry the energy of their mirrored negative frequency.
        const bool mirrored = b != 0 && !(n % 2 == 0 && b == n / 2);
        report.magnitudes[b] = std::hypot(re, im) * scale * (mirrored ? 2.0 : 1.0);
    }
    report.flatness = spectral_flatness(std::span(report.magnitudes).subspan(1));
    return report;
}

std::vector<SpectrumReport> windowed_spectra(std::span<const double> samples, std::size_t window,
                                             std::size_t hop) {
    if (window < kMinSpectrumLength) {
        throw LengthError("spectrum window must be at least 64 samples");
    }
    if (hop == 0) {
        throw ParameterError("spectrum hop must be positive");
    }
    std::vector<SpectrumReport> out;
    for (std::size_t start = 0; start + window <= samples.size(); start += hop) {
        out.push_back(amplitude_spectrum(samples.subspan(start, window)));
    }
    return out;
}

} // namespace chaoslink
