#include "chaoslink/cli.hpp"

#include "chaoslink/chaos_core.hpp"
#include "chaoslink/errors.hpp"
#include "chaoslink/hopper.hpp"
#include "chaoslink/simkit.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace chaoslink::cli {

namespace {

/// Files are buffered and flushed together once the command has succeeded.
class PendingFiles {
  public:
    void add(const std::string& path, std::string content) {
        if (!path.empty()) {
            files_[path] = std::move(content);
        }
    }

    void commit() const {
        for (const auto& [path, content] : files_) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw IoError("cannot open '" + path + "' for writing");
            }
            out << content;
            if (!out.flush()) {
                throw IoError("failed while writing '" + path + "'");
            }
        }
    }

  private:
    std::map<std::string, std::string> files_;
};

struct SessionOptions {
    std::string config;
    std::string out;
    std::string frames;
    std::string hops;
    std::string analyzer;
    std::optional<std::uint64_t> seed;
};

struct DiagnoseOptions {
    double mu = 3.7;
    double k = 1.0;
    double x0 = 0.1;
    std::size_t steps = 1'000'000;
    std::size_t burn_in = kDefaultLyapunovBurnIn;
    bool lyapunov = false;
    std::string orbit;
    std::size_t orbit_steps = 4096;
    std::string bifurcation;
    double mu_min = 2.5;
    double mu_max = 4.0;
    std::size_t mu_steps = 301;
    std::size_t settle = 1000;
    std::size_t keep = 200;
    std::string spectrum;
    std::string spectrogram;
    std::size_t window = 256;
    std::size_t hop = 128;
};

struct LutOptions {
    std::string emit;
    std::string check;
};

std::string render(const auto& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

void run_session_command(sim::SessionKind kind, const SessionOptions& opt, std::ostream& out,
                         PendingFiles& files) {
    const auto cfg = sim::load_config(opt.config, opt.seed);
    if (!opt.frames.empty() && kind != sim::SessionKind::Digital) {
        throw ConfigError("--frames is only available for the digital command");
    }
    if (!opt.hops.empty() && kind != sim::SessionKind::Hop) {
        throw ConfigError("--hops is only available for the hop command");
    }
    if (!opt.analyzer.empty() && (kind != sim::SessionKind::Sync || cfg.mode != sim::Mode::Fixed)) {
        throw ConfigError("--analyzer needs the sync command with mode=fixed");
    }

    const auto result = sim::run_session(kind, cfg);
    files.add(opt.out, render([&](std::ostream& os) { sim::write_trace_csv(os, result.trace); }));
    files.add(opt.frames, render([&](std::ostream& os) { sim::write_frames_csv(os, result.frames); }));
    files.add(opt.hops, render([&](std::ostream& os) { sim::write_hops_csv(os, result.hops); }));
    if (result.fixed) {
        files.add(opt.analyzer,
                  render([&](std::ostream& os) { fx::write_analyzer_csv(os, *result.fixed); }));
    }
    sim::write_summary(out, result, cfg);
}

void run_diagnose(const DiagnoseOptions& opt, std::ostream& out, PendingFiles& files) {
    const LogisticParams params(opt.mu, opt.k);
    bool did_something = false;
    out << "mu: " << detail::format_17g(opt.mu) << '\n';
    out << "k: " << detail::format_17g(opt.k) << '\n';
    if (opt.lyapunov) {
        const auto est = lyapunov_exponent(params, opt.x0, opt.steps, opt.burn_in);
        out << "lyapunov_exponent: " << detail::format_17g(est.exponent) << '\n';
        out << "lyapunov_terms: " << est.terms << '\n';
        out << "lyapunov_singular_skips: " << est.singular_skips << '\n';
        out << "regime: " << (est.exponent > 0.0 ? "chaotic" : "periodic") << '\n';
        did_something = true;
    }
    const bool need_orbit = !opt.orbit.empty() || !opt.spectrum.empty() || !opt.spectrogram.empty();
    if (need_orbit) {
        const auto orbit = iterate(params, opt.x0, opt.orbit_steps - 1);
        files.add(opt.orbit, render([&](std::ostream& os) {
                      os << "index,value\n";
                      for (std::size_t n = 0; n < orbit.samples.size(); ++n) {
                          os << n << ',' << detail::format_17g(orbit.samples[n]) << '\n';
                      }
                  }));
        if (!opt.spectrum.empty()) {
            const auto report = amplitude_spectrum(orbit.samples);
            files.add(opt.spectrum, render([&](std::ostream& os) {
                          os << "bin,magnitude\n";
                          for (std::size_t b = 0; b < report.magnitudes.size(); ++b) {
                              os << b << ',' << detail::format_17g(report.magnitudes[b]) << '\n';
                          }
                      }));
            out << "spectral_flatness: " << detail::format_17g(report.flatness) << '\n';
        }
        if (!opt.spectrogram.empty()) {
            const auto spectra = windowed_spectra(orbit.samples, opt.window, opt.hop);
            files.add(opt.spectrogram, render([&](std::ostream& os) {
                          os << "window,start,bin,magnitude\n";
                          for (std::size_t w = 0; w < spectra.size(); ++w) {
                              for (std::size_t b = 0; b < spectra[w].magnitudes.size(); ++b) {
                                  os << w << ',' << w * opt.hop << ',' << b << ','
                                     << detail::format_17g(spectra[w].magnitudes[b]) << '\n';
                              }
                          }
                      }));
            out << "spectrogram_windows: " << spectra.size() << '\n';
        }
        did_something = true;
    }
    if (!opt.bifurcation.empty()) {
        const auto rows =
            bifurcation_scan({opt.mu_min, opt.mu_max}, opt.mu_steps, opt.settle, opt.keep, opt.x0, opt.k);
        files.add(opt.bifurcation, render([&](std::ostream& os) {
                      os << "mu,value\n";
                      for (const auto& row : rows) {
                          for (double v : row.attractor) {
                              os << detail::format_17g(row.mu) << ',' << detail::format_17g(v) << '\n';
                          }
                      }
                  }));
        out << "bifurcation_rows: " << rows.size() << '\n';
        did_something = true;
    }
    if (!did_something) {
        throw ConfigError("diagnose needs at least one of --lyapunov, --orbit, --spectrum, "
                          "--spectrogram, --bifurcation");
    }
}

void run_lut(const LutOptions& opt, std::ostream& out, PendingFiles& files) {
    if (opt.emit.empty() && opt.check.empty()) {
        throw ConfigError("lut needs --emit FILE or --check FILE");
    }
    if (!opt.emit.empty()) {
        const auto table = hop::build_default_table();
        files.add(opt.emit, render([&](std::ostream& os) { hop::write_table_csv(os, table); }));
        out << "channels: " << table.size() << '\n';
    }
    if (!opt.check.empty()) {
        const auto table = hop::load_table(opt.check);
        out << "channels: " << table.size() << '\n';
        out << "band_low_mhz: " << detail::format_shortest(table.entries().front().f_low) << '\n';
        out << "band_high_mhz: " << detail::format_shortest(table.entries().back().f_high) << '\n';
    }
}

void add_session_flags(CLI::App* cmd, SessionOptions& opt) {
    cmd->add_option("-c,--config", opt.config, "scenario config file (key=value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", opt.out, "trace CSV output path");
    cmd->add_option("--seed", opt.seed, "override the config seed");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synchronized logistic-map secure link simulator", "chaoslink"};
    app.require_subcommand(1, 1);

    SessionOptions sync_opt, tx_opt, dig_opt, hop_opt;
    auto* sync_cmd = app.add_subcommand("sync", "source-off synchronization session");
    add_session_flags(sync_cmd, sync_opt);
    sync_cmd->add_option("--analyzer", sync_opt.analyzer,
                         "logic-analyzer CSV of the 16-bit states (mode=fixed)");
    auto* tx_cmd = app.add_subcommand("transmit", "analog chaotic-masking transmission");
    add_session_flags(tx_cmd, tx_opt);
    auto* dig_cmd = app.add_subcommand("digital", "framed fixed-point bitstream transmission");
    add_session_flags(dig_cmd, dig_opt);
    dig_cmd->add_option("--frames", dig_opt.frames, "per-frame CSV output path");
    auto* hop_cmd = app.add_subcommand("hop", "synchronized channel hopping");
    add_session_flags(hop_cmd, hop_opt);
    hop_cmd->add_option("--hops", hop_opt.hops, "per-hop CSV output path");

    DiagnoseOptions diag;
    auto* diag_cmd = app.add_subcommand("diagnose", "chaos diagnostics of the drive map");
    diag_cmd->add_option("--mu", diag.mu, "map parameter")->capture_default_str();
    diag_cmd->add_option("--k", diag.k, "scale factor")->capture_default_str();
    diag_cmd->add_option("--x0", diag.x0, "initial state")->capture_default_str();
    diag_cmd->add_flag("--lyapunov", diag.lyapunov, "print the Lyapunov exponent");
    diag_cmd->add_option("--steps", diag.steps, "Lyapunov averaging steps")->capture_default_str();
    diag_cmd->add_option("--burn-in", diag.burn_in, "Lyapunov transient steps")->capture_default_str();
    diag_cmd->add_option("--orbit", diag.orbit, "orbit CSV output path");
    diag_cmd->add_option("--orbit-length", diag.orbit_steps, "orbit/spectrum length")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    diag_cmd->add_option("--spectrum", diag.spectrum, "amplitude spectrum CSV output path");
    diag_cmd->add_option("--spectrogram", diag.spectrogram, "windowed spectra CSV output path");
    diag_cmd->add_option("--window", diag.window, "spectrogram window length")->capture_default_str();
    diag_cmd->add_option("--hop", diag.hop, "spectrogram window advance")->capture_default_str();
    diag_cmd->add_option("--bifurcation", diag.bifurcation, "bifurcation CSV output path");
    diag_cmd->add_option("--mu-min", diag.mu_min, "bifurcation scan start")->capture_default_str();
    diag_cmd->add_option("--mu-max", diag.mu_max, "bifurcation scan end")->capture_default_str();
    diag_cmd->add_option("--mu-steps", diag.mu_steps, "bifurcation grid size")->capture_default_str();
    diag_cmd->add_option("--settle", diag.settle, "bifurcation transient steps")->capture_default_str();
    diag_cmd->add_option("--keep", diag.keep, "bifurcation samples per mu")->capture_default_str();

    LutOptions lut;
    auto* lut_cmd = app.add_subcommand("lut", "channel lookup table tooling");
    lut_cmd->add_option("--emit", lut.emit, "write the default 100-channel table CSV");
    lut_cmd->add_option("--check", lut.check, "validate a table CSV")->check(CLI::ExistingFile);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    PendingFiles files;
    try {
        if (*sync_cmd) {
            run_session_command(sim::SessionKind::Sync, sync_opt, out, files);
        } else if (*tx_cmd) {
            run_session_command(sim::SessionKind::Transmit, tx_opt, out, files);
        } else if (*dig_cmd) {
            run_session_command(sim::SessionKind::Digital, dig_opt, out, files);
        } else if (*hop_cmd) {
            run_session_command(sim::SessionKind::Hop, hop_opt, out, files);
        } else if (*diag_cmd) {
            run_diagnose(diag, out, files);
        } else if (*lut_cmd) {
            run_lut(lut, out, files);
        }
        files.commit();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LengthError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace chaoslink::cli
