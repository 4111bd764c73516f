#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "chaoslink/bitcodec.hpp"
#include "chaoslink/chaos_core.hpp"
#include "chaoslink/errors.hpp"
#include "chaoslink/fixedpoint.hpp"
#include "chaoslink/hopper.hpp"
#include "chaoslink/scramble.hpp"
#include "chaoslink/simkit.hpp"
#include "chaoslink/sync_control.hpp"

#include <sstream>

namespace py = pybind11;

namespace chaoslink {

namespace {

py::dict trace_to_dict(const sim::SessionTrace& trace) {
    auto column = [&](auto field) {
        py::list out;
        for (const auto& r : trace.records) {
            const auto& v = r.*field;
            if constexpr (requires { v.has_value(); }) {
                out.append(v ? py::cast(*v) : py::none());
            } else {
                out.append(v);
            }
        }
        return out;
    };
    py::dict d;
    d["n"] = column(&sim::TraceRecord::n);
    d["x"] = column(&sim::TraceRecord::x);
    d["y"] = column(&sim::TraceRecord::y);
    d["z"] = column(&sim::TraceRecord::z);
    d["e"] = column(&sim::TraceRecord::e);
    d["epsilon"] = column(&sim::TraceRecord::epsilon);
    d["u"] = column(&sim::TraceRecord::u);
    d["i"] = column(&sim::TraceRecord::i);
    d["i_hat"] = column(&sim::TraceRecord::i_hat);
    d["bit"] = column(&sim::TraceRecord::bit);
    d["channel"] = column(&sim::TraceRecord::channel);
    return d;
}

py::dict metrics_to_dict(const sim::Metrics& m) {
    py::dict d;
    d["sync_step"] = m.sync_step ? py::cast(*m.sync_step) : py::none();
    d["max_abs_error"] = m.max_abs_error;
    d["ber"] = m.ber ? py::cast(*m.ber) : py::none();
    d["bits_compared"] = m.bits_compared;
    d["bit_errors"] = m.bit_errors;
    d["channel_error_count"] = m.channel_error_count ? py::cast(*m.channel_error_count) : py::none();
    return d;
}

py::dict result_to_dict(const sim::SessionResult& r) {
    py::dict d;
    d["kind"] = std::string(sim::to_string(r.kind));
    d["trace"] = trace_to_dict(r.trace);
    d["metrics"] = metrics_to_dict(r.metrics);
    d["threshold"] = r.threshold;
    py::list hops;
    for (const auto& h : r.hops) {
        py::dict hd;
        hd["session"] = h.session;
        hd["step"] = h.step;
        hd["j_tx"] = h.j_tx;
        hd["j_rx"] = h.j_rx;
        hd["error"] = h.error;
        hd["triggered"] = h.triggered;
        hops.append(hd);
    }
    d["hops"] = hops;
    py::list frames;
    for (const auto& f : r.frames) {
        py::dict fd;
        fd["index"] = f.index;
        fd["synced"] = f.synced;
        fd["info"] = f.info;
        fd["carrier"] = f.carrier;
        fd["line"] = f.line;
        fd["block_means"] = f.block_means;
        fd["decisions"] = f.decisions;
        frames.append(fd);
    }
    d["frames"] = frames;
    return d;
}

sim::SessionKind kind_from(const std::string& name) {
    for (auto k : {sim::SessionKind::Sync, sim::SessionKind::Transmit, sim::SessionKind::Digital,
                   sim::SessionKind::Hop}) {
        if (sim::to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown session kind '" + name + "'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Synchronized logistic-map secure link simulator";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<LengthError>(m, "LengthError", base.ptr());
    py::register_exception<BasinEscapeError>(m, "BasinEscapeError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<LogisticParams>(m, "LogisticParams")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("k") = 1.0)
        .def_property_readonly("mu", &LogisticParams::mu)
        .def_property_readonly("k", &LogisticParams::k)
        .def("in_basin", &LogisticParams::in_basin);

    m.def("step", &step, py::arg("params"), py::arg("x"));
    m.def(
        "iterate",
        [](const LogisticParams& p, double x0, std::size_t n) { return iterate(p, x0, n).samples; },
        py::arg("params"), py::arg("x0"), py::arg("n_steps"));
    m.def(
        "lyapunov_exponent",
        [](const LogisticParams& p, double x0, std::size_t n, std::size_t burn_in) {
            return lyapunov_exponent(p, x0, n, burn_in).exponent;
        },
        py::arg("params"), py::arg("x0"), py::arg("n_steps"),
        py::arg("burn_in") = kDefaultLyapunovBurnIn);
    m.def(
        "amplitude_spectrum",
        [](const std::vector<double>& samples) {
            auto r = amplitude_spectrum(samples);
            return py::make_tuple(r.magnitudes, r.flatness);
        },
        py::arg("samples"), "Returns (magnitudes, flatness).");

    py::class_<ControllerGains>(m, "ControllerGains")
        .def(py::init([](double rho, const LogisticParams& p) { return ControllerGains{rho, p}; }),
             py::arg("rho"), py::arg("params"))
        .def_readonly("rho", &ControllerGains::rho)
        .def("stability", [](const ControllerGains& g) { return std::string(to_string(g.stability())); });

    m.def("control", &control, py::arg("gains"), py::arg("e"), py::arg("d"));
    m.def("step_response", &step_response, py::arg("gains"), py::arg("y"), py::arg("d"));
    m.def("error", &error, py::arg("y"), py::arg("x"));
    m.def("predict_error", &predict_error, py::arg("rho"), py::arg("e0"), py::arg("n"));
    m.def("lyapunov_delta", &lyapunov_delta, py::arg("rho"), py::arg("e"));
    m.def("check_degenerate_sync", &check_degenerate_sync, py::arg("x"), py::arg("y"), py::arg("k"));

    m.def(
        "scramble",
        [](double x, double i, const std::string& op) {
            return scramble(x, InfoSymbol{i}, OperatorRegistry::builtin().get(op)).z;
        },
        py::arg("x"), py::arg("i"), py::arg("op") = "additive");
    m.def(
        "recover_symbol",
        [](double z, double y, const std::string& op) {
            return recover_symbol(MaskedSample{z}, y, OperatorRegistry::builtin().get(op));
        },
        py::arg("z"), py::arg("y"), py::arg("op") = "additive");
    m.def(
        "threshold_detect",
        [](const std::vector<double>& s, std::size_t hold, double t) { return threshold_detect(s, hold, t); },
        py::arg("symbols"), py::arg("hold"), py::arg("threshold"));

    m.def(
        "spread",
        [](const bits::BitSequence& info, std::size_t m_bits, std::size_t n_bits) {
            return bits::spread(info, bits::FrameSpec(m_bits, n_bits));
        },
        py::arg("info"), py::arg("m"), py::arg("n"));
    m.def(
        "mask_bits",
        [](const bits::BitSequence& b, const bits::BitSequence& c) { return bits::mask_bits(b, c); },
        py::arg("bits"), py::arg("carrier"));
    m.def(
        "correlate",
        [](const bits::BitSequence& r, std::size_t m_bits, std::size_t n_bits) {
            return bits::correlate(r, bits::FrameSpec(m_bits, n_bits));
        },
        py::arg("received"), py::arg("m"), py::arg("n"));
    m.def(
        "decide", [](const std::vector<double>& s, double t) { return bits::decide(s, t); },
        py::arg("block_means"), py::arg("threshold") = bits::kDecisionThreshold);

    m.def(
        "fx_from_real",
        [](double x, double k) {
            auto r = fx::fx_from_real(x, k);
            return py::make_tuple(r.value.value, r.saturated);
        },
        py::arg("x"), py::arg("k") = 1.0, "Returns (value, saturated).");
    m.def(
        "fx_step",
        [](std::int32_t mu_q, std::int16_t x) {
            return fx::fx_step(fx::FixedParams(mu_q, 0), fx::FixedState{x}).value.value;
        },
        py::arg("mu_q"), py::arg("x"));
    m.def(
        "fx_control",
        [](std::int32_t mu_q, std::int32_t rho_q, std::int32_t e, std::int16_t d) {
            return fx::fx_control(fx::FixedParams(mu_q, rho_q), e, fx::FixedState{d}).value;
        },
        py::arg("mu_q"), py::arg("rho_q"), py::arg("e"), py::arg("d"));
    m.def(
        "fx_run_sync",
        [](std::int32_t mu_q, std::int32_t rho_q, std::int16_t x0, std::int16_t y0, std::size_t steps) {
            auto t = fx::fx_run_sync(fx::FixedParams(mu_q, rho_q), fx::FixedState{x0},
                                     fx::FixedState{y0}, steps);
            py::dict d;
            d["first_equal"] = t.first_equal ? py::cast(*t.first_equal) : py::none();
            d["held"] = t.held;
            d["saturation_events"] = t.saturation_events;
            d["divergence_events"] = t.divergence_events;
            std::vector<std::int16_t> xs, ys;
            for (auto s : t.x) {
                xs.push_back(s.value);
            }
            for (auto s : t.y) {
                ys.push_back(s.value);
            }
            d["x"] = xs;
            d["y"] = ys;
            return d;
        },
        py::arg("mu_q"), py::arg("rho_q"), py::arg("x0"), py::arg("y0"), py::arg("steps"));

    m.def("default_channel_table", [] {
        const auto table = hop::build_default_table();
        py::list rows;
        for (const auto& e : table.entries()) {
            rows.append(py::make_tuple(e.index, e.f_low, e.f_high, e.f_center));
        }
        return rows;
    });
    m.def(
        "select_channel",
        [](double state, double k) { return hop::select_channel(state, k, hop::build_default_table()); },
        py::arg("state"), py::arg("k") = 1.0, "Channel index in the default 100-entry table.");
    m.def(
        "hop_trigger",
        [](const std::vector<double>& h, double tol, std::size_t window) {
            return hop::hop_trigger(h, tol, window);
        },
        py::arg("epsilon_history"), py::arg("tol") = hop::kTriggerTolerance,
        py::arg("window") = hop::kTriggerWindow);

    m.def(
        "run_session",
        [](const std::string& kind, const std::string& config_text, std::optional<std::uint64_t> seed) {
            const auto cfg = sim::parse_config(config_text, seed);
            return result_to_dict(sim::run_session(kind_from(kind), cfg));
        },
        py::arg("kind"), py::arg("config"), py::arg("seed") = py::none(),
        "Runs sync/transmit/digital/hop from key=value config text.");
    m.def(
        "trace_csv",
        [](const std::string& kind, const std::string& config_text) {
            const auto cfg = sim::parse_config(config_text);
            std::ostringstream os;
            sim::write_trace_csv(os, sim::run_session(kind_from(kind), cfg).trace);
            return os.str();
        },
        py::arg("kind"), py::arg("config"));
}

} // namespace chaoslink
