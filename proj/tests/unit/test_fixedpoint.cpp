#include "doctest.h"

#include "chaoslink/chaos_core.hpp"
#include "chaoslink/errors.hpp"
#include "chaoslink/fixedpoint.hpp"
#include "gen.hpp"

#include <cmath>
#include <sstream>

using namespace chaoslink;
using namespace chaoslink::fx;

namespace {

constexpr std::int32_t kMuQ = 15155; // round(3.7 * 4096)
constexpr std::int32_t kRhoQ = 2048; // 0.5

using Wide = __int128;

// floor(a / 2^22) computed exactly in 128 bits.
std::int64_t floor_2_22(Wide a) {
    const Wide d = Wide{1} << 22;
    Wide q = a / d;
    if (a % d != 0 && a < 0) {
        --q;
    }
    return static_cast<std::int64_t>(q);
}

std::int64_t clamp16(std::int64_t v) { return std::clamp<std::int64_t>(v, -32768, 32767); }

std::int64_t step_oracle(std::int64_t mu_q, std::int64_t x) {
    return clamp16(floor_2_22(Wide{mu_q} * x * (1024 - x)));
}

std::int64_t control_oracle(std::int64_t mu_q, std::int64_t rho_q, std::int64_t e, std::int64_t d) {
    return clamp16(floor_2_22((Wide{mu_q} * (e + 2 * d - 1024) + Wide{rho_q} * 1024) * e));
}

} // namespace

TEST_CASE("coefficient quantization") {
    const auto p = FixedParams::from_real(3.7, 0.5);
    CHECK(p.mu_q() == kMuQ);
    CHECK(p.rho_q() == kRhoQ);
    CHECK(p.k() == 1024);
    CHECK(p.mu() == doctest::Approx(15155.0 / 4096.0));
    CHECK(p.rho() == 0.5);
    CHECK(kCoefficientFormat.one() == 4096);
    CHECK_THROWS_AS(FixedParams(0, 0), ParameterError);
    CHECK_THROWS_AS(FixedParams(16385, 0), ParameterError);
    CHECK_THROWS_AS(FixedParams(kMuQ, 40000), ParameterError);
    CHECK_NOTHROW(FixedParams(16384, -32768));
    CHECK_THROWS_AS(QFormat(16, 16), ParameterError);
}

TEST_CASE("real to fixed conversion") {
    CHECK(fx_from_real(0.119140625, 1.0).value.value == 122);
    CHECK(fx_from_real(-1.0, 1.0).value.value == -1024);
    CHECK(fx_from_real(0.1, 1.0).value.value == 102);
    CHECK(fx_from_real(0.5, 2.0).value.value == 256);
    CHECK(fx_from_real(-0.00048828125, 1.0).value.value == -1); // -0.5 LSB rounds away from zero
    const auto hi = fx_from_real(40.0, 1.0);
    CHECK(hi.saturated);
    CHECK(hi.value.value == 32767);
    CHECK(fx_from_real(-40.0, 1.0).value.value == -32768);
    CHECK(fx_to_real(FixedState{512}, 1.0) == 0.5);
    CHECK_THROWS_AS(fx_from_real(0.5, 0.0), ParameterError);
}

TEST_CASE("saturation and floor division helpers") {
    CHECK(saturate16(32767).value == 32767);
    CHECK_FALSE(saturate16(32767).saturated);
    CHECK(saturate16(32768).saturated);
    CHECK(saturate16(-40000).value == -32768);
    static_assert(floor_div(-7, 2) == -4);
    static_assert(floor_div(7, 2) == 3);
    static_assert(floor_div(-8, 2) == -4);
    static_assert(floor_div(0, 5) == 0);
}

TEST_CASE("reference step and control values") {
    const FixedParams p(kMuQ, kRhoQ);
    CHECK(fx_step(p, FixedState{122}).value.value == 397);
    CHECK(fx_control(p, -1146, FixedState{122}).value == 7402);
    CHECK(fx_step_response(p, FixedState{-1024}, FixedState{122}).value.value == -176);
    CHECK(fx_control(p, 0, FixedState{500}).value == 0);
}

TEST_CASE("step matches the wide-integer oracle on every state") {
    const FixedParams p(kMuQ, kRhoQ);
    for (std::int32_t x = -32768; x <= 32767; ++x) {
        const auto got = fx_step(p, FixedState{static_cast<std::int16_t>(x)});
        const auto want = step_oracle(kMuQ, x);
        REQUIRE(got.value.value == want);
        CHECK(got.saturated == (want != floor_2_22(Wide{kMuQ} * x * (1024 - x))));
    }
}

TEST_CASE("quantized step tracks the real map on the 1023 basin states") {
    const FixedParams p(kMuQ, kRhoQ);
    const LogisticParams real(3.7, 1.0);
    for (std::int16_t x = 1; x < 1024; ++x) {
        const auto got = fx_step(p, FixedState{x});
        CHECK_FALSE(got.saturated);
        CHECK(got.value.value >= 0);
        CHECK(got.value.value < 1024);
        const double exact = 1024.0 * step(real, x / 1024.0);
        // floor costs < 1 LSB; mu quantization < 0.013 LSB
        CHECK(exact - got.value.value < 1.02);
        CHECK(exact - got.value.value > -0.02);
    }
}

TEST_CASE("control matches the wide-integer oracle") {
    testgen::Gen g(51);
    for (int t = 0; t < 200000; ++t) {
        const auto mu_q = static_cast<std::int32_t>(g.integer(1, 16384));
        const auto rho_q = static_cast<std::int32_t>(g.integer(-32768, 32767));
        const auto e = static_cast<std::int32_t>(g.integer(-65535, 65535));
        const auto d = static_cast<std::int16_t>(g.integer(-32768, 32767));
        const FixedParams p(mu_q, rho_q);
        REQUIRE(fx_control(p, e, FixedState{d}).value == control_oracle(mu_q, rho_q, e, d));
    }
}

TEST_CASE("equality is absorbing") {
    const FixedParams p(kMuQ, kRhoQ);
    for (std::int16_t x = 1; x < 1024; ++x) {
        const auto y = fx_step_response(p, FixedState{x}, FixedState{x});
        CHECK(y.value == fx_step(p, FixedState{x}).value);
    }
}

TEST_CASE("synchronization from the switch values") {
    const FixedParams p(kMuQ, kRhoQ);
    const auto t = fx_run_sync(p, FixedState{122}, FixedState{-1024}, 1000);
    REQUIRE(t.first_equal);
    CHECK(*t.first_equal == 12);
    CHECK(t.held);
    CHECK(t.divergence_events == 0);
    CHECK(t.saturation_events == 0);
    CHECK(t.x.size() == 1001);
    CHECK(t.x[1].value == 397);
    CHECK(t.y[1].value == -176);
}

TEST_CASE("synchronization from arbitrary starts") {
    // Floored shifts bias the error downward, so some starts settle on a
    // residual offset of -1 or -2 LSB instead of exact equality.
    const FixedParams p(kMuQ, kRhoQ);
    testgen::Gen g(52);
    std::size_t exact = 0;
    for (int t = 0; t < 2000; ++t) {
        const auto x0 = static_cast<std::int16_t>(g.integer(1, 1023));
        const auto y0 = static_cast<std::int16_t>(g.integer(-2048, 2048));
        const auto tr = fx_run_sync(p, FixedState{x0}, FixedState{y0}, 200);
        for (std::size_t n = 32; n < tr.x.size(); ++n) {
            REQUIRE(std::abs(tr.y[n].value - tr.x[n].value) <= 2);
        }
        if (tr.held) {
            ++exact;
            CHECK(*tr.first_equal <= 64);
        }
    }
    CHECK(exact > 1900);
    const auto stuck = fx_run_sync(p, FixedState{85}, FixedState{-2048}, 400);
    CHECK_FALSE(stuck.first_equal);
    const int residual = stuck.y.back().value - stuck.x.back().value;
    CHECK((residual == -1 || residual == -2));
}

TEST_CASE("drive must stay in the basin") {
    const FixedParams p(kMuQ, kRhoQ);
    CHECK_THROWS_AS(fx_run_sync(p, FixedState{0}, FixedState{5}, 10), BasinEscapeError);
    CHECK_THROWS_AS(fx_run_sync(p, FixedState{1024}, FixedState{5}, 10), BasinEscapeError);
    // mu = 4 maps the centre to exactly k
    CHECK_THROWS_AS(fx_run_sync(FixedParams(16384, kRhoQ), FixedState{512}, FixedState{5}, 10),
                    BasinEscapeError);
}

TEST_CASE("analyzer output") {
    CHECK(to_binary16(FixedState{122}) == "0000000001111010");
    CHECK(to_binary16(FixedState{-1024}) == "1111110000000000");
    const auto t = fx_run_sync(FixedParams(kMuQ, kRhoQ), FixedState{122}, FixedState{-1024}, 1);
    std::ostringstream os;
    write_analyzer_csv(os, t);
    CHECK(os.str() ==
          "step,x_bin,x,y_bin,y,equal\n"
          "0,0000000001111010,122,1111110000000000,-1024,0\n"
          "1,0000000110001101,397,1111111101010000,-176,0\n");
}
