#include "doctest.h"

#include "chaoslink/errors.hpp"
#include "chaoslink/scramble.hpp"
#include "chaoslink/sync_control.hpp"
#include "gen.hpp"

#include <cmath>

using namespace chaoslink;

TEST_CASE("additive and multiplicative pairs invert") {
    testgen::Gen g(31);
    const auto add = additive_operator();
    const auto mul = multiplicative_operator();
    for (int t = 0; t < 20000; ++t) {
        const double k = g.uniform(0.1, 10.0);
        const double x = g.open(0.0, k);
        const double i = g.uniform(-2.0, 2.0);
        const double za = add.forward(x, i);
        CHECK(std::abs(add.recover(za, x) - i) <= 1e-12 * (std::abs(za) + 1.0));
        const double zm = mul.forward(x, i);
        CHECK(std::abs(mul.recover(zm, x) - i) <= 1e-12 * (std::abs(i) + 1.0) / std::min(1.0, x));
    }
    CHECK(add.forward(0.25, 1.0) == 1.25);
    CHECK(mul.forward(0.25, 1.0) == 0.5);
    CHECK(mul.recover(0.5, 0.25) == 1.0);
}

TEST_CASE("multiplicative recovery floors the denominator") {
    const auto mul = multiplicative_operator();
    CHECK(std::isfinite(mul.recover(0.3, 0.0)));
    CHECK(mul.recover(0.3, 0.0) == doctest::Approx(0.3 / kMultiplicativeGuard - 1.0));
    CHECK(mul.recover(0.3, -1e-15) == doctest::Approx(-0.3 / kMultiplicativeGuard - 1.0));
}

TEST_CASE("operator registry") {
    OperatorRegistry reg;
    CHECK(reg.contains("additive"));
    CHECK(reg.contains("multiplicative"));
    CHECK_THROWS_AS(reg.get("xor"), ConfigError);
    CHECK_THROWS_AS(reg.add(additive_operator()), ParameterError);
    CHECK_THROWS_AS(reg.add({"", additive_operator().forward, additive_operator().recover}), ParameterError);
    CHECK_THROWS_AS(reg.add({"half", nullptr, nullptr}), ParameterError);
    reg.add({"shift", [](double x, double i) { return x + 2.0 * i; }, [](double z, double y) { return (z - y) / 2.0; }});
    CHECK(reg.names() == std::vector<std::string>{"additive", "multiplicative", "shift"});
    CHECK(recover_symbol(scramble(0.4, {0.3}, reg.get("shift")), 0.4, reg.get("shift")) ==
          doctest::Approx(0.3));
    CHECK(OperatorRegistry::builtin().names().size() == 2);
}

TEST_CASE("epsilon and symbol recovery on the line") {
    const auto& add = OperatorRegistry::builtin().get("additive");
    const auto z = scramble(0.2, {1.0}, add);
    CHECK(z.z == 1.2);
    CHECK(epsilon(0.2, z) == doctest::Approx(-1.0));
    CHECK(recover_symbol(z, 0.2, add) == doctest::Approx(1.0));
}

TEST_CASE("recovered estimate recurrence under additive masking") {
    // With i^ = z - y and the response driven by z, the estimate satisfies
    // i^' = rho i^ + i' + mu i (2x + i - k) / k.
    const ControllerGains g{0.5, LogisticParams(3.7, 1.0)};
    const auto& add = OperatorRegistry::builtin().get("additive");
    testgen::Gen gen(32);
    double x = 0.1;
    double y = 0.37;
    double i = 0.0;
    double i_hat = add.forward(x, i) - y;
    for (int n = 0; n < 200; ++n) {
        const double z = add.forward(x, i);
        const double next_i = (gen.next() & 1u) ? 0.05 : 0.0;
        const double next_x = step(g.params, x);
        const double next_y = step_response(g, y, z);
        const double next_hat = add.recover(add.forward(next_x, next_i), next_y);
        const double predicted = 0.5 * i_hat + next_i + 3.7 * i * (2.0 * x + i - 1.0);
        CHECK(next_hat == doctest::Approx(predicted).epsilon(1e-9));
        x = next_x;
        y = next_y;
        i = next_i;
        i_hat = next_hat;
    }
}

TEST_CASE("threshold detector") {
    const std::vector<double> s{0.0, 0.2, 1.0, 1.0, 0.5, 0.5, 2.0, -1.0};
    CHECK(threshold_detect(s, 2, 0.5) == std::vector<std::uint8_t>{0, 1, 0, 0});
    CHECK(threshold_detect(s, 4, 0.5) == std::vector<std::uint8_t>{1, 0});
    CHECK(threshold_detect(s, 1, 0.5) == std::vector<std::uint8_t>{0, 0, 1, 1, 0, 0, 1, 0});
    CHECK(threshold_detect(std::vector<double>{}, 3, 0.5).empty());
    CHECK_THROWS_AS(threshold_detect(s, 3, 0.5), LengthError);
    CHECK_THROWS_AS(threshold_detect(s, 0, 0.5), ParameterError);
}

TEST_CASE("masked carrier is weakly correlated with the symbol") {
    // Analytic: corr(z, i) = (a/2) / sqrt(var x + a^2/4) for i in {0, a}
    // equiprobable and independent of x.
    const LogisticParams p(3.7, 1.0);
    const auto& add = OperatorRegistry::builtin().get("additive");
    testgen::Gen gen(33);
    const int n = 200000;
    std::vector<double> xs(n), is(n), zs(n);
    double x = 0.1;
    for (int t = 0; t < n; ++t) {
        x = step(p, x);
        xs[t] = x;
    }
    auto corr = [&](double a) {
        double sz = 0, si = 0, szz = 0, sii = 0, szi = 0;
        for (int t = 0; t < n; ++t) {
            is[t] = (gen.next() & 1u) ? a : 0.0;
            zs[t] = add.forward(xs[t], is[t]);
            sz += zs[t];
            si += is[t];
            szz += zs[t] * zs[t];
            sii += is[t] * is[t];
            szi += zs[t] * is[t];
        }
        const double mz = sz / n, mi = si / n;
        return (szi / n - mz * mi) / std::sqrt((szz / n - mz * mz) * (sii / n - mi * mi));
    };
    double mx = 0, mxx = 0;
    for (double v : xs) {
        mx += v;
        mxx += v * v;
    }
    mx /= n;
    const double var_x = mxx / n - mx * mx;
    for (double a : {0.02, 0.2, 1.0}) {
        const double expected = (a / 2.0) / std::sqrt(var_x + a * a / 4.0);
        CHECK(corr(a) == doctest::Approx(expected).epsilon(0.05));
    }
    CHECK(std::abs(corr(0.02)) < 0.1);
}
