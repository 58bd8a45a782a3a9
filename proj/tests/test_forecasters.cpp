#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cmm/forecasters.hpp"
#include "cmm/smoothers.hpp"

using namespace cmm;

namespace {

// Test-local generator so the simulation oracles stay independent of the
// library's RNG choices.
struct TestRng {
    std::uint64_t state;
    explicit TestRng(std::uint64_t seed) : state(seed * 2685821657736338717ull + 1) {}

    double uniform() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    double gaussian() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

std::vector<double> simulate_ar1(double phi, int n, std::uint64_t seed) {
    TestRng rng(seed);
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(n));
    double prev = 0.0;
    for (int t = 0; t < n + 100; ++t) {
        const double v = phi * prev + rng.gaussian();
        if (t >= 100) x.push_back(v);
        prev = v;
    }
    return x;
}

std::vector<double> simulate_ima1(double theta, int n, std::uint64_t seed) {
    // y_t = y_{t-1} + e_t + theta * e_{t-1}
    TestRng rng(seed);
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(n));
    double level = 100.0, prev_e = 0.0;
    for (int t = 0; t < n; ++t) {
        const double e = rng.gaussian();
        level += e + theta * prev_e;
        prev_e = e;
        y.push_back(level);
    }
    return y;
}

ModelSpec arima_spec(int p, int d, int q, bool intercept = true, bool log = false, int P = 0,
                     int D = 0, int Q = 0, int s = 0) {
    ModelSpec m;
    m.family = ModelFamily::Arima;
    m.p = p;
    m.d = d;
    m.q = q;
    m.P = P;
    m.D = D;
    m.Q = Q;
    m.s = s;
    m.intercept = intercept;
    m.log_transform = log;
    return m;
}

}  // namespace

TEST_CASE("stationary_region flags unit roots") {
    CHECK(detail::stationary_region({0.5}));
    CHECK_FALSE(detail::stationary_region({1.1}));
    CHECK(detail::stationary_region({1.4, -0.45}));       // companion roots 0.9, 0.5
    CHECK_FALSE(detail::stationary_region({1.5, -0.5}));  // unit root
    CHECK(detail::stationary_region({}));
}

TEST_CASE("seasonal polynomial expansion matches the convolution") {
    const auto a = detail::expand_ar({0.5}, {0.3}, 4);
    REQUIRE(a.size() == 5);
    CHECK(a[0] == doctest::Approx(0.5));
    CHECK(a[1] == doctest::Approx(0.0));
    CHECK(a[2] == doctest::Approx(0.0));
    CHECK(a[3] == doctest::Approx(0.3));
    CHECK(a[4] == doctest::Approx(-0.15));  // -phi*PHI

    const auto b = detail::expand_ma({0.4}, {0.2}, 4);
    REQUIRE(b.size() == 5);
    CHECK(b[3] == doctest::Approx(0.2));
    CHECK(b[4] == doctest::Approx(0.08));  // +theta*THETA
}

TEST_CASE("AR(1) coefficient recovery (simulation oracle)") {
    const auto x = simulate_ar1(0.7, 500, 42);
    const FittedModel fm = fit(arima_spec(1, 0, 0), x);
    CHECK(fm.ar[0] > 0.6);
    CHECK(fm.ar[0] < 0.8);
}

TEST_CASE("ARIMA(0,1,1) theta recovery (simulation oracle)") {
    const auto y = simulate_ima1(0.5, 400, 7);
    const FittedModel fm = fit(arima_spec(0, 1, 1, false), y);
    CHECK(fm.ma[0] > 0.35);
    CHECK(fm.ma[0] < 0.65);
}

TEST_CASE("white noise leaves a small AR(1) coefficient") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        TestRng rng(seed);
        std::vector<double> x(1000);
        for (double& v : x) v = rng.gaussian();
        const FittedModel fm = fit(arima_spec(1, 0, 0), x);
        CHECK(std::abs(fm.ar[0]) < 0.2);
    }
}

TEST_CASE("ARIMA(0,1,0) NOINT has no free parameters") {
    const auto y = simulate_ima1(0.0, 60, 3);
    const FittedModel fm = fit(arima_spec(0, 1, 0, false), y);
    CHECK(fm.ar.empty());
    CHECK(fm.ma.empty());
    CHECK(fm.mean == 0.0);
    CHECK(fm.converged);
    // residuals are the first differences, so the variance matches them
    double ssq = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double d = y[t] - y[t - 1];
        ssq += d * d;
    }
    CHECK(fm.residual_variance == doctest::Approx(ssq / (y.size() - 1)).epsilon(1e-12));
}

TEST_CASE("AR(1) forecasts halve from the last value") {
    FittedModel fm;
    fm.spec = arima_spec(1, 0, 0, false);
    fm.ar = {0.5};
    const std::vector<double> origin{1.0, 2.0, 8.0};
    const auto f = forecast(fm, origin, 3);
    CHECK(f[0] == doctest::Approx(4.0));
    CHECK(f[1] == doctest::Approx(2.0));
    CHECK(f[2] == doctest::Approx(1.0));
}

TEST_CASE("random walk repeats the last value") {
    ModelSpec spec;
    spec.family = ModelFamily::RandomWalk;
    const FittedModel fm = fit(spec, std::vector<double>{1.0, 5.0, 42.0});
    const auto f = forecast(fm, std::vector<double>{1.0, 5.0, 42.0}, 3);
    CHECK(f == std::vector<double>{42.0, 42.0, 42.0});
}

TEST_CASE("differencing inversion matches a hand-rolled oracle for d<=2") {
    // (0,d,0) with intercept c: the d-differenced forecast is the constant c;
    // integrating by hand gives the expected level path.
    const std::vector<double> y{10.0, 12.0, 15.0, 19.0, 24.0, 30.0, 37.0, 45.0};

    SUBCASE("d=1") {
        FittedModel fm;
        fm.spec = arima_spec(0, 1, 0);
        fm.mean = 2.5;
        const auto f = forecast(fm, y, 3);
        CHECK(f[0] == doctest::Approx(47.5));
        CHECK(f[1] == doctest::Approx(50.0));
        CHECK(f[2] == doctest::Approx(52.5));
    }
    SUBCASE("d=2") {
        FittedModel fm;
        fm.spec = arima_spec(0, 2, 0);
        fm.mean = 1.0;
        // second differences forecast 1, so first differences continue
        // 8+1=9, 10, 11 and levels 54, 64, 75
        const auto f = forecast(fm, y, 3);
        CHECK(f[0] == doctest::Approx(54.0));
        CHECK(f[1] == doctest::Approx(64.0));
        CHECK(f[2] == doctest::Approx(75.0));
    }
    SUBCASE("seasonal D=1") {
        FittedModel fm;
        fm.spec = arima_spec(0, 0, 0, false, false, 0, 1, 0, 4);
        const std::vector<double> q{1.0, 2.0, 3.0, 4.0, 1.5, 2.5, 3.5, 4.5};
        const auto f = forecast(fm, q, 4);
        CHECK(f[0] == doctest::Approx(1.5));
        CHECK(f[1] == doctest::Approx(2.5));
        CHECK(f[2] == doctest::Approx(3.5));
        CHECK(f[3] == doctest::Approx(4.5));
    }
}

TEST_CASE("scale equivariance of NOINT ARIMA forecasts") {
    const auto base = simulate_ar1(0.6, 120, 9);
    std::vector<double> shifted(base);
    for (double& v : shifted) v += 50.0;
    std::vector<double> scaled(shifted);
    const double k = 7.25;
    for (double& v : scaled) v *= k;

    for (auto spec : {arima_spec(1, 0, 0, false), arima_spec(0, 1, 1, false),
                      arima_spec(2, 1, 0, false)}) {
        const FittedModel fa = fit(spec, shifted);
        const FittedModel fb = fit(spec, scaled);
        const auto f1 = forecast(fa, shifted, 4);
        const auto f2 = forecast(fb, scaled, 4);
        for (int i = 0; i < 4; ++i) {
            CHECK(f2[static_cast<std::size_t>(i)] ==
                  doctest::Approx(k * f1[static_cast<std::size_t>(i)]).epsilon(1e-6));
        }
    }
}

TEST_CASE("log models forecast positive values") {
    const auto base = simulate_ar1(0.5, 100, 13);
    std::vector<double> y;
    for (double v : base) y.push_back(std::exp(0.02 * v) * 50.0);
    for (auto spec : {arima_spec(1, 0, 0, true, true), arima_spec(0, 1, 1, false, true),
                      arima_spec(1, 1, 0, true, true)}) {
        const FittedModel fm = fit(spec, y);
        for (double f : forecast(fm, y, 6)) CHECK(f > 0.0);
    }
}

TEST_CASE("log transform rejects non-positive series") {
    std::vector<double> y(40, 10.0);
    y[5] = -1.0;
    CHECK_THROWS_AS(fit(arima_spec(1, 0, 0, true, true), y), std::invalid_argument);
}

TEST_CASE("series too short for the orders is rejected") {
    std::vector<double> y(5, 1.0);
    CHECK_THROWS_AS(fit(arima_spec(1, 0, 0), y), std::invalid_argument);
}

TEST_CASE("fit determinism") {
    const auto x = simulate_ar1(0.7, 300, 21);
    const FittedModel a = fit(arima_spec(2, 0, 1), x);
    const FittedModel b = fit(arima_spec(2, 0, 1), x);
    CHECK(a.ar == b.ar);
    CHECK(a.ma == b.ma);
    CHECK(a.mean == b.mean);
    CHECK(a.residual_variance == b.residual_variance);
}

// ---- Holt-Winters ----

TEST_CASE("hw forecast formula: direct substitution") {
    HWState state;
    state.level = 100.0;
    state.trend = 2.0;
    state.indices = {1.1, 0.9, 1.0, 1.0};
    CHECK(hw_forecast_from_state(state, 1) == doctest::Approx(112.2));
    CHECK(hw_forecast_from_state(state, 2) == doctest::Approx(0.9 * 104.0));
}

TEST_CASE("hw on a constant series forecasts the constant") {
    const std::vector<double> x(30, 20.0);
    for (double alpha : {0.1, 0.5, 0.9}) {
        const HWResult res = holt_winters(x, HWParams{alpha, 0.3, 0.4, 6}, 8);
        for (double f : res.forecasts) CHECK(f == doctest::Approx(20.0).epsilon(1e-12));
    }
}

TEST_CASE("hw smoothing-constants-to-zero limit reproduces the initialization") {
    std::vector<double> x;
    const std::vector<double> amps{1.2, 0.8, 1.1, 0.9};
    for (int t = 0; t < 20; ++t) {
        x.push_back((50.0 + 2.0 * t) * amps[static_cast<std::size_t>(t % 4)]);
    }
    const double eps = 1e-12;
    const HWResult res = holt_winters(x, HWParams{eps, eps, eps, 4}, 4);

    // initialization from the first two cycles
    double m1 = 0.0, m2 = 0.0;
    for (int t = 0; t < 4; ++t) m1 += x[static_cast<std::size_t>(t)];
    for (int t = 4; t < 8; ++t) m2 += x[static_cast<std::size_t>(t)];
    m1 /= 4.0;
    m2 /= 4.0;
    const double trend0 = (m2 - m1) / 4.0;
    const int n = 20;
    for (int i = 1; i <= 4; ++i) {
        const double level_at_end = m1 + trend0 * (n - 4);  // level advances by trend each step
        const double idx = x[static_cast<std::size_t>((n - 4 + i - 1) % 4)] / m1;
        CHECK(res.forecasts[static_cast<std::size_t>(i - 1)] ==
              doctest::Approx((level_at_end + i * trend0) * idx).epsilon(1e-6));
    }
}

TEST_CASE("fit_hw returns the singleton and breaks ties lexicographically") {
    const std::vector<double> x(36, 5.0);
    const HWParams only{0.42, 0.17, 0.33, 12};
    const HWParams got = fit_hw(x, {only});
    CHECK(got.alpha == doctest::Approx(0.42));

    // constant series: every member ties at zero MSE
    const HWParams tie = fit_hw(x, default_hw_grid(12));
    CHECK(tie.alpha == doctest::Approx(0.05));
    CHECK(tie.beta == doctest::Approx(0.05));
    CHECK(tie.gamma == doctest::Approx(0.05));
}

TEST_CASE("fit_hw selection is grid-optimal (exhaustive oracle)") {
    std::vector<double> x;
    const std::vector<double> amps{1.3, 0.7, 1.2, 0.8};
    for (int t = 0; t < 32; ++t) {
        x.push_back((40.0 + 1.5 * t) * amps[static_cast<std::size_t>(t % 4)]);
    }
    const auto grid = default_hw_grid(4);
    const HWParams best = fit_hw(x, grid);
    auto mse_of = [&](const HWParams& p) {
        const auto path = hw_one_step_path(x, p);
        double ssq = 0.0;
        int nu = 0;
        for (std::size_t t = 8; t < x.size(); ++t) {
            const double e = x[t] - path[t - 4];
            ssq += e * e;
            ++nu;
        }
        return ssq / nu;
    };
    const double best_mse = mse_of(best);
    for (const auto& p : grid) CHECK(best_mse <= mse_of(p) + 1e-12);
}

TEST_CASE("hw nails a noise-free multiplicative series (threshold frozen from a run)") {
    std::vector<double> x;
    const std::vector<double> amps{1.25, 0.8, 1.05, 0.9};
    for (int t = 0; t < 48; ++t) {
        x.push_back((100.0 + 1.0 * t) * amps[static_cast<std::size_t>(t % 4)]);
    }
    const std::vector<double> train(x.begin(), x.begin() + 36);
    const HWParams params = fit_hw(train, default_hw_grid(4));
    const HWResult res = holt_winters(train, params, 12);
    double mape = 0.0;
    for (int i = 0; i < 12; ++i) {
        mape += std::abs(
            (x[static_cast<std::size_t>(36 + i)] - res.forecasts[static_cast<std::size_t>(i)]) /
            x[static_cast<std::size_t>(36 + i)]);
    }
    mape = 100.0 * mape / 12.0;
    CHECK(mape < 0.5);
}

TEST_CASE("hw validates parameters and series") {
    const std::vector<double> x(30, 5.0);
    CHECK_THROWS_AS(holt_winters(x, HWParams{0.0, 0.5, 0.5, 6}, 2), std::invalid_argument);
    CHECK_THROWS_AS(holt_winters(x, HWParams{0.5, 1.0, 0.5, 6}, 2), std::invalid_argument);
    const std::vector<double> tiny(7, 5.0);
    CHECK_THROWS_AS(holt_winters(tiny, HWParams{0.5, 0.5, 0.5, 6}, 2), std::invalid_argument);
}

// ---- other families ----

TEST_CASE("holt tracks a clean linear trend") {
    std::vector<double> x;
    for (int t = 0; t < 40; ++t) x.push_back(10.0 + 3.0 * t);
    ModelSpec spec;
    spec.family = ModelFamily::Holt;
    const FittedModel fm = fit(spec, x);
    const auto f = forecast(fm, x, 3);
    CHECK(f[0] == doctest::Approx(10.0 + 3.0 * 40).epsilon(1e-6));
    CHECK(f[2] == doctest::Approx(10.0 + 3.0 * 42).epsilon(1e-6));
}

TEST_CASE("brown linear exponential tracks a linear trend") {
    std::vector<double> x;
    for (int t = 0; t < 60; ++t) x.push_back(5.0 + 2.0 * t);
    ModelSpec spec;
    spec.family = ModelFamily::LinearExponential;
    const FittedModel fm = fit(spec, x);
    const auto f = forecast(fm, x, 2);
    CHECK(f[0] == doctest::Approx(5.0 + 2.0 * 60).epsilon(0.01));
    CHECK(f[1] == doctest::Approx(5.0 + 2.0 * 61).epsilon(0.01));
}

TEST_CASE("linear trend + AR(k) recovers line and residual autocorrelation") {
    TestRng rng(77);
    std::vector<double> x;
    double r = 0.0;
    for (int t = 0; t < 300; ++t) {
        r = 0.6 * r + rng.gaussian();
        x.push_back(20.0 + 0.5 * t + r);
    }
    ModelSpec spec;
    spec.family = ModelFamily::LinearTrendAr;
    spec.p = 1;
    const FittedModel fm = fit(spec, x);
    CHECK(fm.slope == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fm.resid_ar[0] > 0.4);
    CHECK(fm.resid_ar[0] < 0.8);

    // teacher-forced one-step forecast uses the fixed line plus AR recursion
    const auto f = forecast(fm, x, 1);
    const double line = fm.mean + fm.slope * 300.0;
    const double resid_last = x[299] - (fm.mean + fm.slope * 299.0);
    CHECK(f[0] == doctest::Approx(line + fm.resid_ar[0] * resid_last).epsilon(1e-9));
}

TEST_CASE("registry default pools carry the documented counts") {
    const Registry reg = default_registry(12);
    CHECK(reg.trend.size() == 86);
    CHECK(reg.seasonal.size() == 33);
    CHECK(reg.irregular.size() == 34);
    CHECK(reg.triplet_count() == 96492);

    // spot-check the naming convention
    CHECK(reg.find(Role::Trend, 45).name() == "Holt");
    CHECK(reg.find(Role::Trend, 6).name() == "ARIMA (0,1,1)(1,0,0)_s NOINT");
    CHECK(reg.find(Role::Seasonal, 33).name() == "Holt Winter");
    CHECK(reg.find(Role::Seasonal, 4).name() == "ARIMA (0,1,1)_s");
    CHECK(reg.find(Role::Irregular, 34).name() == "Random");
    CHECK(reg.find(Role::Irregular, 20).name() == "Log ARIMA (0,1,1)(1,0,0)_s NOINT");
    CHECK(reg.find(Role::Irregular, 14).name() == "Linear Exponential");
    CHECK(reg.find(Role::Irregular, 33).name() == "Log Linear Trend AR3");
}

TEST_CASE("every registry model fits and forecasts a benign seasonal series") {
    const Registry reg = default_registry(12);
    std::vector<double> x;
    const std::vector<double> amps{1.1, 0.95, 1.05, 0.9, 1.0, 1.0, 1.05, 0.95, 1.1, 0.9, 1.0, 1.0};
    for (int t = 0; t < 96; ++t) {
        x.push_back((80.0 + 0.5 * t) * amps[static_cast<std::size_t>(t % 12)]);
    }
    for (Role role : kRoles) {
        for (const auto& m : reg.pool(role)) {
            const FittedModel fm = fit(m, x);
            const auto f = forecast(fm, x, 2);
            CHECK(std::isfinite(f[0]));
            CHECK(std::isfinite(f[1]));
        }
    }
}

TEST_CASE("registry json round-trips") {
    const Registry reg = default_registry(12);
    const std::string text = registry_to_json(reg);
    const Registry back = registry_from_json(text, 12);
    REQUIRE(back.trend.size() == reg.trend.size());
    REQUIRE(back.seasonal.size() == reg.seasonal.size());
    REQUIRE(back.irregular.size() == reg.irregular.size());
    for (Role r : kRoles) {
        for (std::size_t i = 0; i < reg.pool(r).size(); ++i) {
            const ModelSpec& a = reg.pool(r)[i];
            const ModelSpec& b = back.pool(r)[i];
            CHECK(a.name() == b.name());
            CHECK(a.s == b.s);
        }
    }
}

TEST_CASE("subset registry keeps ids in ascending order") {
    const Registry reg = default_registry(12);
    const Registry sub = subset_registry(reg, {45, 5, 13}, {33}, {34, 2});
    REQUIRE(sub.trend.size() == 3);
    CHECK(sub.trend[0].expert_id == 5);
    CHECK(sub.trend[2].expert_id == 45);
    CHECK(sub.seasonal.size() == 1);
    CHECK(sub.irregular.size() == 2);
    CHECK(sub.triplet_count() == 6);
}
