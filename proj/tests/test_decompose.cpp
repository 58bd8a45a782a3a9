#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cmm/decompose.hpp"
#include "cmm/series.hpp"

using namespace cmm;

namespace {

TimeSeries series_of(std::vector<double> values, int period, const std::string& id = "t") {
    TimeSeries ts;
    ts.id = id;
    ts.period = period;
    ts.values = std::move(values);
    return ts;
}

SynthSpec random_spec(std::uint64_t seed) {
    // a small deterministic family of specs keyed by seed
    SynthSpec spec;
    spec.period = 4 + static_cast<int>(seed % 3) * 4;  // 4, 8 or 12
    spec.n = 3 * spec.period + 20 + static_cast<int>(seed % 17);
    spec.base_level = 50.0 + static_cast<double>(seed % 100);
    spec.trend_slope = (static_cast<double>(seed % 7) - 3.0) * 0.1;
    spec.noise_sd = 0.02 * static_cast<double>(seed % 5);
    spec.seed = seed;
    spec.seasonal_amplitudes.assign(static_cast<std::size_t>(spec.period), 1.0);
    double bump = 0.2;
    for (std::size_t i = 0; i + 1 < spec.seasonal_amplitudes.size(); i += 2) {
        spec.seasonal_amplitudes[i] += bump;
        spec.seasonal_amplitudes[i + 1] -= bump;
        bump = -bump * 0.5;
    }
    return spec;
}

}  // namespace

TEST_CASE("constant series decomposes to the all-ones fixed point") {
    const TimeSeries ts = series_of(std::vector<double>(36, 9.5), 12);
    const Decomposition dec = decompose(ts);
    for (std::size_t t = 0; t < ts.size(); ++t) {
        CHECK(dec.trend[t] == doctest::Approx(9.5).epsilon(1e-12));
        CHECK(dec.detrended[t] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dec.seasonal[t] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dec.irregular[t] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("trailing moving average matches the hand-computed ramp") {
    std::vector<double> v(36);
    std::iota(v.begin(), v.end(), 1.0);  // 1..36
    const Decomposition dec = decompose(series_of(std::move(v), 12));
    for (int t = 0; t < 12; ++t) CHECK(dec.trend[static_cast<std::size_t>(t)] == doctest::Approx(6.5));
    CHECK(dec.trend[12] == doctest::Approx(7.5));   // mean of 2..13
    CHECK(dec.trend[23] == doctest::Approx(18.5));  // mean of 13..24
    CHECK(dec.trend[35] == doctest::Approx(30.5));  // mean of 25..36
}

TEST_CASE("recompose is the exact inverse") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        const TimeSeries ts = generate(random_spec(seed));
        const Decomposition dec = decompose(ts);
        const std::vector<double> back = recompose(dec);
        REQUIRE(back.size() == ts.size());
        for (std::size_t t = 0; t < ts.size(); ++t) {
            CHECK(std::abs(back[t] - ts.values[t]) <= 1e-10 * std::abs(ts.values[t]));
        }
    }
}

TEST_CASE("noise-free synthetic series leaves a near-unit irregular") {
    SynthSpec spec = random_spec(11);
    spec.noise_sd = 0.0;
    const TimeSeries ts = generate(spec);
    const Decomposition dec = decompose(ts);
    for (std::size_t t = static_cast<std::size_t>(2 * spec.period); t < ts.size(); ++t) {
        CHECK(dec.irregular[t] == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("scale equivariance: k*D scales the trend only") {
    const TimeSeries ts = generate(random_spec(21));
    TimeSeries scaled = ts;
    const double k = 3.75;
    for (double& v : scaled.values) v *= k;
    const Decomposition a = decompose(ts);
    const Decomposition b = decompose(scaled);
    for (std::size_t t = 0; t < ts.size(); ++t) {
        CHECK(b.trend[t] == doctest::Approx(k * a.trend[t]).epsilon(1e-10));
        CHECK(std::abs(b.seasonal[t] - a.seasonal[t]) <= 1e-10 * a.seasonal[t]);
        CHECK(std::abs(b.irregular[t] - a.irregular[t]) <= 1e-10 * a.irregular[t]);
    }
}

TEST_CASE("perfectly periodic detrended ratios give phase-equal seasonal indices") {
    // after the first cycle the detrended series of a pure seasonal pattern
    // is periodic; indices at the same phase then agree from cycle 3 onward
    SynthSpec spec;
    spec.n = 48;
    spec.period = 4;
    spec.base_level = 80.0;
    spec.seasonal_amplitudes = {1.3, 0.7, 1.1, 0.9};
    const TimeSeries ts = generate(spec);
    const Decomposition dec = decompose(ts);
    for (std::size_t t = 8; t + 4 < ts.size(); ++t) {
        const double ratio = dec.detrended[t + 4] / dec.detrended[t];
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("decomposition csv has the audit columns") {
    const TimeSeries ts = generate(random_spec(3));
    const Decomposition dec = decompose(ts);
    const std::string csv = decomposition_to_csv(ts, dec);
    CHECK(csv.rfind("date,D,T,S,IC\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n' ? 1 : 0;
    CHECK(lines == ts.size() + 1);
}
