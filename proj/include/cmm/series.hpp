#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cmm {

/// Calendar anchor for a uniformly sampled series: a year plus a 0-based
/// sub-period index in [0, period). Monthly data uses period 12, sub 0 = January.
struct SeriesStart {
    int year = 2000;
    int sub = 0;
};

/// A uniformly sampled sequence of strictly positive values with a seasonal
/// period. Timestamps are implied by (start, index); there are no gaps.
struct TimeSeries {
    std::string id;
    int period = 12;
    SeriesStart start;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    /// Timestamp label of observation i, formatted "YYYY-MM" (MM = sub-period + 1).
    std::string label_at(std::size_t i) const;
};

/// Checks the core invariants: period >= 2, length >= 3 * period, all values
/// strictly positive. Throws std::invalid_argument naming the first offender.
void validate(const TimeSeries& ts);

/// Deterministic prefix/suffix split. `train` holds the first
/// floor(fraction * n) observations, `test` the remainder.
struct Split {
    double train_fraction = 0.7;
    TimeSeries train;
    TimeSeries test;
    int eval_horizon = 24;
};

/// Parameters of the synthetic generator:
///   value_t = (base_level + trend_slope * t) * amplitudes[t % period] * exp(eps_t)
/// with eps_t ~ Normal(0, noise_sd), drawn from a seeded generator.
struct SynthSpec {
    int n = 120;
    int period = 12;
    double base_level = 100.0;
    double trend_slope = 0.0;
    std::vector<double> seasonal_amplitudes;  // size == period, mean == 1 (1e-9)
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    std::string id = "synth";
};

TimeSeries load_csv(const std::string& path, int period);

/// Parses CSV text with header "date,value" and rows "YYYY-MM,<decimal>".
/// Data rows are numbered from 1 in error messages.
TimeSeries parse_csv(const std::string& text, int period, const std::string& id);

std::string to_csv(const TimeSeries& ts);
void write_csv(const TimeSeries& ts, const std::string& path);

Split split(const TimeSeries& ts, double fraction, int horizon);

TimeSeries generate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const std::string& json_text);

}  // namespace cmm
