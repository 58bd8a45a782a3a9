#pragma once

#include <span>
#include <vector>

namespace cmm {

struct HWParams {
    double alpha = 0.2;
    double beta = 0.1;
    double gamma = 0.1;
    int period = 12;
};

struct HWState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> indices;  // most recent `period` seasonal indices, oldest first
};

struct HWResult {
    std::vector<double> forecasts;
    HWState state;
};

/// Forecast i >= 1 steps past the state's origin: (level + i*trend) * index.
double hw_forecast_from_state(const HWState& state, int i);

/// Multiplicative Holt-Winters. Level/trend seeded from the first two cycles,
/// indices from the first cycle; updates run from the second cycle onward.
HWResult holt_winters(std::span<const double> series, const HWParams& params, int h);

/// One-step-ahead in-sample forecasts for t in [period, n).
std::vector<double> hw_one_step_path(std::span<const double> series, const HWParams& params);

/// Grid member minimizing in-sample one-step MSE over t in [2*period, n);
/// ties go to the lexicographically smallest (alpha, beta, gamma).
HWParams fit_hw(std::span<const double> series, const std::vector<HWParams>& grid);

/// 0.05 .. 0.95 in steps of 0.15 for each constant (343 members).
std::vector<HWParams> default_hw_grid(int period);

void validate(const HWParams& params);

}  // namespace cmm
