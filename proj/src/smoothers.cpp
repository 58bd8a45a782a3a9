#include "cmm/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cmm {

void validate(const HWParams& params) {
    auto open_unit = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            throw std::invalid_argument(std::string("holt-winters: ") + name +
                                        " must lie in (0,1)");
        }
    };
    open_unit(params.alpha, "alpha");
    open_unit(params.beta, "beta");
    open_unit(params.gamma, "gamma");
    if (params.period < 2) throw std::invalid_argument("holt-winters: period must be >= 2");
}

double hw_forecast_from_state(const HWState& state, int i) {
    const int p = static_cast<int>(state.indices.size());
    return (state.level + i * state.trend) * state.indices[static_cast<std::size_t>((i - 1) % p)];
}

namespace {

struct HWRun {
    HWState state;
    std::vector<double> one_step;  // aligned with t in [p, n)
};

HWRun run_recursion(std::span<const double> x, const HWParams& params) {
    validate(params);
    const int p = params.period;
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(2 * p)) {
        throw std::invalid_argument("holt-winters: need at least two full cycles, got " +
                                    std::to_string(n));
    }
    for (double v : x) {
        if (!(v > 0.0)) throw std::invalid_argument("holt-winters: series must be positive");
    }

    double m1 = 0.0, m2 = 0.0;
    for (int t = 0; t < p; ++t) m1 += x[static_cast<std::size_t>(t)];
    for (int t = p; t < 2 * p; ++t) m2 += x[static_cast<std::size_t>(t)];
    m1 /= p;
    m2 /= p;

    double level = m1;
    double trend = (m2 - m1) / p;
    std::vector<double> index(n);
    for (int t = 0; t < p; ++t) index[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(t)] / m1;

    HWRun run;
    run.one_step.reserve(n - static_cast<std::size_t>(p));
    for (std::size_t t = static_cast<std::size_t>(p); t < n; ++t) {
        run.one_step.push_back((level + trend) * index[t - static_cast<std::size_t>(p)]);
        const double prev_level = level;
        level = params.alpha * (x[t] / index[t - static_cast<std::size_t>(p)]) +
                (1.0 - params.alpha) * (level + trend);
        trend = params.beta * (level - prev_level) + (1.0 - params.beta) * trend;
        index[t] = params.gamma * (x[t] / level) +
                   (1.0 - params.gamma) * index[t - static_cast<std::size_t>(p)];
    }
    run.state.level = level;
    run.state.trend = trend;
    run.state.indices.assign(index.end() - p, index.end());
    return run;
}

}  // namespace

HWResult holt_winters(std::span<const double> series, const HWParams& params, int h) {
    HWRun run = run_recursion(series, params);
    HWResult res;
    res.state = std::move(run.state);
    res.forecasts.reserve(static_cast<std::size_t>(h));
    for (int i = 1; i <= h; ++i) res.forecasts.push_back(hw_forecast_from_state(res.state, i));
    return res;
}

std::vector<double> hw_one_step_path(std::span<const double> series, const HWParams& params) {
    return run_recursion(series, params).one_step;
}

HWParams fit_hw(std::span<const double> series, const std::vector<HWParams>& grid) {
    if (grid.empty()) throw std::invalid_argument("fit_hw: empty parameter grid");
    std::vector<HWParams> sorted = grid;
    std::sort(sorted.begin(), sorted.end(), [](const HWParams& a, const HWParams& b) {
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        if (a.beta != b.beta) return a.beta < b.beta;
        return a.gamma < b.gamma;
    });

    const HWParams* best = nullptr;
    double best_mse = 0.0;
    for (const auto& params : sorted) {
        const std::vector<double> path = hw_one_step_path(series, params);
        const int p = params.period;
        double ssq = 0.0;
        int nu = 0;
        for (std::size_t t = static_cast<std::size_t>(2 * p); t < series.size(); ++t) {
            const double e = series[t] - path[t - static_cast<std::size_t>(p)];
            ssq += e * e;
            ++nu;
        }
        const double mse = nu > 0 ? ssq / nu : 0.0;
        if (best == nullptr || mse < best_mse) {
            best = &params;
            best_mse = mse;
        }
    }
    return *best;
}

std::vector<HWParams> default_hw_grid(int period) {
    std::vector<HWParams> grid;
    for (int a = 0; a < 7; ++a) {
        for (int b = 0; b < 7; ++b) {
            for (int g = 0; g < 7; ++g) {
                grid.push_back(HWParams{0.05 + 0.15 * a, 0.05 + 0.15 * b, 0.05 + 0.15 * g, period});
            }
        }
    }
    return grid;
}

}  // namespace cmm
