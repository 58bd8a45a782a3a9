#pragma once

#include <string>
#include <vector>

#include "cmm/series.hpp"

namespace cmm {

/// Multiplicative decomposition of a series: D_t = T_t * S_t * IC_t with
/// DT_t = D_t / T_t and IC_t = DT_t / S_t. All sequences share the source length.
struct Decomposition {
    std::string source_id;
    int period = 12;
    std::vector<double> trend;      // T
    std::vector<double> detrended;  // DT = D / T
    std::vector<double> seasonal;   // S
    std::vector<double> irregular;  // IC = DT / S
};

/// Trend is the trailing `period`-point moving average (the first cycle takes
/// the first-cycle mean). Seasonal index at t is the expanding average of the
/// detrended ratio over all in-range same-phase lags t, t-p, t-2p, ...
/// Every computed value at index t depends only on values up to t.
Decomposition decompose(const TimeSeries& ts);

/// Returns T_t * S_t * IC_t per point; recovers the source exactly up to
/// floating round-off.
std::vector<double> recompose(const Decomposition& dec);

/// 5-column audit CSV: date, D, T, S, IC.
std::string decomposition_to_csv(const TimeSeries& ts, const Decomposition& dec);

}  // namespace cmm
