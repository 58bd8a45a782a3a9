#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cmm/expert.hpp"
#include "cmm/mining.hpp"
#include "cmm/registry.hpp"
#include "cmm/series.hpp"
#include "cmm/smoothers.hpp"

namespace cmm {

enum class CombineStatistic { Mean, Median };

/// Which experts feed the combiner: the mined consistent good sets, the full
/// pools with mined bad ids removed, or the full pools untouched.
enum class CombineSource { ConsistentGood, Filtered, All };

struct CombinePolicy {
    CombineStatistic statistic = CombineStatistic::Mean;
    CombineSource source = CombineSource::ConsistentGood;
};

struct ErrorMetrics {
    double mse = 0.0;
    double mape = 0.0;   // percent
    double mae = 0.0;
    double rmse = 0.0;
    double mdape = 0.0;  // percent
};

/// MSE, MAPE, MAE, RMSE and MdAPE over aligned actual/forecast windows.
/// Percentage measures reject zero actuals, naming the offending index.
ErrorMetrics metrics(std::span<const double> actuals, std::span<const double> forecasts);

/// 100 * (hw - cmm) / hw.
double improvement_pct(double hw_mape, double cmm_mape);

/// Mean combining through the product-of-means factorization; median
/// combining materializes the Cartesian products (capped at 10^6).
double combine_forecasts(const std::vector<double>& trend_f, const std::vector<double>& seasonal_f,
                         const std::vector<double>& irregular_f, CombineStatistic statistic);

struct ReportRow {
    int point = 0;  // index into the source series
    std::string date;
    double actual = 0.0;
    double forecast = 0.0;
    double error = 0.0;  // actual - forecast
    double hw_forecast = 0.0;
};

struct ForecastReport {
    std::string series_id;
    std::string source_series;  // set by inter-series transfer runs
    int horizon = 0;
    std::vector<ReportRow> rows;
    ErrorMetrics cmm;
    ErrorMetrics hw;
    double improvement = 0.0;  // percent vs the Holt-Winters baseline
    ConsistentSets good;
    ConsistentSets bad;
    std::array<std::vector<int>, 3> combined_ids;  // ids actually combined
    int scored_points = 0;
    int dropped_points = 0;
};

struct PipelineConfig {
    double train_fraction = 0.7;
    double k_ratio = 0.2073;       // top/bottom list size over the triplet count
    double minsup_ratio = 0.6;
    CombinePolicy policy;
    int horizon = 24;
    RefitPolicy refit = RefitPolicy::Once;
    int refit_every = 0;
    double fit_window_fraction = 0.5;  // share of the train window used as fit-only prefix
    bool multi_step = false;
    int threads = 1;

    // empty = full default pools
    std::vector<int> trend_pool_ids, seasonal_pool_ids, irregular_pool_ids;
    std::optional<std::string> registry_json;
};

void validate(const PipelineConfig& config);

Registry make_registry(const PipelineConfig& config, int period);

/// Parses the engine fields of a config JSON object; missing fields keep
/// their defaults. The empty string means all defaults.
PipelineConfig pipeline_config_from_json(const std::string& text);

/// Audit dump of the scoring-window rankings, one row per (point, triplet):
/// point,trend_id,seasonal_id,irregular_id,ape. Refuses when the row count
/// would exceed max_rows.
std::string rankings_csv(const TimeSeries& ts, const PipelineConfig& config,
                         std::size_t max_rows);

/// Intermediate products of the mining half of the pipeline, kept for audit
/// dumps and for transfer runs that reuse another series' sets.
struct MiningOutput {
    int scored_begin = 0;
    int scored_end = 0;
    int dropped_points = 0;
    std::vector<BestSetsEntry> entries;
    TransactionDB good_db;
    TransactionDB bad_db;
    std::vector<ClosedItemset> good_closed;
    std::vector<ClosedItemset> bad_closed;
    ConsistentSets good;
    ConsistentSets bad;
};

MiningOutput mine_series(const TimeSeries& ts, const PipelineConfig& config, const Registry& reg);

/// Decompose, score, mine and combine over the last `horizon` points, with
/// the Holt-Winters baseline alongside. Fully deterministic given the config.
ForecastReport run_cmm(const TimeSeries& ts, const PipelineConfig& config);

/// Evaluation reusing ready-made consistent sets (no mining on `ts`). Atomic
/// models are refit on this series' components.
ForecastReport evaluate_with_sets(const TimeSeries& ts, const PipelineConfig& config,
                                  const Registry& reg, const ConsistentSets& good,
                                  const ConsistentSets& bad);

std::string report_to_json(const ForecastReport& report);

/// Plot-data CSV: point,actual,cmm_forecast,hw_forecast.
std::string report_to_plot_csv(const ForecastReport& report);

struct ComparisonRow {
    std::string series;
    double hw_mape = 0.0;
    double cmm_mape = 0.0;
    double improvement = 0.0;
};

/// Comparison table CSV (series, HW MAPE, CMM MAPE, % improvement) with the
/// trailing average-improvement row.
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

}  // namespace cmm
