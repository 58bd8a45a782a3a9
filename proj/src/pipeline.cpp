#include "cmm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "cmm/forecasters.hpp"
#include "cmm/parallel.hpp"

namespace cmm {

namespace {

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(stage) + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(stage) + ": " + e.what());
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ErrorMetrics metrics(std::span<const double> actuals, std::span<const double> forecasts) {
    if (actuals.size() != forecasts.size() || actuals.empty()) {
        throw std::invalid_argument("metrics: need equal non-empty windows");
    }
    const std::size_t n = actuals.size();
    double sse = 0.0, sae = 0.0, spe = 0.0;
    std::vector<double> apes(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (actuals[t] == 0.0) {
            throw std::invalid_argument("metrics: zero actual at index " + std::to_string(t) +
                                        " makes MAPE undefined");
        }
        const double e = actuals[t] - forecasts[t];
        sse += e * e;
        sae += std::abs(e);
        apes[t] = std::abs(e / actuals[t]);
        spe += apes[t];
    }
    ErrorMetrics m;
    m.mse = sse / static_cast<double>(n);
    m.mae = sae / static_cast<double>(n);
    m.rmse = std::sqrt(m.mse);
    m.mape = 100.0 * spe / static_cast<double>(n);
    m.mdape = 100.0 * median_of(apes);
    return m;
}

double improvement_pct(double hw_mape, double cmm_mape) {
    if (!(hw_mape > 0.0)) throw std::invalid_argument("improvement: baseline MAPE must be > 0");
    return 100.0 * (hw_mape - cmm_mape) / hw_mape;
}

double combine_forecasts(const std::vector<double>& trend_f, const std::vector<double>& seasonal_f,
                         const std::vector<double>& irregular_f, CombineStatistic statistic) {
    if (trend_f.empty() || seasonal_f.empty() || irregular_f.empty()) {
        throw std::invalid_argument("combine: every component set must be non-empty");
    }
    if (statistic == CombineStatistic::Mean) {
        // mean over the Cartesian products == product of component means
        return mean_of(trend_f) * mean_of(seasonal_f) * mean_of(irregular_f);
    }
    const std::size_t total = trend_f.size() * seasonal_f.size() * irregular_f.size();
    if (total > 1000000) {
        throw std::runtime_error("combine: median over " + std::to_string(total) +
                                 " products exceeds the 10^6 materialization cap; use MEAN");
    }
    std::vector<double> products;
    products.reserve(total);
    for (double a : trend_f) {
        for (double b : seasonal_f) {
            for (double c : irregular_f) products.push_back(a * b * c);
        }
    }
    return median_of(std::move(products));
}

void validate(const PipelineConfig& config) {
    auto ratio = [](double v, const char* name) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string("config: ") + name + " must lie in (0,1]");
        }
    };
    ratio(config.train_fraction, "train_fraction");
    ratio(config.k_ratio, "k_ratio");
    ratio(config.minsup_ratio, "minsup_ratio");
    ratio(config.fit_window_fraction, "fit_window_fraction");
    if (config.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    if (config.refit == RefitPolicy::Every && config.refit_every < 1) {
        throw std::invalid_argument("config: refit_every must be >= 1");
    }
    if (config.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

Registry make_registry(const PipelineConfig& config, int period) {
    Registry reg = config.registry_json ? registry_from_json(*config.registry_json, period)
                                        : default_registry(period);
    return subset_registry(reg, config.trend_pool_ids, config.seasonal_pool_ids,
                           config.irregular_pool_ids);
}

namespace {

int scoring_k(const PipelineConfig& config, std::size_t triplet_count) {
    const long k = std::lround(config.k_ratio * static_cast<double>(triplet_count));
    return static_cast<int>(std::max(1L, std::min(k, static_cast<long>(triplet_count))));
}

TableOptions table_options(const PipelineConfig& config) {
    TableOptions opt;
    opt.policy = config.refit;
    opt.every_m = config.refit_every;
    opt.threads = config.threads;
    return opt;
}

std::vector<int> position_of_ids(const ComponentForecastTable& table, Role r,
                                 const std::vector<int>& ids) {
    const auto& all = table.expert_ids[static_cast<int>(r)];
    std::vector<int> out;
    out.reserve(ids.size());
    for (int id : ids) {
        auto it = std::lower_bound(all.begin(), all.end(), id);
        if (it == all.end() || *it != id) {
            throw std::invalid_argument(std::string(role_name(r)) + " pool has no expert id " +
                                        std::to_string(id));
        }
        out.push_back(static_cast<int>(it - all.begin()));
    }
    return out;
}

/// Resolves the per-role id sets the combiner will use under the policy.
std::array<std::vector<int>, 3> combined_id_sets(const Registry& reg, const CombinePolicy& policy,
                                                 const ConsistentSets& good,
                                                 const ConsistentSets& bad) {
    std::array<std::vector<int>, 3> out;
    for (Role r : kRoles) {
        const int ri = static_cast<int>(r);
        std::vector<int> full;
        for (const auto& m : reg.pool(r)) full.push_back(m.expert_id);
        switch (policy.source) {
            case CombineSource::All:
                out[ri] = full;
                break;
            case CombineSource::ConsistentGood:
                // a component the mining could not populate falls back to the pool
                out[ri] = good.of(r).empty() ? full : good.of(r);
                break;
            case CombineSource::Filtered: {
                for (int id : full) {
                    const auto& b = bad.of(r);
                    if (!std::binary_search(b.begin(), b.end(), id)) out[ri].push_back(id);
                }
                if (out[ri].empty()) out[ri] = full;
                break;
            }
        }
    }
    return out;
}

struct EvalForecasts {
    std::vector<double> cmm;  // aligned with eval points
};

EvalForecasts one_step_eval(const Decomposition& dec, const Registry& reg,
                            const PipelineConfig& config,
                            const std::array<std::vector<int>, 3>& id_sets, int begin, int end) {
    const ComponentForecastTable table =
        build_table(dec, reg, begin, end, table_options(config));
    std::array<std::vector<int>, 3> positions;
    for (Role r : kRoles) {
        positions[static_cast<int>(r)] = position_of_ids(table, r, id_sets[static_cast<int>(r)]);
    }
    EvalForecasts out;
    out.cmm.resize(static_cast<std::size_t>(end - begin));
    for (int point = 0; point < end - begin; ++point) {
        std::array<std::vector<double>, 3> f;
        for (Role r : kRoles) {
            const int ri = static_cast<int>(r);
            f[ri].reserve(positions[ri].size());
            for (int pos : positions[ri]) f[ri].push_back(table.at(r, pos, point));
        }
        out.cmm[static_cast<std::size_t>(point)] =
            combine_forecasts(f[0], f[1], f[2], config.policy.statistic);
    }
    return out;
}

EvalForecasts multi_step_eval(const Decomposition& dec, const Registry& reg,
                              const PipelineConfig& config,
                              const std::array<std::vector<int>, 3>& id_sets, int begin, int end) {
    const int h = end - begin;
    // h-step forecasts per model from a single origin; misses repeat the last
    // observed component value.
    std::array<std::vector<std::vector<double>>, 3> paths;
    struct Job {
        Role role;
        std::size_t slot;
        int id;
    };
    std::vector<Job> jobs;
    for (Role r : kRoles) {
        const int ri = static_cast<int>(r);
        paths[ri].resize(id_sets[ri].size());
        for (std::size_t slot = 0; slot < id_sets[ri].size(); ++slot) {
            jobs.push_back({r, slot, id_sets[ri][slot]});
        }
    }
    auto component = [&](Role r) -> const std::vector<double>& {
        switch (r) {
            case Role::Trend: return dec.trend;
            case Role::Seasonal: return dec.seasonal;
            default: return dec.irregular;
        }
    };
    parallel_for(static_cast<int>(jobs.size()), config.threads, [&](int j) {
        const Job& job = jobs[static_cast<std::size_t>(j)];
        const std::vector<double>& comp = component(job.role);
        const std::span<const double> origin(comp.data(), static_cast<std::size_t>(begin));
        std::vector<double> path(static_cast<std::size_t>(h), comp[static_cast<std::size_t>(begin - 1)]);
        try {
            const FittedModel fm = fit(reg.find(job.role, job.id), origin);
            auto f = forecast(fm, origin, h);
            bool finite = true;
            for (double v : f) finite = finite && std::isfinite(v);
            if (finite) path = std::move(f);
        } catch (const std::exception&) {
        }
        paths[static_cast<int>(job.role)][job.slot] = std::move(path);
    });

    EvalForecasts out;
    out.cmm.resize(static_cast<std::size_t>(h));
    for (int step = 0; step < h; ++step) {
        std::array<std::vector<double>, 3> f;
        for (Role r : kRoles) {
            const int ri = static_cast<int>(r);
            f[ri].reserve(paths[ri].size());
            for (const auto& path : paths[ri]) f[ri].push_back(path[static_cast<std::size_t>(step)]);
        }
        out.cmm[static_cast<std::size_t>(step)] =
            combine_forecasts(f[0], f[1], f[2], config.policy.statistic);
    }
    return out;
}

std::vector<double> hw_baseline(const TimeSeries& ts, const PipelineConfig& config, int begin,
                                int end) {
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(ts.size())));
    const std::span<const double> train(ts.values.data(), n_train);
    const HWParams params = fit_hw(train, default_hw_grid(ts.period));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(end - begin));
    if (config.multi_step) {
        const std::span<const double> origin(ts.values.data(), static_cast<std::size_t>(begin));
        HWResult res = holt_winters(origin, params, end - begin);
        out = std::move(res.forecasts);
    } else {
        const std::vector<double> path = hw_one_step_path(ts.values, params);
        for (int t = begin; t < end; ++t) {
            out.push_back(path[static_cast<std::size_t>(t - ts.period)]);
        }
    }
    return out;
}

}  // namespace

MiningOutput mine_series(const TimeSeries& ts, const PipelineConfig& config, const Registry& reg) {
    validate(config);
    validate(ts);
    const int n = static_cast<int>(ts.size());
    const int train_end = static_cast<int>(std::floor(config.train_fraction * n));
    if (train_end < 3 * ts.period) {
        throw std::invalid_argument("mine: train window " + std::to_string(train_end) +
                                    " < 3*period");
    }
    const int fit_end = std::max(3 * ts.period,
                                 static_cast<int>(std::floor(config.fit_window_fraction * train_end)));
    if (fit_end >= train_end) {
        throw std::invalid_argument("mine: no scored training points (fit window " +
                                    std::to_string(fit_end) + " >= train window " +
                                    std::to_string(train_end) + ")");
    }

    const Decomposition dec = with_stage("decompose", [&] { return decompose(ts); });
    const ComponentForecastTable table = with_stage("build_table", [&] {
        return build_table(dec, reg, fit_end, train_end, table_options(config));
    });
    const int k = scoring_k(config, table.triplet_count());

    MiningOutput out;
    out.scored_begin = fit_end;
    out.scored_end = train_end;
    for (int point = 0; point < train_end - fit_end; ++point) {
        const double actual = ts.values[static_cast<std::size_t>(fit_end + point)];
        if (actual == 0.0) {
            ++out.dropped_points;
            continue;
        }
        const PointRanking ranking =
            with_stage("rank", [&] { return rank_point(table, point, actual, k); });
        out.entries.push_back(best_models(ranking, table));
    }
    if (out.entries.empty()) {
        throw std::invalid_argument("mine: every scored point was dropped");
    }

    out.good_db = with_stage("build_db", [&] { return build_db(out.entries, Polarity::Good); });
    out.bad_db = build_db(out.entries, Polarity::Bad);
    const int good_minsup = minsup_from_ratio(config.minsup_ratio, out.good_db.size());
    const int bad_minsup = minsup_from_ratio(config.minsup_ratio, out.bad_db.size());
    out.good_closed = with_stage("charm", [&] { return charm(out.good_db, good_minsup); });
    out.bad_closed = charm(out.bad_db, bad_minsup);
    out.good = with_stage("consistent_models", [&] {
        return consistent_models(out.good_closed, out.good_db, config.minsup_ratio);
    });
    out.bad = consistent_models(out.bad_closed, out.bad_db, config.minsup_ratio);
    return out;
}

namespace {

ForecastReport evaluate_series(const TimeSeries& ts, const PipelineConfig& config,
                               const Registry& reg, const ConsistentSets& good,
                               const ConsistentSets& bad) {
    const int n = static_cast<int>(ts.size());
    if (config.horizon >= n) {
        throw std::invalid_argument("evaluate: horizon " + std::to_string(config.horizon) +
                                    " >= series length");
    }
    const int train_end = static_cast<int>(std::floor(config.train_fraction * n));
    if (config.horizon > n - train_end) {
        throw std::invalid_argument("evaluate: horizon " + std::to_string(config.horizon) +
                                    " exceeds test length " + std::to_string(n - train_end));
    }
    const int begin = n - config.horizon;
    const int end = n;

    const Decomposition dec = with_stage("decompose", [&] { return decompose(ts); });
    const auto id_sets = combined_id_sets(reg, config.policy, good, bad);
    const EvalForecasts eval = with_stage("combine", [&] {
        return config.multi_step ? multi_step_eval(dec, reg, config, id_sets, begin, end)
                                 : one_step_eval(dec, reg, config, id_sets, begin, end);
    });
    const std::vector<double> hw = with_stage("hw_baseline", [&] {
        return hw_baseline(ts, config, begin, end);
    });

    ForecastReport report;
    report.series_id = ts.id;
    report.horizon = config.horizon;
    report.good = good;
    report.bad = bad;
    report.combined_ids = id_sets;
    report.rows.reserve(static_cast<std::size_t>(config.horizon));
    std::vector<double> actuals;
    actuals.reserve(static_cast<std::size_t>(config.horizon));
    for (int t = begin; t < end; ++t) {
        ReportRow row;
        row.point = t;
        row.date = ts.label_at(static_cast<std::size_t>(t));
        row.actual = ts.values[static_cast<std::size_t>(t)];
        row.forecast = eval.cmm[static_cast<std::size_t>(t - begin)];
        row.error = row.actual - row.forecast;
        row.hw_forecast = hw[static_cast<std::size_t>(t - begin)];
        report.rows.push_back(row);
        actuals.push_back(row.actual);
    }
    report.cmm = with_stage("metrics", [&] { return metrics(actuals, eval.cmm); });
    report.hw = metrics(actuals, hw);
    report.improvement = improvement_pct(report.hw.mape, report.cmm.mape);
    return report;
}

}  // namespace

ForecastReport run_cmm(const TimeSeries& ts, const PipelineConfig& config) {
    validate(config);
    const Registry reg = make_registry(config, ts.period);
    const MiningOutput mined = mine_series(ts, config, reg);
    ForecastReport report = evaluate_series(ts, config, reg, mined.good, mined.bad);
    report.scored_points = static_cast<int>(mined.entries.size());
    report.dropped_points = mined.dropped_points;
    return report;
}

ForecastReport evaluate_with_sets(const TimeSeries& ts, const PipelineConfig& config,
                                  const Registry& reg, const ConsistentSets& good,
                                  const ConsistentSets& bad) {
    validate(config);
    return evaluate_series(ts, config, reg, good, bad);
}

namespace {

nlohmann::json sets_to_json(const ConsistentSets& sets) {
    nlohmann::json j;
    j["T"] = sets.of(Role::Trend);
    j["S"] = sets.of(Role::Seasonal);
    j["I"] = sets.of(Role::Irregular);
    return j;
}

nlohmann::json metrics_to_json(const ErrorMetrics& m) {
    nlohmann::json j;
    j["mse"] = m.mse;
    j["mape"] = m.mape;
    j["mae"] = m.mae;
    j["rmse"] = m.rmse;
    j["mdape"] = m.mdape;
    return j;
}

}  // namespace

std::string report_to_json(const ForecastReport& report) {
    nlohmann::json j;
    j["series_id"] = report.series_id;
    if (!report.source_series.empty()) j["source_series"] = report.source_series;
    j["horizon"] = report.horizon;
    auto rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["point"] = row.point;
        r["date"] = row.date;
        r["actual"] = row.actual;
        r["forecast"] = row.forecast;
        r["error"] = row.error;
        r["hw_forecast"] = row.hw_forecast;
        rows.push_back(r);
    }
    j["rows"] = rows;
    j["metrics"] = metrics_to_json(report.cmm);
    j["hw_metrics"] = metrics_to_json(report.hw);
    j["improvement_pct"] = report.improvement;
    j["consistent_good"] = sets_to_json(report.good);
    j["consistent_bad"] = sets_to_json(report.bad);
    nlohmann::json combined;
    combined["T"] = report.combined_ids[0];
    combined["S"] = report.combined_ids[1];
    combined["I"] = report.combined_ids[2];
    j["combined_ids"] = combined;
    j["scored_points"] = report.scored_points;
    j["dropped_points"] = report.dropped_points;
    return j.dump(2) + "\n";
}

std::string report_to_plot_csv(const ForecastReport& report) {
    std::string out = "point,actual,cmm_forecast,hw_forecast\n";
    char buf[160];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.point, row.actual,
                      row.forecast, row.hw_forecast);
        out += buf;
    }
    return out;
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    PipelineConfig config;
    if (text.empty()) return config;
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    config.train_fraction = j.value("train_fraction", config.train_fraction);
    config.k_ratio = j.value("k_ratio", config.k_ratio);
    config.minsup_ratio = j.value("minsup_ratio", config.minsup_ratio);
    config.horizon = j.value("horizon", config.horizon);
    config.fit_window_fraction = j.value("fit_window_fraction", config.fit_window_fraction);
    config.multi_step = j.value("multi_step", config.multi_step);
    config.threads = j.value("threads", config.threads);
    if (j.contains("combine")) {
        const auto& c = j["combine"];
        const std::string stat = c.value("statistic", std::string("mean"));
        if (stat == "mean") {
            config.policy.statistic = CombineStatistic::Mean;
        } else if (stat == "median") {
            config.policy.statistic = CombineStatistic::Median;
        } else {
            throw std::invalid_argument("config: unknown combine statistic '" + stat + "'");
        }
        const std::string source = c.value("source", std::string("consistent_good"));
        if (source == "consistent_good") {
            config.policy.source = CombineSource::ConsistentGood;
        } else if (source == "filtered") {
            config.policy.source = CombineSource::Filtered;
        } else if (source == "all") {
            config.policy.source = CombineSource::All;
        } else {
            throw std::invalid_argument("config: unknown combine source '" + source + "'");
        }
    }
    if (j.contains("refit")) {
        const auto& r = j["refit"];
        const std::string policy = r.value("policy", std::string("once"));
        if (policy == "once") {
            config.refit = RefitPolicy::Once;
        } else if (policy == "every") {
            config.refit = RefitPolicy::Every;
            config.refit_every = r.value("every_m", 1);
        } else {
            throw std::invalid_argument("config: unknown refit policy '" + policy + "'");
        }
    }
    if (j.contains("pools")) {
        const auto& p = j["pools"];
        config.trend_pool_ids = p.value("trend", std::vector<int>{});
        config.seasonal_pool_ids = p.value("seasonal", std::vector<int>{});
        config.irregular_pool_ids = p.value("irregular", std::vector<int>{});
    }
    if (j.contains("registry_json")) {
        config.registry_json = j["registry_json"].dump();
    }
    validate(config);
    return config;
}

std::string rankings_csv(const TimeSeries& ts, const PipelineConfig& config,
                         std::size_t max_rows) {
    validate(config);
    validate(ts);
    const Registry reg = make_registry(config, ts.period);
    const int n = static_cast<int>(ts.size());
    const int train_end = static_cast<int>(std::floor(config.train_fraction * n));
    const int fit_end = std::max(3 * ts.period,
                                 static_cast<int>(std::floor(config.fit_window_fraction * train_end)));
    if (fit_end >= train_end) throw std::invalid_argument("rankings: no scored training points");

    const std::size_t rows =
        static_cast<std::size_t>(train_end - fit_end) * reg.triplet_count();
    if (rows > max_rows) {
        throw std::runtime_error("rankings dump would emit " + std::to_string(rows) +
                                 " rows (cap " + std::to_string(max_rows) +
                                 "); rerun with a larger cap or smaller pools");
    }

    const Decomposition dec = decompose(ts);
    const ComponentForecastTable table =
        build_table(dec, reg, fit_end, train_end, table_options(config));
    std::string out = "point,trend_id,seasonal_id,irregular_id,ape\n";
    char buf[120];
    const int nt = static_cast<int>(table.pool_size(Role::Trend));
    const int ns = static_cast<int>(table.pool_size(Role::Seasonal));
    const int ni = static_cast<int>(table.pool_size(Role::Irregular));
    for (int point = 0; point < train_end - fit_end; ++point) {
        const double actual = ts.values[static_cast<std::size_t>(fit_end + point)];
        for (int t = 0; t < nt; ++t) {
            for (int s = 0; s < ns; ++s) {
                for (int i = 0; i < ni; ++i) {
                    const double f = expert_forecast(table, {t, s, i}, point);
                    const double ape = std::abs((f - actual) / actual);
                    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g\n", fit_end + point,
                                  table.expert_ids[0][static_cast<std::size_t>(t)],
                                  table.expert_ids[1][static_cast<std::size_t>(s)],
                                  table.expert_ids[2][static_cast<std::size_t>(i)], ape);
                    out += buf;
                }
            }
        }
    }
    return out;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "series,hw_mape,cmm_mape,improvement_pct\n";
    char buf[200];
    double total = 0.0;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.2f\n", row.series.c_str(), row.hw_mape,
                      row.cmm_mape, row.improvement);
        out += buf;
        total += row.improvement;
    }
    if (!rows.empty()) {
        std::snprintf(buf, sizeof(buf), "Average Improvement (All Series),,,%.2f\n",
                      total / static_cast<double>(rows.size()));
        out += buf;
    }
    return out;
}

}  // namespace cmm
