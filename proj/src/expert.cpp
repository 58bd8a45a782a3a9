#include "cmm/expert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cmm/forecasters.hpp"
#include "cmm/parallel.hpp"

namespace cmm {

namespace {

const std::vector<double>& component_series(const Decomposition& dec, Role r) {
    switch (r) {
        case Role::Trend: return dec.trend;
        case Role::Seasonal: return dec.seasonal;
        case Role::Irregular: return dec.irregular;
    }
    throw std::logic_error("bad role");
}

}  // namespace

ComponentForecastTable build_table(const Decomposition& dec, const Registry& reg, int begin,
                                   int end, const TableOptions& options) {
    const int n = static_cast<int>(dec.trend.size());
    if (begin < 2 || begin >= end || end > n) {
        throw std::invalid_argument("build_table: bad scored range [" + std::to_string(begin) +
                                    "," + std::to_string(end) + ") for series of length " +
                                    std::to_string(n));
    }
    if (options.policy == RefitPolicy::Every && options.every_m < 1) {
        throw std::invalid_argument("build_table: refit cadence must be >= 1");
    }

    ComponentForecastTable table;
    table.first_point = begin;
    table.n_points = end - begin;

    struct Job {
        Role role;
        int pos;
    };
    std::vector<Job> jobs;
    for (Role r : kRoles) {
        const auto& pool = reg.pool(r);
        auto& ids = table.expert_ids[static_cast<int>(r)];
        ids.reserve(pool.size());
        for (const auto& m : pool) ids.push_back(m.expert_id);
        table.forecasts[static_cast<int>(r)]
            .assign(pool.size() * static_cast<std::size_t>(table.n_points), 0.0);
        table.missed[static_cast<int>(r)]
            .assign(pool.size() * static_cast<std::size_t>(table.n_points), 0);
        for (int pos = 0; pos < static_cast<int>(pool.size()); ++pos) jobs.push_back({r, pos});
    }

    auto run_job = [&](int j) {
        const Role role = jobs[static_cast<std::size_t>(j)].role;
        const int pos = jobs[static_cast<std::size_t>(j)].pos;
        const ModelSpec& spec = reg.pool(role)[static_cast<std::size_t>(pos)];
        const std::vector<double>& comp = component_series(dec, role);
        double* row = table.forecasts[static_cast<int>(role)].data() +
                      static_cast<std::size_t>(pos) * static_cast<std::size_t>(table.n_points);
        std::uint8_t* miss = table.missed[static_cast<int>(role)].data() +
                             static_cast<std::size_t>(pos) * static_cast<std::size_t>(table.n_points);

        FittedModel fm;
        bool fitted = false;
        for (int t = begin; t < end; ++t) {
            const bool refit_now =
                t == begin ||
                (options.policy == RefitPolicy::Every && (t - begin) % options.every_m == 0);
            if (refit_now) {
                try {
                    fm = fit(spec, std::span<const double>(comp.data(), static_cast<std::size_t>(t)));
                    fitted = true;
                } catch (const std::exception&) {
                    fitted = false;
                }
            }
            double value = comp[static_cast<std::size_t>(t - 1)];  // fallback: last observed
            bool ok = false;
            if (fitted) {
                try {
                    const auto f = forecast(
                        fm, std::span<const double>(comp.data(), static_cast<std::size_t>(t)), 1);
                    if (std::isfinite(f[0])) {
                        value = f[0];
                        ok = true;
                    }
                } catch (const std::exception&) {
                }
            }
            row[t - begin] = value;
            miss[t - begin] = ok ? 0 : 1;
        }
    };

    parallel_for(static_cast<int>(jobs.size()), options.threads, run_job);
    return table;
}

double expert_forecast(const ComponentForecastTable& table, const Triplet& tp, int point) {
    return table.at(Role::Trend, tp.t, point) * table.at(Role::Seasonal, tp.s, point) *
           table.at(Role::Irregular, tp.i, point);
}

PointRanking rank_point(const ComponentForecastTable& table, int point, double actual, int k) {
    if (actual == 0.0) {
        throw std::invalid_argument("rank_point: actual value is zero at point " +
                                    std::to_string(table.first_point + point));
    }
    if (k < 1) throw std::invalid_argument("rank_point: K must be >= 1");

    const int nt = static_cast<int>(table.pool_size(Role::Trend));
    const int ns = static_cast<int>(table.pool_size(Role::Seasonal));
    const int ni = static_cast<int>(table.pool_size(Role::Irregular));
    const std::size_t total = static_cast<std::size_t>(nt) * ns * ni;

    std::vector<double> ape(total);
    std::size_t idx = 0;
    for (int t = 0; t < nt; ++t) {
        const double tf = table.at(Role::Trend, t, point);
        for (int s = 0; s < ns; ++s) {
            const double tsf = tf * table.at(Role::Seasonal, s, point);
            for (int i = 0; i < ni; ++i, ++idx) {
                const double f = tsf * table.at(Role::Irregular, i, point);
                ape[idx] = std::abs((f - actual) / actual);
            }
        }
    }

    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), total);

    // Lexicographic (t, s, i) equals flat-index order, so ties resolve on the
    // index itself.
    auto asc = [&](std::uint32_t a, std::uint32_t b) {
        if (ape[a] != ape[b]) return ape[a] < ape[b];
        return a < b;
    };
    auto desc = [&](std::uint32_t a, std::uint32_t b) {
        if (ape[a] != ape[b]) return ape[a] > ape[b];
        return a < b;
    };

    PointRanking ranking;
    ranking.point = table.first_point + point;
    ranking.k = static_cast<int>(kk);

    auto unflatten = [&](std::uint32_t f) {
        Triplet tp;
        tp.i = static_cast<int>(f % static_cast<std::uint32_t>(ni));
        tp.s = static_cast<int>((f / static_cast<std::uint32_t>(ni)) % static_cast<std::uint32_t>(ns));
        tp.t = static_cast<int>(f / static_cast<std::uint32_t>(ni * ns));
        return tp;
    };

    std::nth_element(order.begin(), order.begin() + static_cast<long>(kk - 1), order.end(), asc);
    std::sort(order.begin(), order.begin() + static_cast<long>(kk), asc);
    ranking.top.reserve(kk);
    for (std::size_t j = 0; j < kk; ++j) {
        ranking.top.push_back({ape[order[j]], unflatten(order[j])});
    }

    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + static_cast<long>(kk - 1), order.end(), desc);
    std::sort(order.begin(), order.begin() + static_cast<long>(kk), desc);
    ranking.bottom.reserve(kk);
    for (std::size_t j = 0; j < kk; ++j) {
        ranking.bottom.push_back({ape[order[j]], unflatten(order[j])});
    }
    return ranking;
}

namespace {

std::array<std::vector<int>, 3> qualify(const std::vector<RankedExpert>& list,
                                        const ComponentForecastTable& table) {
    std::array<std::vector<int>, 3> counts;
    for (Role r : kRoles) {
        counts[static_cast<int>(r)].assign(table.pool_size(r), 0);
    }
    for (const auto& e : list) {
        ++counts[0][static_cast<std::size_t>(e.triplet.t)];
        ++counts[1][static_cast<std::size_t>(e.triplet.s)];
        ++counts[2][static_cast<std::size_t>(e.triplet.i)];
    }
    std::array<std::vector<int>, 3> out;
    for (Role r : kRoles) {
        const int ri = static_cast<int>(r);
        const double threshold =
            static_cast<double>(list.size()) / static_cast<double>(table.pool_size(r));
        for (std::size_t pos = 0; pos < counts[ri].size(); ++pos) {
            if (static_cast<double>(counts[ri][pos]) > threshold) {
                out[ri].push_back(table.expert_ids[ri][pos]);
            }
        }
    }
    return out;
}

}  // namespace

BestSetsEntry best_models(const PointRanking& ranking, const ComponentForecastTable& table) {
    BestSetsEntry entry;
    entry.point = ranking.point;
    entry.best = qualify(ranking.top, table);
    entry.bad = qualify(ranking.bottom, table);
    return entry;
}

}  // namespace cmm
