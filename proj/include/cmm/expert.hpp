#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cmm/decompose.hpp"
#include "cmm/registry.hpp"

namespace cmm {

/// Positions into the trend/seasonal/irregular pools (not expert ids).
struct Triplet {
    int t = 0, s = 0, i = 0;
};

enum class RefitPolicy { Once, Every };

struct TableOptions {
    RefitPolicy policy = RefitPolicy::Once;
    int every_m = 0;  // refit cadence when policy == Every
    int threads = 1;
};

/// One-step-ahead component forecasts for every pool model at every scored
/// point, stored row-major per role: forecasts[role][pos * n_points + point].
/// This factored table stands in for the full Cartesian expert table; a
/// triplet's forecast is the product of its three component cells.
struct ComponentForecastTable {
    int first_point = 0;
    int n_points = 0;
    std::array<std::vector<int>, 3> expert_ids;  // pool position -> registry id
    std::array<std::vector<double>, 3> forecasts;
    std::array<std::vector<std::uint8_t>, 3> missed;

    std::size_t pool_size(Role r) const { return expert_ids[static_cast<int>(r)].size(); }
    std::size_t triplet_count() const {
        return pool_size(Role::Trend) * pool_size(Role::Seasonal) * pool_size(Role::Irregular);
    }
    double at(Role r, int pos, int point) const {
        return forecasts[static_cast<int>(r)][static_cast<std::size_t>(pos) *
                                                  static_cast<std::size_t>(n_points) +
                                              static_cast<std::size_t>(point)];
    }
    bool is_missed(Role r, int pos, int point) const {
        return missed[static_cast<int>(r)][static_cast<std::size_t>(pos) *
                                               static_cast<std::size_t>(n_points) +
                                           static_cast<std::size_t>(point)] != 0;
    }
};

/// Builds the table for scored points [begin, end). Models are fitted on the
/// component values before each refit origin (policy Once refits only at
/// `begin`) and forecast one step ahead with teacher-forced origins: observed
/// component values, never own forecasts, extend the origin between refits.
/// A model whose fit or forecast fails gets the component's last observed
/// value and a missed flag; the table itself never aborts.
ComponentForecastTable build_table(const Decomposition& dec, const Registry& reg, int begin,
                                   int end, const TableOptions& options);

/// Product of the three component forecasts.
double expert_forecast(const ComponentForecastTable& table, const Triplet& tp, int point);

struct RankedExpert {
    double ape = 0.0;  // |forecast - actual| / |actual|
    Triplet triplet;
};

/// Top-K (ascending |APE|) and bottom-K (descending |APE|) experts at one
/// scored point. Ties break on the lexicographic (t, s, i) pool positions.
struct PointRanking {
    int point = 0;
    int k = 0;
    std::vector<RankedExpert> top;
    std::vector<RankedExpert> bottom;
};

PointRanking rank_point(const ComponentForecastTable& table, int point, double actual, int k);

/// Atomic expert ids over/under-represented in one point's ranking: an id
/// qualifies when its occurrence count strictly exceeds K / pool_size.
struct BestSetsEntry {
    int point = 0;
    std::array<std::vector<int>, 3> best;
    std::array<std::vector<int>, 3> bad;
};

BestSetsEntry best_models(const PointRanking& ranking, const ComponentForecastTable& table);

}  // namespace cmm
