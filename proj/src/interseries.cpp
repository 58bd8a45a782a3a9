#include "cmm/interseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "cmm/parallel.hpp"

namespace cmm {

SFDConfig sfd_config_from_json(const std::string& text) {
    SFDConfig config;
    if (text.empty()) return config;
    const nlohmann::json root = nlohmann::json::parse(text);
    if (!root.contains("sfd")) return config;
    const auto& j = root["sfd"];
    config.flat_threshold = j.value("flat_threshold", config.flat_threshold);
    config.pct_diff_threshold = j.value("pct_diff_threshold", config.pct_diff_threshold);
    config.similarity_ratio = j.value("similarity_ratio", config.similarity_ratio);
    config.representative = j.value("representative", config.representative);
    validate(config);
    return config;
}

void validate(const SFDConfig& config) {
    if (config.flat_threshold < 0.0 || config.pct_diff_threshold < 0.0) {
        throw std::invalid_argument("sfd: thresholds must be >= 0");
    }
    if (!(config.similarity_ratio >= 0.0 && config.similarity_ratio <= 1.0)) {
        throw std::invalid_argument("sfd: similarity_ratio must lie in [0,1]");
    }
}

std::vector<Movement> movements(std::span<const double> series, const SFDConfig& config) {
    validate(config);
    if (series.size() < 2) throw std::invalid_argument("movements: need at least two points");
    std::vector<Movement> out;
    out.reserve(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        if (!(series[i] > 0.0)) {
            throw std::invalid_argument("movements: non-positive value at index " +
                                        std::to_string(i));
        }
        Movement m;
        m.pct_change = 100.0 * (series[i + 1] - series[i]) / series[i];
        if (std::abs(m.pct_change) < config.flat_threshold) {
            m.direction = Direction::Flat;
        } else {
            m.direction = m.pct_change > 0.0 ? Direction::Up : Direction::Down;
        }
        out.push_back(m);
    }
    if (!(series.back() > 0.0)) {
        throw std::invalid_argument("movements: non-positive value at index " +
                                    std::to_string(series.size() - 1));
    }
    return out;
}

int sfd(std::span<const double> p, std::span<const double> q, const SFDConfig& config) {
    const std::size_t n = std::min(p.size(), q.size());
    if (n < 2) throw std::invalid_argument("sfd: need at least two common points");
    const auto mp = movements(p.subspan(0, n), config);
    const auto mq = movements(q.subspan(0, n), config);
    int count = 0;
    for (std::size_t i = 0; i < mp.size(); ++i) {
        if (mp[i].direction != mq[i].direction) {
            ++count;
        } else if (std::abs(mp[i].pct_change - mq[i].pct_change) > config.pct_diff_threshold) {
            ++count;
        }
    }
    return count;
}

double normalized_sfd(std::span<const double> p, std::span<const double> q,
                      const SFDConfig& config) {
    const std::size_t n = std::min(p.size(), q.size());
    return static_cast<double>(sfd(p, q, config)) / static_cast<double>(n - 1);
}

GroupingResult group_series(const std::vector<TimeSeries>& list, const SFDConfig& config,
                            int threads) {
    validate(config);
    if (list.size() < 2) throw std::invalid_argument("group: need at least two series");
    const std::size_t n = list.size();

    GroupingResult res;
    res.matrix.assign(n, std::vector<double>(n, 0.0));
    struct Pair {
        std::size_t a, b;
    };
    std::vector<Pair> pairs;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) pairs.push_back({a, b});
    }
    parallel_for(static_cast<int>(pairs.size()), threads, [&](int i) {
        const auto [a, b] = pairs[static_cast<std::size_t>(i)];
        const double v = normalized_sfd(list[a].values, list[b].values, config);
        res.matrix[a][b] = v;
        res.matrix[b][a] = v;
    });

    // single linkage via union-find
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [a, b] : pairs) {
        if (res.matrix[a][b] <= config.similarity_ratio) {
            parent[find(a)] = find(b);
        }
    }

    std::vector<int> group_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (group_of[root] == -1) {
            group_of[root] = static_cast<int>(res.groups.size());
            res.groups.push_back({});
        }
        res.groups[static_cast<std::size_t>(group_of[root])].members.push_back(i);
    }
    for (auto& g : res.groups) {
        g.representative = list[g.members.front()].id;
        for (std::size_t m : g.members) {
            if (!config.representative.empty() && list[m].id == config.representative) {
                g.representative = list[m].id;
            }
        }
    }
    return res;
}

std::string sfd_matrix_to_csv(const std::vector<TimeSeries>& list,
                              const std::vector<std::vector<double>>& matrix) {
    std::string out = "series";
    for (const auto& ts : list) out += "," + ts.id;
    out += '\n';
    char buf[40];
    for (std::size_t a = 0; a < list.size(); ++a) {
        out += list[a].id;
        for (std::size_t b = 0; b < list.size(); ++b) {
            std::snprintf(buf, sizeof(buf), ",%.6f", matrix[a][b]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

ForecastReport transfer(const ConsistentSets& source_good, const ConsistentSets& source_bad,
                        const std::string& source_id, const TimeSeries& target,
                        const PipelineConfig& config) {
    for (Role r : kRoles) {
        if (source_good.of(r).empty()) {
            throw std::invalid_argument(std::string("transfer: source ") + role_name(r) +
                                        " set is empty");
        }
    }
    const Registry reg = make_registry(config, target.period);
    ForecastReport report = evaluate_with_sets(target, config, reg, source_good, source_bad);
    report.source_series = source_id;
    return report;
}

}  // namespace cmm
