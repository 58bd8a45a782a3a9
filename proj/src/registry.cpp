#include "cmm/registry.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace cmm {

const char* role_name(Role r) {
    switch (r) {
        case Role::Trend: return "Trend";
        case Role::Seasonal: return "Seasonal";
        case Role::Irregular: return "Irregular";
    }
    return "?";
}

char role_tag(Role r) {
    switch (r) {
        case Role::Trend: return 'T';
        case Role::Seasonal: return 'S';
        case Role::Irregular: return 'I';
    }
    return '?';
}

Role role_from_tag(char c) {
    switch (c) {
        case 'T': return Role::Trend;
        case 'S': return Role::Seasonal;
        case 'I': return Role::Irregular;
    }
    throw std::invalid_argument(std::string("unknown component tag '") + c + "'");
}

std::string ModelSpec::name() const {
    std::string out = log_transform ? "Log " : "";
    switch (family) {
        case ModelFamily::Holt: return out + "Holt";
        case ModelFamily::HoltWinters: return out + "Holt Winter";
        case ModelFamily::RandomWalk: return out + "Random";
        case ModelFamily::LinearExponential: return out + "Linear Exponential";
        case ModelFamily::LinearTrendAr: return out + "Linear Trend AR" + std::to_string(p);
        case ModelFamily::Arima: break;
    }
    out += "ARIMA ";
    char buf[64];
    const bool seasonal_part = P > 0 || D > 0 || Q > 0;
    if (seasonal_part && p == 0 && d == 0 && q == 0) {
        // purely seasonal models are printed with the single-triple form
        std::snprintf(buf, sizeof(buf), "(%d,%d,%d)_s", P, D, Q);
    } else if (seasonal_part) {
        std::snprintf(buf, sizeof(buf), "(%d,%d,%d)(%d,%d,%d)_s", p, d, q, P, D, Q);
    } else {
        std::snprintf(buf, sizeof(buf), "(%d,%d,%d)", p, d, q);
    }
    out += buf;
    if (!intercept) out += " NOINT";
    return out;
}

void validate(const ModelSpec& spec) {
    if (spec.p < 0 || spec.d < 0 || spec.q < 0 || spec.P < 0 || spec.D < 0 || spec.Q < 0) {
        throw std::invalid_argument("model '" + spec.name() + "': negative order");
    }
    if (spec.p + spec.q + spec.P + spec.Q > 6) {
        throw std::invalid_argument("model '" + spec.name() + "': p+q+P+Q > 6");
    }
    if ((spec.P > 0 || spec.D > 0 || spec.Q > 0) && spec.s < 2) {
        throw std::invalid_argument("model '" + spec.name() + "': seasonal orders need s >= 2");
    }
    if (spec.family == ModelFamily::LinearTrendAr && (spec.p < 1 || spec.p > 3)) {
        throw std::invalid_argument("model '" + spec.name() + "': AR order must be 1..3");
    }
}

const std::vector<ModelSpec>& Registry::pool(Role r) const {
    switch (r) {
        case Role::Trend: return trend;
        case Role::Seasonal: return seasonal;
        case Role::Irregular: return irregular;
    }
    throw std::logic_error("bad role");
}

std::vector<ModelSpec>& Registry::pool(Role r) {
    return const_cast<std::vector<ModelSpec>&>(static_cast<const Registry*>(this)->pool(r));
}

std::size_t Registry::triplet_count() const {
    return trend.size() * seasonal.size() * irregular.size();
}

const ModelSpec& Registry::find(Role r, int expert_id) const {
    for (const auto& m : pool(r)) {
        if (m.expert_id == expert_id) return m;
    }
    throw std::invalid_argument(std::string(role_name(r)) + " pool has no expert id " +
                                std::to_string(expert_id));
}

namespace {

struct PoolBuilder {
    std::vector<ModelSpec> out;
    Role role;
    int period;
    int next_id = 1;

    // arima(p,d,q [,P,D,Q] [,noint] [,log])
    void arima(int p, int d, int q, int P = 0, int D = 0, int Q = 0, bool noint = false,
               bool log = false) {
        ModelSpec m;
        m.expert_id = next_id++;
        m.role = role;
        m.family = ModelFamily::Arima;
        m.p = p;
        m.d = d;
        m.q = q;
        m.P = P;
        m.D = D;
        m.Q = Q;
        m.s = (P > 0 || D > 0 || Q > 0) ? period : 0;
        m.intercept = !noint;
        m.log_transform = log;
        out.push_back(m);
    }

    void named(ModelFamily family, int order = 0, bool log = false) {
        ModelSpec m;
        m.expert_id = next_id++;
        m.role = role;
        m.family = family;
        m.log_transform = log;
        if (family == ModelFamily::LinearTrendAr) m.p = order;
        if (family == ModelFamily::HoltWinters) m.s = period;
        out.push_back(m);
    }
};

constexpr bool NOINT = true;
constexpr bool LOG = true;

std::vector<ModelSpec> trend_pool(int period) {
    PoolBuilder b{{}, Role::Trend, period};
    b.arima(0, 1, 0, 0, 0, 1);                    // 1
    b.arima(0, 1, 0, 1, 0, 0);                    // 2
    b.arima(0, 1, 0, 1, 0, 0, NOINT);             // 3
    b.arima(0, 1, 0, 1, 0, 1);                    // 4
    b.arima(0, 1, 1);                             // 5
    b.arima(0, 1, 1, 1, 0, 0, NOINT);             // 6
    b.arima(0, 1, 1, 0, 0, 0, NOINT);             // 7
    b.arima(0, 1, 2);                             // 8
    b.arima(0, 1, 2, 0, 0, 0, NOINT);             // 9
    b.arima(0, 2, 1);                             // 10
    b.arima(0, 2, 1, 0, 0, 0, NOINT);             // 11
    b.arima(1, 0, 1);                             // 12
    b.arima(1, 1, 0);                             // 13
    b.arima(1, 1, 0, 0, 0, 1);                    // 14
    b.arima(1, 1, 0, 1, 0, 0);                    // 15
    b.arima(1, 1, 0, 1, 0, 0, NOINT);             // 16
    b.arima(1, 1, 0, 1, 0, 1);                    // 17
    b.arima(1, 1, 0, 0, 0, 0, NOINT);             // 18
    b.arima(1, 1, 1);                             // 19
    b.arima(1, 1, 1, 0, 0, 1);                    // 20
    b.arima(1, 1, 1, 0, 0, 0, NOINT);             // 21
    b.arima(1, 1, 2);                             // 22
    b.arima(1, 1, 2, 0, 0, 1);                    // 23
    b.arima(1, 1, 2, 1, 0, 0);                    // 24
    b.arima(1, 1, 2, 0, 0, 0, NOINT);             // 25
    b.arima(1, 2, 0);                             // 26
    b.arima(1, 2, 0, 0, 0, 0, NOINT);             // 27
    b.arima(1, 2, 1);                             // 28
    b.arima(1, 2, 1, 0, 0, 0, NOINT);             // 29
    b.arima(2, 0, 1);                             // 30
    b.arima(2, 1, 0);                             // 31
    b.arima(2, 1, 0, 1, 0, 0);                    // 32
    b.arima(2, 1, 0, 1, 0, 0, NOINT);             // 33
    b.arima(2, 1, 0, 0, 0, 0, NOINT);             // 34
    b.arima(2, 1, 1);                             // 35
    b.arima(2, 1, 1, 0, 0, 0, NOINT);             // 36
    b.arima(2, 1, 2);                             // 37
    b.arima(2, 1, 2, 0, 0, 0, NOINT);             // 38
    b.arima(2, 2, 1);                             // 39
    b.arima(2, 2, 1, 0, 0, 0, NOINT);             // 40
    b.arima(3, 1, 0);                             // 41
    b.arima(3, 1, 0, 0, 0, 1);                    // 42
    b.arima(3, 1, 0, 1, 0, 0);                    // 43
    b.arima(3, 1, 0, 0, 0, 0, NOINT);             // 44
    b.named(ModelFamily::Holt);                   // 45
    b.arima(0, 1, 0, 0, 0, 1, false, LOG);        // 46
    b.arima(0, 1, 0, 1, 0, 0, false, LOG);        // 47
    b.arima(0, 1, 0, 1, 0, 0, NOINT, LOG);        // 48
    b.arima(0, 1, 0, 1, 0, 1, false, LOG);        // 49
    b.arima(0, 1, 1, 0, 0, 0, false, LOG);        // 50
    b.arima(0, 1, 1, 1, 0, 0, NOINT, LOG);        // 51
    b.arima(0, 1, 1, 0, 0, 0, NOINT, LOG);        // 52
    b.arima(0, 1, 2, 0, 0, 0, false, LOG);        // 53
    b.arima(0, 1, 2, 0, 0, 0, NOINT, LOG);        // 54
    b.arima(0, 2, 1, 0, 0, 0, false, LOG);        // 55
    b.arima(0, 2, 1, 0, 0, 0, NOINT, LOG);        // 56
    b.arima(1, 1, 0, 0, 0, 0, false, LOG);        // 57
    b.arima(1, 1, 0, 0, 0, 1, false, LOG);        // 58
    b.arima(1, 1, 0, 1, 0, 0, false, LOG);        // 59
    b.arima(1, 1, 0, 1, 0, 0, NOINT, LOG);        // 60
    b.arima(1, 1, 0, 1, 0, 1, false, LOG);        // 61
    b.arima(1, 1, 0, 0, 0, 0, NOINT, LOG);        // 62
    b.arima(1, 1, 1, 0, 0, 0, false, LOG);        // 63
    b.arima(1, 1, 1, 0, 0, 1, false, LOG);        // 64
    b.arima(1, 1, 1, 0, 0, 0, NOINT, LOG);        // 65
    b.arima(1, 1, 2, 0, 0, 0, false, LOG);        // 66
    b.arima(1, 1, 2, 0, 0, 1, false, LOG);        // 67
    b.arima(1, 1, 2, 1, 0, 0, false, LOG);        // 68
    b.arima(1, 1, 2, 0, 0, 0, NOINT, LOG);        // 69
    b.arima(1, 2, 0, 0, 0, 0, false, LOG);        // 70
    b.arima(1, 2, 0, 0, 0, 0, NOINT, LOG);        // 71
    b.arima(1, 2, 1, 0, 0, 0, false, LOG);        // 72
    b.arima(1, 2, 1, 0, 0, 0, NOINT, LOG);        // 73
    b.arima(2, 1, 0, 0, 0, 0, false, LOG);        // 74
    b.arima(2, 1, 0, 1, 0, 0, false, LOG);        // 75
    b.arima(2, 1, 0, 1, 0, 0, NOINT, LOG);        // 76
    b.arima(2, 1, 0, 0, 0, 0, NOINT, LOG);        // 77
    b.arima(2, 1, 1, 0, 0, 0, false, LOG);        // 78
    b.arima(2, 1, 1, 0, 0, 0, NOINT, LOG);        // 79
    b.arima(2, 1, 2, 0, 0, 0, false, LOG);        // 80
    b.arima(2, 1, 2, 0, 0, 0, NOINT, LOG);        // 81
    b.arima(2, 2, 1, 0, 0, 0, false, LOG);        // 82
    b.arima(2, 2, 1, 0, 0, 0, NOINT, LOG);        // 83
    b.arima(3, 1, 0, 0, 0, 0, false, LOG);        // 84
    b.arima(3, 1, 0, 0, 0, 1, false, LOG);        // 85
    b.arima(3, 1, 0, 1, 0, 0, false, LOG);        // 86
    return b.out;
}

std::vector<ModelSpec> seasonal_pool(int period) {
    PoolBuilder b{{}, Role::Seasonal, period};
    b.arima(0, 0, 1, 0, 1, 1);                    // 1
    b.arima(0, 0, 2, 0, 1, 1);                    // 2
    b.arima(0, 1, 1, 0, 1, 1);                    // 3
    b.arima(0, 0, 0, 0, 1, 1);                    // 4  "ARIMA(0,1,1)_s"
    b.arima(0, 1, 2, 0, 1, 1);                    // 5
    b.arima(1, 0, 0, 0, 1, 1);                    // 6
    b.arima(1, 0, 1, 0, 1, 1);                    // 7
    b.arima(1, 1, 0, 0, 1, 1);                    // 8
    b.arima(1, 1, 1, 0, 1, 1);                    // 9
    b.arima(1, 1, 2, 0, 1, 1);                    // 10
    b.arima(2, 0, 0, 0, 1, 1);                    // 11
    b.arima(2, 1, 0, 0, 1, 1);                    // 12
    b.arima(2, 1, 1, 0, 1, 1);                    // 13
    b.arima(2, 1, 2, 0, 1, 1);                    // 14
    b.arima(3, 0, 0, 0, 1, 1);                    // 15
    b.arima(3, 1, 0, 0, 1, 1);                    // 16
    b.arima(0, 0, 1, 0, 1, 1, false, LOG);        // 17
    b.arima(0, 0, 2, 0, 1, 1, false, LOG);        // 18
    b.arima(0, 1, 1, 0, 1, 1, false, LOG);        // 19
    b.arima(0, 0, 0, 0, 1, 1, false, LOG);        // 20 "Log ARIMA(0,1,1)_s"
    b.arima(0, 1, 2, 0, 1, 1, false, LOG);        // 21
    b.arima(1, 0, 0, 0, 1, 1, false, LOG);        // 22
    b.arima(1, 0, 1, 0, 1, 1, false, LOG);        // 23
    b.arima(1, 1, 0, 0, 1, 1, false, LOG);        // 24
    b.arima(1, 1, 1, 0, 1, 1, false, LOG);        // 25
    b.arima(1, 1, 2, 0, 1, 1, false, LOG);        // 26
    b.arima(2, 0, 0, 0, 1, 1, false, LOG);        // 27
    b.arima(2, 1, 0, 0, 1, 1, false, LOG);        // 28
    b.arima(2, 1, 1, 0, 1, 1, false, LOG);        // 29
    b.arima(2, 1, 2, 0, 1, 1, false, LOG);        // 30
    b.arima(3, 0, 0, 0, 1, 1, false, LOG);        // 31
    b.arima(3, 1, 0, 0, 1, 1, false, LOG);        // 32
    b.named(ModelFamily::HoltWinters);            // 33
    return b.out;
}

std::vector<ModelSpec> irregular_pool(int period) {
    PoolBuilder b{{}, Role::Irregular, period};
    b.arima(0, 0, 0, 0, 0, 1);                        // 1  "ARIMA (0,0,1)_s"
    b.arima(0, 1, 0);                                 // 2
    b.arima(0, 1, 1);                                 // 3
    b.arima(0, 1, 1, 1, 0, 0, NOINT);                 // 4
    b.arima(0, 0, 0, 0, 1, 1, NOINT);                 // 5  "ARIMA (0,1,1)_s NOINT"
    b.arima(1, 0, 0);                                 // 6
    b.arima(0, 0, 0, 1, 0, 0);                        // 7  "ARIMA (1,0,0)_s"
    b.arima(0, 0, 0, 1, 0, 1);                        // 8  "ARIMA (1,0,1)_s"
    b.arima(1, 1, 0);                                 // 9
    b.arima(1, 1, 2);                                 // 10
    b.arima(2, 0, 0);                                 // 11
    b.arima(2, 0, 0, 1, 0, 0);                        // 12
    b.arima(3, 0, 0, 1, 0, 0);                        // 13
    b.named(ModelFamily::LinearExponential);          // 14
    b.named(ModelFamily::LinearTrendAr, 1);           // 15
    b.named(ModelFamily::LinearTrendAr, 2);           // 16
    b.named(ModelFamily::LinearTrendAr, 3);           // 17
    b.arima(0, 0, 0, 0, 0, 1, false, LOG);            // 18
    b.arima(0, 1, 0, 0, 0, 0, false, LOG);            // 19
    b.arima(0, 1, 1, 1, 0, 0, NOINT, LOG);            // 20
    b.arima(0, 0, 0, 0, 1, 1, NOINT, LOG);            // 21
    b.arima(1, 0, 0, 0, 0, 0, false, LOG);            // 22
    b.arima(0, 0, 0, 1, 0, 0, false, LOG);            // 23
    b.arima(0, 0, 0, 1, 0, 1, false, LOG);            // 24
    b.arima(1, 1, 0, 0, 0, 0, false, LOG);            // 25
    b.arima(1, 1, 2, 0, 0, 0, false, LOG);            // 26
    b.arima(2, 0, 0, 0, 0, 0, false, LOG);            // 27
    b.arima(2, 0, 0, 1, 0, 0, false, LOG);            // 28
    b.arima(3, 1, 1, 0, 0, 0, NOINT, LOG);            // 29 "Log (3,1,1)NOINT"
    b.named(ModelFamily::LinearExponential, 0, LOG);  // 30
    b.named(ModelFamily::LinearTrendAr, 1, LOG);      // 31
    b.named(ModelFamily::LinearTrendAr, 2, LOG);      // 32
    b.named(ModelFamily::LinearTrendAr, 3, LOG);      // 33
    b.named(ModelFamily::RandomWalk);                 // 34
    return b.out;
}

const char* family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::Arima: return "arima";
        case ModelFamily::Holt: return "holt";
        case ModelFamily::HoltWinters: return "holt_winters";
        case ModelFamily::LinearTrendAr: return "linear_trend_ar";
        case ModelFamily::LinearExponential: return "linear_exponential";
        case ModelFamily::RandomWalk: return "random_walk";
    }
    return "?";
}

ModelFamily family_from_name(const std::string& s) {
    for (ModelFamily f : {ModelFamily::Arima, ModelFamily::Holt, ModelFamily::HoltWinters,
                          ModelFamily::LinearTrendAr, ModelFamily::LinearExponential,
                          ModelFamily::RandomWalk}) {
        if (s == family_name(f)) return f;
    }
    throw std::invalid_argument("unknown model family '" + s + "'");
}

}  // namespace

Registry default_registry(int period) {
    if (period < 2) throw std::invalid_argument("registry: period must be >= 2");
    Registry reg{trend_pool(period), seasonal_pool(period), irregular_pool(period)};
    for (Role r : kRoles) {
        for (const auto& m : reg.pool(r)) validate(m);
    }
    return reg;
}

std::string registry_to_json(const Registry& reg) {
    nlohmann::json arr = nlohmann::json::array();
    for (Role r : kRoles) {
        for (const auto& m : reg.pool(r)) {
            nlohmann::json j;
            j["component_role"] = role_name(r);
            j["expert_id"] = m.expert_id;
            j["name"] = m.name();
            j["family"] = family_name(m.family);
            j["orders"] = {m.p, m.d, m.q};
            j["seasonal_orders"] = {m.P, m.D, m.Q};
            j["seasonal"] = m.s > 0;
            j["intercept"] = m.intercept;
            j["log_transform"] = m.log_transform;
            arr.push_back(j);
        }
    }
    return arr.dump(2) + "\n";
}

Registry registry_from_json(const std::string& json_text, int period) {
    nlohmann::json arr = nlohmann::json::parse(json_text);
    if (!arr.is_array()) throw std::invalid_argument("registry JSON must be an array");
    Registry reg;
    for (const auto& j : arr) {
        ModelSpec m;
        const std::string role = j.at("component_role").get<std::string>();
        m.role = role_from_tag(role.empty() ? '?' : role[0]);
        m.expert_id = j.at("expert_id").get<int>();
        m.family = family_from_name(j.at("family").get<std::string>());
        if (j.contains("orders")) {
            auto o = j["orders"];
            m.p = o.at(0).get<int>();
            m.d = o.at(1).get<int>();
            m.q = o.at(2).get<int>();
        }
        if (j.contains("seasonal_orders")) {
            auto o = j["seasonal_orders"];
            m.P = o.at(0).get<int>();
            m.D = o.at(1).get<int>();
            m.Q = o.at(2).get<int>();
        }
        const bool seasonal = j.value("seasonal", m.P > 0 || m.D > 0 || m.Q > 0);
        m.s = seasonal || m.family == ModelFamily::HoltWinters ? period : 0;
        m.intercept = j.value("intercept", true);
        m.log_transform = j.value("log_transform", false);
        validate(m);
        reg.pool(m.role).push_back(m);
    }
    for (Role r : kRoles) {
        auto& pool = reg.pool(r);
        std::sort(pool.begin(), pool.end(),
                  [](const ModelSpec& a, const ModelSpec& b) { return a.expert_id < b.expert_id; });
        for (std::size_t i = 1; i < pool.size(); ++i) {
            if (pool[i].expert_id == pool[i - 1].expert_id) {
                throw std::invalid_argument(std::string("duplicate expert id ") +
                                            std::to_string(pool[i].expert_id) + " in " +
                                            role_name(r) + " pool");
            }
        }
        if (pool.empty()) {
            throw std::invalid_argument(std::string(role_name(r)) + " pool is empty");
        }
    }
    return reg;
}

Registry subset_registry(const Registry& reg, const std::vector<int>& trend_ids,
                         const std::vector<int>& seasonal_ids,
                         const std::vector<int>& irregular_ids) {
    Registry out;
    const std::array<const std::vector<int>*, 3> wanted{&trend_ids, &seasonal_ids, &irregular_ids};
    for (Role r : kRoles) {
        const auto& ids = *wanted[static_cast<int>(r)];
        if (ids.empty()) {
            out.pool(r) = reg.pool(r);
            continue;
        }
        std::vector<int> sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        for (int id : sorted) out.pool(r).push_back(reg.find(r, id));
    }
    return out;
}

}  // namespace cmm
