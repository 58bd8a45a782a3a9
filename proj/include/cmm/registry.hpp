#pragma once

#include <array>
#include <string>
#include <vector>

namespace cmm {

enum class Role { Trend = 0, Seasonal = 1, Irregular = 2 };

constexpr std::array<Role, 3> kRoles{Role::Trend, Role::Seasonal, Role::Irregular};

const char* role_name(Role r);
char role_tag(Role r);  // 'T' / 'S' / 'I'
Role role_from_tag(char c);

enum class ModelFamily {
    Arima,              // ARIMA (p,d,q)(P,D,Q)_s, optionally log / no intercept
    Holt,               // double exponential smoothing with separate trend constant
    HoltWinters,        // multiplicative triple exponential smoothing
    LinearTrendAr,      // OLS line plus AR(k) on the residuals
    LinearExponential,  // Brown's double exponential smoothing, one constant
    RandomWalk,         // naive last-value forecaster
};

/// One atomic forecaster. `s` is the concrete seasonal period (0 for
/// non-seasonal models); registries resolve it from the series period.
struct ModelSpec {
    int expert_id = 0;
    Role role = Role::Trend;
    ModelFamily family = ModelFamily::Arima;
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0, s = 0;
    bool intercept = true;
    bool log_transform = false;

    /// Display name in the registry's naming convention, e.g.
    /// "Log ARIMA (0,1,1)(1,0,0)_s NOINT" or "Linear Trend AR2".
    std::string name() const;
};

void validate(const ModelSpec& spec);

struct Registry {
    std::vector<ModelSpec> trend;
    std::vector<ModelSpec> seasonal;
    std::vector<ModelSpec> irregular;

    const std::vector<ModelSpec>& pool(Role r) const;
    std::vector<ModelSpec>& pool(Role r);
    std::size_t triplet_count() const;
    std::size_t row_count() const { return trend.size() + seasonal.size() + irregular.size(); }
    const ModelSpec& find(Role r, int expert_id) const;
};

/// The default pools: 86 Trend, 33 Seasonal and 34 Irregular models, with all
/// seasonal orders bound to `period`.
Registry default_registry(int period);

Registry registry_from_json(const std::string& json_text, int period);
std::string registry_to_json(const Registry& reg);

/// Restricts each pool to the given expert ids (empty list keeps the full
/// pool). Ids are kept in ascending order.
Registry subset_registry(const Registry& reg, const std::vector<int>& trend_ids,
                         const std::vector<int>& seasonal_ids,
                         const std::vector<int>& irregular_ids);

}  // namespace cmm
