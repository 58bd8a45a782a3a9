#include "cmm/cmm.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmm/decompose.hpp"
#include "cmm/forecasters.hpp"
#include "cmm/interseries.hpp"
#include "cmm/mining.hpp"
#include "cmm/pipeline.hpp"
#include "cmm/registry.hpp"
#include "cmm/series.hpp"

struct cmm_series {
    cmm::TimeSeries ts;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return CMM_OK;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = std::string("json: ") + e.what();
        return CMM_EINVAL;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return CMM_EINVAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CMM_ERUNTIME;
    }
}

std::string text_or_empty(const char* s) {
    return s == nullptr ? std::string() : std::string(s);
}

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

const char* combine_statistic_name(cmm::CombineStatistic s) {
    return s == cmm::CombineStatistic::Mean ? "mean" : "median";
}

const char* combine_source_name(cmm::CombineSource s) {
    switch (s) {
        case cmm::CombineSource::ConsistentGood: return "consistent_good";
        case cmm::CombineSource::Filtered: return "filtered";
        case cmm::CombineSource::All: return "all";
    }
    return "?";
}

std::string forecast_csv(const cmm::TimeSeries& ts, const std::vector<double>& f) {
    std::string out = "date,forecast\n";
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", f[i]);
        out += ts.label_at(ts.size() + i);
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

nlohmann::json sets_json(const cmm::ConsistentSets& sets) {
    nlohmann::json j;
    j["T"] = sets.of(cmm::Role::Trend);
    j["S"] = sets.of(cmm::Role::Seasonal);
    j["I"] = sets.of(cmm::Role::Irregular);
    return j;
}

}  // namespace

extern "C" {

const char* cmm_version(void) { return "1.0.0"; }

const char* cmm_last_error(void) { return g_last_error.c_str(); }

void cmm_string_free(char* s) { std::free(s); }

int cmm_series_load_csv(const char* path, int period, cmm_series** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new cmm_series{cmm::load_csv(path, period)};
    });
}

int cmm_series_parse_csv(const char* text, int period, const char* id, cmm_series** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new cmm_series{cmm::parse_csv(text, period, text_or_empty(id))};
    });
}

int cmm_series_from_synth_json(const char* spec_json, cmm_series** out) {
    return guarded([&] {
        require(spec_json && out, "null argument");
        *out = new cmm_series{cmm::generate(cmm::synth_spec_from_json(spec_json))};
    });
}

int cmm_series_to_csv(const cmm_series* s, char** out_csv) {
    return guarded([&] {
        require(s && out_csv, "null argument");
        *out_csv = dup_string(cmm::to_csv(s->ts));
    });
}

int cmm_series_length(const cmm_series* s, int* out) {
    return guarded([&] {
        require(s && out, "null argument");
        *out = static_cast<int>(s->ts.size());
    });
}

int cmm_series_period(const cmm_series* s, int* out) {
    return guarded([&] {
        require(s && out, "null argument");
        *out = s->ts.period;
    });
}

const char* cmm_series_id(const cmm_series* s) { return s ? s->ts.id.c_str() : ""; }

void cmm_series_free(cmm_series* s) { delete s; }

int cmm_resolve_config(const char* config_json, char** out_json) {
    return guarded([&] {
        require(out_json, "null argument");
        const std::string text = text_or_empty(config_json);
        const cmm::PipelineConfig config = cmm::pipeline_config_from_json(text);
        const cmm::SFDConfig sfd = cmm::sfd_config_from_json(text);
        nlohmann::json in = text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);

        nlohmann::json j;
        j["train_fraction"] = config.train_fraction;
        j["k_ratio"] = config.k_ratio;
        j["minsup_ratio"] = config.minsup_ratio;
        j["combine"] = {{"statistic", combine_statistic_name(config.policy.statistic)},
                        {"source", combine_source_name(config.policy.source)}};
        j["horizon"] = config.horizon;
        j["refit"] = {{"policy", config.refit == cmm::RefitPolicy::Once ? "once" : "every"},
                      {"every_m", config.refit_every}};
        j["fit_window_fraction"] = config.fit_window_fraction;
        j["multi_step"] = config.multi_step;
        j["threads"] = config.threads;
        j["seed"] = in.value("seed", std::uint64_t{0});
        j["pools"] = {{"trend", config.trend_pool_ids},
                      {"seasonal", config.seasonal_pool_ids},
                      {"irregular", config.irregular_pool_ids}};
        if (config.registry_json) j["registry_json"] = nlohmann::json::parse(*config.registry_json);
        j["sfd"] = {{"flat_threshold", sfd.flat_threshold},
                    {"pct_diff_threshold", sfd.pct_diff_threshold},
                    {"similarity_ratio", sfd.similarity_ratio},
                    {"representative", sfd.representative}};
        *out_json = dup_string(j.dump(2) + "\n");
    });
}

int cmm_registry_json(int period, char** out_json) {
    return guarded([&] {
        require(out_json, "null argument");
        *out_json = dup_string(cmm::registry_to_json(cmm::default_registry(period)));
    });
}

int cmm_decompose_csv(const cmm_series* s, char** out_csv) {
    return guarded([&] {
        require(s && out_csv, "null argument");
        const cmm::Decomposition dec = cmm::decompose(s->ts);
        *out_csv = dup_string(cmm::decomposition_to_csv(s->ts, dec));
    });
}

int cmm_forecast_model_csv(const cmm_series* s, const char* config_json, char role_tag,
                           int expert_id, int horizon, char** out_csv) {
    return guarded([&] {
        require(s && out_csv, "null argument");
        require(horizon >= 1, "horizon must be >= 1");
        cmm::validate(s->ts);
        const cmm::PipelineConfig config =
            cmm::pipeline_config_from_json(text_or_empty(config_json));
        const cmm::Registry reg = cmm::make_registry(config, s->ts.period);
        const cmm::ModelSpec& spec = reg.find(cmm::role_from_tag(role_tag), expert_id);
        const cmm::FittedModel fm = cmm::fit(spec, s->ts.values);
        *out_csv = dup_string(forecast_csv(s->ts, cmm::forecast(fm, s->ts.values, horizon)));
    });
}

int cmm_forecast_hw_csv(const cmm_series* s, int horizon, char** out_csv) {
    return guarded([&] {
        require(s && out_csv, "null argument");
        require(horizon >= 1, "horizon must be >= 1");
        cmm::validate(s->ts);
        const cmm::HWParams params =
            cmm::fit_hw(s->ts.values, cmm::default_hw_grid(s->ts.period));
        const cmm::HWResult res = cmm::holt_winters(s->ts.values, params, horizon);
        *out_csv = dup_string(forecast_csv(s->ts, res.forecasts));
    });
}

int cmm_mine(const cmm_series* s, const char* config_json, char** out_summary_json,
             char** out_db_text) {
    return guarded([&] {
        require(s, "null argument");
        const cmm::PipelineConfig config =
            cmm::pipeline_config_from_json(text_or_empty(config_json));
        const cmm::Registry reg = cmm::make_registry(config, s->ts.period);
        const cmm::MiningOutput mined = cmm::mine_series(s->ts, config, reg);
        if (out_summary_json) {
            nlohmann::json j;
            j["series_id"] = s->ts.id;
            j["scored_begin"] = mined.scored_begin;
            j["scored_end"] = mined.scored_end;
            j["dropped_points"] = mined.dropped_points;
            j["transactions"] = mined.good_db.size();
            j["minsup"] = cmm::minsup_from_ratio(config.minsup_ratio, mined.good_db.size());
            j["consistent_good"] = sets_json(mined.good);
            j["consistent_bad"] = sets_json(mined.bad);
            j["good_closed"] = nlohmann::json::parse(cmm::closed_sets_to_json(mined.good_closed));
            j["bad_closed"] = nlohmann::json::parse(cmm::closed_sets_to_json(mined.bad_closed));
            *out_summary_json = dup_string(j.dump(2) + "\n");
        }
        if (out_db_text) {
            *out_db_text = dup_string(cmm::db_to_text(mined.good_db));
        }
    });
}

int cmm_rankings_csv(const cmm_series* s, const char* config_json, long max_rows, char** out_csv) {
    return guarded([&] {
        require(s && out_csv, "null argument");
        require(max_rows > 0, "max_rows must be > 0");
        const cmm::PipelineConfig config =
            cmm::pipeline_config_from_json(text_or_empty(config_json));
        *out_csv = dup_string(
            cmm::rankings_csv(s->ts, config, static_cast<std::size_t>(max_rows)));
    });
}

int cmm_evaluate(const cmm_series* s, const char* config_json, char** out_report_json,
                 char** out_plot_csv) {
    return guarded([&] {
        require(s && out_report_json, "null argument");
        const cmm::PipelineConfig config =
            cmm::pipeline_config_from_json(text_or_empty(config_json));
        const cmm::ForecastReport report = cmm::run_cmm(s->ts, config);
        *out_report_json = dup_string(cmm::report_to_json(report));
        if (out_plot_csv) *out_plot_csv = dup_string(cmm::report_to_plot_csv(report));
    });
}

int cmm_transfer(const cmm_series* source, const cmm_series* target, const char* config_json,
                 char** out_report_json, char** out_plot_csv) {
    return guarded([&] {
        require(source && target && out_report_json, "null argument");
        const cmm::PipelineConfig config =
            cmm::pipeline_config_from_json(text_or_empty(config_json));
        const cmm::Registry source_reg = cmm::make_registry(config, source->ts.period);
        const cmm::MiningOutput mined = cmm::mine_series(source->ts, config, source_reg);
        const cmm::ForecastReport report =
            cmm::transfer(mined.good, mined.bad, source->ts.id, target->ts, config);
        *out_report_json = dup_string(cmm::report_to_json(report));
        if (out_plot_csv) *out_plot_csv = dup_string(cmm::report_to_plot_csv(report));
    });
}

int cmm_sfd_pair(const cmm_series* a, const cmm_series* b, const char* config_json, int* out_raw,
                 double* out_normalized) {
    return guarded([&] {
        require(a && b, "null argument");
        const cmm::SFDConfig config = cmm::sfd_config_from_json(text_or_empty(config_json));
        if (out_raw) *out_raw = cmm::sfd(a->ts.values, b->ts.values, config);
        if (out_normalized) {
            *out_normalized = cmm::normalized_sfd(a->ts.values, b->ts.values, config);
        }
    });
}

int cmm_sfd_matrix(const cmm_series* const* list, int count, const char* config_json,
                   char** out_matrix_csv, char** out_groups_json) {
    return guarded([&] {
        require(list && count >= 2, "need at least two series");
        const std::string text = text_or_empty(config_json);
        const cmm::SFDConfig config = cmm::sfd_config_from_json(text);
        const cmm::PipelineConfig pipeline = cmm::pipeline_config_from_json(text);
        std::vector<cmm::TimeSeries> all;
        all.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            require(list[i] != nullptr, "null series in list");
            all.push_back(list[i]->ts);
        }
        const cmm::GroupingResult res = cmm::group_series(all, config, pipeline.threads);
        if (out_matrix_csv) *out_matrix_csv = dup_string(cmm::sfd_matrix_to_csv(all, res.matrix));
        if (out_groups_json) {
            nlohmann::json groups = nlohmann::json::array();
            for (const auto& g : res.groups) {
                nlohmann::json jg;
                auto members = nlohmann::json::array();
                for (std::size_t m : g.members) members.push_back(all[m].id);
                jg["members"] = members;
                jg["representative"] = g.representative;
                groups.push_back(jg);
            }
            *out_groups_json = dup_string(groups.dump(2) + "\n");
        }
    });
}

int cmm_file_digest(const char* path, char** out_hex) {
    return guarded([&] {
        require(path && out_hex, "null argument");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::invalid_argument("cannot open '" + std::string(path) + "'");
        std::uint64_t h = 1469598103934665603ull;
        char buf[4096];
        while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 1099511628211ull;
            }
        }
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
        *out_hex = dup_string(hex);
    });
}

}  // extern "C"
