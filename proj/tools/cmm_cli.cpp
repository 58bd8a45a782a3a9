// Command-line front end for the CMM forecasting engine. All numerical work
// happens behind the C API in libcmm; this binary only handles argument
// parsing, file IO and the run manifest.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmm/cmm.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CString {
    char* ptr = nullptr;
    CString() = default;
    CString(const CString&) = delete;
    CString& operator=(const CString&) = delete;
    ~CString() { cmm_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

struct SeriesHandle {
    cmm_series* ptr = nullptr;
    SeriesHandle() = default;
    SeriesHandle(SeriesHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    SeriesHandle& operator=(SeriesHandle&& other) noexcept {
        std::swap(ptr, other.ptr);
        return *this;
    }
    SeriesHandle(const SeriesHandle&) = delete;
    SeriesHandle& operator=(const SeriesHandle&) = delete;
    ~SeriesHandle() { cmm_series_free(ptr); }
};

[[noreturn]] void fail(int code) {
    std::cerr << "error: " << cmm_last_error() << "\n";
    std::exit(code == CMM_OK ? 2 : code);
}

void check(int code) {
    if (code != CMM_OK) fail(code);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        std::exit(1);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    int period = 12;
    int threads = 0;                 // 0 = keep config value
    long seed = -1;                  // -1 = keep config value
    double train_fraction = -1.0;
    double k_ratio = -1.0;
    double minsup_ratio = -1.0;
    int horizon = 0;
    std::string statistic;
    std::string source;
    bool multi_step = false;
    std::string registry_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out-dir", out_dir, "output directory (created if missing)");
        cmd->add_option("--period", period, "observations per seasonal cycle")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--threads", threads, "parallelism cap");
        cmd->add_option("--seed", seed, "seed recorded in the manifest / synth override");
        cmd->add_option("--train-fraction", train_fraction, "history share used for mining");
        cmd->add_option("--k-ratio", k_ratio, "top/bottom list share of the expert space");
        cmd->add_option("--minsup-ratio", minsup_ratio, "CHARM minimum support share");
        cmd->add_option("--horizon", horizon, "evaluation window length");
        cmd->add_option("--statistic", statistic, "combine statistic: mean|median");
        cmd->add_option("--source", source, "combine source: consistent_good|filtered|all");
        cmd->add_flag("--multi-step", multi_step, "single-origin multi-step evaluation");
        cmd->add_option("--registry", registry_path, "model registry JSON file");
    }

    // config file merged with flag overrides; flags win
    json merged_config() const {
        json j = json::object();
        if (!config_path.empty()) {
            j = json::parse(read_file(config_path));
        }
        if (threads > 0) j["threads"] = threads;
        if (seed >= 0) j["seed"] = seed;
        if (train_fraction > 0.0) j["train_fraction"] = train_fraction;
        if (k_ratio > 0.0) j["k_ratio"] = k_ratio;
        if (minsup_ratio > 0.0) j["minsup_ratio"] = minsup_ratio;
        if (horizon > 0) j["horizon"] = horizon;
        if (!statistic.empty()) j["combine"]["statistic"] = statistic;
        if (!source.empty()) j["combine"]["source"] = source;
        if (multi_step) j["multi_step"] = true;
        if (!registry_path.empty()) j["registry_json"] = json::parse(read_file(registry_path));
        return j;
    }
};

struct Manifest {
    std::string command;
    json config;
    json inputs = json::object();
    std::vector<std::string> outputs = {};

    void add_input(const std::string& path) {
        CString digest;
        check(cmm_file_digest(path.c_str(), &digest.ptr));
        inputs[path] = digest.str();
    }
};

std::string write_output(const Common& common, Manifest& manifest, const std::string& name,
                         const std::string& content) {
    fs::create_directories(common.out_dir);
    const fs::path path = fs::path(common.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path.string() << "'\n";
        std::exit(2);
    }
    out << content;
    manifest.outputs.push_back(path.string());
    return path.string();
}

void write_manifest(const Common& common, const Manifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["version"] = cmm_version();
    j["config"] = manifest.config;
    j["inputs"] = manifest.inputs;
    j["outputs"] = manifest.outputs;
    fs::create_directories(common.out_dir);
    std::ofstream out(fs::path(common.out_dir) / "run.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

json resolved_config(const json& merged) {
    CString resolved;
    check(cmm_resolve_config(merged.dump().c_str(), &resolved.ptr));
    return json::parse(resolved.str());
}

SeriesHandle load_series(const Common& common, Manifest& manifest, const std::string& path) {
    SeriesHandle s;
    check(cmm_series_load_csv(path.c_str(), common.period, &s.ptr));
    manifest.add_input(path);
    return s;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<std::string> csv_files_in(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no .csv files in '" << dir << "'\n";
        std::exit(1);
    }
    return files;
}

// ---- subcommands ----

int run_synth(const Common& common, const std::string& spec_path, std::string out_file) {
    Manifest manifest{"synth", resolved_config(common.merged_config())};
    manifest.add_input(spec_path);
    json spec = json::parse(read_file(spec_path));
    if (common.seed >= 0) spec["seed"] = common.seed;
    SeriesHandle s;
    check(cmm_series_from_synth_json(spec.dump().c_str(), &s.ptr));
    CString csv;
    check(cmm_series_to_csv(s.ptr, &csv.ptr));
    if (out_file.empty()) out_file = std::string(cmm_series_id(s.ptr)) + ".csv";
    write_output(common, manifest, out_file, csv.str());
    write_manifest(common, manifest);
    return 0;
}

int run_decompose(const Common& common, const std::string& in_path, std::string out_file) {
    Manifest manifest{"decompose", resolved_config(common.merged_config())};
    SeriesHandle s = load_series(common, manifest, in_path);
    CString csv;
    check(cmm_decompose_csv(s.ptr, &csv.ptr));
    if (out_file.empty()) out_file = stem_of(in_path) + "_decomposition.csv";
    write_output(common, manifest, out_file, csv.str());
    write_manifest(common, manifest);
    return 0;
}

int run_forecast(const Common& common, const std::string& in_path, const std::string& model,
                 bool use_hw, int h, std::string out_file) {
    const json merged = common.merged_config();
    Manifest manifest{"forecast", resolved_config(merged)};
    SeriesHandle s = load_series(common, manifest, in_path);
    CString csv;
    if (use_hw) {
        check(cmm_forecast_hw_csv(s.ptr, h, &csv.ptr));
    } else {
        const auto colon = model.find(':');
        if (model.size() < 3 || colon != 1) {
            std::cerr << "error: --model wants TAG:ID (e.g. T:41)\n";
            return 1;
        }
        check(cmm_forecast_model_csv(s.ptr, merged.dump().c_str(), model[0],
                                     std::stoi(model.substr(2)), h, &csv.ptr));
    }
    if (out_file.empty()) out_file = stem_of(in_path) + "_forecast.csv";
    write_output(common, manifest, out_file, csv.str());
    write_manifest(common, manifest);
    return 0;
}

int run_mine(const Common& common, const std::string& in_path, const std::string& db_file,
             const std::string& rankings_file, bool allow_large, const std::string& registry_file,
             std::string out_file) {
    const json merged = common.merged_config();
    Manifest manifest{"mine", resolved_config(merged)};
    SeriesHandle s = load_series(common, manifest, in_path);

    if (!registry_file.empty()) {
        CString reg;
        check(cmm_registry_json(common.period, &reg.ptr));
        write_output(common, manifest, registry_file, reg.str());
    }

    CString summary, db;
    check(cmm_mine(s.ptr, merged.dump().c_str(), &summary.ptr, &db.ptr));
    if (out_file.empty()) out_file = stem_of(in_path) + "_mine.json";
    write_output(common, manifest, out_file, summary.str());
    if (!db_file.empty()) write_output(common, manifest, db_file, db.str());

    if (!rankings_file.empty()) {
        const long cap = allow_large ? 1000000000L : 100000L;
        CString rankings;
        const int code = cmm_rankings_csv(s.ptr, merged.dump().c_str(), cap, &rankings.ptr);
        if (code != CMM_OK) {
            std::cerr << "error: " << cmm_last_error() << "\n";
            if (!allow_large) std::cerr << "hint: pass --allow-large to raise the cap\n";
            return code;
        }
        write_output(common, manifest, rankings_file, rankings.str());
    }
    write_manifest(common, manifest);
    return 0;
}

int run_evaluate(const Common& common, const std::string& in_path, std::string comparison_file) {
    const json merged = common.merged_config();
    Manifest manifest{"evaluate", resolved_config(merged)};

    std::vector<std::string> files;
    if (fs::is_directory(in_path)) {
        files = csv_files_in(in_path);
    } else {
        files.push_back(in_path);
    }

    std::string comparison = "series,hw_mape,cmm_mape,improvement_pct\n";
    double total_improvement = 0.0;
    int beats = 0;
    for (const auto& file : files) {
        SeriesHandle s = load_series(common, manifest, file);
        CString report, plot;
        check(cmm_evaluate(s.ptr, merged.dump().c_str(), &report.ptr, &plot.ptr));
        write_output(common, manifest, stem_of(file) + "_report.json", report.str());
        write_output(common, manifest, stem_of(file) + "_plot.csv", plot.str());

        const json r = json::parse(report.str());
        const double hw = r["hw_metrics"]["mape"].get<double>();
        const double cmm = r["metrics"]["mape"].get<double>();
        const double imp = r["improvement_pct"].get<double>();
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.2f\n",
                      r["series_id"].get<std::string>().c_str(), hw, cmm, imp);
        comparison += buf;
        total_improvement += imp;
        if (cmm < hw) ++beats;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "Average Improvement (All Series),,,%.2f\n",
                  total_improvement / static_cast<double>(files.size()));
    comparison += buf;
    if (comparison_file.empty()) comparison_file = "comparison.csv";
    write_output(common, manifest, comparison_file, comparison);
    write_manifest(common, manifest);
    std::cout << "evaluated " << files.size() << " series; CMM beats HW on " << beats << "/"
              << files.size() << "\n";
    return 0;
}

int run_sfd(const Common& common, const std::string& in_dir, std::string matrix_file,
            std::string groups_file) {
    const json merged = common.merged_config();
    Manifest manifest{"sfd", resolved_config(merged)};
    const auto files = csv_files_in(in_dir);
    std::vector<SeriesHandle> handles(files.size());
    std::vector<const cmm_series*> raw;
    for (std::size_t i = 0; i < files.size(); ++i) {
        handles[i] = load_series(common, manifest, files[i]);
        raw.push_back(handles[i].ptr);
    }
    CString matrix, groups;
    check(cmm_sfd_matrix(raw.data(), static_cast<int>(raw.size()), merged.dump().c_str(),
                         &matrix.ptr, &groups.ptr));
    if (matrix_file.empty()) matrix_file = "sfd_matrix.csv";
    if (groups_file.empty()) groups_file = "sfd_groups.json";
    write_output(common, manifest, matrix_file, matrix.str());
    write_output(common, manifest, groups_file, groups.str());
    write_manifest(common, manifest);
    return 0;
}

int run_transfer(const Common& common, const std::string& source_path,
                 const std::string& target_path) {
    const json merged = common.merged_config();
    Manifest manifest{"transfer", resolved_config(merged)};
    SeriesHandle source = load_series(common, manifest, source_path);
    SeriesHandle target = load_series(common, manifest, target_path);
    CString report, plot;
    check(cmm_transfer(source.ptr, target.ptr, merged.dump().c_str(), &report.ptr, &plot.ptr));
    write_output(common, manifest, stem_of(target_path) + "_transfer_report.json", report.str());
    write_output(common, manifest, stem_of(target_path) + "_transfer_plot.csv", plot.str());
    write_manifest(common, manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consistent-model-mining sales forecaster"};
    app.require_subcommand(1);

    Common common;

    auto* synth = app.add_subcommand("synth", "generate a synthetic series CSV");
    std::string synth_spec, synth_out;
    synth->add_option("--spec", synth_spec, "SynthSpec JSON file")->required();
    synth->add_option("--out", synth_out, "output CSV name");
    common.attach(synth);

    auto* decompose = app.add_subcommand("decompose", "emit the date,D,T,S,IC table");
    std::string dec_in, dec_out;
    decompose->add_option("--in", dec_in, "input series CSV")->required();
    decompose->add_option("--out", dec_out, "output CSV name");
    common.attach(decompose);

    auto* forecast = app.add_subcommand("forecast", "forecast past the series end");
    std::string fc_in, fc_model, fc_out;
    bool fc_hw = false;
    int fc_h = 12;
    forecast->add_option("--in", fc_in, "input series CSV")->required();
    forecast->add_option("--model", fc_model, "registry model TAG:ID (e.g. T:41)");
    forecast->add_flag("--hw", fc_hw, "use the Holt-Winters baseline");
    forecast->add_option("--h", fc_h, "forecast horizon")->check(CLI::PositiveNumber);
    forecast->add_option("--out", fc_out, "output CSV name");
    common.attach(forecast);

    auto* mine = app.add_subcommand("mine", "mine consistent good/bad expert sets");
    std::string mine_in, mine_db, mine_rankings, mine_registry, mine_out;
    bool mine_allow_large = false;
    mine->add_option("--in", mine_in, "input series CSV")->required();
    mine->add_option("--out", mine_out, "summary JSON name");
    mine->add_option("--dump-db", mine_db, "write the transaction DB text file");
    mine->add_option("--dump-rankings", mine_rankings, "write the per-point ranking CSV");
    mine->add_flag("--allow-large", mine_allow_large, "lift the 10^5-row ranking cap");
    mine->add_option("--dump-registry", mine_registry, "write the model registry JSON");
    common.attach(mine);

    auto* evaluate = app.add_subcommand("evaluate", "CMM vs Holt-Winters backtest");
    std::string eval_in, eval_comparison;
    evaluate->add_option("--in", eval_in, "series CSV or directory of CSVs")->required();
    evaluate->add_option("--comparison", eval_comparison, "comparison table CSV name");
    common.attach(evaluate);

    auto* sfd = app.add_subcommand("sfd", "pairwise sales-frequency-difference matrix");
    std::string sfd_in, sfd_matrix, sfd_groups;
    sfd->add_option("--in", sfd_in, "directory of series CSVs")->required();
    sfd->add_option("--matrix", sfd_matrix, "matrix CSV name");
    sfd->add_option("--groups", sfd_groups, "groups JSON name");
    common.attach(sfd);

    auto* transfer = app.add_subcommand("transfer", "apply one series' mined sets to another");
    std::string tr_source, tr_target;
    transfer->add_option("--source", tr_source, "series CSV to mine")->required();
    transfer->add_option("--target", tr_target, "series CSV to evaluate")->required();
    common.attach(transfer);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(common, synth_spec, synth_out);
        if (decompose->parsed()) return run_decompose(common, dec_in, dec_out);
        if (forecast->parsed()) {
            if (fc_hw == !fc_model.empty()) {
                std::cerr << "error: pass exactly one of --model or --hw\n";
                return 1;
            }
            return run_forecast(common, fc_in, fc_model, fc_hw, fc_h, fc_out);
        }
        if (mine->parsed()) {
            return run_mine(common, mine_in, mine_db, mine_rankings, mine_allow_large,
                            mine_registry, mine_out);
        }
        if (evaluate->parsed()) return run_evaluate(common, eval_in, eval_comparison);
        if (sfd->parsed()) return run_sfd(common, sfd_in, sfd_matrix, sfd_groups);
        if (transfer->parsed()) return run_transfer(common, tr_source, tr_target);
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
