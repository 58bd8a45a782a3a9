#include "cmm/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmm {

std::string TimeSeries::label_at(std::size_t i) const {
    const long idx = start.sub + static_cast<long>(i);
    const int year = start.year + static_cast<int>(idx / period);
    const int sub = static_cast<int>(idx % period);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, sub + 1);
    return buf;
}

void validate(const TimeSeries& ts) {
    if (ts.period < 2) {
        throw std::invalid_argument("series '" + ts.id + "': period must be >= 2");
    }
    if (ts.values.size() < static_cast<std::size_t>(3 * ts.period)) {
        throw std::invalid_argument("series '" + ts.id + "': length " +
                                    std::to_string(ts.values.size()) +
                                    " < 3*period = " + std::to_string(3 * ts.period));
    }
    for (std::size_t i = 0; i < ts.values.size(); ++i) {
        const double v = ts.values[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("series '" + ts.id + "': non-positive value at index " +
                                        std::to_string(i));
        }
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_date(const std::string& s, int& year, int& month) {
    if (s.size() < 6) return false;
    auto dash = s.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= s.size()) return false;
    auto num = [](const std::string& t, int& out) {
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        return ec == std::errc() && p == t.data() + t.size();
    };
    return num(s.substr(0, dash), year) && num(s.substr(dash + 1), month);
}

}  // namespace

TimeSeries parse_csv(const std::string& text, int period, const std::string& id) {
    if (period < 2) throw std::invalid_argument("csv '" + id + "': period must be >= 2");
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "date,value") {
        throw std::invalid_argument("csv '" + id + "': expected header 'date,value'");
    }
    TimeSeries ts;
    ts.id = id;
    ts.period = period;
    int row = 0;
    int prev_year = 0, prev_month = 0;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        ++row;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                        ": missing value column");
        }
        int year = 0, month = 0;
        if (!parse_date(trim(line.substr(0, comma)), year, month)) {
            throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                        ": bad date (want YYYY-MM)");
        }
        if (month < 1 || month > period) {
            throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                        ": sub-period " + std::to_string(month) +
                                        " outside [1," + std::to_string(period) + "]");
        }
        const std::string vs = trim(line.substr(comma + 1));
        double v = 0.0;
        auto [p, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
        if (ec != std::errc() || p != vs.data() + vs.size()) {
            throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                        ": bad value '" + vs + "'");
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                        ": non-positive value");
        }
        if (row == 1) {
            ts.start = {year, month - 1};
        } else {
            int ey = prev_year, em = prev_month + 1;
            if (em > period) {
                em = 1;
                ++ey;
            }
            if (year != ey || month != em) {
                throw std::invalid_argument("csv '" + id + "': row " + std::to_string(row) +
                                            ": gap in timestamps");
            }
        }
        prev_year = year;
        prev_month = month;
        ts.values.push_back(v);
    }
    validate(ts);
    return ts;
}

TimeSeries load_csv(const std::string& path, int period) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    auto slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.rfind('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_csv(ss.str(), period, stem);
}

std::string to_csv(const TimeSeries& ts) {
    std::string out = "date,value\n";
    char buf[40];
    for (std::size_t i = 0; i < ts.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", ts.values[i]);
        out += ts.label_at(i);
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

void write_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_csv(ts);
}

Split split(const TimeSeries& ts, double fraction, int horizon) {
    validate(ts);
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("train fraction must be in (0,1]");
    }
    const std::size_t n = ts.values.size();
    const std::size_t n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (n_train < static_cast<std::size_t>(3 * ts.period)) {
        throw std::invalid_argument("train window " + std::to_string(n_train) +
                                    " < 3*period = " + std::to_string(3 * ts.period));
    }
    if (horizon < 0 || static_cast<std::size_t>(horizon) > n - n_train) {
        throw std::invalid_argument("eval horizon " + std::to_string(horizon) +
                                    " exceeds test length " + std::to_string(n - n_train));
    }
    Split sp;
    sp.train_fraction = fraction;
    sp.eval_horizon = horizon;
    sp.train = TimeSeries{ts.id + ".train", ts.period, ts.start,
                          {ts.values.begin(), ts.values.begin() + static_cast<long>(n_train)}};
    const long idx = ts.start.sub + static_cast<long>(n_train);
    SeriesStart test_start{ts.start.year + static_cast<int>(idx / ts.period),
                           static_cast<int>(idx % ts.period)};
    sp.test = TimeSeries{ts.id + ".test", ts.period, test_start,
                         {ts.values.begin() + static_cast<long>(n_train), ts.values.end()}};
    return sp;
}

namespace {

// Box-Muller on top of mt19937_64, self-contained so generated series are
// bit-identical across standard library implementations.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

    double next() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 gen_;
};

}  // namespace

TimeSeries generate(const SynthSpec& spec) {
    if (spec.period < 2) throw std::invalid_argument("synth: period must be >= 2");
    if (spec.n < 3 * spec.period) {
        throw std::invalid_argument("synth: n " + std::to_string(spec.n) + " < 3*period");
    }
    if (spec.seasonal_amplitudes.size() != static_cast<std::size_t>(spec.period)) {
        throw std::invalid_argument("synth: need exactly `period` seasonal amplitudes");
    }
    double mean = 0.0;
    for (double a : spec.seasonal_amplitudes) {
        if (!(a > 0.0)) throw std::invalid_argument("synth: seasonal amplitudes must be positive");
        mean += a;
    }
    mean /= static_cast<double>(spec.period);
    if (std::abs(mean - 1.0) > 1e-9) {
        throw std::invalid_argument("synth: seasonal amplitudes must average 1 (got " +
                                    std::to_string(mean) + ")");
    }
    if (spec.noise_sd < 0.0) throw std::invalid_argument("synth: noise_sd must be >= 0");

    GaussianRng rng(spec.seed);
    TimeSeries ts;
    ts.id = spec.id;
    ts.period = spec.period;
    ts.values.reserve(static_cast<std::size_t>(spec.n));
    for (int t = 0; t < spec.n; ++t) {
        const double level = spec.base_level + spec.trend_slope * static_cast<double>(t);
        const double eps = spec.noise_sd > 0.0 ? rng.next() * spec.noise_sd : 0.0;
        const double v = level * spec.seasonal_amplitudes[static_cast<std::size_t>(t % spec.period)] *
                         std::exp(eps);
        if (!(v > 0.0)) {
            throw std::invalid_argument("synth: non-positive value at t=" + std::to_string(t) +
                                        " (base_level=" + std::to_string(spec.base_level) +
                                        ", trend_slope=" + std::to_string(spec.trend_slope) + ")");
        }
        ts.values.push_back(v);
    }
    return ts;
}

SynthSpec synth_spec_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    SynthSpec spec;
    spec.n = j.at("n").get<int>();
    spec.period = j.at("period").get<int>();
    spec.base_level = j.at("base_level").get<double>();
    spec.trend_slope = j.value("trend_slope", 0.0);
    spec.seasonal_amplitudes = j.value("seasonal_amplitudes", std::vector<double>{});
    if (spec.seasonal_amplitudes.empty()) {
        spec.seasonal_amplitudes.assign(static_cast<std::size_t>(spec.period), 1.0);
    }
    spec.noise_sd = j.value("noise_sd", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.id = j.value("id", std::string("synth"));
    return spec;
}

}  // namespace cmm
