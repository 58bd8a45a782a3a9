#include "cmm/decompose.hpp"

#include <cassert>
#include <cstdio>
#include <stdexcept>

namespace cmm {

Decomposition decompose(const TimeSeries& ts) {
    validate(ts);
    const int p = ts.period;
    const std::size_t n = ts.values.size();
    const auto& d = ts.values;

    Decomposition dec;
    dec.source_id = ts.id;
    dec.period = p;
    dec.trend.resize(n);
    dec.detrended.resize(n);
    dec.seasonal.resize(n);
    dec.irregular.resize(n);

    double window = 0.0;
    for (int t = 0; t < p; ++t) window += d[static_cast<std::size_t>(t)];
    const double first_cycle_mean = window / p;
    for (int t = 0; t < p; ++t) dec.trend[static_cast<std::size_t>(t)] = first_cycle_mean;
    for (std::size_t t = static_cast<std::size_t>(p); t < n; ++t) {
        window += d[t] - d[t - static_cast<std::size_t>(p)];
        dec.trend[t] = window / p;
    }

    for (std::size_t t = 0; t < n; ++t) {
        assert(dec.trend[t] > 0.0);
        dec.detrended[t] = d[t] / dec.trend[t];
    }

    for (std::size_t t = 0; t < n; ++t) {
        double sum = 0.0;
        int count = 0;
        for (long k = static_cast<long>(t); k >= 0; k -= p) {
            sum += dec.detrended[static_cast<std::size_t>(k)];
            ++count;
        }
        dec.seasonal[t] = sum / count;
        dec.irregular[t] = dec.detrended[t] / dec.seasonal[t];
    }
    return dec;
}

std::vector<double> recompose(const Decomposition& dec) {
    const std::size_t n = dec.trend.size();
    if (dec.seasonal.size() != n || dec.irregular.size() != n) {
        throw std::invalid_argument("recompose: component lengths differ");
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = dec.trend[t] * dec.seasonal[t] * dec.irregular[t];
    }
    return out;
}

std::string decomposition_to_csv(const TimeSeries& ts, const Decomposition& dec) {
    if (dec.trend.size() != ts.values.size()) {
        throw std::invalid_argument("decomposition does not match series length");
    }
    std::string out = "date,D,T,S,IC\n";
    char buf[160];
    for (std::size_t t = 0; t < ts.values.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n", ts.label_at(t).c_str(),
                      ts.values[t], dec.trend[t], dec.seasonal[t], dec.irregular[t]);
        out += buf;
    }
    return out;
}

}  // namespace cmm
