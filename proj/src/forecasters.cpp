#include "cmm/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cmm/smoothers.hpp"

namespace cmm {

namespace {

std::vector<double> maybe_log(const ModelSpec& spec, std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    if (!spec.log_transform) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) {
            throw std::invalid_argument("model '" + spec.name() +
                                        "': non-positive value at index " + std::to_string(i) +
                                        " under log transform");
        }
        out[i] = std::log(out[i]);
    }
    return out;
}

void maybe_exp(const ModelSpec& spec, std::vector<double>& f) {
    if (!spec.log_transform) return;
    for (double& v : f) v = std::exp(v);
}

// ---- Holt (double exponential smoothing with separate trend constant) ----

struct HoltState {
    double level = 0.0;
    double trend = 0.0;
};

HoltState holt_run(std::span<const double> x, double alpha, double beta,
                   std::vector<double>* one_step) {
    HoltState st{x[0], x[1] - x[0]};
    if (one_step) one_step->clear();
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (one_step) one_step->push_back(st.level + st.trend);
        const double prev = st.level;
        st.level = alpha * x[t] + (1.0 - alpha) * (st.level + st.trend);
        st.trend = beta * (st.level - prev) + (1.0 - beta) * st.trend;
    }
    return st;
}

std::pair<double, double> holt_grid_search(std::span<const double> x) {
    constexpr double kGrid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    double best_a = kGrid[0], best_b = kGrid[0];
    double best_mse = 0.0;
    bool first = true;
    std::vector<double> path;
    for (double a : kGrid) {
        for (double b : kGrid) {
            holt_run(x, a, b, &path);
            double ssq = 0.0;
            int nu = 0;
            for (std::size_t t = 2; t < x.size(); ++t) {
                const double e = x[t] - path[t - 1];
                ssq += e * e;
                ++nu;
            }
            const double mse = nu > 0 ? ssq / nu : 0.0;
            if (first || mse < best_mse) {
                best_a = a;
                best_b = b;
                best_mse = mse;
                first = false;
            }
        }
    }
    return {best_a, best_b};
}

// ---- Brown's linear (double) exponential smoothing, single constant ----

struct BrownState {
    double s1 = 0.0;
    double s2 = 0.0;
    double alpha = 0.0;

    double level() const { return 2.0 * s1 - s2; }
    double slope() const { return alpha / (1.0 - alpha) * (s1 - s2); }
};

BrownState brown_run(std::span<const double> x, double alpha, std::vector<double>* one_step) {
    BrownState st{x[0], x[0], alpha};
    if (one_step) one_step->clear();
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (one_step) one_step->push_back(st.level() + st.slope());
        st.s1 = alpha * x[t] + (1.0 - alpha) * st.s1;
        st.s2 = alpha * st.s1 + (1.0 - alpha) * st.s2;
    }
    return st;
}

double brown_grid_search(std::span<const double> x) {
    double best_a = 0.05, best_mse = 0.0;
    bool first = true;
    std::vector<double> path;
    for (int i = 1; i <= 19; ++i) {
        const double a = 0.05 * i;
        brown_run(x, a, &path);
        double ssq = 0.0;
        int nu = 0;
        for (std::size_t t = 2; t < x.size(); ++t) {
            const double e = x[t] - path[t - 1];
            ssq += e * e;
            ++nu;
        }
        const double mse = nu > 0 ? ssq / nu : 0.0;
        if (first || mse < best_mse) {
            best_a = a;
            best_mse = mse;
            first = false;
        }
    }
    return best_a;
}

// ---- OLS line + AR(k) on residuals ----

struct OlsLine {
    double level = 0.0;  // value at t = 0
    double slope = 0.0;
};

OlsLine ols_fit(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double td = static_cast<double>(t);
        st += td;
        sx += x[t];
        stt += td * td;
        stx += td * x[t];
    }
    const double den = n * stt - st * st;
    OlsLine line;
    line.slope = den != 0.0 ? (n * stx - st * sx) / den : 0.0;
    line.level = (sx - line.slope * st) / n;
    return line;
}

// Least-squares AR(k) on a residual sequence (no intercept). Returns zeros
// when the normal equations are singular.
std::vector<double> ar_least_squares(const std::vector<double>& r, int k) {
    const std::size_t n = r.size();
    std::vector<double> A(static_cast<std::size_t>(k) * k, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
        for (int i = 0; i < k; ++i) {
            rhs[static_cast<std::size_t>(i)] += r[t] * r[t - static_cast<std::size_t>(i) - 1];
            for (int j = 0; j < k; ++j) {
                A[static_cast<std::size_t>(i * k + j)] +=
                    r[t - static_cast<std::size_t>(i) - 1] * r[t - static_cast<std::size_t>(j) - 1];
            }
        }
    }
    // Gaussian elimination with partial pivoting on the k x k system.
    std::vector<double> c(static_cast<std::size_t>(k), 0.0);
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int row = col + 1; row < k; ++row) {
            if (std::abs(A[static_cast<std::size_t>(row * k + col)]) >
                std::abs(A[static_cast<std::size_t>(piv * k + col)])) {
                piv = row;
            }
        }
        if (std::abs(A[static_cast<std::size_t>(piv * k + col)]) < 1e-12) {
            return std::vector<double>(static_cast<std::size_t>(k), 0.0);
        }
        if (piv != col) {
            for (int j = 0; j < k; ++j) {
                std::swap(A[static_cast<std::size_t>(col * k + j)],
                          A[static_cast<std::size_t>(piv * k + j)]);
            }
            std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
        }
        for (int row = col + 1; row < k; ++row) {
            const double m = A[static_cast<std::size_t>(row * k + col)] /
                             A[static_cast<std::size_t>(col * k + col)];
            for (int j = col; j < k; ++j) {
                A[static_cast<std::size_t>(row * k + j)] -= m * A[static_cast<std::size_t>(col * k + j)];
            }
            rhs[static_cast<std::size_t>(row)] -= m * rhs[static_cast<std::size_t>(col)];
        }
    }
    for (int row = k - 1; row >= 0; --row) {
        double v = rhs[static_cast<std::size_t>(row)];
        for (int j = row + 1; j < k; ++j) {
            v -= A[static_cast<std::size_t>(row * k + j)] * c[static_cast<std::size_t>(j)];
        }
        c[static_cast<std::size_t>(row)] = v / A[static_cast<std::size_t>(row * k + row)];
    }
    return c;
}

}  // namespace

int min_fit_length(const ModelSpec& spec) {
    switch (spec.family) {
        case ModelFamily::Arima:
            return static_cast<int>(std::max<long>({3L * (spec.p + spec.q + 1),
                                                    2L * spec.s * (spec.P + spec.Q + spec.D + 1),
                                                    8L}));
        case ModelFamily::HoltWinters:
            return 2 * spec.s;
        case ModelFamily::Holt:
        case ModelFamily::LinearExponential:
            return 8;
        case ModelFamily::LinearTrendAr:
            return std::max(8, 3 * (spec.p + 1));
        case ModelFamily::RandomWalk:
            return 1;
    }
    return 8;
}

FittedModel fit(const ModelSpec& spec, std::span<const double> series) {
    validate(spec);
    if (static_cast<long>(series.size()) < min_fit_length(spec)) {
        throw std::invalid_argument("model '" + spec.name() + "': series length " +
                                    std::to_string(series.size()) + " < required " +
                                    std::to_string(min_fit_length(spec)));
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("model '" + spec.name() + "': non-finite value in series");
        }
    }

    switch (spec.family) {
        case ModelFamily::Arima:
            return detail::fit_arima(spec, series);
        case ModelFamily::RandomWalk: {
            FittedModel fm;
            fm.spec = spec;
            fm.fit_length = static_cast<int>(series.size());
            return fm;
        }
        case ModelFamily::Holt: {
            const std::vector<double> x = maybe_log(spec, series);
            FittedModel fm;
            fm.spec = spec;
            fm.fit_length = static_cast<int>(series.size());
            auto [a, b] = holt_grid_search(x);
            fm.alpha = a;
            fm.beta = b;
            std::vector<double> path;
            holt_run(x, a, b, &path);
            double ssq = 0.0;
            int nu = 0;
            for (std::size_t t = 2; t < x.size(); ++t) {
                const double e = x[t] - path[t - 1];
                ssq += e * e;
                ++nu;
            }
            fm.residual_variance = nu > 0 ? ssq / nu : 0.0;
            return fm;
        }
        case ModelFamily::LinearExponential: {
            const std::vector<double> x = maybe_log(spec, series);
            FittedModel fm;
            fm.spec = spec;
            fm.fit_length = static_cast<int>(series.size());
            fm.alpha = brown_grid_search(x);
            return fm;
        }
        case ModelFamily::HoltWinters: {
            const std::vector<double> x = maybe_log(spec, series);
            FittedModel fm;
            fm.spec = spec;
            fm.fit_length = static_cast<int>(series.size());
            const HWParams params = fit_hw(x, default_hw_grid(spec.s));
            fm.alpha = params.alpha;
            fm.beta = params.beta;
            fm.gamma = params.gamma;
            return fm;
        }
        case ModelFamily::LinearTrendAr: {
            const std::vector<double> x = maybe_log(spec, series);
            FittedModel fm;
            fm.spec = spec;
            fm.fit_length = static_cast<int>(series.size());
            const OlsLine line = ols_fit(x);
            fm.mean = line.level;
            fm.slope = line.slope;
            std::vector<double> resid(x.size());
            for (std::size_t t = 0; t < x.size(); ++t) {
                resid[t] = x[t] - (line.level + line.slope * static_cast<double>(t));
            }
            fm.resid_ar = ar_least_squares(resid, spec.p);
            double ssq = 0.0;
            int nu = 0;
            for (std::size_t t = static_cast<std::size_t>(spec.p); t < resid.size(); ++t) {
                double e = resid[t];
                for (int j = 0; j < spec.p; ++j) {
                    e -= fm.resid_ar[static_cast<std::size_t>(j)] *
                         resid[t - static_cast<std::size_t>(j) - 1];
                }
                ssq += e * e;
                ++nu;
            }
            fm.residual_variance = nu > 0 ? ssq / nu : 0.0;
            return fm;
        }
    }
    throw std::logic_error("unhandled model family");
}

std::vector<double> forecast(const FittedModel& fm, std::span<const double> origin, int h) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be >= 1");
    if (origin.empty()) throw std::invalid_argument("forecast origin is empty");
    const ModelSpec& spec = fm.spec;

    switch (spec.family) {
        case ModelFamily::Arima:
            return detail::forecast_arima(fm, origin, h);
        case ModelFamily::RandomWalk:
            return std::vector<double>(static_cast<std::size_t>(h), origin.back());
        case ModelFamily::Holt: {
            const std::vector<double> x = maybe_log(spec, origin);
            if (x.size() < 2) throw std::invalid_argument("holt: origin too short");
            const HoltState st = holt_run(x, fm.alpha, fm.beta, nullptr);
            std::vector<double> f(static_cast<std::size_t>(h));
            for (int i = 1; i <= h; ++i) f[static_cast<std::size_t>(i - 1)] = st.level + i * st.trend;
            maybe_exp(spec, f);
            return f;
        }
        case ModelFamily::LinearExponential: {
            const std::vector<double> x = maybe_log(spec, origin);
            const BrownState st = brown_run(x, fm.alpha, nullptr);
            std::vector<double> f(static_cast<std::size_t>(h));
            for (int i = 1; i <= h; ++i) {
                f[static_cast<std::size_t>(i - 1)] = st.level() + i * st.slope();
            }
            maybe_exp(spec, f);
            return f;
        }
        case ModelFamily::HoltWinters: {
            const std::vector<double> x = maybe_log(spec, origin);
            const HWParams params{fm.alpha, fm.beta, fm.gamma, spec.s};
            HWResult res = holt_winters(x, params, h);
            maybe_exp(spec, res.forecasts);
            return res.forecasts;
        }
        case ModelFamily::LinearTrendAr: {
            const std::vector<double> x = maybe_log(spec, origin);
            const std::size_t n = x.size();
            const int k = spec.p;
            std::vector<double> resid(n + static_cast<std::size_t>(h));
            for (std::size_t t = 0; t < n; ++t) {
                resid[t] = x[t] - (fm.mean + fm.slope * static_cast<double>(t));
            }
            std::vector<double> f(static_cast<std::size_t>(h));
            for (int i = 0; i < h; ++i) {
                const std::size_t t = n + static_cast<std::size_t>(i);
                double r = 0.0;
                if (t >= static_cast<std::size_t>(k)) {
                    for (int j = 0; j < k; ++j) {
                        r += fm.resid_ar[static_cast<std::size_t>(j)] *
                             resid[t - static_cast<std::size_t>(j) - 1];
                    }
                }
                resid[t] = r;
                f[static_cast<std::size_t>(i)] = fm.mean + fm.slope * static_cast<double>(t) + r;
            }
            maybe_exp(spec, f);
            return f;
        }
    }
    throw std::logic_error("unhandled model family");
}

}  // namespace cmm
