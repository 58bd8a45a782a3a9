#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cmm/forecasters.hpp"
#include "cmm/optimize.hpp"

// Conditional-sum-of-squares ARIMA. Conventions follow the usual Box-Jenkins
// software form: with w the d/D-differenced (optionally logged) series and
// z = w - mean,
//   z_t = sum_i a_i z_{t-i} + e_t + sum_j b_j e_{t-j}
// where a = phi(B)*PHI(B^s) expanded and b = theta(B)*THETA(B^s) expanded
// (MA coefficients carry a plus sign). Residuals are conditioned on the first
// p + s*P points; earlier shocks are treated as zero.

namespace cmm {
namespace detail {

std::vector<double> expand_ar(const std::vector<double>& phi, const std::vector<double>& sphi,
                              int s) {
    const std::size_t p = phi.size(), P = sphi.size();
    std::vector<double> a(p + s * P, 0.0);
    std::copy(phi.begin(), phi.end(), a.begin());
    for (std::size_t j = 0; j < P; ++j) {
        a[(j + 1) * s - 1] += sphi[j];
        for (std::size_t i = 0; i < p; ++i) {
            a[(j + 1) * s + i] -= phi[i] * sphi[j];
        }
    }
    return a;
}

std::vector<double> expand_ma(const std::vector<double>& theta, const std::vector<double>& stheta,
                              int s) {
    const std::size_t q = theta.size(), Q = stheta.size();
    std::vector<double> b(q + s * Q, 0.0);
    std::copy(theta.begin(), theta.end(), b.begin());
    for (std::size_t j = 0; j < Q; ++j) {
        b[(j + 1) * s - 1] += stheta[j];
        for (std::size_t i = 0; i < q; ++i) {
            b[(j + 1) * s + i] += theta[i] * stheta[j];
        }
    }
    return b;
}

bool stationary_region(const std::vector<double>& coef) {
    // Backward Durbin-Levinson: recover the reflection coefficients; the
    // polynomial is unit-root safe iff all of them lie strictly inside (-1,1).
    std::vector<double> work = coef;
    for (std::size_t j = work.size(); j-- > 1;) {
        const double a = work[j];
        if (!(std::abs(a) < 1.0)) return false;
        std::vector<double> next(j);
        const double den = 1.0 - a * a;
        for (std::size_t k = 0; k < j; ++k) {
            next[k] = (work[k] + a * work[j - k - 1]) / den;
        }
        std::copy(next.begin(), next.end(), work.begin());
    }
    return work.empty() || std::abs(work[0]) < 1.0;
}

namespace {

std::vector<double> diff1(const std::vector<double>& x, int lag) {
    std::vector<double> out;
    out.reserve(x.size() - static_cast<std::size_t>(lag));
    for (std::size_t i = static_cast<std::size_t>(lag); i < x.size(); ++i) {
        out.push_back(x[i] - x[i - static_cast<std::size_t>(lag)]);
    }
    return out;
}

std::vector<double> apply_log(const ModelSpec& spec, std::span<const double> x) {
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

std::vector<double> difference(const ModelSpec& spec, std::vector<double> x) {
    for (int i = 0; i < spec.d; ++i) x = diff1(x, 1);
    for (int j = 0; j < spec.D; ++j) x = diff1(x, spec.s);
    return x;
}

// Residuals conditioned on the first `ncond` observations of z; shocks with
// index below ncond are zero. Returns mean squared residual.
double css_residuals(const std::vector<double>& z, const std::vector<double>& a,
                     const std::vector<double>& b, std::vector<double>& resid) {
    const std::size_t n = z.size();
    const std::size_t ncond = a.size();
    resid.assign(n, 0.0);
    double ssq = 0.0;
    std::size_t nu = 0;
    for (std::size_t t = ncond; t < n; ++t) {
        double e = z[t];
        for (std::size_t i = 0; i < a.size(); ++i) e -= a[i] * z[t - i - 1];
        for (std::size_t j = 0; j < b.size() && j < t - ncond; ++j) {
            e -= b[j] * resid[t - j - 1];
        }
        resid[t] = e;
        ssq += e * e;
        ++nu;
    }
    return nu > 0 ? ssq / static_cast<double>(nu) : 0.0;
}

struct ParamLayout {
    int p, q, P, Q;
    bool intercept;
    int count() const { return p + q + P + Q + (intercept ? 1 : 0); }
};

struct Unpacked {
    std::vector<double> phi, theta, sphi, stheta;
    double mu = 0.0;
};

Unpacked unpack(const ParamLayout& lay, const std::vector<double>& v) {
    Unpacked u;
    auto it = v.begin();
    u.phi.assign(it, it + lay.p);
    it += lay.p;
    u.theta.assign(it, it + lay.q);
    it += lay.q;
    u.sphi.assign(it, it + lay.P);
    it += lay.P;
    u.stheta.assign(it, it + lay.Q);
    it += lay.Q;
    if (lay.intercept) u.mu = *it;
    return u;
}

// Levinson-Durbin AR(p) estimate from sample autocovariances, used to seed
// the simplex alongside the all-zeros start.
std::vector<double> yule_walker(const std::vector<double>& w, int p) {
    const std::size_t n = w.size();
    if (p == 0 || n < static_cast<std::size_t>(p) + 2) return std::vector<double>(p, 0.0);
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> gamma(static_cast<std::size_t>(p) + 1, 0.0);
    for (int k = 0; k <= p; ++k) {
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
            s += (w[t] - mean) * (w[t - static_cast<std::size_t>(k)] - mean);
        }
        gamma[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
    }
    if (gamma[0] <= 0.0) return std::vector<double>(p, 0.0);
    std::vector<double> phi(static_cast<std::size_t>(p), 0.0), prev;
    double err = gamma[0];
    for (int k = 1; k <= p; ++k) {
        double acc = gamma[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j) {
            acc -= phi[static_cast<std::size_t>(j - 1)] * gamma[static_cast<std::size_t>(k - j)];
        }
        const double refl = err > 0.0 ? acc / err : 0.0;
        prev = phi;
        phi[static_cast<std::size_t>(k - 1)] = refl;
        for (int j = 1; j < k; ++j) {
            phi[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - refl * prev[static_cast<std::size_t>(k - j - 1)];
        }
        err *= 1.0 - refl * refl;
        if (err <= 0.0) break;
    }
    for (double& v : phi) {
        if (!std::isfinite(v)) v = 0.0;
    }
    return phi;
}

std::vector<double> negate(std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
}

}  // namespace

FittedModel fit_arima(const ModelSpec& spec, std::span<const double> series) {
    const int s = spec.s;
    const long need = std::max<long>({3L * (spec.p + spec.q + 1),
                                      2L * s * (spec.P + spec.Q + spec.D + 1), 8L});
    if (static_cast<long>(series.size()) < need) {
        throw std::invalid_argument("model '" + spec.name() + "': series length " +
                                    std::to_string(series.size()) + " < required " +
                                    std::to_string(need));
    }

    const std::vector<double> x = apply_log(spec, series);
    const std::vector<double> w = difference(spec, x);
    const std::size_t ncond = static_cast<std::size_t>(spec.p + s * spec.P);
    if (w.size() <= ncond + static_cast<std::size_t>(spec.q + s * spec.Q)) {
        throw std::invalid_argument("model '" + spec.name() + "': series too short for the orders");
    }

    double wmean = 0.0;
    for (double v : w) wmean += v;
    wmean /= static_cast<double>(w.size());

    const ParamLayout lay{spec.p, spec.q, spec.P, spec.Q, spec.intercept};

    std::vector<double> resid_buf;
    auto css_of = [&](const Unpacked& u, std::vector<double>& resid) {
        const std::vector<double> a = expand_ar(u.phi, u.sphi, s);
        const std::vector<double> b = expand_ma(u.theta, u.stheta, s);
        std::vector<double> z(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) z[i] = w[i] - u.mu;
        return css_residuals(z, a, b, resid);
    };

    auto penalized_objective = [&](const std::vector<double>& params) {
        const Unpacked u = unpack(lay, params);
        double css = css_of(u, resid_buf);
        if (!std::isfinite(css)) return std::numeric_limits<double>::max() / 16.0;
        const bool safe = stationary_region(u.phi) && stationary_region(u.sphi) &&
                          stationary_region(negate(u.theta)) && stationary_region(negate(u.stheta));
        if (!safe) css *= 10.0;
        return css;
    };

    FittedModel fm;
    fm.spec = spec;
    fm.fit_length = static_cast<int>(series.size());

    if (lay.count() == 0) {
        Unpacked u;
        fm.residual_variance = css_of(u, resid_buf);
        fm.converged = true;
        return fm;
    }

    std::vector<std::vector<double>> starts;
    {
        std::vector<double> zeros(static_cast<std::size_t>(lay.count()), 0.0);
        if (lay.intercept) zeros.back() = wmean;
        starts.push_back(zeros);
        if (spec.p > 0) {
            std::vector<double> yw = zeros;
            const std::vector<double> phi0 = yule_walker(w, spec.p);
            std::copy(phi0.begin(), phi0.end(), yw.begin());
            starts.push_back(yw);
        }
    }

    NelderMeadOptions opt;
    opt.max_iterations = 2000;
    opt.ftol = 1e-8;
    NelderMeadResult best;
    bool have = false;
    for (auto& x0 : starts) {
        NelderMeadResult r = nelder_mead(penalized_objective, x0, opt);
        if (!have || r.fx < best.fx) {
            best = std::move(r);
            have = true;
        }
    }

    const Unpacked u = unpack(lay, best.x);
    fm.ar = u.phi;
    fm.ma = u.theta;
    fm.sar = u.sphi;
    fm.sma = u.stheta;
    fm.mean = u.mu;
    fm.residual_variance = css_of(u, resid_buf);
    fm.converged = best.converged;
    return fm;
}

std::vector<double> forecast_arima(const FittedModel& fm, std::span<const double> origin, int h) {
    const ModelSpec& spec = fm.spec;
    const int s = spec.s;
    std::vector<double> x = apply_log(spec, origin);

    // Differencing stages, keeping each pre-difference series for inversion.
    struct Stage {
        int lag;
        std::vector<double> before;
    };
    std::vector<Stage> stages;
    for (int i = 0; i < spec.d; ++i) {
        stages.push_back({1, x});
        x = diff1(x, 1);
    }
    for (int j = 0; j < spec.D; ++j) {
        stages.push_back({s, x});
        x = diff1(x, s);
    }

    const std::vector<double> a = expand_ar(fm.ar, fm.sar, s);
    const std::vector<double> b = expand_ma(fm.ma, fm.sma, s);
    const std::size_t m = x.size();
    if (m <= a.size()) {
        throw std::invalid_argument("model '" + spec.name() + "': origin too short to forecast");
    }

    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = x[i] - fm.mean;
    std::vector<double> resid;
    css_residuals(z, a, b, resid);

    // Recursive forecasts on the z scale: future shocks are zero.
    std::vector<double> zf(m + static_cast<std::size_t>(h));
    std::copy(z.begin(), z.end(), zf.begin());
    std::vector<double> ef(m + static_cast<std::size_t>(h), 0.0);
    std::copy(resid.begin(), resid.end(), ef.begin());
    std::vector<double> f(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
        const std::size_t t = m + static_cast<std::size_t>(k);
        double v = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * zf[t - i - 1];
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (t - j - 1 < m) v += b[j] * ef[t - j - 1];
        }
        zf[t] = v;
        f[static_cast<std::size_t>(k)] = v + fm.mean;
    }

    // Undo differencing, innermost stage first.
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
        const std::vector<double>& prev = it->before;
        const int lag = it->lag;
        for (int k = 0; k < h; ++k) {
            const double back =
                k >= lag ? f[static_cast<std::size_t>(k - lag)]
                         : prev[prev.size() - static_cast<std::size_t>(lag) + static_cast<std::size_t>(k)];
            f[static_cast<std::size_t>(k)] += back;
        }
    }

    if (spec.log_transform) {
        for (double& v : f) v = std::exp(v);
    }
    return f;
}

}  // namespace detail
}  // namespace cmm
