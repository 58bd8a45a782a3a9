#include "cmm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmm {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    if (n == 0) {
        res.x = x0;
        res.fx = fn(x0);
        res.converged = true;
        return res;
    }

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += x0[i] != 0.0 ? opt.initial_step * std::abs(x0[i]) + opt.initial_step
                                          : opt.initial_step;
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = fn(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(fv[worst] - fv[best]) <= opt.ftol * (std::abs(fv[best]) + opt.ftol)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) {
                x[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
            }
            return x;
        };

        std::vector<double> xr = blend(kReflect);
        const double fr = fn(xr);
        if (fr < fv[order[0]]) {
            std::vector<double> xe = blend(kExpand);
            const double fe = fn(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
            continue;
        }
        std::vector<double> xc = blend(fr < fv[worst] ? kContract : -kContract);
        const double fc = fn(xc);
        if (fc < std::min(fr, fv[worst])) {
            simplex[worst] = std::move(xc);
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {  // shrink toward the best vertex
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) {
                simplex[i][k] = simplex[best][k] + kShrink * (simplex[i][k] - simplex[best][k]);
            }
            fv[i] = fn(simplex[i]);
        }
    }

    sort_simplex();
    res.x = simplex[order[0]];
    res.fx = fv[order[0]];
    res.iterations = iter;
    return res;
}

}  // namespace cmm
