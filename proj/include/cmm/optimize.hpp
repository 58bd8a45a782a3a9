#pragma once

#include <functional>
#include <vector>

namespace cmm {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_iterations = 2000;
    double ftol = 1e-8;
    double initial_step = 0.1;
};

/// Derivative-free simplex minimizer. Deterministic: no randomized restarts,
/// ties resolved by vertex index.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const NelderMeadOptions& opt = {});

}  // namespace cmm
