#pragma once

#include <span>
#include <vector>

#include "cmm/registry.hpp"

namespace cmm {

/// Estimated coefficients for one atomic forecaster. ARIMA coefficients live
/// on the (possibly log-) differenced scale; `mean` is the differenced-series
/// mean when the model carries an intercept. LinearTrendAr reuses `mean`
/// (OLS level) and `slope`, with `resid_ar` holding the AR coefficients
/// fitted on the line's residuals. Smoothing families use alpha/beta/gamma.
struct FittedModel {
    ModelSpec spec;
    std::vector<double> ar, ma, sar, sma;
    double mean = 0.0;
    double slope = 0.0;
    std::vector<double> resid_ar;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    double residual_variance = 0.0;
    int fit_length = 0;
    bool converged = true;
};

/// Smallest series length `fit` accepts for this spec.
int min_fit_length(const ModelSpec& spec);

/// Fits the spec on `series` by conditional sum of squares (ARIMA), grid
/// search (smoothing families) or least squares (trend lines). Never throws
/// for a non-converged optimizer; `converged=false` carries best-so-far
/// coefficients. Throws std::invalid_argument when the series is too short
/// or not positive under a log transform.
FittedModel fit(const ModelSpec& spec, std::span<const double> series);

/// Recursive h-step forecasts from the end of `origin`, which must be the
/// fitted series or an extension of it. Future shocks are zero; differencing
/// is inverted by cumulative summation and log by exponentiation.
std::vector<double> forecast(const FittedModel& fm, std::span<const double> origin, int h);

namespace detail {

/// True when the polynomial 1 - sum(c_i B^i) has all roots outside the unit
/// circle (checked through the reflection coefficients).
bool stationary_region(const std::vector<double>& coef);

FittedModel fit_arima(const ModelSpec& spec, std::span<const double> series);
std::vector<double> forecast_arima(const FittedModel& fm, std::span<const double> origin, int h);

std::vector<double> expand_ar(const std::vector<double>& phi, const std::vector<double>& sphi,
                              int s);
std::vector<double> expand_ma(const std::vector<double>& theta, const std::vector<double>& stheta,
                              int s);

}  // namespace detail

}  // namespace cmm
