#pragma once

#include "roadhawk/model.hpp"

#include <vector>

namespace roadhawk {

enum class ValidationMode { in_sample, out_of_sample };

struct QQPoint {
    std::size_t k = 0;
    double observed = 0.0;
    double expected = 0.0; // k / (n + 1), the Beta mean
    double lo = 0.0;
    double hi = 0.0;
};

struct ValidationReport {
    std::vector<double> transformed;  // Lambda_i, non-decreasing
    std::vector<double> increments;   // Lambda_i - Lambda_{i-1} (Lambda_0 = 0)
    std::vector<double> z;            // 1 - exp(-increment), in [0, 1]
    double ks_stat = 0.0;
    double band95 = 0.0;
    double band99 = 0.0;
    bool pass95 = false;
    bool pass99 = false;
    std::vector<QQPoint> qq;
    std::size_t qq_outside95 = 0;
    ValidationMode mode = ValidationMode::in_sample;
    bool small_n = false; // asymptotic band used below n = 35
};

// Lambda_i = integral of lambda over [0, t_i] x [0, X].
std::vector<double> transform_times(const ModelComponents& model, const EventCatalog& catalog);

// z_i = 1 - exp(-(Lambda_i - Lambda_{i-1})); throws on a negative increment.
std::vector<double> to_uniform(const std::vector<double>& transformed);

// Asymptotic KS band half-width c(alpha) / sqrt(n).
double ks_band(std::size_t n, double alpha);

// (alpha/2, 1 - alpha/2) quantiles of Beta(k, n + 1 - k).
std::pair<double, double> qq_band(std::size_t n, std::size_t k, double alpha);

// sup_x |F_n(x) - x| of values against the uniform diagonal.
double ks_statistic_uniform(std::vector<double> values);

ValidationReport validate(const ModelComponents& model, const EventCatalog& catalog,
                          ValidationMode mode);

} // namespace roadhawk
