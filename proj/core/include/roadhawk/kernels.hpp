#pragma once

#include <limits>

namespace roadhawk {

// k_w(u) = exp(-u^2 / (2 w^2)) / (sqrt(2 pi) w). Throws on w <= 0.
double gaussian(double u, double omega);

// d/du of gaussian(u, omega).
double gaussian_deriv(double u, double omega);

// Standard normal CDF via the complementary error function (|err| <= 1e-12).
double normal_cdf(double z);

// Mass of k_w centered at c over [lo, hi].
double gaussian_mass(double center, double omega, double lo, double hi);

enum class DomainKind { line, truncated, periodic };

struct KernelSpec {
    double bandwidth = 1.0;
    DomainKind kind = DomainKind::line;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double period = 0.0;
    bool mirror_lo = false;
    bool mirror_hi = false;
};

// Kernel mass density at x from a point at c on a truncated domain,
// mirrored across the requested boundaries and renormalized so its
// integral over [lo, hi] is 1 (analytic, via the normal CDF).
double weight_truncated(double x, double center, double omega, double lo, double hi,
                        bool mirror_lo, bool mirror_hi);

// Unnormalized mirrored-kernel mass over [lo, hi]; the divisor used above.
double truncated_mass(double center, double omega, double lo, double hi,
                      bool mirror_lo, bool mirror_hi);

// Periodic point weight: terms centered at (c mod P) and (c mod P) +- P,
// renormalized to unit mass over one period. x is wrapped into [0, P).
double weight_periodic(double x, double center, double omega, double period);

double weight_at(double x, double center, const KernelSpec& spec);

} // namespace roadhawk
