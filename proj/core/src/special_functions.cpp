#include "roadhawk/special_functions.hpp"

#include "roadhawk/catalog.hpp"

#include <cmath>

namespace roadhawk {

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double prob) {
    if (!(prob >= 0.0) || !(prob <= 1.0)) throw Error("beta_quantile: probability out of range");
    if (prob == 0.0) return 0.0;
    if (prob == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::min(1.0, 2.0 * sum);
}

double kolmogorov_critical(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw Error("kolmogorov_critical: alpha out of range");
    double lo = 1e-8, hi = 5.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_tail(mid) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double incomplete_gamma_p(double s, double x) {
    if (!(s > 0.0)) throw Error("incomplete_gamma_p: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < s + 1.0) {
        // series
        double term = 1.0 / s;
        double sum = term;
        for (int k = 1; k < 1000; ++k) {
            term *= x / (s + k);
            sum += term;
            if (term < sum * 1e-16) break;
        }
        return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    // continued fraction for Q, Lentz
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k < 1000; ++k) {
        const double an = -k * (k - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    return 1.0 - q;
}

double chi_square_tail(double statistic, int dof) {
    if (dof < 1) throw Error("chi_square_tail: dof must be positive");
    if (statistic <= 0.0) return 1.0;
    return 1.0 - incomplete_gamma_p(0.5 * dof, 0.5 * statistic);
}

} // namespace roadhawk
