#include "roadhawk/kernels.hpp"

#include "roadhawk/catalog.hpp"

#include <cmath>

namespace roadhawk {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;
} // namespace

double gaussian(double u, double omega) {
    if (!(omega > 0.0)) throw Error("gaussian: bandwidth must be positive");
    const double z = u / omega;
    return kInvSqrt2Pi / omega * std::exp(-0.5 * z * z);
}

double gaussian_deriv(double u, double omega) {
    if (!(omega > 0.0)) throw Error("gaussian: bandwidth must be positive");
    const double z = u / omega;
    return -(u / (omega * omega)) * (kInvSqrt2Pi / omega) * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * kInvSqrt2);
}

double gaussian_mass(double center, double omega, double lo, double hi) {
    if (hi <= lo) return 0.0;
    const double zlo = std::isinf(lo) ? lo : (lo - center) / omega;
    const double zhi = std::isinf(hi) ? hi : (hi - center) / omega;
    const double clo = std::isinf(zlo) ? (zlo < 0 ? 0.0 : 1.0) : normal_cdf(zlo);
    const double chi = std::isinf(zhi) ? (zhi < 0 ? 0.0 : 1.0) : normal_cdf(zhi);
    return chi - clo;
}

double truncated_mass(double center, double omega, double lo, double hi,
                      bool mirror_lo, bool mirror_hi) {
    double mass = gaussian_mass(center, omega, lo, hi);
    if (mirror_lo && std::isfinite(lo)) mass += gaussian_mass(2.0 * lo - center, omega, lo, hi);
    if (mirror_hi && std::isfinite(hi)) mass += gaussian_mass(2.0 * hi - center, omega, lo, hi);
    return mass;
}

double weight_truncated(double x, double center, double omega, double lo, double hi,
                        bool mirror_lo, bool mirror_hi) {
    if (!(omega > 0.0)) throw Error("weight_truncated: bandwidth must be positive");
    if (!(lo < hi)) throw Error("weight_truncated: domain is empty");
    if (x < lo || x > hi) throw Error("weight_truncated: point outside domain");
    double v = gaussian(x - center, omega);
    if (mirror_lo && std::isfinite(lo)) v += gaussian(x - (2.0 * lo - center), omega);
    if (mirror_hi && std::isfinite(hi)) v += gaussian(x - (2.0 * hi - center), omega);
    const double mass = truncated_mass(center, omega, lo, hi, mirror_lo, mirror_hi);
    if (!(mass > 0.0)) throw Error("weight_truncated: vanishing kernel mass");
    return v / mass;
}

double weight_periodic(double x, double center, double omega, double period) {
    if (!(omega > 0.0)) throw Error("weight_periodic: bandwidth must be positive");
    if (!(period > 0.0)) throw Error("weight_periodic: period must be positive");
    double xw = std::fmod(x, period);
    if (xw < 0.0) xw += period;
    double c = std::fmod(center, period);
    if (c < 0.0) c += period;
    double v = gaussian(xw - c, omega) + gaussian(xw - (c - period), omega) +
               gaussian(xw - (c + period), omega);
    double mass = gaussian_mass(c, omega, 0.0, period) +
                  gaussian_mass(c - period, omega, 0.0, period) +
                  gaussian_mass(c + period, omega, 0.0, period);
    return v / mass;
}

double weight_at(double x, double center, const KernelSpec& spec) {
    switch (spec.kind) {
    case DomainKind::line:
        return gaussian(x - center, spec.bandwidth);
    case DomainKind::truncated:
        return weight_truncated(x, center, spec.bandwidth, spec.lo, spec.hi, spec.mirror_lo,
                                spec.mirror_hi);
    case DomainKind::periodic:
        return weight_periodic(x, center, spec.bandwidth, spec.period);
    }
    return 0.0;
}

} // namespace roadhawk
