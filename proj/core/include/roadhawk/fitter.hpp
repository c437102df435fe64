#pragma once

#include "roadhawk/background.hpp"
#include "roadhawk/model.hpp"
#include "roadhawk/triggering.hpp"

#include <utility>
#include <vector>

namespace roadhawk {

struct FitIteration {
    double branching = 0.0;
    double mu0 = 0.0;
    double loglik = 0.0;
    double max_dpsi = 0.0;
    double max_partition_residual = 0.0;
};

struct FitReport {
    std::vector<FitIteration> iterations;
    bool converged = false;
    bool no_triggering_evidence = false;
    double seconds = 0.0;
    double loglik = 0.0;
    double loglik_homogeneous = 0.0;
};

// beta(t) = product of enabled temporal curves on a uniform grid, with its
// running integral; spatial_integral = trapezoid of mu_s over [0, X].
struct BackgroundIntegral {
    PiecewiseLinear modulation;
    std::vector<double> prefix;
    double spatial_integral = 0.0;
};

BackgroundIntegral integrate_background(const ModelComponents& model, double t_len,
                                        double anchor_min, double grid_dt, double x_len,
                                        double grid_dx);

struct UG {
    double U = 0.0;
    double G = 0.0;
};

// U = (int beta dt)(int mu_s dx); G = sum_i Gg(min(H_t, T - t_i)) Hh(min(H_x, x_i)).
UG compute_U_G(const ModelComponents& model, const EventCatalog& catalog);

struct RateUpdate {
    double branching = 0.0;
    double mu0 = 0.0;
    bool saturated = false; // branching reached the subcritical bound
};

RateUpdate update_A_mu0(double sum_psi, double G, double U, std::size_t n_events);

// sum log lambda(t_i, x_i) - mu0 U - A G; -inf if the intensity vanishes at
// any event.
double log_likelihood(const ModelComponents& model, const EventCatalog& catalog);

double homogeneous_log_likelihood(const EventCatalog& catalog);

// Alternates responsibilities, component re-estimation, the monotone
// adjustment of g and h, and the A / mu0 update until psi, A and mu0 settle.
std::pair<ModelComponents, FitReport> fit(const EventCatalog& catalog, const FitConfig& config,
                                          const ComponentFlags& flags = {});

struct Hotspot {
    double start_m = 0.0;
    double end_m = 0.0; // < start_m when the interval wraps the ring seam
};

std::vector<Hotspot> extract_hotspots(const ComponentCurve& mu_s, bool ring);

} // namespace roadhawk
