#pragma once

#include "nslab/integrator.hpp"

namespace nslab {

/// Discrete residual statistics of the Ito energy identity
///   ||w_t||^2 - ||w_0||^2 + 2 nu int ||w_r||_1^2 dr
///     = sum_i <w_i, Q dW_i> + E0 t,
/// accumulated with left-endpoint sums matching the scheme.
struct EnergyBalanceReport {
    double max_abs_residual = 0.0;  ///< max over steps of |cumulative residual|
    double final_residual = 0.0;
    double mean_energy = 0.0;       ///< time average of ||w||^2 after burn-in
    double mean_h1sq = 0.0;         ///< time average of ||w||_1^2 after burn-in
    double se_h1sq = 0.0;           ///< batch-means standard error of mean_h1sq
    double stationary_ratio = 0.0;  ///< 2 nu mean_h1sq / E0 (1 at stationarity)
    std::size_t steps = 0;
};

EnergyBalanceReport energy_balance_report(const Integrator& integrator, const TrajectoryRecord& traj,
                                          double burn_in = 0.0);

/// Empirical exponential moment probe for one eta: slope of
/// log E exp(eta ||w_t||^2) over time (log-sum-exp accumulation), plus the
/// running-sup variant of the exponent. A scan is flagged unreliable when a
/// single replica dominates the sum.
struct MomentProbePoint {
    double eta = 0.0;
    double slope = 0.0;          ///< fitted d/dt log E exp(eta ||w_t||^2)
    double slope_se = 0.0;
    double final_log_moment = 0.0;
    double sup_log_moment = 0.0;  ///< log E exp(eta sup_t(...)) variant
    bool threshold_exceeded = false;
};

struct MomentProbeReport {
    std::vector<MomentProbePoint> points;
    std::size_t ensemble_size = 0;
};

/// Runs the probe over an ensemble of replicas from one initial state.
MomentProbeReport apriori_moment_probe(const Integrator& integrator, const VorticityField& w0, double T,
                                       std::size_t n_replicas, const std::vector<double>& etas,
                                       std::size_t sample_stride = 10);

}  // namespace nslab
