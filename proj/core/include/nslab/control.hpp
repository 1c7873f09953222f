#pragma once

#include "nslab/malliavin.hpp"

namespace nslab {

/// Residual ODE integrated with the discrete tangent scheme:
///   rho_{i+1} = T_i rho_i - dt E Q v(t_i),  rho_s = xi.
/// Returns the states at every step of [v.s, v.t]. By construction
/// rho_t = J_{s,t} xi - A_{s,t} v to roundoff.
std::vector<VorticityField> residual_ode(LinearizedFlow& flow, const VorticityField& xi,
                                         const ControlPath& v);

// ---------------------------------------------------------------------------
// Essentially elliptic control (adapted)
// ---------------------------------------------------------------------------

struct EllipticRunResult {
    ControlPath v;
    std::vector<double> zeta_low_norm;    ///< per step; max(0, ||pi_l xi|| - t/2)
    std::vector<double> zeta_high_norm;   ///< per step
    std::vector<VorticityField> zeta;     ///< per step
    double max_residual_deviation = 0.0;  ///< || rho_t - zeta_t || over the run
    double ito_sum = 0.0;                 ///< sum <v(t_i), dW_i>
    double control_l2_sq = 0.0;           ///< sum ||v||^2 dt
};

/// Runs the adapted low-mode-shrinkage control: the low-mode part of zeta
/// contracts at unit speed along its initial direction and vanishes for
/// t >= 2 ||pi_l xi||; the high-mode part follows the free tangent flow; the
/// control cancels everything the true dynamics would inject into the low
/// modes. Requires every retained mode with max-norm <= cut to be forced.
EllipticRunResult elliptic_control_run(LinearizedFlow& flow, const VorticityField& xi, int cut);

// ---------------------------------------------------------------------------
// Hypoelliptic control (non-adapted, regularized Malliavin inverse)
// ---------------------------------------------------------------------------

struct HypoIntervalResult {
    ControlPath v;                           ///< on [n, n+1/2), zero afterwards
    VorticityField rho_next;                 ///< J_check (J_hat rho - A v), exact residual
    VorticityField beta_x;                   ///< beta (beta+M)^{-1} J_hat rho
    double recursion_residual = 0.0;         ///< ||(J_hat rho - A v) - beta x||
    double interval_identity_residual = 0.0; ///< ||J rho - J_check A v - rho_next||
    double beta_resolvent_norm = 0.0;        ///< ||beta Mtilde^{-1}|| <= 1
    double whitened_adjoint_norm = 0.0;      ///< ||A* Mtilde^{-1/2}|| <= 1
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

/// Eigenvalues (ascending) of the Gram part of an interval; shared across
/// beta values when scanning.
Eigen::VectorXd gram_eigenvalues(const IntervalOperators& ops);

/// One interval of the recursion: solve (beta + M_n) x = J_hat_n rho_n,
/// v_n = A_n* x on the first half interval, rho_{n+1} = J_check_n of the
/// exact residual J_hat_n rho_n - A_n v_n (= beta x up to solver accuracy).
/// Pass precomputed gram eigenvalues to skip the per-call decomposition.
HypoIntervalResult hypo_interval(LinearizedFlow& flow, const IntervalOperators& ops,
                                 std::size_t interval_end, const VorticityField& rho, double beta,
                                 const Eigen::VectorXd* gram_eigs = nullptr);

/// Convenience overload assembling the operators for [n, n+1/2] itself.
HypoIntervalResult hypo_interval(LinearizedFlow& flow, std::size_t n_start, std::size_t n_half,
                                 std::size_t n_end, const VorticityField& rho, double beta);

struct HypoRunSeries {
    double beta = 0.0;
    std::vector<double> mean_rho;      ///< ensemble mean of ||rho_n||, n = 0..N
    std::vector<double> se_rho;        ///< standard error of mean_rho
    std::vector<double> mean_rho_sq;
    std::vector<double> p95_rho;
    double decay_factor = 1.0;         ///< fitted geometric factor per unit time
    double max_telescope_residual = 0.0;
    double max_recursion_residual = 0.0;
    double max_beta_resolvent_norm = 0.0;
    double max_whitened_adjoint_norm = 0.0;
    double min_eigenvalue = 0.0;
    double mean_ito_sq = 0.0;          ///< ensemble mean of (sum <v, dW>)^2
    double mean_ito_abs = 0.0;         ///< ensemble mean of |sum <v, dW>|
    bool diverged = false;
};

struct HypoScanReport {
    std::vector<HypoRunSeries> runs;  ///< one per beta
    double best_decay_factor = 1.0;
    double best_beta = 0.0;
    std::size_t n_intervals = 0;
    std::size_t n_replicas = 0;
};

/// Ensemble scan of the residual recursion over a grid of regularizations.
/// Trajectories and interval operators are shared across beta values; the
/// monotonicity of beta -> ||beta (beta+M)^{-1} y|| is asserted per interval.
HypoScanReport hypo_run(const Integrator& integrator, const VorticityField& w0, const VorticityField& xi,
                        const std::vector<double>& betas, std::size_t n_intervals, std::size_t n_replicas);

// ---------------------------------------------------------------------------
// Cost of the control (Skorokhod correction and the almost-sure bound)
// ---------------------------------------------------------------------------

struct CostBoundSample {
    std::size_t step = 0;       ///< r: which increment was differentiated
    std::size_t component = 0;  ///< i: noise component
    double dv_diag = 0.0;       ///< (D_{t_r}^i v_n)(t_r)_i, enters the trace
    double dv_l2 = 0.0;         ///< ||D_{t_r}^i v_n||_{L2}
    double bound = 0.0;         ///< 3/beta ||D A|| ||Jhat rho|| + 1/sqrt(beta) ||D Jhat|| ||rho||
};

struct CostBoundReport {
    double ito_sum = 0.0;              ///< sum_i <v(t_i), dW_i>
    double trace_correction = 0.0;     ///< sum_{r,i} (D_{t_r}^i v)(t_r)_i dt
    double skorokhod_sum = 0.0;        ///< ito_sum - trace_correction
    std::vector<CostBoundSample> samples;
    bool bound_satisfied = true;       ///< dv_l2 <= bound for every sample
};

/// Full Skorokhod accounting for one hypoelliptic interval: the Ito sum, the
/// exact discrete Malliavin trace correction (Leibniz expansion through
/// A*, Mtilde^{-1} and J_hat), and the paper's almost-sure bound evaluated
/// numerically per (r, i). Work grows like (steps * m)^2 tangent sweeps;
/// the guard rejects dim * steps beyond max_work.
CostBoundReport control_cost_bound(LinearizedFlow& flow, const IntervalOperators& ops,
                                   const VorticityField& rho, double beta,
                                   std::size_t max_work = 200000000);

}  // namespace nslab
