#pragma once

#include "nslab/control.hpp"

namespace nslab {

/// Bounded smooth cylinder functional of the lowest Fourier modes:
/// phi(w) = tanh(<a, pi w> + b) with known sup norms (||phi|| = 1,
/// ||grad phi|| = |a|).
class LowModeObservable {
public:
    /// Acts on the real coordinates of the n_modes half-plane modes with the
    /// smallest |k| (ties by grid order); coefficients default to a fixed
    /// well-conditioned pattern.
    LowModeObservable(const GridPtr& grid, std::size_t n_modes = 4, double bias = 0.1);

    double value(const VorticityField& w) const;
    VorticityField gradient(const VorticityField& w) const;
    double sup_norm() const { return 1.0; }
    double grad_sup_norm() const;
    const std::vector<std::size_t>& slots() const { return slots_; }

private:
    GridPtr grid_;
    std::vector<std::size_t> slots_;  ///< real-coordinate indices
    std::vector<double> coeff_;
    double bias_;
};

struct GradientBoundReport {
    // right-hand side of the decomposition
    std::vector<double> mean_rho;   ///< E||rho_n||, n = 0..N (term with ||grad phi||)
    std::vector<double> se_rho;
    double ito_abs_mean = 0.0;      ///< E|sum <v, dW>| (term with ||phi||)
    double delta = 0.0;             ///< fitted decay rate of E||rho_n||
    double delta_se = 0.0;
    double delta_ci95_low = 0.0;    ///< delta - 1.96 se; > 0 is the asf evidence
    // direct finite-difference cross-check of the left side
    std::vector<double> fd_gradient;  ///< |(P_n phi(w0 + eps xi) - P_n phi(w0))/eps| per n
    std::vector<double> fd_se;
    std::vector<double> rhs_bound;    ///< ||phi|| ito_abs + ||grad phi|| mean_rho per n
    double phi_sup = 1.0;
    double grad_sup = 0.0;
    double beta = 0.0;
};

/// Monte-Carlo estimate of both sides of the gradient decomposition for the
/// vorticity dynamics: the hypoelliptic control supplies E||rho_n|| and the
/// Ito cost, the left side is estimated by common-noise finite differences.
GradientBoundReport gradient_bound_estimate(const Integrator& integrator, const VorticityField& w0,
                                            const LowModeObservable& phi, const VorticityField& xi,
                                            double beta, std::size_t n_intervals, std::size_t n_replicas,
                                            double fd_eps = 1e-3);

}  // namespace nslab
