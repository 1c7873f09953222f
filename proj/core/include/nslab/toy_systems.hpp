#pragma once

#include <span>

#include "nslab/metrics.hpp"
#include "nslab/rng.hpp"

namespace nslab {

/// Built-in diagnostic diffusions:
///   Sde1:   dx = -x dt + dW,        dy = -y dt          (globally contractive)
///   Sde2:   dx = (x - x^3) dt + dW, dy = -y dt          (elliptic x, dead y)
///   OuChain: complex modes |k| <= 16,
///            du_k = -(1+k^2) u_k dt + e^{-|k|^3} db_k   (diagonal, degenerate
///                                                        smoothing rates)
enum class ToySystemId { Sde1, Sde2, OuChain };

std::size_t toy_dimension(ToySystemId id);

/// Bounded smooth cylinder function tanh(<a, x> + b): sup norm 1, gradient
/// sup norm |a|.
struct CylinderFunction {
    std::vector<double> a;
    double b = 0.0;
    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;
    double sup_norm() const { return 1.0; }
    double grad_sup_norm() const;
};

struct ToyGradientRow {
    double t = 0.0;
    double grad_y = 0.0;      ///< |MC estimate of (grad P_t phi) . e_y|
    double grad_y_se = 0.0;
    double grad_x = 0.0;
    double grad_x_se = 0.0;
    double envelope = 0.0;    ///< ||grad phi||_inf e^{-t}, the contractive bound
    double tangent_y = 0.0;   ///< E ||J_t e_y|| through the actual tangent flow
};

struct ToyAsfReport {
    ToySystemId system;
    CylinderFunction phi;
    std::vector<ToyGradientRow> rows;
    double fitted_y_rate = 0.0;  ///< decay rate of the y-direction gradient term

    /// sup_y |d/dy P_t phi_delta| for the mollified sign phi_delta = tanh(y/delta);
    /// rows index times, columns index the scales. Scaling like 1/delta at
    /// fixed t is the strong Feller failure.
    std::vector<std::vector<double>> mollified_sup_grad;

    /// OuChain only: coupling distances between P_t(x0, .) and P_t(0, .)
    /// under d_eps, rows index times, columns scales; tv_closed_form is the
    /// exact same-covariance Gaussian total variation per time.
    std::vector<std::vector<double>> coupling_table;
    std::vector<double> tv_closed_form;
};

/// Monte-Carlo gradient probe via tangent flows; see the report fields.
ToyAsfReport asf_probe_toy(ToySystemId id, std::span<const double> x0, const std::vector<double>& times,
                           const std::vector<double>& scales, std::size_t ensemble, std::uint64_t seed = 0);

}  // namespace nslab
