#pragma once

#include <Eigen/Dense>

#include "nslab/tangent.hpp"

namespace nslab {

/// Control path on the step grid: values in R^m for steps in [s, t),
/// constant per step, paired with the L2([s,t], R^m) inner product.
struct ControlPath {
    std::size_t s = 0, t = 0;
    std::size_t m = 0;
    std::vector<double> values;  ///< (t-s) x m, step-major

    double* at(std::size_t step) { return values.data() + (step - s) * m; }
    const double* at(std::size_t step) const { return values.data() + (step - s) * m; }
    std::size_t n_steps() const { return t - s; }
};

double l2_inner(const ControlPath& a, const ControlPath& b, double dt);
inline double l2_norm(const ControlPath& a, double dt) { return std::sqrt(l2_inner(a, a, dt)); }

/// Columns J_{i+1,t} E Q e_n for all steps i in [s,t) and noise components n,
/// assembled in one forward pass. A, A* and M = A A* are then plain linear
/// algebra over the columns, and the assembly is shared across beta values.
struct IntervalOperators {
    std::size_t s = 0, t = 0;
    std::size_t m = 0;
    GridPtr grid;
    std::vector<VorticityField> columns;  ///< (t-s)*m, step-major then component
    Eigen::MatrixXd gram;                 ///< M in real coordinates (no beta)
    double dt = 0.0;

    const VorticityField& column(std::size_t step, std::size_t n) const {
        return columns[(step - s) * m + n];
    }
};

IntervalOperators build_interval_operators(LinearizedFlow& flow, std::size_t s, std::size_t t);

/// A_{s,t} v = sum_i J_{i+1,t} E Q v(t_i) dt from stored columns.
VorticityField a_apply(const IntervalOperators& ops, const ControlPath& v);

/// A v by direct forward propagation (column-free route; used to cross-check
/// the assembled columns and by the long-horizon accumulators).
VorticityField a_apply_sweep(LinearizedFlow& flow, const ControlPath& v);

/// (A*_{s,t} xi)(t_i) = Q* E J*_{i+1,t} xi from stored columns.
ControlPath a_adjoint_apply(const IntervalOperators& ops, const VorticityField& xi);

/// A* xi by one backward adjoint sweep (column-free route).
ControlPath a_adjoint_apply_sweep(LinearizedFlow& flow, std::size_t s, std::size_t t,
                                  const VorticityField& xi);

/// Dense symmetric Malliavin matrix on the real coordinates, with the
/// regularization beta kept separate from the Gram part.
class MalliavinMatrix {
public:
    MalliavinMatrix(Eigen::MatrixXd gram, double beta, std::size_t s, std::size_t t);

    const Eigen::MatrixXd& gram() const { return gram_; }
    double beta() const { return beta_; }
    std::size_t s() const { return s_; }
    std::size_t t() const { return t_; }

    double quadratic_form(const VorticityField& xi) const;

    /// Solves (beta + M) x = rhs by Cholesky with one refinement pass.
    VorticityField solve(const VorticityField& rhs) const;
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    /// Eigenvalues of the Gram part (ascending); computed once on demand.
    const Eigen::VectorXd& eigenvalues() const;

    double min_eigenvalue() const { return eigenvalues()(0); }
    double max_eigenvalue() const { return eigenvalues()(eigenvalues().size() - 1); }

    /// ||beta (beta + M)^{-1}|| = beta/(beta + lambda_min).
    double beta_resolvent_norm() const;
    /// ||A* (beta + M)^{-1/2}|| = sqrt(lambda_max/(beta + lambda_max)).
    double whitened_adjoint_norm() const;

private:
    void ensure_llt() const;

    Eigen::MatrixXd gram_;
    double beta_;
    std::size_t s_, t_;
    mutable Eigen::LLT<Eigen::MatrixXd> llt_;
    mutable bool llt_ready_ = false;
    mutable Eigen::VectorXd eigs_;
    mutable bool eigs_ready_ = false;
};

/// M (+ beta) over step interval [s, t].
MalliavinMatrix malliavin_matrix(LinearizedFlow& flow, std::size_t s, std::size_t t, double beta);
MalliavinMatrix malliavin_matrix(const IntervalOperators& ops, double beta);

/// Empirical small-eigenvalue probe of Theorem-MP type: frequency of
/// <M phi, phi> < eps ||phi||_1^2 over an ensemble of trajectories with
/// probes satisfying ||pi_l phi|| >= alpha ||phi||_1.
struct LowmodeProbeReport {
    std::vector<double> epsilons;
    std::vector<double> frequencies;  ///< per epsilon, same sample set
    std::vector<double> ratios;       ///< <M phi,phi>/||phi||_1^2 per sample
    std::size_t n_samples = 0;
    bool empty = false;  ///< no admissible probe existed
};

LowmodeProbeReport lowmode_probe(const Integrator& integrator, const VorticityField& w0, double alpha,
                                 int cut, const std::vector<double>& epsilons, std::size_t n_samples,
                                 double horizon = 0.5);

/// Operator norms ||(1-pi_l) J_{s,t}|| and ||J_{s,t} (1-pi_l)|| by power
/// iteration on the composed normal operators.
struct ProjectedNormResult {
    double high_of_jacobian = 0.0;   ///< ||(1-pi_l) J||
    double jacobian_of_high = 0.0;   ///< ||J (1-pi_l)||
    bool converged = true;
    int iterations = 0;
};

ProjectedNormResult projected_jacobian_norm(LinearizedFlow& flow, std::size_t s, std::size_t t, int cut,
                                            int max_iter = 200, double tol = 1e-9);

}  // namespace nslab
