#include "nslab/malliavin.hpp"

#include <cmath>

namespace nslab {

double l2_inner(const ControlPath& a, const ControlPath& b, double dt) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("l2_inner: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s * dt;
}

IntervalOperators build_interval_operators(LinearizedFlow& flow, std::size_t s, std::size_t t) {
    IntervalOperators ops;
    ops.s = s;
    ops.t = t;
    ops.m = flow.traj().m();
    ops.grid = flow.grid();
    ops.dt = flow.dt();
    if (t < s || t > flow.traj().n_steps) throw std::out_of_range("build_interval_operators: bad interval");

    std::vector<VorticityField> cols;
    cols.reserve((t - s) * ops.m);
    for (std::size_t i = s; i < t; ++i) {
        flow.tangent_step_many(i, cols);
        for (std::size_t n = 0; n < ops.m; ++n) cols.push_back(flow.noise_column(n));
    }
    // columns were appended step-major backwards: the kick of step i has been
    // propagated by steps i+1..t-1; reorder is not needed because push order
    // already matches (step, component)
    ops.columns = std::move(cols);

    const std::size_t dim = ops.grid->dim();
    ops.gram = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> coords(dim);
    for (const auto& c : ops.columns) {
        c.to_real(coords);
        Eigen::Map<const Eigen::VectorXd> v(coords.data(), static_cast<Eigen::Index>(dim));
        ops.gram.selfadjointView<Eigen::Lower>().rankUpdate(v, ops.dt);
    }
    ops.gram = ops.gram.selfadjointView<Eigen::Lower>();
    return ops;
}

VorticityField a_apply(const IntervalOperators& ops, const ControlPath& v) {
    if (v.s != ops.s || v.t != ops.t || v.m != ops.m) throw std::invalid_argument("a_apply: path/operator mismatch");
    VorticityField out(ops.grid);
    for (std::size_t i = ops.s; i < ops.t; ++i)
        for (std::size_t n = 0; n < ops.m; ++n) {
            const double w = v.at(i)[n] * ops.dt;
            if (w == 0.0) continue;
            const VorticityField& c = ops.column(i, n);
            for (std::size_t j = 0; j < out.half_count(); ++j) out[j] += w * c[j];
        }
    return out;
}

VorticityField a_apply_sweep(LinearizedFlow& flow, const ControlPath& v) {
    VorticityField z(flow.grid());
    const double dt = flow.dt();
    const auto& noise = flow.traj().noise;
    for (std::size_t i = v.s; i < v.t; ++i) {
        z = flow.tangent_step(i, z);
        VorticityField kick(flow.grid());
        noise.add_apply(kick, std::span<const double>(v.at(i), v.m));
        flow.apply_decay(kick);
        kick *= dt;
        z += kick;
    }
    return z;
}

ControlPath a_adjoint_apply(const IntervalOperators& ops, const VorticityField& xi) {
    ControlPath path;
    path.s = ops.s;
    path.t = ops.t;
    path.m = ops.m;
    path.values.assign((ops.t - ops.s) * ops.m, 0.0);
    for (std::size_t i = ops.s; i < ops.t; ++i)
        for (std::size_t n = 0; n < ops.m; ++n) path.at(i)[n] = inner(xi, ops.column(i, n));
    return path;
}

ControlPath a_adjoint_apply_sweep(LinearizedFlow& flow, std::size_t s, std::size_t t,
                                  const VorticityField& xi) {
    ControlPath path;
    path.s = s;
    path.t = t;
    path.m = flow.traj().m();
    path.values.assign((t - s) * path.m, 0.0);
    VorticityField eta = xi;  // holds J*_{i+1,t} xi going backwards
    const auto& noise = flow.traj().noise;
    for (std::size_t i = t; i > s; --i) {
        VorticityField z = eta;
        flow.apply_decay(z);
        std::vector<double> row = noise.adjoint_apply(z);
        for (std::size_t n = 0; n < path.m; ++n) path.at(i - 1)[n] = row[n];
        eta = flow.adjoint_step(i - 1, eta);
    }
    return path;
}

MalliavinMatrix::MalliavinMatrix(Eigen::MatrixXd gram, double beta, std::size_t s, std::size_t t)
    : gram_(std::move(gram)), beta_(beta), s_(s), t_(t) {
    if (beta < 0.0) throw std::invalid_argument("MalliavinMatrix: beta must be nonnegative");
}

double MalliavinMatrix::quadratic_form(const VorticityField& xi) const {
    std::vector<double> coords = xi.real_coords();
    Eigen::Map<const Eigen::VectorXd> x(coords.data(), static_cast<Eigen::Index>(coords.size()));
    return x.dot(gram_ * x) + beta_ * x.squaredNorm();
}

void MalliavinMatrix::ensure_llt() const {
    if (llt_ready_) return;
    Eigen::MatrixXd shifted = gram_;
    shifted.diagonal().array() += beta_;
    llt_.compute(shifted);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("MalliavinMatrix: Cholesky failed (nonfinite data?)");
    llt_ready_ = true;
}

Eigen::VectorXd MalliavinMatrix::solve(const Eigen::VectorXd& rhs) const {
    ensure_llt();
    Eigen::VectorXd x = llt_.solve(rhs);
    // one iterative refinement pass tightens the residual to working accuracy
    Eigen::VectorXd r = rhs - (gram_ * x + beta_ * x);
    x += llt_.solve(r);
    return x;
}

VorticityField MalliavinMatrix::solve(const VorticityField& rhs) const {
    std::vector<double> coords = rhs.real_coords();
    Eigen::Map<const Eigen::VectorXd> b(coords.data(), static_cast<Eigen::Index>(coords.size()));
    Eigen::VectorXd x = solve(Eigen::VectorXd(b));
    VorticityField out(rhs.grid());
    out.from_real(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    return out;
}

const Eigen::VectorXd& MalliavinMatrix::eigenvalues() const {
    if (!eigs_ready_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_, Eigen::EigenvaluesOnly);
        eigs_ = es.eigenvalues();
        eigs_ready_ = true;
    }
    return eigs_;
}

double MalliavinMatrix::beta_resolvent_norm() const {
    const double lm = std::max(min_eigenvalue(), 0.0);
    return beta_ > 0.0 ? beta_ / (beta_ + lm) : (lm > 0.0 ? 0.0 : 1.0);
}

double MalliavinMatrix::whitened_adjoint_norm() const {
    const double lM = std::max(max_eigenvalue(), 0.0);
    return std::sqrt(lM / (beta_ + lM));
}

MalliavinMatrix malliavin_matrix(const IntervalOperators& ops, double beta) {
    return MalliavinMatrix(ops.gram, beta, ops.s, ops.t);
}

MalliavinMatrix malliavin_matrix(LinearizedFlow& flow, std::size_t s, std::size_t t, double beta) {
    return malliavin_matrix(build_interval_operators(flow, s, t), beta);
}

LowmodeProbeReport lowmode_probe(const Integrator& integrator, const VorticityField& w0, double alpha,
                                 int cut, const std::vector<double>& epsilons, std::size_t n_samples,
                                 double horizon) {
    LowmodeProbeReport rep;
    rep.epsilons = epsilons;
    const GridPtr& grid = integrator.grid();

    for (std::size_t r = 0; r < n_samples; ++r) {
        TrajectoryRecord traj = integrator.simulate(w0, horizon, r, true);
        LinearizedFlow flow(integrator, traj);
        MalliavinMatrix M = malliavin_matrix(flow, 0, traj.n_steps, 0.0);

        // rejection sampling of an admissible probe
        bool found = false;
        VorticityField phi(grid);
        for (std::uint64_t attempt = 0; attempt < 64 && !found; ++attempt) {
            phi = random_field(grid, 0xabcd0000ull + r * 64 + attempt);
            VorticityField low = phi;
            project_low(low, cut);
            if (norm(low) >= alpha * sobolev_norm(phi, 1.0)) found = true;
        }
        if (!found) continue;
        const double h1 = sobolev_norm(phi, 1.0);
        rep.ratios.push_back(M.quadratic_form(phi) / (h1 * h1));
    }
    rep.n_samples = rep.ratios.size();
    if (rep.ratios.empty()) {
        rep.empty = true;
        return rep;
    }
    for (double eps : epsilons) {
        std::size_t count = 0;
        for (double v : rep.ratios)
            if (v < eps) ++count;
        rep.frequencies.push_back(static_cast<double>(count) / static_cast<double>(rep.n_samples));
    }
    return rep;
}

ProjectedNormResult projected_jacobian_norm(LinearizedFlow& flow, std::size_t s, std::size_t t, int cut,
                                            int max_iter, double tol) {
    ProjectedNormResult res;
    const GridPtr& grid = flow.grid();

    auto power_norm = [&](bool high_after) {
        VorticityField x = random_field(grid, 0x70776572ull);
        if (!high_after) {
            project_high(x, cut);  // operator J (1-pi_l): domain restricted
            const double n0 = norm(x);
            if (n0 == 0.0) return std::pair{0.0, true};
            x *= 1.0 / n0;
        }
        double sigma = 0.0, prev = -1.0;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            VorticityField y = flow.jacobian_apply(s, t, x);
            if (high_after) project_high(y, cut);
            VorticityField z = flow.jacobian_adjoint_apply(s, t, y);
            if (!high_after) project_high(z, cut);
            sigma = std::sqrt(std::max(inner(x, z), 0.0));
            const double nz = norm(z);
            if (nz == 0.0) { sigma = 0.0; converged = true; break; }
            x = (1.0 / nz) * z;
            if (prev >= 0.0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-30)) {
                converged = true;
                res.iterations = it + 1;
                break;
            }
            prev = sigma;
        }
        return std::pair{sigma, converged};
    };

    auto [left, cl] = power_norm(true);    // ||(1-pi_l) J||
    auto [right, cr] = power_norm(false);  // ||J (1-pi_l)||
    res.high_of_jacobian = left;
    res.jacobian_of_high = right;
    res.converged = cl && cr;
    return res;
}

}  // namespace nslab
