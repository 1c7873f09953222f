#include "nslab/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace nslab {

PseudoMetric PseudoMetric::scaled(double eps) {
    if (eps <= 0.0) throw std::invalid_argument("PseudoMetric::scaled: eps must be positive");
    PseudoMetric d;
    d.eps_ = eps;
    return d;
}

PseudoMetric PseudoMetric::custom(std::function<double(std::span<const double>, std::span<const double>)> fn) {
    PseudoMetric d;
    d.fn_ = std::move(fn);
    return d;
}

double PseudoMetric::operator()(std::span<const double> x, std::span<const double> y) const {
    if (fn_) return fn_(x, y);
    if (x.size() != y.size()) throw std::invalid_argument("PseudoMetric: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::min(1.0, std::sqrt(s) / eps_);
}

void EmpiricalMeasure::add(std::vector<double> point, double weight) {
    if (weight < 0.0) throw std::invalid_argument("EmpiricalMeasure: negative weight");
    points.push_back(std::move(point));
    weights.push_back(weight);
}

double EmpiricalMeasure::total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void EmpiricalMeasure::normalize() {
    const double s = total_mass();
    if (s <= 0.0) throw std::invalid_argument("EmpiricalMeasure: zero total mass");
    for (double& w : weights) w /= s;
}

EmpiricalMeasure EmpiricalMeasure::dirac(std::vector<double> point) {
    EmpiricalMeasure mu;
    mu.add(std::move(point), 1.0);
    return mu;
}

EmpiricalMeasure EmpiricalMeasure::from_fields(const std::vector<VorticityField>& fields) {
    EmpiricalMeasure mu;
    const double w = 1.0 / static_cast<double>(fields.size());
    for (const auto& f : fields) mu.add(f.real_coords(), w);
    return mu;
}

CouplingResult coupling_distance(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                 const PseudoMetric& d, const CouplingOptions& opts) {
    if (mu1.size() == 0 || mu2.size() == 0) throw std::invalid_argument("coupling_distance: empty measure");
    if (std::abs(mu1.total_mass() - mu2.total_mass()) >
        1e-9 * std::max({mu1.total_mass(), mu2.total_mass(), 1.0}))
        throw std::invalid_argument("coupling_distance: unequal total mass");
    if (mu1.size() > opts.support_cap || mu2.size() > opts.support_cap)
        throw std::invalid_argument("coupling_distance: support exceeds the cap; subsample the measures");

    const std::size_t n1 = mu1.size(), n2 = mu2.size();
    std::vector<double> cost(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) cost[i * n2 + j] = d(mu1.points[i], mu2.points[j]);

    CouplingResult res;
    TransportResult tr = solve_transport(mu1.weights, mu2.weights, cost);
    res.distance = tr.cost;
    if (opts.want_plan) res.transport = std::move(tr);
    return res;
}

TvLimitReport tv_limit_estimate(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                const std::vector<PseudoMetric>& family, const CouplingOptions& opts) {
    TvLimitReport rep;

    // monotonicity spot check on sampled pairs, including points interpolated
    // toward each other so saturated (d = 1) pairs cannot mask a violation
    const double lambdas[] = {1e-3, 0.1, 0.5, 1.0};
    for (std::size_t n = 0; n + 1 < family.size() && rep.family_increasing; ++n)
        for (std::size_t i = 0; i < mu1.size() && rep.family_increasing; ++i)
            for (std::size_t j = 0; j < mu2.size() && rep.family_increasing; ++j)
                for (double lam : lambdas) {
                    std::vector<double> y(mu1.points[i].size());
                    for (std::size_t c = 0; c < y.size(); ++c)
                        y[c] = mu1.points[i][c] + lam * (mu2.points[j][c] - mu1.points[i][c]);
                    const double lo = family[n](mu1.points[i], y);
                    const double hi = family[n + 1](mu1.points[i], y);
                    if (hi < lo - 1e-12) { rep.family_increasing = false; break; }
                }
    if (!rep.family_increasing)
        throw std::invalid_argument("tv_limit_estimate: family is not increasing on sampled pairs");

    for (const auto& d : family) rep.distances.push_back(coupling_distance(mu1, mu2, d, opts).distance);

    // discrete TV over the union support (atoms matched exactly)
    std::map<std::vector<double>, double> signed_mass;
    for (std::size_t i = 0; i < mu1.size(); ++i) signed_mass[mu1.points[i]] += mu1.weights[i];
    for (std::size_t j = 0; j < mu2.size(); ++j) signed_mass[mu2.points[j]] -= mu2.weights[j];
    double tv = 0.0;
    for (const auto& [pt, m] : signed_mass) tv += std::abs(m);
    rep.tv = 0.5 * tv;
    return rep;
}

}  // namespace nslab
