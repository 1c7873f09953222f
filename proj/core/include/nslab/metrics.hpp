#pragma once

#include <functional>
#include <span>

#include "nslab/transport_lp.hpp"
#include "nslab/vorticity_field.hpp"

namespace nslab {

/// Bounded pseudo-metric on state vectors. The Scaled kind is
/// d_eps(x,y) = min(1, ||x-y||/eps); Custom wraps any user distance.
class PseudoMetric {
public:
    static PseudoMetric scaled(double eps);
    static PseudoMetric custom(std::function<double(std::span<const double>, std::span<const double>)> fn);

    double operator()(std::span<const double> x, std::span<const double> y) const;
    double eps() const { return eps_; }
    bool is_scaled() const { return !fn_; }

private:
    double eps_ = 1.0;
    std::function<double(std::span<const double>, std::span<const double>)> fn_;
};

/// Weighted point cloud; weights are nonnegative and sum to one after
/// normalize().
struct EmpiricalMeasure {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;

    void add(std::vector<double> point, double weight);
    void normalize();
    double total_mass() const;
    std::size_t size() const { return points.size(); }

    static EmpiricalMeasure dirac(std::vector<double> point);
    static EmpiricalMeasure from_fields(const std::vector<VorticityField>& fields);
};

struct CouplingOptions {
    std::size_t support_cap = 2000;
    bool want_plan = false;
};

struct CouplingResult {
    double distance = 0.0;
    TransportResult transport;  ///< plan/potentials filled when want_plan
};

/// Exact coupling (transportation) distance inf over couplings of
/// int d(x,y) dmu. Requires equal total mass.
CouplingResult coupling_distance(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                 const PseudoMetric& d, const CouplingOptions& opts = {});

/// Distances under an increasing family d_n together with the discrete
/// total variation (atoms matched by exact coordinates). The family's
/// monotonicity is spot-checked on sampled point pairs.
struct TvLimitReport {
    std::vector<double> distances;   ///< one per metric, same order
    double tv = 0.0;                 ///< 1/2 sum |w1 - w2| on the union support
    bool family_increasing = true;   ///< spot check result
};

TvLimitReport tv_limit_estimate(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                const std::vector<PseudoMetric>& family,
                                const CouplingOptions& opts = {});

}  // namespace nslab
