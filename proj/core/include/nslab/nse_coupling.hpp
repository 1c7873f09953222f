#pragma once

#include "nslab/integrator.hpp"
#include "nslab/metrics.hpp"

namespace nslab {

/// Coupling distances between the time-T transition ensembles of two initial
/// vorticity states, per horizon and scale. Ensembles use common noise
/// streams (replica r of both sides shares a seed), so identical initial
/// states produce identical clouds and distance zero.
struct NseCouplingReport {
    std::vector<double> horizons;
    std::vector<double> epsilons;
    std::vector<std::vector<double>> distance;  ///< [horizon][epsilon]
    std::size_t n_samples = 0;
};

NseCouplingReport nse_coupling_distance(const Integrator& integrator, const VorticityField& w0a,
                                        const VorticityField& w0b, const std::vector<double>& horizons,
                                        const std::vector<double>& epsilons, std::size_t ensemble,
                                        std::size_t support_cap = 2000);

}  // namespace nslab
