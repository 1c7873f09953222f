#pragma once

#include <cstddef>
#include <vector>

namespace nslab {

/// Exact optimal transportation between two discrete measures with equal
/// total mass, solved by successive shortest augmenting paths with node
/// potentials (Dijkstra on the dense bipartite residual graph). Costs must
/// be nonnegative. Optimal up to floating-point resolution: every
/// augmentation is along an exactly shortest path.
struct TransportPlanEntry {
    std::size_t i = 0, j = 0;
    double mass = 0.0;
};

struct TransportResult {
    double cost = 0.0;
    std::vector<TransportPlanEntry> plan;
    /// Dual certificate: u_i + v_j <= c_ij (to roundoff) and
    /// sum_i a_i u_i + sum_j b_j v_j = cost.
    std::vector<double> source_potential, sink_potential;
};

/// cost is a dense row-major n1 x n2 matrix. a and b must sum to the same
/// total within 1e-9 relative; zero-mass atoms are allowed.
TransportResult solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& cost);

}  // namespace nslab
