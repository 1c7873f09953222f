#include "nslab/transport_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace nslab {

namespace {

// core solver; every source and sink carries strictly positive mass, which
// keeps all nodes reachable and the potential invariant (reduced costs >= 0
// on residual arcs) intact throughout
TransportResult solve_positive(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<double>& cost, std::size_t n2_stride) {
    const std::size_t n1 = a.size(), n2 = b.size();
    const std::size_t V = n1 + n2;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> sa = a, sb = b;
    std::map<std::pair<std::size_t, std::size_t>, double> flow;
    std::vector<double> pot(V, 0.0);

    auto c_at = [&](std::size_t i, std::size_t j) { return cost[i * n2_stride + j]; };

    double ta = 0.0;
    for (double x : a) ta += x;

    for (;;) {
        bool has_supply = false;
        for (double x : sa)
            if (x > 0.0) { has_supply = true; break; }
        if (!has_supply) break;

        // multi-source Dijkstra with reduced costs c + pot[u] - pot[v]
        std::vector<double> dist(V, inf);
        std::vector<int> parent(V, -1);
        std::vector<char> done(V, 0);
        for (std::size_t i = 0; i < n1; ++i)
            if (sa[i] > 0.0) dist[i] = 0.0;
        for (;;) {
            std::size_t u = V;
            double best = inf;
            for (std::size_t k = 0; k < V; ++k)
                if (!done[k] && dist[k] < best) { best = dist[k]; u = k; }
            if (u == V) break;
            done[u] = 1;
            if (u < n1) {
                for (std::size_t j = 0; j < n2; ++j) {
                    const std::size_t v = n1 + j;
                    if (done[v]) continue;
                    const double rc = std::max(c_at(u, j) + pot[u] - pot[v], 0.0);  // >= -roundoff
                    const double nd = dist[u] + rc;
                    if (nd < dist[v]) { dist[v] = nd; parent[v] = static_cast<int>(u); }
                }
            } else {
                const std::size_t j = u - n1;
                for (std::size_t i = 0; i < n1; ++i) {
                    if (done[i]) continue;
                    auto it = flow.find({i, j});
                    if (it == flow.end() || it->second <= 0.0) continue;
                    const double rc = std::max(-c_at(i, j) + pot[u] - pot[i], 0.0);
                    const double nd = dist[u] + rc;
                    if (nd < dist[i]) { dist[i] = nd; parent[i] = static_cast<int>(u); }
                }
            }
        }

        std::size_t target = V;
        double bestd = inf;
        for (std::size_t j = 0; j < n2; ++j)
            if (sb[j] > 0.0 && dist[n1 + j] < bestd) { bestd = dist[n1 + j]; target = n1 + j; }
        if (target == V) throw std::runtime_error("solve_transport: no augmenting path");

        double amount = sb[target - n1];
        {
            std::size_t v = target;
            while (parent[v] >= 0) {
                const std::size_t u = static_cast<std::size_t>(parent[v]);
                if (u >= n1 && v < n1) amount = std::min(amount, flow[{v, u - n1}]);
                v = u;
            }
            amount = std::min(amount, sa[v]);
        }
        {
            std::size_t v = target;
            while (parent[v] >= 0) {
                const std::size_t u = static_cast<std::size_t>(parent[v]);
                if (u < n1 && v >= n1) flow[{u, v - n1}] += amount;
                else flow[{v, u - n1}] -= amount;
                v = u;
            }
            sa[v] -= amount;
            if (sa[v] < 1e-15 * ta) sa[v] = 0.0;
        }
        sb[target - n1] -= amount;
        if (sb[target - n1] < 1e-15 * ta) sb[target - n1] = 0.0;

        for (std::size_t k = 0; k < V; ++k)
            if (dist[k] < inf) pot[k] += std::min(dist[k], bestd);
    }

    TransportResult res;
    for (const auto& [key, f] : flow) {
        if (f <= 0.0) continue;
        res.plan.push_back({key.first, key.second, f});
        res.cost += f * c_at(key.first, key.second);
    }
    res.source_potential.resize(n1);
    res.sink_potential.resize(n2);
    for (std::size_t i = 0; i < n1; ++i) res.source_potential[i] = -pot[i];
    for (std::size_t j = 0; j < n2; ++j) res.sink_potential[j] = pot[n1 + j];
    return res;
}

}  // namespace

TransportResult solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& cost) {
    const std::size_t n1 = a.size(), n2 = b.size();
    if (cost.size() != n1 * n2) throw std::invalid_argument("solve_transport: cost matrix size mismatch");
    double ta = 0.0, tb = 0.0;
    for (double x : a) {
        if (x < 0.0) throw std::invalid_argument("solve_transport: negative mass");
        ta += x;
    }
    for (double x : b) {
        if (x < 0.0) throw std::invalid_argument("solve_transport: negative mass");
        tb += x;
    }
    if (std::abs(ta - tb) > 1e-9 * std::max({ta, tb, 1.0}))
        throw std::invalid_argument("solve_transport: unequal total mass");
    for (double c : cost)
        if (!(c >= 0.0)) throw std::invalid_argument("solve_transport: costs must be nonnegative");

    // strip zero-mass atoms (they would break the reachability invariant)
    std::vector<std::size_t> ia, jb;
    for (std::size_t i = 0; i < n1; ++i)
        if (a[i] > 0.0) ia.push_back(i);
    for (std::size_t j = 0; j < n2; ++j)
        if (b[j] > 0.0) jb.push_back(j);

    TransportResult res;
    if (!ia.empty()) {
        std::vector<double> ar(ia.size()), br(jb.size()), cr(ia.size() * jb.size());
        for (std::size_t i = 0; i < ia.size(); ++i) ar[i] = a[ia[i]];
        for (std::size_t j = 0; j < jb.size(); ++j) br[j] = b[jb[j]];
        for (std::size_t i = 0; i < ia.size(); ++i)
            for (std::size_t j = 0; j < jb.size(); ++j) cr[i * jb.size() + j] = cost[ia[i] * n2 + jb[j]];
        TransportResult inner = solve_positive(ar, br, cr, jb.size());
        res.cost = inner.cost;
        for (const auto& e : inner.plan) res.plan.push_back({ia[e.i], jb[e.j], e.mass});
        res.source_potential.assign(n1, 0.0);
        res.sink_potential.assign(n2, 0.0);
        for (std::size_t i = 0; i < ia.size(); ++i) res.source_potential[ia[i]] = inner.source_potential[i];
        for (std::size_t j = 0; j < jb.size(); ++j) res.sink_potential[jb[j]] = inner.sink_potential[j];
        // feasible potentials for the stripped atoms
        for (std::size_t i = 0; i < n1; ++i) {
            if (a[i] > 0.0) continue;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < jb.size(); ++j)
                best = std::min(best, cost[i * n2 + jb[j]] - res.sink_potential[jb[j]]);
            res.source_potential[i] = jb.empty() ? 0.0 : best;
        }
        for (std::size_t j = 0; j < n2; ++j) {
            if (b[j] > 0.0) continue;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ia.size(); ++i)
                best = std::min(best, cost[ia[i] * n2 + j] - res.source_potential[ia[i]]);
            res.sink_potential[j] = ia.empty() ? 0.0 : best;
        }
    } else {
        res.source_potential.assign(n1, 0.0);
        res.sink_potential.assign(n2, 0.0);
    }
    return res;
}

}  // namespace nslab
