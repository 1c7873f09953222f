#pragma once

#include <span>

#include "nslab/vorticity_field.hpp"

namespace nslab {

/// One forced direction: Q e_n = q f_k, where f_k is the unit sin basis
/// vector when k is in the upper half plane and the unit cos vector of -k
/// otherwise.
struct NoiseEntry {
    Mode k{1, 0};
    double q = 0.0;
};

/// Degenerate forcing Q: R^m -> H acting on the modes of a symmetric Z0.
class NoiseModel {
public:
    NoiseModel() = default;
    explicit NoiseModel(std::vector<NoiseEntry> entries);

    std::size_t m() const { return entries_.size(); }
    const std::vector<NoiseEntry>& entries() const { return entries_; }

    /// Energy injection rate E0 = tr QQ* = sum q_n^2.
    double e0() const;

    ModeSet mode_set() const;

    /// All modes within the truncation of the grid? Throws naming the first
    /// offending entry otherwise.
    void validate_against(const SpectralGrid& grid) const;

    /// Q v as a field on the grid.
    VorticityField apply(const GridPtr& grid, std::span<const double> v) const;

    /// Adds Q v in place (used in hot loops).
    void add_apply(VorticityField& target, std::span<const double> v) const;

    /// Q* xi, dimension m.
    std::vector<double> adjoint_apply(const VorticityField& xi) const;

    /// Real-coordinate slot (index into the 2*half-plane layout) and sign of
    /// entry n: Q e_n = q * sign * unit real coordinate.
    std::pair<std::size_t, double> real_slot(const SpectralGrid& grid, std::size_t n) const;

private:
    std::vector<NoiseEntry> entries_;
};

}  // namespace nslab
