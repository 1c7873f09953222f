#include "nslab/noise_model.hpp"

#include <cmath>

namespace nslab {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.4142135623730950488;
}

NoiseModel::NoiseModel(std::vector<NoiseEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) return;  // the unforced (deterministic) model
    ModeSet seen;
    for (const auto& e : entries_) {
        if (e.q <= 0.0) throw std::invalid_argument("NoiseModel: amplitudes must be positive");
        if (seen.contains(e.k)) throw std::invalid_argument("NoiseModel: duplicate mode");
        seen.insert(e.k);
    }
    if (!seen.is_symmetric()) throw std::invalid_argument("NoiseModel: forced mode set must be symmetric");
}

double NoiseModel::e0() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.q * e.q;
    return s;
}

ModeSet NoiseModel::mode_set() const {
    ModeSet out;
    for (const auto& e : entries_) out.insert(e.k);
    return out;
}

void NoiseModel::validate_against(const SpectralGrid& grid) const {
    for (std::size_t n = 0; n < entries_.size(); ++n)
        if (!grid.retained(entries_[n].k))
            throw std::invalid_argument("NoiseModel: mode " + std::to_string(n) + " outside the truncation");
}

std::pair<std::size_t, double> NoiseModel::real_slot(const SpectralGrid& grid, std::size_t n) const {
    const Mode& k = entries_[n].k;
    if (SpectralGrid::in_upper_half(k)) return {2 * grid.index(k) + 1, -1.0};  // sin
    return {2 * grid.index(-k), 1.0};                                          // cos
}

VorticityField NoiseModel::apply(const GridPtr& grid, std::span<const double> v) const {
    VorticityField out(grid);
    add_apply(out, v);
    return out;
}

void NoiseModel::add_apply(VorticityField& target, std::span<const double> v) const {
    if (v.size() != entries_.size()) throw std::invalid_argument("NoiseModel::apply: dimension mismatch");
    const auto& grid = *target.grid();
    for (std::size_t n = 0; n < entries_.size(); ++n) {
        const Mode& k = entries_[n].k;
        const double a = entries_[n].q * v[n] * kInvSqrt2;
        if (SpectralGrid::in_upper_half(k)) target[grid.index(k)] += Complex{0.0, -a};
        else target[grid.index(-k)] += Complex{a, 0.0};
    }
}

std::vector<double> NoiseModel::adjoint_apply(const VorticityField& xi) const {
    const auto& grid = *xi.grid();
    std::vector<double> out(entries_.size());
    for (std::size_t n = 0; n < entries_.size(); ++n) {
        const Mode& k = entries_[n].k;
        if (SpectralGrid::in_upper_half(k)) out[n] = -entries_[n].q * kSqrt2 * xi[grid.index(k)].imag();
        else out[n] = entries_[n].q * kSqrt2 * xi[grid.index(-k)].real();
    }
    return out;
}

}  // namespace nslab
