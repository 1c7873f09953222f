#pragma once

#include <memory>
#include <vector>

#include "nslab/forcing_geometry.hpp"

namespace nslab {

/// Square spectral truncation: retained wave vectors satisfy
/// 0 < max(|k1|,|k2|) <= N. Coefficients are stored on the upper half plane
///   Z2+ = {k2 > 0} u {k2 = 0, k1 > 0},
/// the lower half being determined by the reality constraint
/// w(-k) = conj(w(k)). The real dimension counts the f_k basis
/// (sin/cos pairs), i.e. dim = 2 * half_count = 4 N (N+1).
class SpectralGrid {
public:
    explicit SpectralGrid(int trunc);

    int trunc() const { return trunc_; }
    std::size_t half_count() const { return modes_.size(); }
    std::size_t dim() const { return 2 * modes_.size(); }

    const std::vector<Mode>& half_modes() const { return modes_; }
    const Mode& mode(std::size_t idx) const { return modes_[idx]; }

    /// Index of a half-plane mode; throws if k is not in Z2+ or not retained.
    std::size_t index(const Mode& k) const;

    static bool in_upper_half(const Mode& k) { return k.k2 > 0 || (k.k2 == 0 && k.k1 > 0); }
    bool retained(const Mode& k) const { return k.maxnorm() <= trunc_; }

    friend bool operator==(const SpectralGrid& a, const SpectralGrid& b) { return a.trunc_ == b.trunc_; }

private:
    int trunc_;
    std::vector<Mode> modes_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline GridPtr make_grid(int trunc) { return std::make_shared<const SpectralGrid>(trunc); }

}  // namespace nslab
