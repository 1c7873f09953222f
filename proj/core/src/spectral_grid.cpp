#include "nslab/spectral_grid.hpp"

namespace nslab {

SpectralGrid::SpectralGrid(int trunc) : trunc_(trunc) {
    if (trunc < 1) throw std::invalid_argument("SpectralGrid: truncation must be >= 1");
    modes_.reserve(static_cast<std::size_t>(2 * trunc * (trunc + 1)));
    for (int k1 = 1; k1 <= trunc; ++k1) modes_.emplace_back(k1, 0);
    for (int k2 = 1; k2 <= trunc; ++k2)
        for (int k1 = -trunc; k1 <= trunc; ++k1) modes_.emplace_back(k1, k2);
}

std::size_t SpectralGrid::index(const Mode& k) const {
    if (!in_upper_half(k) || !retained(k))
        throw std::out_of_range("SpectralGrid::index: mode not in the retained upper half plane");
    if (k.k2 == 0) return static_cast<std::size_t>(k.k1 - 1);
    return static_cast<std::size_t>(trunc_ + (k.k2 - 1) * (2 * trunc_ + 1) + (k.k1 + trunc_));
}

}  // namespace nslab
