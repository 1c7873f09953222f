#pragma once

#include <vector>

#include "nslab/spectral_ops.hpp"

namespace nslab {

/// Pseudospectral evaluator for the quadratic terms on a dealiased padded
/// grid (2/3 rule: padded side M is the smallest product of 2, 3, 5 with
/// M >= 3N+2, so quadratic aliases never land on retained modes). Matches
/// the direct double sums to roundoff.
///
/// A workspace is not thread safe; use one instance per thread. For repeated
/// tangent work along one trajectory, set_base(w) caches the transforms of w
/// so that apply_bilinear / apply_bilinear_adjoint cost five small transforms
/// each.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(GridPtr grid);
    ~SpectralWorkspace();

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const GridPtr& grid() const { return grid_; }
    int padded_size() const { return padded_; }

    /// Quadratic drift, fast path; equals nonlinearity_direct to ~1e-13.
    VorticityField nonlinearity(const VorticityField& w);

    /// Cache the transforms of a base field w for subsequent bilinear applies.
    void set_base(const VorticityField& w);
    bool has_base() const { return has_base_; }

    /// Btilde(w, xi) with w the cached base.
    VorticityField apply_bilinear(const VorticityField& xi);

    /// Adjoint of xi -> Btilde(w, xi) in the L2 pairing, cached base.
    VorticityField apply_bilinear_adjoint(const VorticityField& eta);

    /// Btilde(a, b) without base caching (nine transforms).
    VorticityField symmetrized(const VorticityField& a, const VorticityField& b);

    /// Physical values of w on the padded grid, including the (2 pi)^{-1}
    /// normalization; imaginary parts are roundoff for any valid field.
    std::vector<Complex> physical_values(const VorticityField& w);

    static int choose_padding(int trunc);

private:
    struct Plans;

    void spread(const VorticityField& w, Complex* dst, int component, bool over_norm2) const;
    void backward(const Complex* src, Complex* dst);
    void forward(const Complex* src, Complex* dst);

    GridPtr grid_;
    int padded_ = 0;
    std::size_t n2_ = 0;
    Plans* plans_ = nullptr;

    std::vector<Complex> in_, out_;
    std::vector<Complex> base_p1_, base_p2_, base_q1_, base_q2_;  // physical caches of the base field
    std::vector<Complex> tmp_p1_, tmp_p2_, tmp_q1_, tmp_q2_, prod_;
    bool has_base_ = false;
};

}  // namespace nslab
