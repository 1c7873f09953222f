#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nslab/spectral_grid.hpp"

namespace nslab {

using Complex = std::complex<double>;

/// Truncated vorticity in Fourier space. Upper-half-plane coefficients w_k
/// with implicit w(-k) = conj(w_k); mean zero by construction.
///
/// Conventions (fixed once for the whole project):
///   * w_k is the scalar product of w with (2 pi)^{-1} exp(i k x), so the
///     physical field is w(x) = (2 pi)^{-1} sum_k w_k exp(i k x) and
///     ||w||_{L2}^2 = sum over the full lattice of |w_k|^2.
///   * The real basis vector "sin k" (k in Z2+) has w_k = -i/sqrt(2) and
///     "cos k" has w_k = 1/sqrt(2); both are unit vectors. Real coordinates
///     are x[2i] = sqrt(2) Re w_i, x[2i+1] = sqrt(2) Im w_i, an isometry.
class VorticityField {
public:
    VorticityField() = default;
    explicit VorticityField(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->half_count(), Complex{0.0, 0.0}) {}

    const GridPtr& grid() const { return grid_; }
    std::size_t half_count() const { return coeffs_.size(); }
    std::size_t dim() const { return 2 * coeffs_.size(); }

    Complex& operator[](std::size_t i) { return coeffs_[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
    std::span<const Complex> coeffs() const { return coeffs_; }

    /// Coefficient at any retained full-lattice wave vector.
    Complex coeff(const Mode& k) const {
        if (SpectralGrid::in_upper_half(k)) return coeffs_[grid_->index(k)];
        return std::conj(coeffs_[grid_->index(-k)]);
    }
    void set_coeff(const Mode& k, Complex v) {
        if (SpectralGrid::in_upper_half(k)) coeffs_[grid_->index(k)] = v;
        else coeffs_[grid_->index(-k)] = std::conj(v);
    }

    // -- linear algebra in place ------------------------------------------
    VorticityField& operator+=(const VorticityField& o);
    VorticityField& operator-=(const VorticityField& o);
    VorticityField& operator*=(double a);
    friend VorticityField operator+(VorticityField a, const VorticityField& b) { return a += b; }
    friend VorticityField operator-(VorticityField a, const VorticityField& b) { return a -= b; }
    friend VorticityField operator*(double a, VorticityField f) { return f *= a; }

    void set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), Complex{0.0, 0.0}); }
    bool finite() const;

    // -- real coordinates (isometric) --------------------------------------
    void to_real(std::span<double> out) const;
    void from_real(std::span<const double> in);
    std::vector<double> real_coords() const;

    /// Unit basis field: component 2i is "cos" and 2i+1 is "sin" of half
    /// mode i (matching the real coordinate layout).
    static VorticityField basis(const GridPtr& grid, std::size_t real_index);

    // -- serialization ------------------------------------------------------
    /// JSON {"N": .., "modes": [[k1,k2,re,im], ...]} over the half plane.
    std::string to_json() const;
    static VorticityField from_json(const std::string& text);

private:
    GridPtr grid_;
    std::vector<Complex> coeffs_;
};

/// Velocity-like field pair (the image of the Biot-Savart operator).
struct VelocityField {
    GridPtr grid;
    std::vector<Complex> u1, u2;  // half-plane coefficients per component
};

/// L2 inner product, summed over the full lattice.
double inner(const VorticityField& a, const VorticityField& b);

/// l2 norm = L2 norm of the physical field.
double norm(const VorticityField& a);

void check_same_grid(const VorticityField& a, const VorticityField& b, const char* where);

/// Deterministic pseudo random field for tests and probes: iid standard
/// normal real coordinates scaled to unit norm when normalize is set.
VorticityField random_field(const GridPtr& grid, std::uint64_t seed, bool normalize = true);

}  // namespace nslab
