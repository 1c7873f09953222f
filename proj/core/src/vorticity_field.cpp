#include "nslab/vorticity_field.hpp"

#include <cmath>

#include "json.hpp"
#include "nslab/rng.hpp"

namespace nslab {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

VorticityField& VorticityField::operator+=(const VorticityField& o) {
    check_same_grid(*this, o, "operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

VorticityField& VorticityField::operator-=(const VorticityField& o) {
    check_same_grid(*this, o, "operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

VorticityField& VorticityField::operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
}

bool VorticityField::finite() const {
    for (const auto& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

void VorticityField::to_real(std::span<double> out) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        out[2 * i] = kSqrt2 * coeffs_[i].real();
        out[2 * i + 1] = kSqrt2 * coeffs_[i].imag();
    }
}

void VorticityField::from_real(std::span<const double> in) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] = Complex{in[2 * i] / kSqrt2, in[2 * i + 1] / kSqrt2};
}

std::vector<double> VorticityField::real_coords() const {
    std::vector<double> out(dim());
    to_real(out);
    return out;
}

VorticityField VorticityField::basis(const GridPtr& grid, std::size_t real_index) {
    VorticityField f(grid);
    std::size_t i = real_index / 2;
    if (real_index % 2 == 0) f.coeffs_[i] = Complex{1.0 / kSqrt2, 0.0};
    else f.coeffs_[i] = Complex{0.0, 1.0 / kSqrt2};
    return f;
}

double inner(const VorticityField& a, const VorticityField& b) {
    check_same_grid(a, b, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.half_count(); ++i)
        s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return 2.0 * s;
}

double norm(const VorticityField& a) { return std::sqrt(inner(a, a)); }

void check_same_grid(const VorticityField& a, const VorticityField& b, const char* where) {
    if (!a.grid() || !b.grid() || !(*a.grid() == *b.grid()))
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

VorticityField random_field(const GridPtr& grid, std::uint64_t seed, bool normalize) {
    VorticityField f(grid);
    std::vector<double> x(f.dim());
    GaussianStream stream(seed, 0x72616e64ull);
    stream.draw(0, x);
    f.from_real(x);
    if (normalize) {
        double n = norm(f);
        if (n > 0) f *= 1.0 / n;
    }
    return f;
}

std::string VorticityField::to_json() const {
    nlohmann::json j;
    j["N"] = grid_->trunc();
    auto modes = nlohmann::json::array();
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const Mode& k = grid_->mode(i);
        modes.push_back({k.k1, k.k2, coeffs_[i].real(), coeffs_[i].imag()});
    }
    j["modes"] = modes;
    return j.dump();
}

VorticityField VorticityField::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    VorticityField f(make_grid(j.at("N").get<int>()));
    for (const auto& row : j.at("modes")) {
        Mode k(row.at(0).get<int>(), row.at(1).get<int>());
        f.set_coeff(k, Complex{row.at(2).get<double>(), row.at(3).get<double>()});
    }
    return f;
}

}  // namespace nslab
