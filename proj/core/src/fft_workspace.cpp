#include "nslab/fft_workspace.hpp"

#include <fftw3.h>

#include <mutex>

namespace nslab {

namespace {

constexpr double kInv2Pi = 0.15915494309189533577;

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_complex* fc(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
// fftw_execute_dft does not modify its input for out-of-place c2c plans
inline fftw_complex* fc(const Complex* p) { return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p)); }

}  // namespace

struct SpectralWorkspace::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

int SpectralWorkspace::choose_padding(int trunc) {
    int target = 3 * trunc + 2;
    for (int m = target;; ++m) {
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

SpectralWorkspace::SpectralWorkspace(GridPtr grid)
    : grid_(std::move(grid)), padded_(choose_padding(grid_->trunc())), n2_(static_cast<std::size_t>(padded_) * padded_) {
    in_.resize(n2_);
    out_.resize(n2_);
    base_p1_.resize(n2_);
    base_p2_.resize(n2_);
    base_q1_.resize(n2_);
    base_q2_.resize(n2_);
    tmp_p1_.resize(n2_);
    tmp_p2_.resize(n2_);
    tmp_q1_.resize(n2_);
    tmp_q2_.resize(n2_);
    prod_.resize(n2_);

    std::lock_guard<std::mutex> lock(plan_mutex());
    plans_ = new Plans;
    plans_->fwd = fftw_plan_dft_2d(padded_, padded_, fc(in_.data()), fc(out_.data()),
                                   FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_2d(padded_, padded_, fc(in_.data()), fc(out_.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plans_->fwd);
    fftw_destroy_plan(plans_->bwd);
    delete plans_;
}

void SpectralWorkspace::backward(const Complex* src, Complex* dst) {
    fftw_execute_dft(plans_->bwd, fc(src), fc(dst));
}

void SpectralWorkspace::forward(const Complex* src, Complex* dst) {
    fftw_execute_dft(plans_->fwd, fc(src), fc(dst));
}

void SpectralWorkspace::spread(const VorticityField& w, Complex* dst, int component, bool over_norm2) const {
    std::fill(dst, dst + n2_, Complex{0.0, 0.0});
    const int M = padded_;
    auto wrap = [M](int k) { return ((k % M) + M) % M; };
    const auto& grid = *grid_;
    for (std::size_t i = 0; i < w.half_count(); ++i) {
        const Mode& k = grid.mode(i);
        const double inv = over_norm2 ? 1.0 / static_cast<double>(k.norm2()) : 1.0;
        double wk = 1.0;
        if (component == 1) wk = k.k1;
        else if (component == 2) wk = k.k2;
        dst[static_cast<std::size_t>(wrap(k.k1)) * M + wrap(k.k2)] += (wk * inv) * w[i];
        const double wmk = (component == 0) ? 1.0 : -wk;
        dst[static_cast<std::size_t>(wrap(-k.k1)) * M + wrap(-k.k2)] += (wmk * inv) * std::conj(w[i]);
    }
}

namespace {
inline void require_grid(const VorticityField& w, const GridPtr& g, const char* where) {
    if (!w.grid() || !(*w.grid() == *g)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}
}  // namespace

VorticityField SpectralWorkspace::nonlinearity(const VorticityField& w) {
    require_grid(w, grid_, "SpectralWorkspace::nonlinearity");
    spread(w, in_.data(), 1, false); backward(in_.data(), tmp_p1_.data());
    spread(w, in_.data(), 2, false); backward(in_.data(), tmp_p2_.data());
    spread(w, in_.data(), 1, true);  backward(in_.data(), tmp_q1_.data());
    spread(w, in_.data(), 2, true);  backward(in_.data(), tmp_q2_.data());
    for (std::size_t i = 0; i < n2_; ++i)
        prod_[i] = tmp_q2_[i] * tmp_p1_[i] - tmp_q1_[i] * tmp_p2_[i];
    forward(prod_.data(), out_.data());

    const int M = padded_;
    auto wrap = [M](int k) { return ((k % M) + M) % M; };
    const double scale = kInv2Pi / static_cast<double>(n2_);
    VorticityField result(grid_);
    for (std::size_t i = 0; i < result.half_count(); ++i) {
        const Mode& k = grid_->mode(i);
        result[i] = scale * out_[static_cast<std::size_t>(wrap(k.k1)) * M + wrap(k.k2)];
    }
    return result;
}

void SpectralWorkspace::set_base(const VorticityField& w) {
    require_grid(w, grid_, "SpectralWorkspace::set_base");
    spread(w, in_.data(), 1, false); backward(in_.data(), base_p1_.data());
    spread(w, in_.data(), 2, false); backward(in_.data(), base_p2_.data());
    spread(w, in_.data(), 1, true);  backward(in_.data(), base_q1_.data());
    spread(w, in_.data(), 2, true);  backward(in_.data(), base_q2_.data());
    has_base_ = true;
}

VorticityField SpectralWorkspace::apply_bilinear(const VorticityField& xi) {
    if (!has_base_) throw std::logic_error("SpectralWorkspace::apply_bilinear: no base field set");
    spread(xi, in_.data(), 1, false); backward(in_.data(), tmp_p1_.data());
    spread(xi, in_.data(), 2, false); backward(in_.data(), tmp_p2_.data());
    spread(xi, in_.data(), 1, true);  backward(in_.data(), tmp_q1_.data());
    spread(xi, in_.data(), 2, true);  backward(in_.data(), tmp_q2_.data());
    for (std::size_t i = 0; i < n2_; ++i)
        prod_[i] = base_q2_[i] * tmp_p1_[i] - base_q1_[i] * tmp_p2_[i] +
                   tmp_q2_[i] * base_p1_[i] - tmp_q1_[i] * base_p2_[i];
    forward(prod_.data(), out_.data());

    const int M = padded_;
    auto wrap = [M](int k) { return ((k % M) + M) % M; };
    const double scale = kInv2Pi / static_cast<double>(n2_);
    VorticityField result(grid_);
    for (std::size_t i = 0; i < result.half_count(); ++i) {
        const Mode& k = grid_->mode(i);
        result[i] = scale * out_[static_cast<std::size_t>(wrap(k.k1)) * M + wrap(k.k2)];
    }
    return result;
}

VorticityField SpectralWorkspace::apply_bilinear_adjoint(const VorticityField& eta) {
    if (!has_base_) throw std::logic_error("SpectralWorkspace::apply_bilinear_adjoint: no base field set");
    spread(eta, in_.data(), 0, false);
    backward(in_.data(), prod_.data());  // physical eta

    // conv(p2, eta), conv(p1, eta), conv(q2, eta), conv(q1, eta)
    for (std::size_t i = 0; i < n2_; ++i) in_[i] = base_p2_[i] * prod_[i];
    forward(in_.data(), tmp_p2_.data());
    for (std::size_t i = 0; i < n2_; ++i) in_[i] = base_p1_[i] * prod_[i];
    forward(in_.data(), tmp_p1_.data());
    for (std::size_t i = 0; i < n2_; ++i) in_[i] = base_q2_[i] * prod_[i];
    forward(in_.data(), tmp_q2_.data());
    for (std::size_t i = 0; i < n2_; ++i) in_[i] = base_q1_[i] * prod_[i];
    forward(in_.data(), tmp_q1_.data());

    const int M = padded_;
    auto wrap = [M](int k) { return ((k % M) + M) % M; };
    const double scale = kInv2Pi / static_cast<double>(n2_);
    VorticityField result(grid_);
    for (std::size_t i = 0; i < result.half_count(); ++i) {
        const Mode& m = grid_->mode(i);
        const std::size_t idx = static_cast<std::size_t>(wrap(m.k1)) * M + wrap(m.k2);
        const double inv_m2 = 1.0 / static_cast<double>(m.norm2());
        const Complex a = tmp_p2_[idx], b = tmp_p1_[idx], c = tmp_q2_[idx], d = tmp_q1_[idx];
        result[i] = scale * ((static_cast<double>(m.k1) * a - static_cast<double>(m.k2) * b) * inv_m2 -
                             static_cast<double>(m.k1) * c + static_cast<double>(m.k2) * d);
    }
    return result;
}

VorticityField SpectralWorkspace::symmetrized(const VorticityField& a, const VorticityField& b) {
    check_same_grid(a, b, "SpectralWorkspace::symmetrized");
    // locals so a cached base stays intact
    std::vector<Complex> ap1(n2_), ap2(n2_), aq1(n2_), aq2(n2_);
    spread(a, in_.data(), 1, false); backward(in_.data(), ap1.data());
    spread(a, in_.data(), 2, false); backward(in_.data(), ap2.data());
    spread(a, in_.data(), 1, true);  backward(in_.data(), aq1.data());
    spread(a, in_.data(), 2, true);  backward(in_.data(), aq2.data());
    spread(b, in_.data(), 1, false); backward(in_.data(), tmp_p1_.data());
    spread(b, in_.data(), 2, false); backward(in_.data(), tmp_p2_.data());
    spread(b, in_.data(), 1, true);  backward(in_.data(), tmp_q1_.data());
    spread(b, in_.data(), 2, true);  backward(in_.data(), tmp_q2_.data());
    for (std::size_t i = 0; i < n2_; ++i)
        prod_[i] = aq2[i] * tmp_p1_[i] - aq1[i] * tmp_p2_[i] +
                   tmp_q2_[i] * ap1[i] - tmp_q1_[i] * ap2[i];
    forward(prod_.data(), out_.data());

    const int M = padded_;
    auto wrap = [M](int k) { return ((k % M) + M) % M; };
    const double scale = kInv2Pi / static_cast<double>(n2_);
    VorticityField result(grid_);
    for (std::size_t i = 0; i < result.half_count(); ++i) {
        const Mode& k = grid_->mode(i);
        result[i] = scale * out_[static_cast<std::size_t>(wrap(k.k1)) * M + wrap(k.k2)];
    }
    return result;
}

std::vector<Complex> SpectralWorkspace::physical_values(const VorticityField& w) {
    spread(w, in_.data(), 0, false);
    backward(in_.data(), out_.data());
    std::vector<Complex> vals(out_.begin(), out_.end());
    for (auto& v : vals) v *= kInv2Pi;
    return vals;
}

}  // namespace nslab
