#include "nslab/integrator.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace nslab {

const VorticityField& TrajectoryRecord::state(std::size_t step) const {
    if (!has_states) throw std::logic_error("TrajectoryRecord: states not stored; use materialize_states");
    return states.at(step);
}

Integrator::Integrator(GridPtr grid, IntegratorConfig cfg, NoiseModel noise)
    : grid_(std::move(grid)), cfg_(cfg), noise_(std::move(noise)) {
    if (cfg_.dt <= 0.0) throw std::invalid_argument("IntegratorConfig: dt must be positive");
    if (cfg_.nu < 0.0) throw std::invalid_argument("IntegratorConfig: nu must be nonnegative");
    if (cfg_.nu == 0.0 && (cfg_.scheme != Scheme::DeterministicRK4 || noise_.e0() > 0.0))
        throw std::invalid_argument("IntegratorConfig: nu = 0 requires DeterministicRK4 and no forcing");
    if (cfg_.scheme == Scheme::DeterministicRK4 && noise_.m() > 0)
        throw std::invalid_argument("IntegratorConfig: DeterministicRK4 is deterministic; use an empty noise model");
    noise_.validate_against(*grid_);
    decay_.resize(grid_->half_count());
    for (std::size_t i = 0; i < decay_.size(); ++i)
        decay_[i] = std::exp(-cfg_.nu * static_cast<double>(grid_->mode(i).norm2()) * cfg_.dt);
    ws_ = std::make_unique<SpectralWorkspace>(grid_);
}

VorticityField Integrator::step(const VorticityField& w, std::span<const double> dW) const {
    if (cfg_.scheme == Scheme::DeterministicRK4) return rk4_step(w);
    if (dW.size() != noise_.m()) throw std::invalid_argument("Integrator::step: increment dimension mismatch");
    VorticityField out = w;
    if (cfg_.nonlinear) {
        VorticityField nl = ws_->nonlinearity(w);
        for (std::size_t i = 0; i < out.half_count(); ++i) out[i] += cfg_.dt * nl[i];
    }
    if (!noise_.entries().empty()) noise_.add_apply(out, dW);
    for (std::size_t i = 0; i < out.half_count(); ++i) out[i] *= decay_[i];
    return out;
}

VorticityField Integrator::rk4_step(const VorticityField& w) const {
    auto f = [this](const VorticityField& u) {
        VorticityField r = cfg_.nonlinear ? ws_->nonlinearity(u) : VorticityField(grid_);
        for (std::size_t i = 0; i < r.half_count(); ++i)
            r[i] -= cfg_.nu * static_cast<double>(grid_->mode(i).norm2()) * u[i];
        return r;
    };
    const double h = cfg_.dt;
    VorticityField k1 = f(w);
    VorticityField k2 = f(w + 0.5 * h * k1);
    VorticityField k3 = f(w + 0.5 * h * k2);
    VorticityField k4 = f(w + h * k3);
    VorticityField out = w;
    for (std::size_t i = 0; i < out.half_count(); ++i)
        out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

TrajectoryRecord Integrator::simulate(const VorticityField& w0, double T, std::uint64_t replica,
                                      bool store_states) const {
    if (T < 0.0) throw std::invalid_argument("Integrator::simulate: negative horizon");
    TrajectoryRecord rec;
    rec.grid = grid_;
    rec.cfg = cfg_;
    rec.noise = noise_;
    rec.replica = replica;
    rec.w0 = w0;
    rec.n_steps = static_cast<std::size_t>(std::ceil(T / cfg_.dt - 1e-12));
    const std::size_t m = noise_.m();
    rec.increments.assign(rec.n_steps * m, 0.0);
    rec.has_states = store_states;
    if (store_states) {
        rec.states.reserve(rec.n_steps + 1);
        rec.states.push_back(w0);
    }

    GaussianStream stream(cfg_.seed, replica);
    const double sqrt_dt = std::sqrt(cfg_.dt);
    VorticityField w = w0;
    std::vector<double> buf(m);
    for (std::size_t i = 0; i < rec.n_steps; ++i) {
        if (m > 0) {
            stream.draw(i, buf);
            for (std::size_t n = 0; n < m; ++n) rec.increments[i * m + n] = buf[n] * sqrt_dt;
        }
        w = step(w, rec.increment(i));
        if (!w.finite()) throw IntegrationError(i, "nonfinite state");
        if (store_states) rec.states.push_back(w);
    }
    return rec;
}

void Integrator::scan(const TrajectoryRecord& traj,
                      const std::function<void(std::size_t, const VorticityField&, std::span<const double>)>& fn) const {
    VorticityField w = traj.w0;
    for (std::size_t i = 0; i < traj.n_steps; ++i) {
        fn(i, w, traj.increment(i));
        w = step(w, traj.increment(i));
        if (!w.finite()) throw IntegrationError(i, "nonfinite state during replay");
    }
    fn(traj.n_steps, w, {});
}

void materialize_states(const Integrator& integrator, TrajectoryRecord& traj) {
    traj.states.clear();
    traj.states.reserve(traj.n_steps + 1);
    integrator.scan(traj, [&](std::size_t, const VorticityField& w, std::span<const double>) {
        traj.states.push_back(w);
    });
    traj.has_states = true;
}

namespace {

constexpr std::uint32_t kMagic = 0x42534c4eu;  // "NSLB"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void TrajectoryRecord::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("TrajectoryRecord::save: cannot open " + path);
    put(os, kMagic);
    put(os, kVersion);
    put(os, static_cast<std::int32_t>(grid->trunc()));
    put(os, static_cast<std::uint64_t>(grid->dim()));
    put(os, cfg.nu);
    put(os, cfg.dt);
    put(os, static_cast<std::uint32_t>(cfg.scheme));
    put(os, static_cast<std::uint8_t>(cfg.nonlinear ? 1 : 0));
    put(os, cfg.seed);
    put(os, replica);
    put(os, static_cast<std::uint64_t>(noise.m()));
    put(os, static_cast<std::uint64_t>(n_steps));
    for (const auto& e : noise.entries()) {
        put(os, static_cast<std::int32_t>(e.k.k1));
        put(os, static_cast<std::int32_t>(e.k.k2));
        put(os, e.q);
    }
    for (std::size_t i = 0; i < w0.half_count(); ++i) {
        put(os, w0[i].real());
        put(os, w0[i].imag());
    }
    os.write(reinterpret_cast<const char*>(increments.data()),
             static_cast<std::streamsize>(increments.size() * sizeof(double)));
    if (!os) throw std::runtime_error("TrajectoryRecord::save: write failed for " + path);
}

TrajectoryRecord TrajectoryRecord::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("TrajectoryRecord::load: cannot open " + path);
    if (get<std::uint32_t>(is) != kMagic) throw std::runtime_error("TrajectoryRecord::load: bad magic");
    if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error("TrajectoryRecord::load: unsupported version");
    TrajectoryRecord rec;
    const int trunc = get<std::int32_t>(is);
    rec.grid = make_grid(trunc);
    const std::uint64_t dim = get<std::uint64_t>(is);
    if (dim != rec.grid->dim()) throw std::runtime_error("TrajectoryRecord::load: dimension mismatch");
    rec.cfg.nu = get<double>(is);
    rec.cfg.dt = get<double>(is);
    rec.cfg.scheme = static_cast<Scheme>(get<std::uint32_t>(is));
    rec.cfg.nonlinear = get<std::uint8_t>(is) != 0;
    rec.cfg.seed = get<std::uint64_t>(is);
    rec.replica = get<std::uint64_t>(is);
    const std::uint64_t m = get<std::uint64_t>(is);
    rec.n_steps = get<std::uint64_t>(is);
    std::vector<NoiseEntry> entries;
    for (std::uint64_t n = 0; n < m; ++n) {
        const int k1 = get<std::int32_t>(is);
        const int k2 = get<std::int32_t>(is);
        const double q = get<double>(is);
        entries.push_back({Mode(k1, k2), q});
    }
    rec.noise = NoiseModel(std::move(entries));
    rec.w0 = VorticityField(rec.grid);
    for (std::size_t i = 0; i < rec.w0.half_count(); ++i) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        rec.w0[i] = Complex{re, im};
    }
    rec.increments.resize(rec.n_steps * m);
    is.read(reinterpret_cast<char*>(rec.increments.data()),
            static_cast<std::streamsize>(rec.increments.size() * sizeof(double)));
    if (!is) throw std::runtime_error("TrajectoryRecord::load: truncated file " + path);
    return rec;
}

}  // namespace nslab
