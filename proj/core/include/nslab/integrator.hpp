#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "nslab/fft_workspace.hpp"
#include "nslab/noise_model.hpp"
#include "nslab/rng.hpp"

namespace nslab {

enum class Scheme { ExpEulerMaruyama, DeterministicRK4 };

struct IntegratorConfig {
    double nu = 1.0;
    double dt = 1e-2;
    Scheme scheme = Scheme::ExpEulerMaruyama;
    std::uint64_t seed = 0;
    bool nonlinear = true;  ///< false switches the quadratic drift off (OU regime)
};

/// Thrown when a state stops being finite; carries the step index.
struct IntegrationError : std::runtime_error {
    IntegrationError(std::size_t step, const std::string& what)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_index(step) {}
    std::size_t step_index;
};

/// Seed-determined, replayable trajectory: initial state plus all noise
/// increments. Re-integrating from (w0, increments) reproduces the stored
/// states bit-exactly.
struct TrajectoryRecord {
    GridPtr grid;
    IntegratorConfig cfg;
    NoiseModel noise;
    std::uint64_t replica = 0;
    VorticityField w0;
    std::size_t n_steps = 0;
    std::vector<double> increments;       ///< step-major, m per step
    std::vector<VorticityField> states;   ///< n_steps+1 fields when stored
    bool has_states = false;

    double dt() const { return cfg.dt; }
    std::size_t m() const { return noise.m(); }
    std::span<const double> increment(std::size_t step) const {
        return {increments.data() + step * m(), m()};
    }
    const VorticityField& state(std::size_t step) const;

    void save(const std::string& path) const;
    static TrajectoryRecord load(const std::string& path);
};

/// Time stepper for dw = nu Lap w dt + B(Kw,w) dt + Q dW.
///
/// ExpEulerMaruyama: w' = exp(nu Lap dt) (w + dt B(Kw,w) + Q dW), with the
/// exponential factor exact per mode. The discrete tangent, adjoint and
/// Malliavin operators elsewhere are exact derivatives of this map.
class Integrator {
public:
    Integrator(GridPtr grid, IntegratorConfig cfg, NoiseModel noise);

    const GridPtr& grid() const { return grid_; }
    const IntegratorConfig& config() const { return cfg_; }
    const NoiseModel& noise() const { return noise_; }

    /// One step; dW holds the m noise increments (ignored by the RK4 scheme).
    VorticityField step(const VorticityField& w, std::span<const double> dW) const;

    /// ceil(T/dt) steps from w0; deterministic given (seed, replica).
    TrajectoryRecord simulate(const VorticityField& w0, double T, std::uint64_t replica = 0,
                              bool store_states = true) const;

    /// Replays a record, invoking fn(step, w_at_step, increments_of_step)
    /// before each step and once more at the end with an empty span.
    void scan(const TrajectoryRecord& traj,
              const std::function<void(std::size_t, const VorticityField&, std::span<const double>)>& fn) const;

    /// Per-mode decay factors exp(-nu |k|^2 dt) for one step.
    const std::vector<double>& decay() const { return decay_; }

    SpectralWorkspace& workspace() const { return *ws_; }

private:
    VorticityField rk4_step(const VorticityField& w) const;

    GridPtr grid_;
    IntegratorConfig cfg_;
    NoiseModel noise_;
    std::vector<double> decay_;
    mutable std::unique_ptr<SpectralWorkspace> ws_;
};

/// Reconstructs and stores all states of a record by replay.
void materialize_states(const Integrator& integrator, TrajectoryRecord& traj);

}  // namespace nslab
