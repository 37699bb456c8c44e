// evolution.hpp
// Time integration on the periodic grid: the exact free Klein-Gordon flow
// e^{J H0 t} per Fourier mode, Strang splitting for the cubic flow, the
// linearized flow over a moving multi-soliton potential, and the energy-space
// functionals. States stay spectral between kicks; the 2/3 mask is applied
// after every nonlinear kick.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "kgms/fft.hpp"
#include "kgms/multisoliton.hpp"
#include "kgms/radial.hpp"

namespace kgms {

struct EvolveOptions {
    double dt = 0.01;
    double observer_dt = 0.1;
    bool dealias = true;
};

struct EvolveStats {
    long steps = 0;
    double energy_initial = 0.0;
    double energy_final = 0.0;
    bool aborted = false;        // NaN detected; state holds the last good snapshot
    double abort_time = 0.0;
};

using StateObserver = std::function<void(double t, const FieldPair& state)>;

// Observer for the linearized flow; log_scale accumulates renormalizations so
// the true field is e^{log_scale} * state.
using ScaledObserver = std::function<void(double t, const FieldPair& state, double log_scale)>;

// Piecewise-linear parameter path t -> (centers, betas) for N solitons.
struct PathSample {
    double t = 0.0;
    std::vector<Vec3> centers;
    std::vector<Vec3> betas;
};

class ParamPath {
public:
    ParamPath() = default;
    // affine path y_j(t) = y_j + beta_j t with constant betas
    ParamPath(std::vector<Vec3> y0, std::vector<Vec3> beta);
    explicit ParamPath(std::vector<PathSample> samples);

    PathSample at(double t) const;
    std::size_t n_solitons() const { return n_; }

private:
    bool affine_ = true;
    std::vector<Vec3> y0_, beta_;
    std::vector<PathSample> samples_;
    std::size_t n_ = 0;
};

FieldPair free_flow(SpectralWorkspace& ws, const FieldPair& v, double t);

// Project a state onto the 2/3-dealiased subspace (consistent initial data
// for dealiased evolution; idempotent).
void project_dealias(SpectralWorkspace& ws, FieldPair& v);

// One Strang step of the full cubic flow (standalone; evolve() fuses steps).
void step(SpectralWorkspace& ws, FieldPair& v, double dt, bool dealias = true);

double h_norm(SpectralWorkspace& ws, const FieldPair& v);
double energy(SpectralWorkspace& ws, const FieldPair& v);        // nonlinear energy
double quadratic_energy(SpectralWorkspace& ws, const FieldPair& v);
Vec3 momentum(SpectralWorkspace& ws, const FieldPair& v);

class Evolver {
public:
    explicit Evolver(const Grid3& g);

    // Full nonlinear flow; returns the state at t = T.
    FieldPair evolve(const FieldPair& v0, double T, const EvolveOptions& opts,
                     const std::vector<StateObserver>& observers = {},
                     EvolveStats* stats = nullptr);

    // Linearized flow over the potential carried along `path` (boost shape
    // refreshed when a beta drifts by more than 1e-3). The state is
    // renormalized whenever its norm passes 1e8; observers see the scaled
    // state plus the accumulated log-scale.
    FieldPair evolve_linearized(const FieldPair& u0, const ParamPath& path,
                                const RadialProfile& q, double T, const EvolveOptions& opts,
                                const std::vector<ScaledObserver>& observers = {},
                                double* final_log_scale = nullptr);

    SpectralWorkspace& workspace() { return ws_; }

private:
    SpectralWorkspace ws_;
};

} // namespace kgms
