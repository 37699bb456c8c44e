// evolution.cpp
#include "kgms/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace kgms {

namespace {

using cvec = std::vector<SpectralWorkspace::cplx>;

void rotate(SpectralWorkspace& ws, cvec& h1, cvec& h2, double t)
{
    ws.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
        const double w = std::sqrt(1.0 + kx * kx + ky * ky + kz * kz);
        const double c = std::cos(w * t), s = std::sin(w * t);
        const auto a = h1[idx], b = h2[idx];
        h1[idx] = c * a + (s / w) * b;
        h2[idx] = -w * s * a + c * b;
    });
}

double max_omega(const SpectralWorkspace& ws)
{
    const Grid3& g = ws.grid();
    double k2 = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double km = M_PI / g.dx(d);
        k2 += km * km;
    }
    return std::sqrt(1.0 + k2);
}

} // namespace

ParamPath::ParamPath(std::vector<Vec3> y0, std::vector<Vec3> beta)
    : affine_(true), y0_(std::move(y0)), beta_(std::move(beta)), n_(y0_.size())
{
    if (y0_.size() != beta_.size())
        throw std::invalid_argument("ParamPath: size mismatch");
}

ParamPath::ParamPath(std::vector<PathSample> samples)
    : affine_(false), samples_(std::move(samples))
{
    if (samples_.empty())
        throw std::invalid_argument("ParamPath: empty sample list");
    n_ = samples_.front().centers.size();
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i].t <= samples_[i - 1].t)
            throw std::invalid_argument("ParamPath: times must increase");
}

PathSample ParamPath::at(double t) const
{
    PathSample out;
    out.t = t;
    if (affine_) {
        out.centers.resize(n_);
        out.betas = beta_;
        for (std::size_t j = 0; j < n_; ++j)
            for (int d = 0; d < 3; ++d)
                out.centers[j][d] = y0_[j][d] + beta_[j][d] * t;
        return out;
    }
    if (t <= samples_.front().t) {
        out = samples_.front();
        out.t = t;
        return out;
    }
    if (t >= samples_.back().t) {
        out = samples_.back();
        out.t = t;
        return out;
    }
    std::size_t hi = 1;
    while (samples_[hi].t < t)
        ++hi;
    const auto& a = samples_[hi - 1];
    const auto& b = samples_[hi];
    const double w = (t - a.t) / (b.t - a.t);
    out.centers.resize(n_);
    out.betas.resize(n_);
    for (std::size_t j = 0; j < n_; ++j)
        for (int d = 0; d < 3; ++d) {
            out.centers[j][d] = (1 - w) * a.centers[j][d] + w * b.centers[j][d];
            out.betas[j][d] = (1 - w) * a.betas[j][d] + w * b.betas[j][d];
        }
    return out;
}

FieldPair free_flow(SpectralWorkspace& ws, const FieldPair& v, double t)
{
    cvec h1, h2;
    ws.forward(v.psi1, h1);
    ws.forward(v.psi2, h2);
    rotate(ws, h1, h2, t);
    FieldPair out(v.grid);
    ws.backward(h1, out.psi1);
    ws.backward(h2, out.psi2);
    return out;
}

void project_dealias(SpectralWorkspace& ws, FieldPair& v)
{
    cvec h;
    ws.forward(v.psi1, h);
    ws.dealias(h);
    ws.backward(h, v.psi1);
    ws.forward(v.psi2, h);
    ws.dealias(h);
    ws.backward(h, v.psi2);
}

void step(SpectralWorkspace& ws, FieldPair& v, double dt, bool dealias)
{
    v = free_flow(ws, v, 0.5 * dt);
    for (std::size_t i = 0; i < v.psi1.size(); ++i)
        v.psi2[i] += dt * v.psi1[i] * v.psi1[i] * v.psi1[i];
    if (dealias) {
        cvec h;
        ws.forward(v.psi2, h);
        ws.dealias(h);
        ws.backward(h, v.psi2);
        ws.forward(v.psi1, h);
        ws.dealias(h);
        ws.backward(h, v.psi1);
    }
    v = free_flow(ws, v, 0.5 * dt);
}

double h_norm(SpectralWorkspace& ws, const FieldPair& v)
{
    cvec h1, h2;
    ws.forward(v.psi1, h1);
    ws.forward(v.psi2, h2);
    const double a = ws.spectral_quadratic(h1, [](double k2) { return 1.0 + k2; });
    const double b = ws.spectral_quadratic(h2, [](double) { return 1.0; });
    return std::sqrt(a + b);
}

double energy(SpectralWorkspace& ws, const FieldPair& v)
{
    cvec h1;
    ws.forward(v.psi1, h1);
    const double grad = ws.spectral_quadratic(h1, [](double k2) { return k2; });
    double rest = 0.0;
    for (std::size_t i = 0; i < v.psi1.size(); ++i) {
        const double a = v.psi1[i], b = v.psi2[i];
        rest += 0.5 * b * b + 0.5 * a * a - 0.25 * a * a * a * a;
    }
    return 0.5 * grad + rest * v.grid.cell_volume();
}

double quadratic_energy(SpectralWorkspace& ws, const FieldPair& v)
{
    cvec h1, h2;
    ws.forward(v.psi1, h1);
    ws.forward(v.psi2, h2);
    return ws.spectral_quadratic(h1, [](double k2) { return 1.0 + k2; }) +
           ws.spectral_quadratic(h2, [](double) { return 1.0; });
}

Vec3 momentum(SpectralWorkspace& ws, const FieldPair& v)
{
    Field g[3];
    ws.gradient(v.psi1, g);
    Vec3 p{0, 0, 0};
    for (std::size_t i = 0; i < v.psi1.size(); ++i)
        for (int d = 0; d < 3; ++d)
            p[d] += v.psi2[i] * g[d][i];
    for (int d = 0; d < 3; ++d)
        p[d] *= v.grid.cell_volume();
    return p;
}

Evolver::Evolver(const Grid3& g) : ws_(g) {}

FieldPair Evolver::evolve(const FieldPair& v0, double T, const EvolveOptions& opts,
                          const std::vector<StateObserver>& observers, EvolveStats* stats)
{
    if (!(opts.dt > 0))
        throw std::invalid_argument("evolve: dt must be positive");
    if (opts.dt * max_omega(ws_) > 0.5)
        throw std::invalid_argument("evolve: dt violates accuracy guard dt*omega_max < 0.5");

    const long total_steps = std::lround(T / opts.dt);
    const long obs_stride = std::max(1L, std::lround(opts.observer_dt / opts.dt));
    const Grid3& g = ws_.grid();

    FieldPair state = v0;
    EvolveStats st;
    st.energy_initial = energy(ws_, state);

    for (const auto& f : observers)
        f(0.0, state);

    cvec h1, h2, scratch;
    ws_.forward(state.psi1, h1);
    ws_.forward(state.psi2, h2);

    long done = 0;
    FieldPair last_good = state;
    while (done < total_steps) {
        const long block = std::min(obs_stride, total_steps - done);
        rotate(ws_, h1, h2, 0.5 * opts.dt);
        for (long s = 0; s < block; ++s) {
            ws_.backward(h1, state.psi1);
            ws_.backward(h2, state.psi2);
            for (std::size_t i = 0; i < state.psi1.size(); ++i)
                state.psi2[i] += opts.dt * state.psi1[i] * state.psi1[i] * state.psi1[i];
            ws_.forward(state.psi1, h1);
            ws_.forward(state.psi2, h2);
            if (opts.dealias) {
                ws_.dealias(h1);
                ws_.dealias(h2);
            }
            if (s + 1 < block)
                rotate(ws_, h1, h2, opts.dt);
        }
        rotate(ws_, h1, h2, 0.5 * opts.dt);
        done += block;
        ws_.backward(h1, state.psi1);
        ws_.backward(h2, state.psi2);
        const double t_now = done * opts.dt;
        if (!state.finite()) {
            st.aborted = true;
            st.abort_time = t_now;
            state = last_good;
            break;
        }
        last_good = state;
        for (const auto& f : observers)
            f(t_now, state);
    }
    st.steps = done;
    st.energy_final = energy(ws_, state);
    if (stats)
        *stats = st;
    (void)g;
    return state;
}

FieldPair Evolver::evolve_linearized(const FieldPair& u0, const ParamPath& path,
                                     const RadialProfile& q, double T, const EvolveOptions& opts,
                                     const std::vector<ScaledObserver>& observers,
                                     double* final_log_scale)
{
    if (!(opts.dt > 0))
        throw std::invalid_argument("evolve_linearized: dt must be positive");
    if (opts.dt * max_omega(ws_) > 0.5)
        throw std::invalid_argument("evolve_linearized: dt violates accuracy guard");

    const Grid3& g = ws_.grid();
    const std::size_t nsol = path.n_solitons();

    // per-soliton boosted potential spectra, sampled centered at the origin;
    // refreshed if the path's beta drifts from the sampled one
    std::vector<cvec> vhat(nsol);
    std::vector<Vec3> vhat_beta(nsol);
    auto refresh_potential = [&](std::size_t j, const Vec3& beta) {
        Configuration cfg;
        cfg.grid = g;
        cfg.rho_min = 0.0;
        cfg.solitons = {{1.0, beta, {0, 0, 0}}};
        Field vj = linearized_potential(cfg, q);
        ws_.forward(vj, vhat[j]);
        vhat_beta[j] = beta;
    };
    {
        auto s0 = path.at(0.0);
        for (std::size_t j = 0; j < nsol; ++j)
            refresh_potential(j, s0.betas[j]);
    }

    const long total_steps = std::lround(T / opts.dt);
    const long obs_stride = std::max(1L, std::lround(opts.observer_dt / opts.dt));

    FieldPair state = u0;
    double log_scale = 0.0;
    for (const auto& f : observers)
        f(0.0, state, log_scale);

    cvec h1, h2, vh(ws_.nc());
    Field vfield(g);
    ws_.forward(state.psi1, h1);
    ws_.forward(state.psi2, h2);

    long done = 0;
    while (done < total_steps) {
        const long block = std::min(obs_stride, total_steps - done);
        rotate(ws_, h1, h2, 0.5 * opts.dt);
        for (long s = 0; s < block; ++s) {
            const double t_mid = (done + s) * opts.dt + 0.5 * opts.dt;
            const auto ps = path.at(t_mid);
            for (std::size_t j = 0; j < nsol; ++j) {
                Vec3 db{ps.betas[j][0] - vhat_beta[j][0], ps.betas[j][1] - vhat_beta[j][1],
                        ps.betas[j][2] - vhat_beta[j][2]};
                if (norm(db) > 1e-3)
                    refresh_potential(j, ps.betas[j]);
            }
            // V(t_mid) = sum_j shift(V_j, y_j): accumulate phases in spectral space
            std::fill(vh.begin(), vh.end(), SpectralWorkspace::cplx(0.0));
            ws_.for_each_mode([&](std::size_t idx, double kx, double ky, double kz) {
                SpectralWorkspace::cplx acc(0.0);
                for (std::size_t j = 0; j < nsol; ++j) {
                    const double ph = kx * ps.centers[j][0] + ky * ps.centers[j][1] +
                                      kz * ps.centers[j][2];
                    acc += vhat[j][idx] * SpectralWorkspace::cplx(std::cos(ph), -std::sin(ph));
                }
                vh[idx] = acc;
            });
            ws_.backward(vh, vfield);

            ws_.backward(h1, state.psi1);
            ws_.backward(h2, state.psi2);
            for (std::size_t i = 0; i < state.psi1.size(); ++i)
                state.psi2[i] += opts.dt * (-vfield[i]) * state.psi1[i];
            ws_.forward(state.psi1, h1);
            ws_.forward(state.psi2, h2);
            if (opts.dealias) {
                ws_.dealias(h1);
                ws_.dealias(h2);
            }
            if (s + 1 < block)
                rotate(ws_, h1, h2, opts.dt);
        }
        rotate(ws_, h1, h2, 0.5 * opts.dt);
        done += block;
        ws_.backward(h1, state.psi1);
        ws_.backward(h2, state.psi2);
        if (!state.finite())
            throw std::runtime_error("evolve_linearized: non-finite state");
        // renormalize to keep the exponentially growing mode representable
        const double nrm = l2_norm(state);
        if (nrm > 1e8) {
            scale(state, 1.0 / nrm);
            log_scale += std::log(nrm);
            ws_.forward(state.psi1, h1);
            ws_.forward(state.psi2, h2);
        }
        for (const auto& f : observers)
            f(done * opts.dt, state, log_scale);
    }
    if (final_log_scale)
        *final_log_scale = log_scale;
    return state;
}

} // namespace kgms
