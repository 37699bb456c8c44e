// multisoliton.cpp
#include "kgms/multisoliton.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kgms {

void Configuration::validate() const
{
    grid.validate();
    if (solitons.empty())
        throw std::invalid_argument("Configuration: need at least one soliton");
    for (std::size_t j = 0; j < solitons.size(); ++j) {
        const auto& s = solitons[j];
        if (std::abs(std::abs(s.sigma) - 1.0) > 1e-12)
            throw std::invalid_argument("Configuration: sigma must be +1 or -1");
        if (dot(s.beta, s.beta) >= 1.0)
            throw std::invalid_argument("Configuration: |beta| must be < 1 (soliton " +
                                        std::to_string(j) + ")");
    }
    for (std::size_t j = 0; j < solitons.size(); ++j)
        for (std::size_t k = j + 1; k < solitons.size(); ++k) {
            Vec3 db{solitons[j].beta[0] - solitons[k].beta[0],
                    solitons[j].beta[1] - solitons[k].beta[1],
                    solitons[j].beta[2] - solitons[k].beta[2]};
            if (norm(db) < 1e-12)
                throw std::invalid_argument("Configuration: betas must be pairwise distinct");
            // periodic images interact through the torus, so check wrapped distance
            Vec3 dy{grid.wrap(solitons[j].center[0] - solitons[k].center[0], 0),
                    grid.wrap(solitons[j].center[1] - solitons[k].center[1], 1),
                    grid.wrap(solitons[j].center[2] - solitons[k].center[2], 2)};
            if (norm(dy) < rho_min)
                throw std::invalid_argument("Configuration: pairwise torus distance below rho_min");
        }
}

FieldPair assemble(const Configuration& cfg, const RadialProfile& q, AssembleReport* report)
{
    cfg.validate();
    FieldPair out(cfg.grid);
    AssembleReport agg;
    for (const auto& s : cfg.solitons) {
        BoundaryReport br;
        FieldPair one = boosted_soliton(q, BoostParams::make(s.beta), cfg.grid, s.center,
                                        report ? &br : nullptr);
        axpy(out, s.sigma, one);
        if (report) {
            agg.worst_boundary_amplitude = std::max(agg.worst_boundary_amplitude,
                                                    br.boundary_amplitude);
            agg.within_tolerance = agg.within_tolerance && br.within_tolerance;
        }
    }
    if (report)
        *report = agg;
    return out;
}

bool separation_check(const std::vector<Vec3>& y_in, const std::vector<Vec3>& beta_in,
                      double delta, double rho)
{
    if (y_in.size() != beta_in.size())
        throw std::invalid_argument("separation_check: size mismatch");
    if (!(delta > 0) || !(rho > 0))
        throw std::invalid_argument("separation_check: delta, rho must be positive");
    const std::size_t n = y_in.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k) {
            Vec3 dy{y_in[j][0] - y_in[k][0], y_in[j][1] - y_in[k][1], y_in[j][2] - y_in[k][2]};
            Vec3 db{beta_in[j][0] - beta_in[k][0], beta_in[j][1] - beta_in[k][1],
                    beta_in[j][2] - beta_in[k][2]};
            if (norm(db) < 1e-14)
                throw std::invalid_argument("separation_check: betas must be distinct");
            // need g(t) = |dy + db t|^2 - (delta t + rho)^2 >= 0 for all t >= 0;
            // both sides nonnegative so the squared comparison is equivalent
            const double a = dot(db, db) - delta * delta;
            const double b = 2.0 * (dot(dy, db) - delta * rho);
            const double c = dot(dy, dy) - rho * rho;
            if (c < 0)
                return false;               // violated at t = 0
            if (a < 0)
                return false;               // |db| < delta loses for large t
            if (a == 0.0) {
                if (b < 0)
                    return false;
                continue;
            }
            const double t_star = -b / (2.0 * a);
            if (t_star > 0 && c - b * b / (4.0 * a) < 0)
                return false;
        }
    return true;
}

FieldPair interaction_term(const Configuration& cfg, const RadialProfile& q)
{
    cfg.validate();
    FieldPair out(cfg.grid);
    Field sum(cfg.grid), cubes(cfg.grid);
    for (const auto& s : cfg.solitons) {
        FieldPair one = boosted_soliton(q, BoostParams::make(s.beta), cfg.grid, s.center);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            const double v = s.sigma * one.psi1[i];
            sum[i] += v;
            cubes[i] += v * v * v;
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i)
        out.psi2[i] = sum[i] * sum[i] * sum[i] - cubes[i];
    return out;
}

Field linearized_potential(const Configuration& cfg, const RadialProfile& q)
{
    cfg.validate();
    Field v(cfg.grid);
    const Grid3& g = cfg.grid;
    const int n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
    for (const auto& s : cfg.solitons) {
        const BoostParams bp = BoostParams::make(s.beta);
#pragma omp parallel for collapse(2)
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) {
                    const Vec3 x{g.coord(i, 0), g.coord(j, 1), g.coord(k, 2)};
                    Vec3 d{g.wrap(x[0] - s.center[0], 0), g.wrap(x[1] - s.center[1], 1),
                           g.wrap(x[2] - s.center[2], 2)};
                    Vec3 z = bp.boost_point(d);
                    const double Q = q.evaluate(norm(z));
                    v[g.index(i, j, k)] += -3.0 * Q * Q;
                }
    }
    return v;
}

} // namespace kgms
