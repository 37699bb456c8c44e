// multisoliton.hpp
// Signed superpositions of boosted solitons, the closed-form separation
// condition, the cubic interaction term, and the linearized potential.
#pragma once

#include <vector>

#include "kgms/geometry.hpp"

namespace kgms {

struct SolitonParams {
    double sigma = 1.0;       // +1 or -1
    Vec3 beta{0, 0, 0};       // |beta| < 1
    Vec3 center{0, 0, 0};
};

struct Configuration {
    std::vector<SolitonParams> solitons;
    Grid3 grid;
    double rho_min = 6.0;     // minimal pairwise torus distance admitted

    // Throws std::invalid_argument on |beta| >= 1, duplicate betas (N > 1),
    // or pairwise torus distance below rho_min.
    void validate() const;
};

struct AssembleReport {
    double worst_boundary_amplitude = 0.0;
    bool within_tolerance = true;
};

FieldPair assemble(const Configuration& cfg, const RadialProfile& q,
                   AssembleReport* report = nullptr);

// Def. of the receding-trajectory condition: |y_j(t) - y_k(t)| >= delta t + rho
// for all t >= 0 with y_j(t) = y_j + beta_j t, decided in closed form per pair.
bool separation_check(const std::vector<Vec3>& y_in, const std::vector<Vec3>& beta_in,
                      double delta, double rho);

// (0, (sum_j s_j Q_j)^3 - sum_j (s_j Q_j)^3): the part of F(Q) that couples
// distinct solitons; identically zero for N = 1.
FieldPair interaction_term(const Configuration& cfg, const RadialProfile& q);

// V(x) = sum_j V_{beta_j}(x - y_j), V_beta = -3 Q_beta^2 (nonpositive wells).
Field linearized_potential(const Configuration& cfg, const RadialProfile& q);

} // namespace kgms
