// geometry.hpp
// Lorentz boosts of points and radial profiles, the boosted two-component
// soliton state Q_beta = (Q_b, -beta . grad Q_b), and discrete residual
// checks of the traveling-wave identities it satisfies.
#pragma once

#include <array>

#include "kgms/field.hpp"
#include "kgms/radial.hpp"

namespace kgms {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

double lorentz_gamma(const Vec3& beta);   // throws std::domain_error for |beta| >= 1

struct BoostParams {
    Vec3 beta{0, 0, 0};
    double gamma = 1.0;

    static BoostParams make(const Vec3& beta);

    // Lambda_beta x = x + (gamma-1)(beta.x) beta/|beta|^2; identity at beta=0.
    Vec3 boost_point(const Vec3& x) const;

    // |det Lambda_beta| = gamma (volume factor along the boost axis).
    double det() const { return gamma; }
};

struct BoundaryReport {
    double boundary_amplitude = 0.0;  // max |psi1| over the box faces
    bool within_tolerance = true;     // amplitude < 1e-8
};

// Q_beta centered at `center` on the torus (minimal-image displacement).
FieldPair boosted_soliton(const RadialProfile& q, const BoostParams& bp, const Grid3& grid,
                          const Vec3& center, BoundaryReport* report = nullptr);

// Analytic chain-rule gradient samples of the boosted first component.
void boosted_soliton_gradient(const RadialProfile& q, const BoostParams& bp, const Grid3& grid,
                              const Vec3& center, Field out[3]);

// d/dx_m of the boosted state (the translation null direction, exact chain rule).
FieldPair boosted_soliton_dxm(const RadialProfile& q, const BoostParams& bp, const Grid3& grid,
                              const Vec3& center, int m);

// d/dbeta^m of the boosted state by central differences with step h_beta.
FieldPair boosted_soliton_dbeta(const RadialProfile& q, const Vec3& beta, const Grid3& grid,
                                const Vec3& center, int m, double h_beta = 1e-3);

struct VecQEqResidual {
    double rel_l2 = 0.0;      // ||J H0 Q_b + beta.grad Q_b + F(Q_b)|| / ||Q_b||
    double abs_l2 = 0.0;
};

VecQEqResidual vec_q_eq_residual(const RadialProfile& q, const BoostParams& bp,
                                 const Grid3& grid, const Vec3& center);

struct KernelIdentityReport {
    double res_translation = 0.0;   // J H_V (dx_m Q_b) + beta.grad(dx_m Q_b), relative
    double res_boost = 0.0;         // J H_V (db^m Q_b) + beta.grad(db^m Q_b) + dx_m Q_b, relative
    double res_boost_flipped = 0.0; // same with the right side sign flipped (sanity)
};

KernelIdentityReport kernel_identity_check(const RadialProfile& q, const BoostParams& bp,
                                           const Grid3& grid, const Vec3& center, int m,
                                           double h_beta = 1e-3);

} // namespace kgms
