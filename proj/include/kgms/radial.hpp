// radial.hpp
// Ground state Q of  -Q'' - (2/r) Q' + Q - Q^3 = 0  and the radial spectral
// data of L = -Delta + 1 - 3 Q^2: the single negative eigenpair, the l=1
// translation zero mode, and a gap scan over low angular sectors.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kgms {

// Sampled radial function with an exponential-tail continuation
// value(r) ~ tail_amp * exp(-tail_rate r)/r  for r > r_mesh.back().
struct RadialProfile {
    std::vector<double> r_mesh;            // strictly increasing, r_mesh[0] = 0
    std::vector<double> values;
    std::vector<double> derivative_samples;
    double tail_amp = 0.0;
    double tail_rate = 1.0;

    double r_max() const { return r_mesh.back(); }

    double evaluate(double r) const;        // >= 4th-order local interpolation
    double evaluate_deriv(double r) const;
    double evaluate_deriv2(double r) const;
    double evaluate_deriv3(double r) const;
};

struct EigenPair {
    double lambda = 0.0;
    RadialProfile profile;
    int l_sector = 0;
    double l2_norm = 1.0;   // 3D norm sqrt(int f^2 4 pi r^2 dr) after normalization
};

struct BracketStep {
    double lo, hi;
    int classification;     // sign returned by the shooting classifier at the midpoint
};

// Thrown when the bisection cannot close the bracket; carries the history.
struct ShootingFailure : std::runtime_error {
    std::vector<BracketStep> history;
    explicit ShootingFailure(const std::string& msg, std::vector<BracketStep> h)
        : std::runtime_error(msg), history(std::move(h)) {}
};

struct GroundStateResult {
    RadialProfile profile;
    double center_value = 0.0;              // Q(0)
    std::vector<BracketStep> bracket_history;
    double polish_residual = 0.0;            // sup residual of the collocation polish
};

// h_max controls the outer mesh spacing (default matches production use;
// tests halve it for convergence-order measurements).
GroundStateResult solve_ground_state(double tol, double r_max, double h_max = 0.005);

double evaluate_profile(const RadialProfile& p, double r);

// 4 pi int [ (Q'^2 + Q^2)/2 - Q^4/4 ] r^2 dr  on the profile mesh.
double ground_state_energy(const RadialProfile& p);

// 4 pi int f g r^2 dr (order-4 composite quadrature on the profile mesh).
double radial_inner(const std::vector<double>& r, const std::vector<double>& f,
                    const std::vector<double>& g);

struct NegativeEigenSolve {
    EigenPair pair;                 // lambda = -nu^2, profile = phi (normalized)
    double lambda_matrix = 0.0;     // Richardson-extrapolated matrix value
    double lambda_shooting = 0.0;   // independent shooting value
    double residual = 0.0;          // ||L phi - lambda phi|| / ||phi|| on the mesh
    int negative_count = 0;         // # of negative l=0 eigenvalues found
};

// Exactly one negative eigenvalue is expected; anything else throws
// spectral_assumption_error (it would indicate a solver bug).
struct spectral_assumption_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

NegativeEigenSolve solve_negative_eigenpair(const RadialProfile& q, double tol);

struct ZeroModeReport {
    double residual_rel_l2 = 0.0;   // ||L^{(l=1)} Q'|| / ||Q'|| (radial measure)
    double residual_sup = 0.0;
    double eigenvalue_estimate = 0.0;
};

ZeroModeReport verify_zero_mode(const RadialProfile& q, double tol);

struct GapEigenvalue {
    int l = 0;
    double lambda = 0.0;
    bool resolution_stable = false; // survives mesh halving to 1e-3
    bool is_zero_mode = false;      // the l=1 translation eigenvalue
};

struct GapScanResult {
    double nu2 = 0.0;
    std::vector<GapEigenvalue> found;   // everything located in (-nu^2, 1)
};

GapScanResult gap_scan(const RadialProfile& q, int l_max);

// Sup-norm ODE residual of a ground-state profile, measured with 7-point
// stencils (independent of the 9-point operator the polish solves).
double ground_state_residual_sup(const RadialProfile& p);

} // namespace kgms
