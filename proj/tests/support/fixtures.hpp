// Shared lazily-computed fixtures for the unit suites.
#pragma once

#include "kgms/radial.hpp"

namespace kgms::testsupport {

inline const GroundStateResult& ground_state()
{
    static GroundStateResult gs = solve_ground_state(1e-10, 20.0);
    return gs;
}

inline const NegativeEigenSolve& eigenpair()
{
    static NegativeEigenSolve s = solve_negative_eigenpair(ground_state().profile, 1e-6);
    return s;
}

} // namespace kgms::testsupport
