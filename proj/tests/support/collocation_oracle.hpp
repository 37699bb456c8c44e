// Test-only independent oracle: Chebyshev collocation solve of the radial
// ground-state problem, Newton-iterated from a bump initial guess. Shares no
// code path with the production shooting/polish solver.
#pragma once

namespace kgms::testsupport {

struct CollocationSolution {
    double center_value;     // Q(0)
    double final_residual;   // sup |F| at the collocation nodes
    int newton_iters;
};

CollocationSolution chebyshev_ground_state(int n_nodes, double r_max);

} // namespace kgms::testsupport
