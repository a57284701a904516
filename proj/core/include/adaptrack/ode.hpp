#pragma once

#include <functional>
#include <vector>

#include "adaptrack/types.hpp"

namespace adaptrack {

using VectorField = std::function<Vec(double, const Vec&)>;

// One classical 4th-order Runge-Kutta step from (t, x) with step h (h may be
// negative). Throws NumericalBlowup if any stage produces a non-finite value.
Vec rk4_step(const VectorField& f, double t, const Vec& x, double h);

// Integrates from grid.t_end() down to grid.t_start() and returns x at every
// grid node, indexed by node (result[k] is the state at grid.node(k)).
std::vector<Vec> integrate_backward(const VectorField& f, const TimeGrid& grid,
                                    const Vec& x_terminal);

// Forward companion of integrate_backward; result[k] is x at grid.node(k).
std::vector<Vec> integrate_forward(const VectorField& f, const TimeGrid& grid,
                                   const Vec& x_initial);

}  // namespace adaptrack
