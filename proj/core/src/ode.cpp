#include "adaptrack/ode.hpp"

#include "adaptrack/errors.hpp"

namespace adaptrack {

namespace {

const Vec& checked(const Vec& v, double t) {
  if (!v.allFinite()) {
    throw NumericalBlowup("rk4_step: non-finite stage value", t);
  }
  return v;
}

}  // namespace

Vec rk4_step(const VectorField& f, double t, const Vec& x, double h) {
  if (!x.allFinite()) {
    throw NumericalBlowup("rk4_step: non-finite state", t);
  }
  const Vec k1 = checked(f(t, x), t);
  const Vec k2 = checked(f(t + 0.5 * h, x + 0.5 * h * k1), t + 0.5 * h);
  const Vec k3 = checked(f(t + 0.5 * h, x + 0.5 * h * k2), t + 0.5 * h);
  const Vec k4 = checked(f(t + h, x + h * k3), t + h);
  Vec next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw NumericalBlowup("rk4_step: non-finite result", t + h);
  }
  return next;
}

std::vector<Vec> integrate_backward(const VectorField& f, const TimeGrid& grid,
                                    const Vec& x_terminal) {
  if (!x_terminal.allFinite()) {
    throw NumericalBlowup("integrate_backward: non-finite terminal value", grid.t_end());
  }
  std::vector<Vec> table(grid.count());
  table[grid.count() - 1] = x_terminal;
  for (std::size_t k = grid.count() - 1; k > 0; --k) {
    table[k - 1] = rk4_step(f, grid.node(k), table[k], -grid.step());
  }
  return table;
}

std::vector<Vec> integrate_forward(const VectorField& f, const TimeGrid& grid,
                                   const Vec& x_initial) {
  if (!x_initial.allFinite()) {
    throw NumericalBlowup("integrate_forward: non-finite initial value", grid.t_start());
  }
  std::vector<Vec> table(grid.count());
  table[0] = x_initial;
  for (std::size_t k = 0; k + 1 < grid.count(); ++k) {
    table[k + 1] = rk4_step(f, grid.node(k), table[k], grid.step());
  }
  return table;
}

}  // namespace adaptrack
