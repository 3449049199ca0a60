#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tbhiv {

// Uniform time grid over [t0, t_end] with n_steps intervals.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 0.0;
  int n_steps = 0;

  TimeGrid() = default;
  // Throws std::invalid_argument unless t_end > t0 and n_steps >= 1.
  TimeGrid(double t0_, double t_end_, int n_steps_);

  double step() const { return (t_end - t0) / n_steps; }
  int n_nodes() const { return n_steps + 1; }
  double time_at(int i) const { return t0 + i * step(); }
};

// Node values of a vector-valued function on a TimeGrid; values.size() is
// grid.n_nodes().
struct Trajectory {
  TimeGrid grid;
  std::vector<std::vector<double>> values;

  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
};

using OdeRhs =
    std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

// Classical fixed-step RK4 from grid.t0 to grid.t_end; values.front() == x0.
// Throws std::runtime_error naming the time if any stage or state goes
// non-finite.
Trajectory integrate_forward(const OdeRhs& rhs, std::span<const double> x0,
                             const TimeGrid& grid);

// Adjoint-style right-hand side: dlam = g(t, lam, x(t)), where x(t) comes
// from a stored forward trajectory.
using AdjointOdeRhs = std::function<void(
    double t, std::span<const double> lam, std::span<const double> x,
    std::span<double> dlam)>;

// RK4 in reversed time from grid.t_end down to grid.t0; values.back() is
// lam_end. State values at half steps are the linear interpolation of the
// two neighbouring stored nodes. The state trajectory must live on the same
// grid.
Trajectory integrate_backward(const AdjointOdeRhs& rhs,
                              std::span<const double> lam_end,
                              const Trajectory& state, const TimeGrid& grid);

}  // namespace tbhiv
