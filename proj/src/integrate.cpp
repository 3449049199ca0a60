#include "tbhiv/integrate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbhiv {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

[[noreturn]] void abort_nonfinite(const char* what, double t) {
  throw std::runtime_error(std::string(what) +
                           " became non-finite at t = " + std::to_string(t));
}

}  // namespace

TimeGrid::TimeGrid(double t0_, double t_end_, int n_steps_)
    : t0(t0_), t_end(t_end_), n_steps(n_steps_) {
  if (!(t_end > t0) || n_steps < 1 || !std::isfinite(t0) || !std::isfinite(t_end))
    throw std::invalid_argument("TimeGrid: need t_end > t0 and n_steps >= 1");
}

Trajectory integrate_forward(const OdeRhs& rhs, std::span<const double> x0,
                             const TimeGrid& grid) {
  const int dim = static_cast<int>(x0.size());
  const double h = grid.step();

  Trajectory traj;
  traj.grid = grid;
  traj.values.reserve(grid.n_nodes());
  traj.values.emplace_back(x0.begin(), x0.end());
  if (!all_finite(traj.values.front())) abort_nonfinite("initial state", grid.t0);

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), stage(dim), x(x0.begin(), x0.end());

  for (int i = 0; i < grid.n_steps; ++i) {
    const double t = grid.time_at(i);

    rhs(t, x, k1);
    if (!all_finite(k1)) abort_nonfinite("rhs stage 1", t);

    for (int d = 0; d < dim; ++d) stage[d] = x[d] + 0.5 * h * k1[d];
    rhs(t + 0.5 * h, stage, k2);
    if (!all_finite(k2)) abort_nonfinite("rhs stage 2", t + 0.5 * h);

    for (int d = 0; d < dim; ++d) stage[d] = x[d] + 0.5 * h * k2[d];
    rhs(t + 0.5 * h, stage, k3);
    if (!all_finite(k3)) abort_nonfinite("rhs stage 3", t + 0.5 * h);

    for (int d = 0; d < dim; ++d) stage[d] = x[d] + h * k3[d];
    rhs(t + h, stage, k4);
    if (!all_finite(k4)) abort_nonfinite("rhs stage 4", t + h);

    for (int d = 0; d < dim; ++d)
      x[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    if (!all_finite(x)) abort_nonfinite("state", grid.time_at(i + 1));
    traj.values.push_back(x);
  }
  return traj;
}

Trajectory integrate_backward(const AdjointOdeRhs& rhs,
                              std::span<const double> lam_end,
                              const Trajectory& state, const TimeGrid& grid) {
  if (state.values.size() != static_cast<size_t>(grid.n_nodes()))
    throw std::invalid_argument(
        "integrate_backward: state trajectory is not on the given grid");
  const int dim = static_cast<int>(lam_end.size());
  const double h = grid.step();

  Trajectory traj;
  traj.grid = grid;
  traj.values.assign(grid.n_nodes(), std::vector<double>(dim));
  traj.values.back().assign(lam_end.begin(), lam_end.end());
  if (!all_finite(traj.values.back()))
    abort_nonfinite("terminal costate", grid.t_end);

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), stage(dim);
  std::vector<double> xmid(state.dim());
  std::vector<double> lam(lam_end.begin(), lam_end.end());

  for (int i = grid.n_steps - 1; i >= 0; --i) {
    const double t_hi = grid.time_at(i + 1);
    const std::vector<double>& x_lo = state.values[i];
    const std::vector<double>& x_hi = state.values[i + 1];
    for (size_t d = 0; d < xmid.size(); ++d)
      xmid[d] = 0.5 * (x_lo[d] + x_hi[d]);

    rhs(t_hi, lam, x_hi, k1);
    if (!all_finite(k1)) abort_nonfinite("adjoint rhs stage 1", t_hi);

    for (int d = 0; d < dim; ++d) stage[d] = lam[d] - 0.5 * h * k1[d];
    rhs(t_hi - 0.5 * h, stage, xmid, k2);
    if (!all_finite(k2)) abort_nonfinite("adjoint rhs stage 2", t_hi - 0.5 * h);

    for (int d = 0; d < dim; ++d) stage[d] = lam[d] - 0.5 * h * k2[d];
    rhs(t_hi - 0.5 * h, stage, xmid, k3);
    if (!all_finite(k3)) abort_nonfinite("adjoint rhs stage 3", t_hi - 0.5 * h);

    for (int d = 0; d < dim; ++d) stage[d] = lam[d] - h * k3[d];
    rhs(grid.time_at(i), stage, x_lo, k4);
    if (!all_finite(k4)) abort_nonfinite("adjoint rhs stage 4", grid.time_at(i));

    for (int d = 0; d < dim; ++d)
      lam[d] -= h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    if (!all_finite(lam)) abort_nonfinite("costate", grid.time_at(i));
    traj.values[i] = lam;
  }
  return traj;
}

}  // namespace tbhiv
