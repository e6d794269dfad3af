#include "sclaw/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sclaw/errors.hpp"
#include "sclaw/numerics.hpp"

namespace sclaw {

double courant_number(const ScalarField& field, const FluxModel& flux, double scale, double dt) {
  return std::fabs(scale) * flux.max_speed(field.min(), field.max()) * dt / field.grid().dx();
}

ScalarField deterministic_step(const ScalarField& field, const FluxModel& flux, double scale, double dt,
                               double cfl_limit) {
  const double courant = courant_number(field, flux, scale, dt);
  if (!(courant <= cfl_limit)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "CFL violation: Courant number " << courant << " exceeds " << cfl_limit;
    throw NumericalFailure(msg.str());
  }
  const auto u = field.values();
  const int M = field.grid().cells();
  const double lambda = scale * dt / field.grid().dx();

  // face[i] = F_{i-1/2} = F(u_{i-1}, u_i)
  std::vector<double> face(M);
  for (int i = 0; i < M; ++i) face[i] = flux.engquist_osher(u[(i + M - 1) % M], u[i]);

  std::vector<double> out(M);
  for (int i = 0; i < M; ++i) out[i] = u[i] - lambda * (face[(i + 1) % M] - face[i]);
  return FieldBuilder(field.grid(), std::move(out)).build();
}

ScalarField flux_substep(const ScalarField& field, const FluxModel& flux, double scale, double dt, double cfl) {
  const double courant = courant_number(field, flux, scale, dt);
  // The monotone scheme keeps the state inside [min, max], so one estimate covers every piece.
  const int pieces = std::max(1, static_cast<int>(std::ceil(courant / cfl * (1.0 + 1e-12))));
  const double h = dt / pieces;
  ScalarField u = field;
  for (int p = 0; p < pieces; ++p) u = deterministic_step(u, flux, scale, h, cfl * (1.0 + 1e-9));
  return u;
}

ScalarField stochastic_substep(const ScalarField& field, const NoiseModel& noise, double amp,
                               std::span<const double> increments) {
  if (increments.size() != static_cast<std::size_t>(noise.K()))
    throw PreconditionError("stochastic_substep: need one increment per noise mode");
  if (amp == 0.0) return field;
  const auto& grid = field.grid();
  std::vector<double> out(field.values().begin(), field.values().end());
  for (int i = 0; i < grid.cells(); ++i) {
    const double x = grid.center(i), ui = out[i];
    double s = 0.0;
    for (int k = 0; k < noise.K(); ++k) s += noise.g(k, x, ui) * increments[k];
    out[i] = ui + amp * s;
  }
  return FieldBuilder(grid, std::move(out)).build();
}

double stable_dt(std::span<const ScalarField* const> fields, const FluxModel& flux, double scale, double cfl) {
  double speed = 0.0;
  double dx = 1.0;
  for (const auto* f : fields) {
    speed = std::max(speed, flux.max_speed(f->min(), f->max()));
    dx = f->grid().dx();
  }
  speed *= std::fabs(scale);
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * dx / speed;
}

Trajectory evolve_deterministic(const ScalarField& eta, const FluxModel& flux, double scale, double horizon,
                                double cfl) {
  Trajectory traj(eta.grid());
  traj.append(0.0, eta);
  ScalarField u = eta;
  double t = 0.0;
  while (t < horizon) {
    const ScalarField* fs[] = {&u};
    double dt = std::min(stable_dt(fs, flux, scale, cfl), horizon - t);
    if (horizon - t - dt < 1e-14 * horizon) dt = horizon - t;
    u = deterministic_step(u, flux, scale, dt, cfl * (1.0 + 1e-9));
    t = (dt == horizon - t) ? horizon : t + dt;
    traj.append(t, u);
  }
  return traj;
}

namespace {

struct Equation {
  const FluxModel* flux;  // null for the flux-free equation
  double flux_scale;
  double noise_amp;
};

ScalarField split_step(const ScalarField& u, const Equation& eq, const NoiseModel& noise, Splitting splitting,
                       double cfl, double dt, std::span<const double> increments) {
  if (eq.flux == nullptr) return stochastic_substep(u, noise, eq.noise_amp, increments);
  if (splitting == Splitting::lie) {
    auto w = flux_substep(u, *eq.flux, eq.flux_scale, dt, cfl);
    return stochastic_substep(w, noise, eq.noise_amp, increments);
  }
  auto w = flux_substep(u, *eq.flux, eq.flux_scale, 0.5 * dt, cfl);
  w = stochastic_substep(w, noise, eq.noise_amp, increments);
  return flux_substep(w, *eq.flux, eq.flux_scale, 0.5 * dt, cfl);
}

// Integrates one or two equations on a shared increment sequence.
// `time_unit` maps step n to physical time n*dt; the final time is pinned to `horizon`.
std::vector<Trajectory> integrate(const ScalarField& eta, std::span<const Equation> eqs, const NoiseModel& noise,
                                  const NoisePath& path, int steps, double dt, double horizon, Splitting splitting,
                                  double cfl, int save_stride, const CoupledObserver* observer) {
  std::vector<ScalarField> state(eqs.size(), eta);
  std::vector<Trajectory> trajs(eqs.size(), Trajectory(eta.grid()));
  for (auto& tr : trajs) tr.append(0.0, eta);

  std::vector<double> incr(noise.K());
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    path.fill(static_cast<std::uint32_t>(n), incr);
    if (observer != nullptr && *observer) (*observer)(n, t, dt, state[0], state[state.size() - 1], incr);
    try {
      for (std::size_t e = 0; e < eqs.size(); ++e)
        state[e] = split_step(state[e], eqs[e], noise, splitting, cfl, dt, incr);
    } catch (const NumericalFailure& err) {
      throw NumericalFailure(std::string(err.what()) + " (path " + std::to_string(path.path_index()) + ", step " +
                                 std::to_string(n) + ")",
                             path.path_index(), n);
    }
    const int done = n + 1;
    if (done == steps || done % save_stride == 0) {
      const double tn = done == steps ? horizon : done * dt;
      for (std::size_t e = 0; e < eqs.size(); ++e) trajs[e].append(tn, state[e]);
    }
  }
  return trajs;
}

}  // namespace

Trajectory solve_scaled_spde(const ScalarField& eta, const SimConfig& cfg, const FluxModel& flux,
                             const NoiseModel& noise, std::uint32_t path_index, Stream stream) {
  cfg.validate();
  const int steps = cfg.steps();
  const double dt = cfg.step_size();
  const Equation eq{&flux, cfg.epsilon, std::sqrt(cfg.epsilon)};
  const NoisePath path(cfg.seed, stream, path_index, dt);
  return std::move(integrate(eta, std::span(&eq, 1), noise, path, steps, dt, cfg.horizon, cfg.splitting, cfg.cfl,
                             cfg.save_stride, nullptr)
                       .front());
}

Trajectory solve_flux_free(const ScalarField& eta, const SimConfig& cfg, const NoiseModel& noise,
                           std::uint32_t path_index, Stream stream) {
  cfg.validate();
  const int steps = cfg.steps();
  const double dt = cfg.step_size();
  const Equation eq{nullptr, 0.0, std::sqrt(cfg.epsilon)};
  const NoisePath path(cfg.seed, stream, path_index, dt);
  return std::move(integrate(eta, std::span(&eq, 1), noise, path, steps, dt, cfg.horizon, cfg.splitting, cfg.cfl,
                             cfg.save_stride, nullptr)
                       .front());
}

std::pair<Trajectory, Trajectory> coupled_pair(const ScalarField& eta, const SimConfig& cfg, const FluxModel& flux,
                                               const NoiseModel& noise, std::uint32_t path_index,
                                               const CoupledObserver& observer) {
  cfg.validate();
  const int steps = cfg.steps();
  const double dt = cfg.step_size();
  const double amp = std::sqrt(cfg.epsilon);
  const Equation eqs[] = {{&flux, cfg.epsilon, amp}, {nullptr, 0.0, amp}};
  const NoisePath path(cfg.seed, Stream::primary, path_index, dt);
  auto trajs = integrate(eta, eqs, noise, path, steps, dt, cfg.horizon, cfg.splitting, cfg.cfl, cfg.save_stride,
                         &observer);
  return {std::move(trajs[0]), std::move(trajs[1])};
}

ScalarField solve_base_small_time(const ScalarField& eta, double epsilon, const SimConfig& cfg,
                                  const FluxModel& flux, const NoiseModel& noise, std::uint32_t path_index,
                                  Stream stream) {
  cfg.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw PreconditionError("solve_base_small_time: epsilon must lie in (0,1]");
  const int steps = cfg.steps();
  const double dt_base = epsilon * cfg.step_size();
  const Equation eq{&flux, 1.0, 1.0};
  const NoisePath path(cfg.seed, stream, path_index, dt_base);
  auto trajs = integrate(eta, std::span(&eq, 1), noise, path, steps, dt_base, epsilon * cfg.horizon, cfg.splitting,
                         cfg.cfl, steps, nullptr);
  return trajs.front().back();
}

namespace {

void rk4_cells(std::vector<double>& u, const TorusGrid& grid, const NoiseModel& noise, std::span<const double> h,
               double dt) {
  const int K = noise.K();
  auto rhs = [&](double x, double v) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += noise.g(k, x, v) * h[k];
    return s;
  };
  for (int i = 0; i < grid.cells(); ++i) {
    const double x = grid.center(i), v = u[i];
    const double k1 = rhs(x, v);
    const double k2 = rhs(x, v + 0.5 * dt * k1);
    const double k3 = rhs(x, v + 0.5 * dt * k2);
    const double k4 = rhs(x, v + dt * k3);
    u[i] = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace

Trajectory solve_skeleton(const ScalarField& eta, const Control& h, const NoiseModel& noise,
                          std::span<const double> times) {
  if (h.modes() != noise.K()) throw PreconditionError("solve_skeleton: control modes must match noise modes");
  if (times.size() < 2 || times.front() != 0.0) throw PreconditionError("solve_skeleton: time grid must start at 0");
  Trajectory traj(eta.grid());
  traj.append(0.0, eta);
  std::vector<double> u(eta.values().begin(), eta.values().end());
  std::vector<double> hk(noise.K());
  for (std::size_t n = 0; n + 1 < times.size(); ++n) {
    const double dt = times[n + 1] - times[n];
    // h is constant over the step, taken from the bin holding the step midpoint.
    const int b = h.bin_of(times[n] + 0.5 * dt);
    for (int k = 0; k < noise.K(); ++k) hk[k] = h.at(k, b);
    rk4_cells(u, eta.grid(), noise, hk, dt);
    traj.append(times[n + 1], FieldBuilder(eta.grid(), u).build());
  }
  return traj;
}

Trajectory solve_skeleton(const ScalarField& eta, const Control& h, const NoiseModel& noise, int steps) {
  if (steps < h.bins()) throw PreconditionError("solve_skeleton: steps must be >= number of control bins");
  std::vector<double> times(steps + 1);
  for (int n = 0; n <= steps; ++n) times[n] = static_cast<double>(n) / steps;
  return solve_skeleton(eta, h, noise, times);
}

double lp_moment(const Trajectory& traj, double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw PreconditionError("lp_moment: p must be finite and positive");
  const double dx = traj.grid().dx();
  double best = 0.0;
  for (const auto& f : traj.fields()) {
    NeumaierSum s;
    for (double v : f.values()) s += std::pow(std::fabs(v), p);
    best = std::max(best, s.value() * dx);
  }
  return best;
}

}  // namespace sclaw
