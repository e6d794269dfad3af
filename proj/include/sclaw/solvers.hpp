#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "sclaw/control.hpp"
#include "sclaw/flux.hpp"
#include "sclaw/grid.hpp"
#include "sclaw/noise.hpp"
#include "sclaw/rng.hpp"
#include "sclaw/sim_config.hpp"

namespace sclaw {

/// Engquist-Osher numerical flux.
inline double eo_flux(double ul, double ur, const FluxModel& flux) { return flux.engquist_osher(ul, ur); }

/// Courant number scale·sup|a|·dt/dx over the range of `field`.
double courant_number(const ScalarField& field, const FluxModel& flux, double scale, double dt);

/// One conservative EO update u_i -= scale·dt/dx·(F_{i+1/2} - F_{i-1/2}).
/// Throws NumericalFailure when the Courant number exceeds `cfl_limit`.
ScalarField deterministic_step(const ScalarField& field, const FluxModel& flux, double scale, double dt,
                               double cfl_limit = 1.0);

/// Flux substep of length dt, sub-cycled so every piece has Courant <= cfl.
ScalarField flux_substep(const ScalarField& field, const FluxModel& flux, double scale, double dt, double cfl);

/// Explicit Euler-Maruyama: u_i += amp·Σ_k g_k(x_i,u_i)·Δβ_k at the pre-update state.
ScalarField stochastic_substep(const ScalarField& field, const NoiseModel& noise, double amp,
                               std::span<const double> increments);

/// Largest dt keeping every field's Courant number at `cfl` (infinite for a zero flux).
double stable_dt(std::span<const ScalarField* const> fields, const FluxModel& flux, double scale, double cfl);

/// Deterministic EO evolution to `horizon` with CFL-limited steps; every step is saved.
Trajectory evolve_deterministic(const ScalarField& eta, const FluxModel& flux, double scale, double horizon,
                                double cfl = 0.45);

/// Observer for coupled paths, called before each step with the pre-step
/// states (u of the scaled equation, v of the flux-free one) and the shared increments.
using CoupledObserver = std::function<void(int step, double t, double dt, const ScalarField& u,
                                           const ScalarField& v, std::span<const double> increments)>;

/// Scaled equation du + ε ∂x A(u) dt = √ε Σ g_k dβ_k on [0, T] by operator splitting.
Trajectory solve_scaled_spde(const ScalarField& eta, const SimConfig& cfg, const FluxModel& flux,
                             const NoiseModel& noise, std::uint32_t path_index, Stream stream = Stream::primary);

/// Flux-free comparison equation dv = √ε Σ g_k dβ_k.
Trajectory solve_flux_free(const ScalarField& eta, const SimConfig& cfg, const NoiseModel& noise,
                           std::uint32_t path_index, Stream stream = Stream::primary);

/// Both equations driven by one NoisePath.
std::pair<Trajectory, Trajectory> coupled_pair(const ScalarField& eta, const SimConfig& cfg, const FluxModel& flux,
                                               const NoiseModel& noise, std::uint32_t path_index,
                                               const CoupledObserver& observer = {});

/// Unscaled equation (ε-free) integrated to time `epsilon` with dt_base = ε·cfg.dt,
/// so its step grid maps one-to-one onto the scaled grid. Returns the endpoint.
ScalarField solve_base_small_time(const ScalarField& eta, double epsilon, const SimConfig& cfg,
                                  const FluxModel& flux, const NoiseModel& noise, std::uint32_t path_index,
                                  Stream stream = Stream::primary);

/// Skeleton ODE du/dt = Σ_k g_k(x,u) h_k(t) on [0,1], cellwise RK4 with `steps` uniform steps.
Trajectory solve_skeleton(const ScalarField& eta, const Control& h, const NoiseModel& noise, int steps);

/// Same on an explicit time grid (first entry 0).
Trajectory solve_skeleton(const ScalarField& eta, const Control& h, const NoiseModel& noise,
                          std::span<const double> times);

/// max over snapshots of ‖u(t)‖_p^p.
double lp_moment(const Trajectory& traj, double p);

}  // namespace sclaw
