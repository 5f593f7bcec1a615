#pragma once

// Exponential Euler integration of the Galerkin stochastic Burgers system
//   dX = (A X + b_m(X)) dt + P_m dW.
// One step: X <- e^{dt A}(X + dt b_m(X)) + W_A(dt), with the linear and
// noise parts sampled exactly.

#include "sburgers/errors.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sburgers {

struct SimConfig {
  Index m = 32;
  double dt = 1e-3;
  double T = 1.0;
  bool drift_enabled = true;
  /// Test hook: false switches the noise off (deterministic dynamics).
  bool noise_enabled = true;
  Index record_stride = 1;
  /// Quadrature nodes for K0 pairings; 0 selects Quadrature::default_for(m).
  Index quadrature_points = 0;
  std::uint64_t master_seed = 20240611;
  /// Worker threads for Monte Carlo fan-out. Results do not depend on it.
  int workers = 1;

  /// Throws ConfigError on violated invariants.
  void validate() const;
  Quadrature quadrature() const;
  /// Number of dt steps covering duration t; throws ConfigError unless
  /// t/dt is an integer within 1e-9.
  std::size_t steps_for(double t) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;

  std::size_t size() const { return times.size(); }
  const SpectralField& terminal() const { return states.back(); }
};

/// Reusable integrator for one configuration. Immutable and shareable across
/// threads; per-call scratch lives in Workspace.
class Stepper {
 public:
  struct Workspace {
    SpectralField drift;
    SpectralField previous;
    Eigen::VectorXd grid;
  };

  explicit Stepper(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  Workspace make_workspace() const;

  /// One step from time t_now. Throws IntegrationError (time t_now + dt,
  /// last finite state = input) if the result is not finite.
  void step(SpectralField& state, double t_now, RngStream& rng, Workspace& ws) const;

  /// Advances by `duration`. With the drift disabled the exact OU law over
  /// the whole interval is sampled in one jump; otherwise duration/dt steps.
  void advance(SpectralField& state, double t_now, double duration, RngStream& rng, Workspace& ws) const;

  /// Runs `steps` steps, calling obs(step_index, time, state) after each one.
  template <typename Observer>
  void run(SpectralField& state, std::size_t steps, double t0, RngStream& rng, Workspace& ws, Observer&& obs) const {
    double t = t0;
    for (std::size_t i = 1; i <= steps; ++i) {
      step(state, t, rng, ws);
      t = t0 + static_cast<double>(i) * cfg_.dt;
      obs(i, t, state);
    }
  }

 private:
  SimConfig cfg_;
  GalerkinDrift drift_;
  OuTransition ou_;
};

SpectralField step(const SpectralField& state, const SimConfig& cfg, RngStream& rng);

/// Trajectory over [0, cfg.T], recorded every cfg.record_stride steps (the
/// terminal state is always recorded). Throws IntegrationError on blow-up.
Trajectory simulate(const SpectralField& x0, const SimConfig& cfg, RngStream& rng);

Trajectory simulate_deterministic_burgers(const SpectralField& x0, SimConfig cfg);

// Export. CSV columns: t,c_1..c_m. Binary: magic "SBTR", u32 version = 1,
// u64 m, u64 count, then count rows of (t, c_1..c_m) as little-endian f64.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_binary(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_binary(std::istream& is);

}  // namespace sburgers
