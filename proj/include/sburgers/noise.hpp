#pragma once

// Stochastic convolution W_A for space-time white noise projected on m modes.
// Mode k is an independent scalar OU process dY = lambda_k Y dt + dbeta_k,
// so the transition over dt is Gaussian and sampled exactly.

#include "sburgers/rng.hpp"
#include "sburgers/spectral.hpp"

namespace sburgers {

/// Per-mode variance of the stochastic convolution at time t:
/// (1 - e^{2 lambda_k t}) / (2 |lambda_k|), computed with expm1.
Eigen::ArrayXd convolution_variance(Index m, double t);

/// Exact OU transition over a fixed dt for m modes. Immutable, shareable.
class OuTransition {
 public:
  OuTransition(Index m, double dt);

  Index modes() const { return decay_.size(); }
  double dt() const { return dt_; }
  const Eigen::ArrayXd& decay() const { return decay_; }
  const Eigen::ArrayXd& stddev() const { return stddev_; }

  /// state <- e^{dt A} state + W_A(dt), in place.
  void sample(SpectralField& state, RngStream& rng) const;
  /// state <- e^{dt A} state (noise switched off).
  void decay_only(SpectralField& state) const { state.array() *= decay_; }

 private:
  double dt_;
  Eigen::ArrayXd decay_;
  Eigen::ArrayXd stddev_;
};

SpectralField ou_transition_sample(const SpectralField& state, double dt, RngStream& rng);

/// <Q_t h, h> = sum_k h_k^2 (1 - e^{2 lambda_k t}) / (2 |lambda_k|).
double qt_quadratic_form(const SpectralField& h, double t);

}  // namespace sburgers
