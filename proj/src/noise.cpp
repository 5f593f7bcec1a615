#include "sburgers/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sburgers {

Eigen::ArrayXd convolution_variance(Index m, double t) {
  if (!(t >= 0.0)) throw std::domain_error("convolution_variance: t must be >= 0");
  const Eigen::ArrayXd lambda = eigenvalues(m);
  Eigen::ArrayXd out(m);
  for (Index k = 0; k < m; ++k) out[k] = -std::expm1(2.0 * lambda[k] * t) / (-2.0 * lambda[k]);
  return out;
}

OuTransition::OuTransition(Index m, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::domain_error("OuTransition: dt must be > 0");
  if (m <= 0) throw std::domain_error("OuTransition: m must be positive");
  decay_ = (eigenvalues(m) * dt).exp();
  stddev_ = convolution_variance(m, dt).sqrt();
}

void OuTransition::sample(SpectralField& state, RngStream& rng) const {
  for (Index k = 0; k < decay_.size(); ++k) state[k] = decay_[k] * state[k] + stddev_[k] * rng.normal();
}

SpectralField ou_transition_sample(const SpectralField& state, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw std::domain_error("ou_transition_sample: dt must be > 0");
  SpectralField out = state;
  OuTransition(state.size(), dt).sample(out, rng);
  return out;
}

double qt_quadratic_form(const SpectralField& h, double t) {
  if (!(t >= 0.0)) throw std::domain_error("qt_quadratic_form: t must be >= 0");
  return (h.array().square() * convolution_variance(h.size(), t)).sum();
}

}  // namespace sburgers
