#pragma once

// Weighted particle ensembles standing in for measures on L^6(0,1), their
// pushforward under the Galerkin dynamics, and checks of the weak
// Fokker-Planck identity
//   \int phi d mu_t - \int phi d mu_0 = \int_0^t \int K0 phi d mu_s ds.

#include "sburgers/cylinder.hpp"
#include "sburgers/rng.hpp"
#include "sburgers/solver.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sburgers {

/// Particles are the columns of an m x N matrix. Weights may be signed.
struct ParticleMeasure {
  Eigen::MatrixXd particles;
  Eigen::VectorXd weights;

  ParticleMeasure() = default;
  ParticleMeasure(Eigen::MatrixXd p, Eigen::VectorXd w);

  /// n copies of x with weight 1/n each.
  static ParticleMeasure dirac(const SpectralField& x, Index n);

  Index modes() const { return particles.rows(); }
  Index size() const { return particles.cols(); }
  double total_mass() const;
  /// sum |w_i|
  double total_variation() const;
};

struct MeasurePath {
  std::vector<double> times;
  std::vector<ParticleMeasure> measures;
  /// Particles that blew up; their later snapshots hold the last finite state.
  std::size_t aborted = 0;

  bool valid() const { return aborted == 0; }
};

/// Particle i follows one trajectory driven by RngStream(cfg.master_seed, i)
/// and keeps its weight. t_grid must start at 0 and increase strictly.
MeasurePath push_forward(const ParticleMeasure& mu0, std::span<const double> t_grid, const SimConfig& cfg);

/// sum_i w_i phi(x_i), summed in particle order.
Complex integrate(const ParticleMeasure& mu, const ExpFunction& f);

/// \int R_t phi d mu - \int phi d mu for the Ornstein-Uhlenbeck semigroup R_t.
Complex ou_exact_increment(const ParticleMeasure& mu, const ExpFunction& f, double t);

struct WeakResidual {
  Complex lhs{};       // \int phi d mu_t - \int phi d mu_0
  Complex rhs{};       // trapezoid in time with n_quad nodes
  Complex rhs_fine{};  // 2 n_quad - 1 nodes
  Complex rhs_finest{};// 4 n_quad - 3 nodes
  double mc_err_re = 0.0;
  double mc_err_im = 0.0;
  /// Particle sampling error of lhs alone.
  double lhs_err_re = 0.0;
  double lhs_err_im = 0.0;
  double quad_err_re = 0.0;
  double quad_err_im = 0.0;
  bool used_k0 = true;
  double dt_used = 0.0;
  std::size_t aborted = 0;

  Complex residual() const { return lhs - rhs; }
  double err_re() const { return mc_err_re + quad_err_re; }
  double err_im() const { return mc_err_im + quad_err_im; }
  /// |rhs - rhs_fine| / |rhs_fine - rhs_finest|: the quadrature error shrink
  /// factor under one refinement of the node set.
  double quad_shrink() const;
  bool valid() const { return aborted == 0; }
};

/// Evaluates both sides of the weak identity on one coupled set of particle
/// paths. The operator is K0 when cfg.drift_enabled, L0 otherwise. The step
/// count is the smallest multiple of 4 (n_quad - 1) not below t/cfg.dt, so
/// every quadrature node lies on the step grid.
WeakResidual weak_residual(const ParticleMeasure& mu0, const ExpFunction& f, double t, Index n_quad,
                           const SimConfig& cfg);

/// Trapezoid in time of sum_i |w_i| (1 + V(x_i(t))). Throws InvalidEstimate
/// when the result is not finite.
double v_integrability(const MeasurePath& path, const Quadrature& q);

struct DiracSpec {
  SpectralField x;
};
struct GaussianModesSpec {
  std::vector<double> sigma;  // per-mode standard deviations
};
struct DiracMixtureSpec {
  std::vector<SpectralField> atoms;
  std::vector<double> weights;  // may be signed
};
using MeasureDescriptor = std::variant<DiracSpec, GaussianModesSpec, DiracMixtureSpec>;

/// Parses "dirac(k:v ...)", "gaussian_modes(s1 s2 ...)" or
/// "mixture(w1@k:v ...; w2@k:v ...)". Throws ConfigError otherwise.
MeasureDescriptor parse_measure_descriptor(std::string_view text);

/// Dirac: n copies of x0 with weight 1/n. Gaussian: independent N(0, sigma_k^2)
/// modes, weight 1/n. Mixture: particles split across atoms by largest
/// remainder of |w_j|/sum|w| and each particle carries w_j / (count of atom j).
ParticleMeasure sample_initial_measure(const MeasureDescriptor& spec, Index n_particles, Index m, RngStream& rng);

/// One row per particle: w,c_1..c_m.
void write_measure_csv(std::ostream& os, const ParticleMeasure& mu);

}  // namespace sburgers
