#pragma once

// Monte Carlo estimators for the transition semigroup P_t phi(x) = E[phi(X(t,x))]
// of the Galerkin system, and for quantities built from it.
//
// Path i of an estimator uses RngStream(seed, i), where seed is
// cfg.master_seed unless stated otherwise. Per-path values are reduced in
// path order, so every estimate is a pure function of (inputs, cfg) and does
// not depend on cfg.workers.

#include "sburgers/cylinder.hpp"
#include "sburgers/solver.hpp"
#include "sburgers/stats.hpp"

#include <span>
#include <vector>

namespace sburgers {

McEstimate estimate_Pt(const ExpFunction& f, const SpectralField& x, double t, std::size_t n, const SimConfig& cfg);

/// Several test functions evaluated on the same paths.
std::vector<McEstimate> estimate_Pt(std::span<const ExpFunction> fs, const SpectralField& x, double t, std::size_t n,
                                    const SimConfig& cfg);

struct GeneratorEstimate {
  Complex value{};
  double err_re = 0.0;
  double err_im = 0.0;
  /// (P_t phi - phi)/t per level, in the order of the supplied grid.
  std::vector<Complex> quotients;
  std::size_t n = 0;
  std::size_t aborted = 0;

  bool valid() const { return aborted == 0; }
};

/// Richardson-extrapolated difference quotient (P_t phi(x) - phi(x))/t -> K phi(x).
/// The grid must be geometric (e.g. {t, t/2}); all levels share the same
/// paths (common random numbers) and the error bar is that of the combined
/// per-path extrapolant.
GeneratorEstimate generator_fd(const ExpFunction& f, const SpectralField& x, std::span<const double> t_grid,
                               std::size_t n, const SimConfig& cfg);

/// Linear weights c_j with D* = sum_j c_j D(t_j) under an O(t) bias expansion.
std::vector<double> richardson_weights(std::span<const double> t_grid);

struct CkResult {
  McEstimate direct;  // P_{s+t} phi(x)
  McEstimate nested;  // P_s (P_t phi)(x)
};

std::vector<CkResult> chapman_kolmogorov(std::span<const ExpFunction> fs, const SpectralField& x, double s, double t,
                                         std::size_t n_outer, std::size_t n_inner, const SimConfig& cfg);
CkResult chapman_kolmogorov(const ExpFunction& f, const SpectralField& x, double s, double t, std::size_t n_outer,
                            std::size_t n_inner, const SimConfig& cfg);

/// S_t phi(x) = E[exp(-c \int_0^t |X(s)|_4^4 ds) phi(X(t))], time integral by the
/// trapezoid rule on the step grid. At c = 0 the result is bit-identical to
/// estimate_Pt with the same configuration.
McEstimate estimate_feynman_kac(const ExpFunction& f, const SpectralField& x, double t, double c, std::size_t n,
                                const SimConfig& cfg);

/// Independent estimates of both sides of
///   P_t phi = S_t phi + c \int_0^t S_u(|.|_4^4 P_{t-u} phi) du.
/// The u-integral uses the trapezoid rule on n_nodes nodes; its integrand is
/// estimated pathwise as E[exp(-c I(u)) |X(u)|_4^4 phi(X(t))].
struct FkReconstruction {
  McEstimate direct;          // P_t phi
  McEstimate damped;          // S_t phi
  McEstimate duhamel;         // c \int ..., n_nodes trapezoid
  McEstimate duhamel_refined; // same paths, 2 n_nodes - 1 nodes
  double dt_used = 0.0;
  double quad_tol_re = 0.0;
  double quad_tol_im = 0.0;

  Complex lhs() const { return direct.mean; }
  Complex rhs() const { return damped.mean + duhamel.mean; }
  double sigma_re() const;
  double sigma_im() const;
  /// |lhs - rhs| <= k sigma + quadrature tolerance, componentwise.
  bool holds(double k) const;
};

FkReconstruction feynman_kac_reconstruction(const ExpFunction& f, const SpectralField& x, double t, double c,
                                            std::size_t n, std::size_t n_nodes, const SimConfig& cfg);

struct DerivativeEstimate {
  Complex value{};
  double err_re = 0.0;
  double err_im = 0.0;
  std::size_t n = 0;
  std::size_t aborted = 0;

  bool valid() const { return aborted == 0; }
};

/// (P_t phi(x + eps g) - P_t phi(x - eps g)) / (2 eps) with both evaluations
/// of path i driven by the same stream.
DerivativeEstimate directional_derivative_crn(const ExpFunction& f, const SpectralField& x, const SpectralField& g,
                                              double t, double eps, std::size_t n, const SimConfig& cfg);

/// E[sup_{t <= T} |X(t,x)|_p^k], sup over the recorded snapshots (every
/// cfg.record_stride steps, including t = 0).
McEstimate moment_estimate(const SpectralField& x, double p, double k, double T, std::size_t n, const SimConfig& cfg);

/// V(x) = |x|_6^8 |x|_4^2.
double v_weight(const SpectralField& x, const Quadrature& q);
/// V(x) using the exact even-p rules for each norm.
double v_weight(const SpectralField& x);

}  // namespace sburgers
