#pragma once

// Closed-form calculus on exponential test functions phi_h(x) = exp(i<x,h>).
//   D phi = i h phi,  D^2 phi = -(h (x) h) phi
//   L0 phi(x) = (-|h|^2/2 + i<Ah, x>) phi(x)
//   K0 phi(x) = L0 phi(x) - (i/2) <D_xi h, x^2> phi(x)
// Real and imaginary parts of the complex results give the real span.

#include "sburgers/spectral.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace sburgers {

using Complex = std::complex<double>;

class ExpFunction {
 public:
  ExpFunction() = default;
  explicit ExpFunction(SpectralField h) : h_(std::move(h)) {}

  /// Builds h from sparse (1-based mode, coefficient) pairs.
  static ExpFunction from_sparse(const std::vector<std::pair<Index, double>>& terms);

  const SpectralField& h() const { return h_; }
  Index support() const { return h_.size(); }

 private:
  SpectralField h_;
};

Complex eval(const ExpFunction& f, const SpectralField& x);

Complex apply_L0(const ExpFunction& f, const SpectralField& x);

/// <D_xi h, x^2> = \int_0^1 h'(xi) x(xi)^2 dxi by quadrature, with h' and x
/// synthesized analytically at the nodes.
double transport_pairing(const SpectralField& h, const SpectralField& x, const Quadrature& q);

Complex apply_K0(const ExpFunction& f, const SpectralField& x, const Quadrature& q);

/// K0 with h' and the basis tabulated once on the quadrature nodes, for
/// repeated evaluation along particle paths. Immutable.
class K0Evaluator {
 public:
  K0Evaluator(const ExpFunction& f, const Quadrature& q, Index m);

  const ExpFunction& function() const { return f_; }
  double transport_pairing(const SpectralField& x) const;
  Complex operator()(const SpectralField& x) const;

 private:
  ExpFunction f_;
  Eigen::MatrixXd basis_;        // nodes x m
  Eigen::VectorXd weighted_dh_;  // w_i h'(xi_i)
};

/// R_t phi_h(x) = exp(i<e^{tA}x, h> - <Q_t h, h>/2).
Complex ou_exact_semigroup(const ExpFunction& f, const SpectralField& x, double t);

/// Directional derivative <D R_t phi_h(x), g> = i <e^{tA} g, h> R_t phi_h(x).
Complex ou_exact_derivative(const ExpFunction& f, const SpectralField& x, double t, const SpectralField& g);

}  // namespace sburgers
