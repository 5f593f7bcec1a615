#pragma once

// Sine eigenbasis of the Dirichlet Laplacian on (0,1), spectral fields and
// the linear/nonlinear spatial operators acting on them.
//
// Convention: e_k(xi) = sqrt(2) sin(k pi xi), A e_k = -(k pi)^2 e_k.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sburgers {

template <typename Scalar>
using SpectralFieldT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using SpectralField = SpectralFieldT<double>;

using Eigen::Index;

/// Eigenvalue of A for the (1-based) mode k.
template <typename Scalar = double>
inline Scalar eigenvalue(Index k) {
  const Scalar kpi = static_cast<Scalar>(k) * std::numbers::pi_v<Scalar>;
  return -kpi * kpi;
}

/// The m eigenvalues -(k pi)^2, k = 1..m, as an array.
template <typename Scalar = double>
inline Eigen::Array<Scalar, Eigen::Dynamic, 1> eigenvalues(Index m) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(m);
  for (Index k = 0; k < m; ++k) out[k] = eigenvalue<Scalar>(k + 1);
  return out;
}

template <typename Scalar = double>
inline Scalar basis_eval(Index k, Scalar xi) {
  if (k < 1) throw std::domain_error("basis_eval: mode index must be >= 1");
  if (!(xi >= Scalar(0) && xi <= Scalar(1)))
    throw std::domain_error("basis_eval: xi must lie in [0,1]");
  return std::numbers::sqrt2_v<Scalar> *
         std::sin(static_cast<Scalar>(k) * std::numbers::pi_v<Scalar> * xi);
}

/// Coefficient vector of e_k in an m-mode field.
inline SpectralField unit_mode(Index m, Index k) {
  if (k < 1 || k > m) throw std::domain_error("unit_mode: k outside 1..m");
  SpectralField out = SpectralField::Zero(m);
  out[k - 1] = 1.0;
  return out;
}

/// Zero-pads or truncates to exactly m modes.
template <typename Derived>
SpectralFieldT<typename Derived::Scalar> resize_modes(const Eigen::MatrixBase<Derived>& x, Index m) {
  using Scalar = typename Derived::Scalar;
  SpectralFieldT<Scalar> out = SpectralFieldT<Scalar>::Zero(m);
  const Index n = std::min<Index>(m, x.size());
  out.head(n) = x.head(n);
  return out;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

template <typename Derived>
SpectralFieldT<typename Derived::Scalar> apply_A(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return (eigenvalues<Scalar>(x.size()) * x.array()).matrix();
}

template <typename Derived>
SpectralFieldT<typename Derived::Scalar> heat_semigroup(typename Derived::Scalar t,
                                                        const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (!(t >= Scalar(0))) throw std::domain_error("heat_semigroup: t must be >= 0");
  return ((eigenvalues<Scalar>(x.size()) * t).exp() * x.array()).matrix();
}

/// <x, y> in L^2(0,1); the shorter field is zero-padded.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar inner_product(const Eigen::MatrixBase<DerivedX>& x,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  const Index n = std::min<Index>(x.size(), y.size());
  return x.head(n).dot(y.head(n));
}

// ---------------------------------------------------------------------------
// Quadrature

enum class QuadratureRule {
  gauss_legendre,
  /// Trapezoid on a uniform grid including both endpoints. Exact for
  /// cos(j pi xi) with j < 2*(n_points-1), hence for products of sine modes.
  uniform_trapezoid,
};

/// Nodes and weights on [0,1].
class Quadrature {
 public:
  static Quadrature gauss_legendre(Index n_points);
  static Quadrature uniform_trapezoid(Index n_points);

  /// Gauss-Legendre with max(4m, 64) nodes.
  static Quadrature default_for(Index m);
  /// Rule used for |x|_p: exact trapezoid for even integer p, otherwise
  /// the Gauss-Legendre default.
  static Quadrature for_norm(Index m, double p);

  QuadratureRule rule() const { return rule_; }
  Index n_points() const { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  template <typename Fn>
  double integrate(Fn&& fn) const {
    double acc = 0.0;
    for (Index i = 0; i < nodes_.size(); ++i) acc += weights_[i] * fn(nodes_[i]);
    return acc;
  }

 private:
  Quadrature(QuadratureRule rule, Eigen::VectorXd nodes, Eigen::VectorXd weights)
      : rule_(rule), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  QuadratureRule rule_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

/// x(xi) at each of the given points (sine recurrence, no tables).
Eigen::VectorXd synthesize(const SpectralField& x, const Eigen::VectorXd& points);

/// |x|_p by quadrature. p = +infinity gives the max over nodes (endpoints are 0).
double lp_norm(const SpectralField& x, double p, const Quadrature& q);

/// Precomputed basis table on a quadrature's nodes for repeated norm
/// evaluation of m-mode fields. Immutable after construction.
class FieldSampler {
 public:
  FieldSampler(const Quadrature& q, Index m);

  Index modes() const { return basis_.cols(); }
  const Quadrature& quadrature() const { return quad_; }

  Eigen::VectorXd values(const SpectralField& x) const { return basis_ * x; }
  double lp_norm(const SpectralField& x, double p) const;
  /// \int |x|^p without the 1/p root.
  double lp_power(const SpectralField& x, double p) const;

 private:
  Quadrature quad_;
  Eigen::MatrixXd basis_;  // nodes x m
};

// ---------------------------------------------------------------------------
// Galerkin Burgers nonlinearity b_m(x) = P_m (1/2) d/dxi (P_m x)^2

/// Pseudospectral evaluator for b_m. P_m x is synthesized on a uniform
/// interior grid, squared, and paired with e_k' under the trapezoid rule:
///   <(1/2)(u^2)', e_k> = -(1/2) <u^2, e_k'>.
/// u^2 e_k' is a cosine polynomial of degree <= 3m, which the trapezoid rule
/// on N > 3m/2 intervals integrates exactly, so the projection is alias-free
/// and <b_m(x), x> = 0 holds to roundoff.
class GalerkinDrift {
 public:
  /// grid_points = 0 selects max(2m+1, 64) interior points.
  explicit GalerkinDrift(Index m, Index grid_points = 0);

  Index modes() const { return synth_.cols(); }
  Index grid_points() const { return synth_.rows(); }

  SpectralField operator()(const SpectralField& x) const;
  /// out = b_m(x) without allocating; out must have m entries.
  void apply(const SpectralField& x, SpectralField& out, Eigen::VectorXd& work) const;

 private:
  Eigen::MatrixXd synth_;    // grid x m, e_k(xi_j)
  Eigen::MatrixXd project_;  // m x grid, -(1/2) w e_k'(xi_j)
};

/// b_m(x); x is zero-padded or truncated to m modes first.
SpectralField burgers_drift(const SpectralField& x, Index m, Index grid_points = 0);

}  // namespace sburgers
