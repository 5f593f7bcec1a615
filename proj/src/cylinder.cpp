#include "sburgers/cylinder.hpp"

#include "sburgers/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sburgers {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXd derivative_at(const SpectralField& h, const Eigen::VectorXd& points) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(points.size());
  for (Index i = 0; i < points.size(); ++i) {
    double acc = 0.0;
    for (Index k = 0; k < h.size(); ++k) {
      if (h[k] == 0.0) continue;
      const double kpi = static_cast<double>(k + 1) * std::numbers::pi;
      acc += h[k] * kpi * std::cos(kpi * points[i]);
    }
    out[i] = std::numbers::sqrt2 * acc;
  }
  return out;
}

}  // namespace

ExpFunction ExpFunction::from_sparse(const std::vector<std::pair<Index, double>>& terms) {
  Index m = 0;
  for (const auto& [k, c] : terms) {
    if (k < 1) throw std::domain_error("ExpFunction: mode index must be >= 1");
    m = std::max(m, k);
  }
  SpectralField h = SpectralField::Zero(m);
  for (const auto& [k, c] : terms) h[k - 1] += c;
  return ExpFunction(std::move(h));
}

Complex eval(const ExpFunction& f, const SpectralField& x) {
  return std::polar(1.0, inner_product(x, f.h()));
}

Complex apply_L0(const ExpFunction& f, const SpectralField& x) {
  const double trace = -0.5 * f.h().squaredNorm();
  const double drift = inner_product(apply_A(f.h()), x);
  return Complex(trace, drift) * eval(f, x);
}

double transport_pairing(const SpectralField& h, const SpectralField& x, const Quadrature& q) {
  const Eigen::VectorXd dh = derivative_at(h, q.nodes());
  const Eigen::VectorXd xv = synthesize(x, q.nodes());
  return (q.weights().array() * dh.array() * xv.array().square()).sum();
}

Complex apply_K0(const ExpFunction& f, const SpectralField& x, const Quadrature& q) {
  return apply_L0(f, x) - 0.5 * kI * transport_pairing(f.h(), x, q) * eval(f, x);
}

K0Evaluator::K0Evaluator(const ExpFunction& f, const Quadrature& q, Index m)
    : f_(f), basis_(q.n_points(), m) {
  for (Index i = 0; i < q.n_points(); ++i)
    for (Index k = 0; k < m; ++k)
      basis_(i, k) = std::numbers::sqrt2 * std::sin(static_cast<double>(k + 1) * std::numbers::pi * q.nodes()[i]);
  weighted_dh_ = q.weights().cwiseProduct(derivative_at(f.h(), q.nodes()));
}

double K0Evaluator::transport_pairing(const SpectralField& x) const {
  if (x.size() != basis_.cols()) throw std::domain_error("K0Evaluator: mode count mismatch");
  const Eigen::VectorXd xv = basis_ * x;
  return weighted_dh_.dot(xv.cwiseAbs2());
}

Complex K0Evaluator::operator()(const SpectralField& x) const {
  return apply_L0(f_, x) - 0.5 * kI * transport_pairing(x) * eval(f_, x);
}

Complex ou_exact_semigroup(const ExpFunction& f, const SpectralField& x, double t) {
  if (!(t >= 0.0)) throw std::domain_error("ou_exact_semigroup: t must be >= 0");
  const double phase = inner_product(heat_semigroup(t, x), f.h());
  const double damping = 0.5 * qt_quadratic_form(f.h(), t);
  return std::exp(Complex(-damping, phase));
}

Complex ou_exact_derivative(const ExpFunction& f, const SpectralField& x, double t, const SpectralField& g) {
  if (!(t >= 0.0)) throw std::domain_error("ou_exact_derivative: t must be >= 0");
  return kI * inner_product(heat_semigroup(t, g), f.h()) * ou_exact_semigroup(f, x, t);
}

}  // namespace sburgers
