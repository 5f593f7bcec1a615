#include "sburgers/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace sburgers {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_even_integer(double p) {
  return std::isfinite(p) && p == std::floor(p) && std::fmod(p, 2.0) == 0.0;
}

double abs_pow(double v, double p) {
  const double a = std::abs(v);
  if (p == 2.0) return a * a;
  if (p == 4.0) {
    const double s = a * a;
    return s * s;
  }
  if (p == 6.0) {
    const double s = a * a;
    return s * s * s;
  }
  return std::pow(a, p);
}

void check_p(double p) {
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
}

}  // namespace

Quadrature Quadrature::gauss_legendre(Index n) {
  if (n < 1) throw std::domain_error("gauss_legendre: need at least one node");
  Eigen::VectorXd nodes(n), weights(n);
  if (n == 1) {
    nodes[0] = 0.5;
    weights[0] = 1.0;
    return Quadrature(QuadratureRule::gauss_legendre, std::move(nodes), std::move(weights));
  }
  // P_n(z) and P_n'(z) by the three-term recurrence.
  const auto legendre = [n](double z) {
    double p0 = 1.0, p1 = z;
    for (Index j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / static_cast<double>(j);
      p0 = p1;
      p1 = p2;
    }
    const double dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
    return std::pair{p1, dp};
  };
  for (Index i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre(z).second;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // map [-1,1] -> [0,1], ascending
    nodes[i] = 0.5 * (1.0 - z);
    nodes[n - 1 - i] = 0.5 * (1.0 + z);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.5;
  return Quadrature(QuadratureRule::gauss_legendre, std::move(nodes), std::move(weights));
}

Quadrature Quadrature::uniform_trapezoid(Index n) {
  if (n < 2) throw std::domain_error("uniform_trapezoid: need at least two nodes");
  const double h = 1.0 / static_cast<double>(n - 1);
  Eigen::VectorXd nodes(n), weights = Eigen::VectorXd::Constant(n, h);
  for (Index i = 0; i < n; ++i) nodes[i] = static_cast<double>(i) * h;
  nodes[n - 1] = 1.0;
  weights[0] = weights[n - 1] = 0.5 * h;
  return Quadrature(QuadratureRule::uniform_trapezoid, std::move(nodes), std::move(weights));
}

Quadrature Quadrature::default_for(Index m) {
  return gauss_legendre(std::max<Index>(4 * m, 64));
}

Quadrature Quadrature::for_norm(Index m, double p) {
  check_p(p);
  if (is_even_integer(p)) {
    // |x|^p is a cosine polynomial of degree p*m; exact with > p*m/2 intervals.
    const Index intervals = static_cast<Index>(p) * m / 2 + 1;
    return uniform_trapezoid(std::max<Index>(intervals + 1, 64));
  }
  return default_for(m);
}

Eigen::VectorXd synthesize(const SpectralField& x, const Eigen::VectorXd& points) {
  Eigen::VectorXd out(points.size());
  const Index m = x.size();
  for (Index i = 0; i < points.size(); ++i) {
    const double theta = kPi * points[i];
    const double c2 = 2.0 * std::cos(theta);
    double s_prev = 0.0;              // sin(0)
    double s_cur = std::sin(theta);   // sin(theta)
    double acc = 0.0;
    for (Index k = 0; k < m; ++k) {
      acc += x[k] * s_cur;
      const double s_next = c2 * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    out[i] = std::numbers::sqrt2 * acc;
  }
  return out;
}

double lp_norm(const SpectralField& x, double p, const Quadrature& q) {
  check_p(p);
  const Eigen::VectorXd v = synthesize(x, q.nodes());
  if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) acc += q.weights()[i] * abs_pow(v[i], p);
  return std::pow(acc, 1.0 / p);
}

FieldSampler::FieldSampler(const Quadrature& q, Index m) : quad_(q), basis_(q.n_points(), m) {
  for (Index i = 0; i < q.n_points(); ++i) {
    for (Index k = 0; k < m; ++k) {
      basis_(i, k) = std::numbers::sqrt2 * std::sin(static_cast<double>(k + 1) * kPi * q.nodes()[i]);
    }
  }
}

double FieldSampler::lp_power(const SpectralField& x, double p) const {
  check_p(p);
  const Eigen::VectorXd v = values(x);
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) acc += quad_.weights()[i] * abs_pow(v[i], p);
  return acc;
}

double FieldSampler::lp_norm(const SpectralField& x, double p) const {
  check_p(p);
  if (std::isinf(p)) {
    const Eigen::VectorXd v = values(x);
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  }
  return std::pow(lp_power(x, p), 1.0 / p);
}

GalerkinDrift::GalerkinDrift(Index m, Index grid_points) {
  if (m <= 0) throw std::domain_error("GalerkinDrift: m must be positive");
  const Index ng = grid_points > 0 ? grid_points : std::max<Index>(2 * m + 1, 64);
  // Exactness needs N = ng + 1 intervals with 2N > 3m.
  if (2 * (ng + 1) <= 3 * m)
    throw std::domain_error("GalerkinDrift: collocation grid too coarse for alias-free projection");
  const double h = 1.0 / static_cast<double>(ng + 1);
  synth_.resize(ng, m);
  project_.resize(m, ng);
  for (Index j = 0; j < ng; ++j) {
    const double xi = static_cast<double>(j + 1) * h;
    for (Index k = 0; k < m; ++k) {
      const double kpi = static_cast<double>(k + 1) * kPi;
      synth_(j, k) = std::numbers::sqrt2 * std::sin(kpi * xi);
      project_(k, j) = -0.5 * h * std::numbers::sqrt2 * kpi * std::cos(kpi * xi);
    }
  }
}

void GalerkinDrift::apply(const SpectralField& x, SpectralField& out, Eigen::VectorXd& work) const {
  work.noalias() = synth_ * x;
  work = work.array().square().matrix();
  out.noalias() = project_ * work;
}

SpectralField GalerkinDrift::operator()(const SpectralField& x) const {
  if (x.size() != modes()) throw std::domain_error("GalerkinDrift: mode count mismatch");
  SpectralField out(modes());
  Eigen::VectorXd work(grid_points());
  apply(x, out, work);
  return out;
}

SpectralField burgers_drift(const SpectralField& x, Index m, Index grid_points) {
  if (m <= 0) throw std::domain_error("burgers_drift: m must be positive");
  return GalerkinDrift(m, grid_points)(resize_modes(x, m));
}

}  // namespace sburgers
