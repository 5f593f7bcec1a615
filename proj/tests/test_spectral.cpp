#include "oracle_values.hpp"

#include "sburgers/rng.hpp"
#include "sburgers/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace sburgers;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

SpectralField random_field(RngStream& rng, Index m) {
  SpectralField x(m);
  rng.fill_normal(x);
  return x;
}

}  // namespace

TEST_CASE("basis_eval") {
  CHECK(basis_eval(1, 0.0) == 0.0);
  CHECK(basis_eval(1, 0.5) == doctest::Approx(sqrt2).epsilon(1e-15));
  CHECK(basis_eval(3, 1.0 / 6.0) == doctest::Approx(sqrt2).epsilon(1e-15));
  CHECK_THROWS_AS(basis_eval(1, 1.5), std::domain_error);
  CHECK_THROWS_AS(basis_eval(1, -0.1), std::domain_error);
  CHECK_THROWS_AS(basis_eval(0, 0.5), std::domain_error);

  const Quadrature q = Quadrature::gauss_legendre(64);
  const double e23 = q.integrate([](double s) { return basis_eval(2, s) * basis_eval(3, s); });
  CHECK(std::abs(e23 - oracle::kInt_e2_e3) < 1e-12);
}

TEST_CASE("gauss-legendre is exact for polynomials of degree 2n-1") {
  for (Index n : {1, 2, 5, 16, 64}) {
    const Quadrature q = Quadrature::gauss_legendre(n);
    CHECK(q.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (Index d = 0; d <= 2 * n - 1; ++d) {
      const double v = q.integrate([&](double s) { return std::pow(s, static_cast<double>(d)); });
      CHECK(v == doctest::Approx(1.0 / static_cast<double>(d + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS(Quadrature::gauss_legendre(0));
}

TEST_CASE("orthonormality on 2m trapezoid nodes") {
  // m = 1 is excluded: two trapezoid nodes sit on the boundary zeros.
  for (Index m : {2, 4, 16, 32, 64}) {
    const Quadrature q = Quadrature::uniform_trapezoid(2 * m);
    const FieldSampler s(q, m);
    double worst = 0.0;
    for (Index j = 1; j <= m; ++j) {
      const Eigen::VectorXd ej = s.values(unit_mode(m, j));
      for (Index k = 1; k <= m; ++k) {
        const Eigen::VectorXd ek = s.values(unit_mode(m, k));
        const double v = (q.weights().array() * ej.array() * ek.array()).sum();
        worst = std::max(worst, std::abs(v - (j == k ? 1.0 : 0.0)));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("orthonormality with the default gauss-legendre rule") {
  for (Index m : {4, 16, 32}) {
    const Quadrature q = Quadrature::default_for(m);
    CHECK(q.n_points() == std::max<Index>(4 * m, 64));
    const FieldSampler s(q, m);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (Index j = 1; j <= m; ++j)
      for (Index k = 1; k <= m; ++k)
        gram(j - 1, k - 1) =
            (q.weights().array() * s.values(unit_mode(m, j)).array() * s.values(unit_mode(m, k)).array()).sum();
    CHECK((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("apply_A") {
  CHECK(apply_A(SpectralField::Zero(5)).isZero(0.0));
  CHECK(apply_A(unit_mode(4, 1))(0) == doctest::Approx(-pi * pi).epsilon(1e-15));
  CHECK(apply_A(unit_mode(4, 3))(2) == doctest::Approx(-9.0 * pi * pi).epsilon(1e-15));
}

TEST_CASE("heat semigroup") {
  RngStream rng(7, 0);
  const SpectralField x = random_field(rng, 16);
  CHECK(heat_semigroup(0.0, x) == x);
  CHECK(heat_semigroup(0.3, unit_mode(3, 1))(0) == doctest::Approx(std::exp(-pi * pi * 0.3)).epsilon(1e-15));
  CHECK_THROWS_AS(heat_semigroup(-1.0, x), std::domain_error);

  double prev = x.norm();
  for (double t = 0.001; t < 1.0; t *= 1.7) {
    const double now = heat_semigroup(t, x).norm();
    CHECK(now <= prev);
    prev = now;
  }

  // Flow property, mode-wise. The rounding of the exponent lambda_k t is
  // amplified by |lambda_k t|, so the bound scales with it.
  const SpectralField a = heat_semigroup(0.01, heat_semigroup(0.02, x));
  const SpectralField b = heat_semigroup(0.03, x);
  const double eps = std::numeric_limits<double>::epsilon();
  for (Index k = 0; k < x.size(); ++k) {
    const double arg = std::abs(eigenvalue<double>(k + 1)) * 0.03;
    CHECK(std::abs(a(k) - b(k)) <= 4.0 * eps * (1.0 + arg) * std::abs(b(k)));
  }
}

TEST_CASE("lp_norm") {
  const Index m = 8;
  const Quadrature q = Quadrature::default_for(m);
  for (double p : {1.0, 2.0, 3.5, 4.0, std::numeric_limits<double>::infinity()})
    CHECK(lp_norm(SpectralField::Zero(m), p, q) == 0.0);
  CHECK(lp_norm(unit_mode(m, 1), 2.0, q) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lp_norm(unit_mode(m, 1), 4.0, q) == doctest::Approx(oracle::kNorm4_e1).epsilon(1e-12));
  CHECK(lp_norm(unit_mode(m, 1), 4.0, q) == doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-12));
  CHECK(lp_norm(unit_mode(m, 1), 6.0, Quadrature::for_norm(m, 6.0)) ==
        doctest::Approx(oracle::kNorm6_e1).epsilon(1e-13));
  CHECK_THROWS_AS(lp_norm(unit_mode(m, 1), 0.5, q), std::domain_error);

  RngStream rng(11, 0);
  for (int i = 0; i < 20; ++i) {
    const SpectralField x = random_field(rng, m);
    const double alpha = -3.0 + 0.37 * i;
    for (double p : {1.0, 2.0, 3.0, 6.0, std::numeric_limits<double>::infinity()}) {
      const double base = lp_norm(x, p, q);
      CHECK(lp_norm(alpha * x, p, q) == doctest::Approx(std::abs(alpha) * base).epsilon(1e-12));
    }
  }
}

TEST_CASE("sup norm is a lower bound that converges under refinement") {
  const SpectralField x = unit_mode(4, 1);
  const double inf = std::numeric_limits<double>::infinity();
  const double coarse = lp_norm(x, inf, Quadrature::gauss_legendre(8));
  const double fine = lp_norm(x, inf, Quadrature::gauss_legendre(256));
  CHECK(coarse <= sqrt2);
  CHECK(fine <= sqrt2);
  CHECK(sqrt2 - fine < sqrt2 - coarse);
  CHECK(sqrt2 - fine < 1e-4);
}

TEST_CASE("parseval") {
  RngStream rng(3, 0);
  for (Index m : {2, 8, 32}) {
    for (const Quadrature& q : {Quadrature::uniform_trapezoid(2 * m), Quadrature::for_norm(m, 2.0),
                                Quadrature::default_for(m)}) {
      for (int i = 0; i < 10; ++i) {
        const SpectralField x = random_field(rng, m);
        CHECK(lp_norm(x, 2.0, q) == doctest::Approx(x.norm()).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("synthesize matches basis_eval") {
  RngStream rng(5, 0);
  const SpectralField x = random_field(rng, 12);
  Eigen::VectorXd pts(5);
  pts << 0.0, 0.1, 0.37, 0.5, 1.0;
  const Eigen::VectorXd v = synthesize(x, pts);
  for (Index i = 0; i < pts.size(); ++i) {
    double ref = 0.0;
    for (Index k = 1; k <= 12; ++k) ref += x(k - 1) * basis_eval(k, pts(i));
    CHECK(v(i) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("inner_product") {
  CHECK(inner_product(unit_mode(3, 1), unit_mode(3, 2)) == 0.0);
  SpectralField a = unit_mode(2, 1) + 2.0 * unit_mode(2, 2);
  CHECK(inner_product(a, unit_mode(2, 2)) == 2.0);
  CHECK(inner_product(a, unit_mode(5, 2)) == 2.0);
  RngStream rng(9, 0);
  const SpectralField x = random_field(rng, 10);
  CHECK(inner_product(x, x) == doctest::Approx(x.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("burgers drift of e_1") {
  for (Index m : {2, 3, 8, 32}) {
    const SpectralField b = burgers_drift(unit_mode(m, 1), m);
    CHECK(std::abs(b(0) - oracle::kDrift_e1_mode1) < 1e-13);
    CHECK(b(1) == doctest::Approx(oracle::kDrift_e1_mode2).epsilon(1e-13));
    CHECK(b(1) == doctest::Approx(pi / sqrt2).epsilon(1e-13));
    if (m > 2) CHECK(std::abs(b(2) - oracle::kDrift_e1_mode3) < 1e-13);
    CHECK(b.tail(m - 2).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(burgers_drift(SpectralField::Zero(6), 6).isZero(0.0));
  CHECK_THROWS_AS(burgers_drift(unit_mode(2, 1), 0), std::domain_error);
}

TEST_CASE("burgers drift against an independent gauss-legendre projection") {
  // b_k = -(1/2) \int x^2 e_k' evaluated on a fine Gauss rule.
  RngStream rng(13, 0);
  const Index m = 10;
  const SpectralField x = random_field(rng, m);
  const Quadrature q = Quadrature::gauss_legendre(200);
  const Eigen::VectorXd u = synthesize(x, q.nodes());
  const SpectralField b = burgers_drift(x, m);
  for (Index k = 1; k <= m; ++k) {
    double ref = 0.0;
    for (Index i = 0; i < q.n_points(); ++i) {
      const double dk = sqrt2 * k * pi * std::cos(k * pi * q.nodes()(i));
      ref += -0.5 * q.weights()(i) * u(i) * u(i) * dk;
    }
    CHECK(b(k - 1) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("energy identity of the galerkin drift") {
  RngStream rng(17, 0);
  for (Index m : {2, 4, 8, 16, 32, 64}) {
    const GalerkinDrift drift(m);
    for (int i = 0; i < 100; ++i) {
      const SpectralField x = random_field(rng, m);
      const SpectralField b = drift(x);
      CHECK(std::abs(inner_product(b, x)) <= 1e-10 * x.norm() * b.norm());
    }
  }
}

TEST_CASE("drift is alias free") {
  RngStream rng(19, 0);
  for (Index m : {2, 4, 8, 16, 32, 64}) {
    const SpectralField x = random_field(rng, m);
    const SpectralField a = burgers_drift(x, m, 2 * m + 1);
    const SpectralField b = burgers_drift(x, m, 4 * m);
    CHECK((a - b).norm() <= 1e-10 * b.norm());
  }
  CHECK_THROWS(GalerkinDrift(8, 10));
}

TEST_CASE("drift pads and truncates its input") {
  const SpectralField x = unit_mode(2, 1);
  const SpectralField b = burgers_drift(x, 5);
  CHECK(b.size() == 5);
  CHECK(b(1) == doctest::Approx(pi / sqrt2).epsilon(1e-13));
  SpectralField y = SpectralField::Zero(6);
  y(0) = 1.0;
  y(5) = 4.0;  // dropped by P_m for m = 3
  CHECK(burgers_drift(y, 3).isApprox(burgers_drift(unit_mode(3, 1), 3), 1e-14));
}

TEST_CASE("allocation-free apply agrees with operator()") {
  RngStream rng(23, 0);
  const GalerkinDrift drift(12);
  const SpectralField x = random_field(rng, 12);
  SpectralField out(12);
  Eigen::VectorXd work(drift.grid_points());
  drift.apply(x, out, work);
  CHECK(out == drift(x));
}
