#include "sburgers/fokker_planck.hpp"
#include "sburgers/semigroup.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <variant>
#include <vector>

using namespace sburgers;

namespace {

SimConfig config(Index m, double dt, bool drift = true) {
  SimConfig cfg;
  cfg.m = m;
  cfg.dt = dt;
  cfg.T = 1.0;
  cfg.drift_enabled = drift;
  cfg.master_seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("particle measure construction") {
  const ParticleMeasure d = ParticleMeasure::dirac(unit_mode(4, 2), 8);
  CHECK(d.size() == 8);
  CHECK(d.modes() == 4);
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.total_variation() == doctest::Approx(1.0).epsilon(1e-15));
  const ParticleMeasure signed_mu(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(0.75, -0.25));
  CHECK(signed_mu.total_mass() == 0.5);
  CHECK(signed_mu.total_variation() == 1.0);
  CHECK_THROWS(ParticleMeasure(Eigen::MatrixXd::Zero(2, 3), Eigen::Vector2d(1.0, 0.0)));
  CHECK_THROWS(ParticleMeasure::dirac(unit_mode(2, 1), 0));
}

TEST_CASE("push_forward with t_grid = [0] returns the initial measure") {
  const SimConfig cfg = config(4, 1e-3);
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(4, 1), 5);
  const std::vector<double> grid{0.0};
  const MeasurePath path = push_forward(mu, grid, cfg);
  REQUIRE(path.measures.size() == 1);
  CHECK(path.measures[0].particles == mu.particles);
  CHECK(path.measures[0].weights == mu.weights);
  const std::vector<double> bad{0.01, 0.02};
  CHECK_THROWS(push_forward(mu, bad, cfg));
}

TEST_CASE("push_forward preserves weights and mass") {
  const SimConfig cfg = config(6, 1e-3);
  Eigen::VectorXd w(3);
  w << 0.5, 0.7, -0.2;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(6, 3);
  p(0, 0) = 1.0;
  p(1, 1) = -0.5;
  const ParticleMeasure mu(p, w);
  const std::vector<double> grid{0.0, 0.01, 0.05};
  const MeasurePath path = push_forward(mu, grid, cfg);
  REQUIRE(path.valid());
  REQUIRE(path.times.size() == 3);
  for (const auto& m : path.measures) {
    CHECK(m.weights == w);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.particles.allFinite());
  }
  CHECK(path.measures[2].particles != path.measures[0].particles);
}

TEST_CASE("push_forward agrees with single-path estimates") {
  // Particle i uses the stream of Monte Carlo path i, so integrating over the
  // pushed Dirac mass equals the semigroup estimate with n = particles.
  const SimConfig cfg = config(8, 1e-3);
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(8, 1), 300);
  const std::vector<double> grid{0.0, 0.03};
  const MeasurePath path = push_forward(mu, grid, cfg);
  const ExpFunction f(unit_mode(8, 1) - unit_mode(8, 2));
  const McEstimate e = estimate_Pt(f, unit_mode(8, 1), 0.03, 300, cfg);
  CHECK(std::abs(integrate(path.measures[1], f) - e.mean) < 1e-12);
}

TEST_CASE("integrate and the exact ou increment") {
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(3, 1), 4);
  const ExpFunction f(unit_mode(3, 1));
  CHECK(std::abs(integrate(mu, f) - eval(f, unit_mode(3, 1))) < 1e-15);
  CHECK(std::abs(ou_exact_increment(mu, f, 0.0)) < 1e-15);
  const Complex inc = ou_exact_increment(mu, f, 0.2);
  CHECK(std::abs(inc - (ou_exact_semigroup(f, unit_mode(3, 1), 0.2) - eval(f, unit_mode(3, 1)))) < 1e-14);
}

TEST_CASE("weak residual of the constant function vanishes") {
  const SimConfig cfg = config(6, 1e-3);
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(6, 1), 50);
  const WeakResidual r = weak_residual(mu, ExpFunction(SpectralField::Zero(6)), 0.05, 4, cfg);
  CHECK(r.residual() == Complex(0.0, 0.0));
  CHECK(r.lhs == Complex(0.0, 0.0));
  CHECK(r.used_k0);
  CHECK(r.valid());
}

TEST_CASE("drift-free weak residual checks the ou dynamics") {
  const SimConfig cfg = config(6, 1e-3, false);
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(6, 1), 4000);
  const ExpFunction f(unit_mode(6, 1));
  const WeakResidual r = weak_residual(mu, f, 0.1, 8, cfg);
  CHECK_FALSE(r.used_k0);
  // step count is a multiple of 4 (n_quad - 1)
  const double steps = 0.1 / r.dt_used;
  CHECK(std::abs(steps - std::round(steps)) < 1e-9);
  CHECK(static_cast<long>(std::round(steps)) % 28 == 0);
  CHECK(std::abs(r.residual().real()) <= 4.0 * r.err_re());
  CHECK(std::abs(r.residual().imag()) <= 4.0 * r.err_im());
  const Complex exact = ou_exact_increment(mu, f, 0.1);
  CHECK(std::abs(r.lhs.real() - exact.real()) <= 4.0 * r.lhs_err_re);
  CHECK(std::abs(r.lhs.imag() - exact.imag()) <= 4.0 * r.lhs_err_im);
}

TEST_CASE("v integrability") {
  const SimConfig cfg = config(8, 1e-3);
  const Quadrature q = Quadrature::for_norm(8, 6.0);
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(8, 1), 20);
  const std::vector<double> zero{0.0};
  CHECK(v_integrability(push_forward(mu, zero, cfg), q) == 0.0);

  const std::vector<double> grid{0.0, 0.01, 0.02, 0.05};
  const MeasurePath path = push_forward(mu, grid, cfg);
  const double base = v_integrability(path, q);
  CHECK(base > 0.0);
  MeasurePath doubled = path;
  for (auto& m : doubled.measures) m.weights *= -2.0;
  CHECK(v_integrability(doubled, q) == doctest::Approx(2.0 * base).epsilon(1e-14));

  // 20% stability under a different seed
  SimConfig other = cfg;
  other.master_seed = 12;
  const ParticleMeasure big = ParticleMeasure::dirac(unit_mode(8, 1), 400);
  const double a = v_integrability(push_forward(big, grid, cfg), q);
  const double b = v_integrability(push_forward(big, grid, other), q);
  CHECK(std::abs(a - b) <= 0.2 * std::max(a, b));

  MeasurePath broken = path;
  broken.measures[1].particles(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(v_integrability(broken, q), InvalidEstimate);
}

TEST_CASE("measure descriptors") {
  const auto d = parse_measure_descriptor("dirac(1:1 3:-0.5)");
  REQUIRE(std::holds_alternative<DiracSpec>(d));
  CHECK(std::get<DiracSpec>(d).x.size() == 3);
  CHECK(std::get<DiracSpec>(d).x(2) == -0.5);

  const auto g = parse_measure_descriptor("gaussian_modes(0.5 0.25)");
  REQUIRE(std::holds_alternative<GaussianModesSpec>(g));
  CHECK(std::get<GaussianModesSpec>(g).sigma == std::vector<double>{0.5, 0.25});

  const auto mix = parse_measure_descriptor("mixture(0.6@1:1; -0.2@2:1; 0.6@1:-1)");
  REQUIRE(std::holds_alternative<DiracMixtureSpec>(mix));
  CHECK(std::get<DiracMixtureSpec>(mix).weights.size() == 3);

  CHECK_THROWS_AS(parse_measure_descriptor("poisson(1)"), ConfigError);
  CHECK_THROWS_AS(parse_measure_descriptor("dirac 1:1"), ConfigError);
  CHECK_THROWS_AS(parse_measure_descriptor("gaussian_modes(-1)"), ConfigError);
  CHECK_THROWS_AS(parse_measure_descriptor("mixture(1:1)"), ConfigError);
}

TEST_CASE("initial measure sampling") {
  RngStream rng(5, 0);
  const ParticleMeasure d = sample_initial_measure(parse_measure_descriptor("dirac(2:1)"), 10, 4, rng);
  CHECK(d.size() == 10);
  CHECK(d.particles.col(7) == unit_mode(4, 2));
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

  const ParticleMeasure g = sample_initial_measure(parse_measure_descriptor("gaussian_modes(0.5 2)"), 20000, 3, rng);
  const Eigen::VectorXd second = g.particles.array().square().rowwise().mean();
  CHECK(second(0) == doctest::Approx(0.25).epsilon(0.05));
  CHECK(second(1) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(second(2) == 0.0);

  const ParticleMeasure mix =
      sample_initial_measure(parse_measure_descriptor("mixture(0.6@1:1; -0.2@2:1; 0.6@1:-1)"), 100, 2, rng);
  CHECK(mix.size() == 100);
  CHECK(mix.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mix.total_variation() == doctest::Approx(1.4).epsilon(1e-12));
  CHECK_THROWS_AS(sample_initial_measure(parse_measure_descriptor("dirac(5:1)"), 10, 4, rng), ConfigError);
}

TEST_CASE("measure csv") {
  const ParticleMeasure mu = ParticleMeasure::dirac(unit_mode(2, 1), 2);
  std::ostringstream os;
  write_measure_csv(os, mu);
  std::istringstream lines(os.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "w,c_1,c_2");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("signed measure runs through the weak identity") {
  const SimConfig cfg = config(6, 1e-3);
  RngStream rng(8, 0);
  const ParticleMeasure mu =
      sample_initial_measure(parse_measure_descriptor("mixture(1.5@1:1; -0.5@2:0.5)"), 400, 6, rng);
  const WeakResidual r = weak_residual(mu, ExpFunction(unit_mode(6, 1)), 0.05, 4, cfg);
  CHECK(r.valid());
  CHECK(std::isfinite(r.residual().real()));
  CHECK(std::abs(r.residual().real()) <= 4.0 * r.err_re());
  CHECK(std::abs(r.residual().imag()) <= 4.0 * r.err_im());
}
