#include "sburgers/solver.hpp"
#include "sburgers/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace sburgers;
using std::numbers::pi;

namespace {

SimConfig config(Index m, double dt, double T) {
  SimConfig cfg;
  cfg.m = m;
  cfg.dt = dt;
  cfg.T = T;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig cfg = config(8, 1e-3, 0.5);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps_for(0.5) == 500);
  CHECK(cfg.steps_for(0.0) == 0);
  CHECK_THROWS_AS(cfg.steps_for(0.00055), ConfigError);
  cfg.T = 0.0005;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(config(0, 1e-3, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(4, 0.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(4, 1e-3, -1.0).validate(), ConfigError);
}

TEST_CASE("noise-free drift-free step is heat decay") {
  SimConfig cfg = config(4, 0.01, 1.0);
  cfg.drift_enabled = false;
  cfg.noise_enabled = false;
  RngStream rng(1, 0);
  const SpectralField x = step(unit_mode(4, 1), cfg, rng);
  CHECK(x(0) == doctest::Approx(std::exp(-pi * pi * 0.01)).epsilon(1e-15));
  CHECK(x.tail(3).isZero(0.0));
}

TEST_CASE("zero is an equilibrium of the deterministic system") {
  SimConfig cfg = config(16, 1e-3, 0.1);
  cfg.noise_enabled = false;
  RngStream rng0(1, 0);
  const Trajectory traj = simulate(SpectralField::Zero(16), cfg, rng0);
  for (const auto& s : traj.states) CHECK(s.isZero(0.0));
  const Trajectory det = simulate_deterministic_burgers(SpectralField::Zero(16), config(16, 1e-3, 0.1));
  CHECK(det.terminal().isZero(0.0));
}

TEST_CASE("single steps keep shape and finiteness") {
  const SimConfig cfg = config(12, 1e-3, 1.0);
  RngStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    SpectralField x(12);
    rng.fill_normal(x);
    const SpectralField y = step(x, cfg, rng);
    CHECK(y.size() == 12);
    CHECK(y.allFinite());
  }
  CHECK_THROWS_AS(step(SpectralField::Zero(5), cfg, rng), std::domain_error);
}

TEST_CASE("simulate records the configured snapshots") {
  SimConfig cfg = config(6, 0.01, 0.0);
  RngStream rng(4, 0);
  const SpectralField x0 = unit_mode(3, 2);
  const Trajectory t0 = simulate(x0, cfg, rng);
  REQUIRE(t0.size() == 1);
  CHECK(t0.times[0] == 0.0);
  CHECK(t0.states[0] == resize_modes(x0, 6));

  cfg.T = 0.1;
  cfg.record_stride = 3;
  const Trajectory traj = simulate(x0, cfg, rng);
  // steps 0,3,6,9 and the terminal step 10
  REQUIRE(traj.size() == 5);
  CHECK(traj.times.back() == doctest::Approx(0.1).epsilon(1e-15));
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  for (const auto& s : traj.states) CHECK(s.size() == 6);
}

TEST_CASE("simulate is deterministic given the stream") {
  const SimConfig cfg = config(8, 1e-3, 0.05);
  RngStream a(9, 2), b(9, 2);
  const Trajectory ta = simulate(unit_mode(8, 1), cfg, a);
  const Trajectory tb = simulate(unit_mode(8, 1), cfg, b);
  CHECK(ta.terminal() == tb.terminal());
}

TEST_CASE("deterministic burgers dissipates energy") {
  SimConfig cfg = config(32, 1e-3, 0.5);
  for (double amp : {1.0, 3.0, 8.0}) {
    const Trajectory traj = simulate_deterministic_burgers(amp * unit_mode(32, 1) + unit_mode(32, 2), cfg);
    for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.states[i].norm() <= traj.states[i - 1].norm());
  }
}

TEST_CASE("per-step growth factor vanishes with dt") {
  // max_n (|X_{n+1}| / |X_n| - 1) / dt is bounded by a constant that
  // shrinks as dt -> 0; for this dissipative system it is already <= 0.
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    SimConfig cfg = config(32, dt, 0.2);
    const Trajectory traj = simulate_deterministic_burgers(5.0 * unit_mode(32, 1), cfg);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < traj.size(); ++i)
      worst = std::max(worst, (traj.states[i].norm() / traj.states[i - 1].norm() - 1.0) / dt);
    CHECK(worst <= 0.0);
  }
}

TEST_CASE("blow-up raises an integration error with the last finite state") {
  SimConfig cfg = config(4, 1e-3, 1.0);
  RngStream rng(1, 0);
  Stepper stepper(cfg);
  auto ws = stepper.make_workspace();
  SpectralField x = unit_mode(4, 1) * 1e300;
  try {
    for (int i = 0; i < 10; ++i) stepper.step(x, i * cfg.dt, rng, ws);
    FAIL("expected an integration error");
  } catch (const IntegrationError& e) {
    CHECK(e.last_finite_state().allFinite());
    CHECK(e.time() > 0.0);
  }
  SpectralField bad = SpectralField::Zero(4);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(stepper.step(bad, 0.0, rng, ws), IntegrationError);
}

TEST_CASE("drift-free simulate matches the exact ou law") {
  SimConfig cfg = config(8, 1e-3, 0.2);
  cfg.drift_enabled = false;
  cfg.record_stride = 200;
  const SpectralField x0 = unit_mode(8, 1);
  std::vector<double> stepped, exact;
  const Eigen::ArrayXd var = convolution_variance(8, 0.2);
  for (int i = 0; i < 4000; ++i) {
    RngStream rng(31, static_cast<std::uint64_t>(i));
    stepped.push_back(simulate(x0, cfg, rng).terminal()(0));
  }
  const double mean = std::exp(-pi * pi * 0.2);
  const KsResult ks = ks_one_sample(stepped, [&](double v) { return normal_cdf((v - mean) / std::sqrt(var(0))); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("advance with the drift off is a single exact jump") {
  SimConfig cfg = config(4, 1e-3, 1.0);
  cfg.drift_enabled = false;
  const Stepper stepper(cfg);
  auto ws = stepper.make_workspace();
  RngStream a(5, 0), b(5, 0);
  SpectralField x = unit_mode(4, 2);
  stepper.advance(x, 0.0, 0.25, a, ws);
  const SpectralField y = ou_transition_sample(unit_mode(4, 2), 0.25, b);
  CHECK(x == y);
}

TEST_CASE("trajectory export") {
  SimConfig cfg = config(3, 0.01, 0.02);
  RngStream rng(8, 0);
  const Trajectory traj = simulate(unit_mode(3, 1), cfg, rng);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,c_1,c_2,c_3");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 3);

  std::stringstream bin;
  write_trajectory_binary(bin, traj);
  CHECK(bin.str().substr(0, 4) == "SBTR");
  CHECK(bin.str().size() == 4 + 4 + 8 + 8 + 3 * 4 * 8);
  const Trajectory back = read_trajectory_binary(bin);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(back.times[i] == traj.times[i]);
    CHECK(back.states[i] == traj.states[i]);
  }
  std::istringstream junk("XXXX");
  CHECK_THROWS(read_trajectory_binary(junk));
}
