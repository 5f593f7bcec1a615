#include "sburgers/solver.hpp"

#include "sburgers/format.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace sburgers {

void SimConfig::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("T must be >= 0");
  if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
  if (quadrature_points < 0) throw ConfigError("quadrature_points must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  (void)steps_for(T);
}

Quadrature SimConfig::quadrature() const {
  return quadrature_points > 0 ? Quadrature::gauss_legendre(quadrature_points) : Quadrature::default_for(m);
}

std::size_t SimConfig::steps_for(double t) const {
  if (!(t >= 0.0)) throw ConfigError("duration must be >= 0");
  const double ratio = t / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9)
    throw ConfigError("duration " + format_double(t) + " is not an integer multiple of dt=" + format_double(dt));
  return static_cast<std::size_t>(rounded);
}

Stepper::Stepper(const SimConfig& cfg) : cfg_(cfg), drift_(cfg.m), ou_(cfg.m, cfg.dt) {
  cfg_.validate();
}

Stepper::Workspace Stepper::make_workspace() const {
  return Workspace{SpectralField(cfg_.m), SpectralField(cfg_.m), Eigen::VectorXd(drift_.grid_points())};
}

void Stepper::step(SpectralField& state, double t_now, RngStream& rng, Workspace& ws) const {
  if (state.size() != cfg_.m) throw std::domain_error("Stepper::step: state has wrong mode count");
  if (cfg_.drift_enabled) {
    if (!state.allFinite()) throw IntegrationError(t_now, state);
    ws.previous = state;
    drift_.apply(state, ws.drift, ws.grid);
    state += cfg_.dt * ws.drift;
    if (cfg_.noise_enabled) {
      ou_.sample(state, rng);
    } else {
      ou_.decay_only(state);
    }
    if (!state.allFinite()) throw IntegrationError(t_now + cfg_.dt, ws.previous);
    return;
  }
  if (cfg_.noise_enabled) {
    ou_.sample(state, rng);
  } else {
    ou_.decay_only(state);
  }
}

void Stepper::advance(SpectralField& state, double t_now, double duration, RngStream& rng, Workspace& ws) const {
  if (duration == 0.0) return;
  if (!cfg_.drift_enabled) {
    if (cfg_.noise_enabled) {
      OuTransition(cfg_.m, duration).sample(state, rng);
    } else {
      state = heat_semigroup(duration, state);
    }
    return;
  }
  const std::size_t n = cfg_.steps_for(duration);
  for (std::size_t i = 0; i < n; ++i) step(state, t_now + static_cast<double>(i) * cfg_.dt, rng, ws);
}

SpectralField step(const SpectralField& state, const SimConfig& cfg, RngStream& rng) {
  const Stepper stepper(cfg);
  auto ws = stepper.make_workspace();
  SpectralField out = state;
  stepper.step(out, 0.0, rng, ws);
  return out;
}

Trajectory simulate(const SpectralField& x0, const SimConfig& cfg, RngStream& rng) {
  const Stepper stepper(cfg);
  auto ws = stepper.make_workspace();
  const std::size_t steps = cfg.steps_for(cfg.T);
  const auto stride = static_cast<std::size_t>(cfg.record_stride);

  Trajectory traj;
  SpectralField state = resize_modes(x0, cfg.m);
  traj.times.push_back(0.0);
  traj.states.push_back(state);
  stepper.run(state, steps, 0.0, rng, ws, [&](std::size_t i, double t, const SpectralField& x) {
    if (i % stride == 0 || i == steps) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
  });
  return traj;
}

Trajectory simulate_deterministic_burgers(const SpectralField& x0, SimConfig cfg) {
  cfg.noise_enabled = false;
  cfg.drift_enabled = true;
  RngStream unused(cfg.master_seed, 0);
  return simulate(x0, cfg, unused);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Index m = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (Index k = 1; k <= m; ++k) os << ",c_" << k;
  os << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times[i]);
    for (Index k = 0; k < m; ++k) os << ',' << format_double(traj.states[i][k]);
    os << '\n';
  }
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'B', 'T', 'R'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw std::runtime_error("read_trajectory_binary: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
  const std::uint64_t m = traj.states.empty() ? 0 : static_cast<std::uint64_t>(traj.states.front().size());
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kBinaryVersion);
  put_le<std::uint64_t>(os, m);
  put_le<std::uint64_t>(os, traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    put_le<double>(os, traj.times[i]);
    for (std::uint64_t k = 0; k < m; ++k) put_le<double>(os, traj.states[i][static_cast<Index>(k)]);
  }
}

Trajectory read_trajectory_binary(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw std::runtime_error("read_trajectory_binary: bad magic");
  if (get_le<std::uint32_t>(is) != kBinaryVersion)
    throw std::runtime_error("read_trajectory_binary: unsupported version");
  const auto m = get_le<std::uint64_t>(is);
  const auto count = get_le<std::uint64_t>(is);
  Trajectory traj;
  for (std::uint64_t i = 0; i < count; ++i) {
    traj.times.push_back(get_le<double>(is));
    SpectralField x(static_cast<Index>(m));
    for (std::uint64_t k = 0; k < m; ++k) x[static_cast<Index>(k)] = get_le<double>(is);
    traj.states.push_back(std::move(x));
  }
  return traj;
}

}  // namespace sburgers
