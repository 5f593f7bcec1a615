#pragma once

// Flat key = value experiment files. One key per line, '#' starts a comment,
// keys may appear once, and unknown keys are rejected.
//
//   m, dt, T, drift, noise, record_stride, quadrature_points, seed, workers
//   x, g            sparse fields "k:v k:v ..."
//   h               test-function panel, sparse fields separated by ';'
//   t, s, c, eps, p, k
//   t_grid, norm_grid   whitespace separated reals
//   n, n_outer, n_inner, n_nodes, n_quad, particles
//   measure         initial measure descriptor (see fokker_planck.hpp)

#include "sburgers/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sburgers {

/// "1:0.5 3:-2" -> field with c_1 = 0.5, c_3 = -2, padded to at least m modes.
/// An empty string or "0" is the zero field. Throws ConfigError.
SpectralField parse_sparse_field(std::string_view text, Index m = 0);
/// Inverse of parse_sparse_field for the nonzero coefficients ("0" if none).
std::string format_sparse_field(const SpectralField& x);

struct RunConfig {
  SimConfig sim;

  SpectralField x;
  SpectralField g;
  std::vector<SpectralField> h_panel;
  std::vector<double> t_grid{0.02, 0.01};
  std::vector<double> norm_grid{0.0, 1.0, 2.0, 4.0, 8.0};
  std::string measure = "dirac(1:1)";

  double t = 0.2;
  double s = 0.1;
  double c = 0.5;
  double eps = 1e-3;
  double p = 4.0;
  double k = 2.0;

  std::size_t n = 10000;
  std::size_t n_outer = 1000;
  std::size_t n_inner = 100;
  std::size_t n_nodes = 8;
  std::size_t n_quad = 16;
  std::size_t particles = 10000;

  /// Every key with its effective value, in schema order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Keys accepted by parse_run_config, in schema order.
const std::vector<std::string>& config_keys();

RunConfig parse_run_config(std::istream& is);
RunConfig load_run_config(const std::string& path);

}  // namespace sburgers
