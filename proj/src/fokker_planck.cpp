#include "sburgers/fokker_planck.hpp"

#include "sburgers/config.hpp"
#include "sburgers/format.hpp"
#include "sburgers/parallel.hpp"
#include "sburgers/semigroup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace sburgers {

ParticleMeasure::ParticleMeasure(Eigen::MatrixXd p, Eigen::VectorXd w) : particles(std::move(p)), weights(std::move(w)) {
  if (particles.cols() != weights.size()) throw std::invalid_argument("ParticleMeasure: particle/weight count mismatch");
  if (weights.size() < 1) throw std::invalid_argument("ParticleMeasure: needs at least one particle");
  if (!weights.allFinite()) throw std::invalid_argument("ParticleMeasure: weights must be finite");
}

ParticleMeasure ParticleMeasure::dirac(const SpectralField& x, Index n) {
  if (n < 1) throw std::invalid_argument("ParticleMeasure::dirac: n must be >= 1");
  return ParticleMeasure(x.replicate(1, n), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

double ParticleMeasure::total_mass() const { return weights.sum(); }
double ParticleMeasure::total_variation() const { return weights.cwiseAbs().sum(); }

namespace {

void check_time_grid(std::span<const double> t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw std::domain_error("push_forward: t_grid must start at 0");
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (!(t_grid[j] > t_grid[j - 1])) throw std::domain_error("push_forward: t_grid must increase strictly");
}

}  // namespace

MeasurePath push_forward(const ParticleMeasure& mu0, std::span<const double> t_grid, const SimConfig& cfg) {
  check_time_grid(t_grid);
  if (mu0.modes() != cfg.m) throw std::domain_error("push_forward: measure and config disagree on m");
  const Stepper stepper(cfg);
  if (cfg.drift_enabled)
    for (std::size_t j = 1; j < t_grid.size(); ++j) (void)cfg.steps_for(t_grid[j] - t_grid[j - 1]);

  const std::size_t levels = t_grid.size();
  const auto n = static_cast<std::size_t>(mu0.size());
  MeasurePath path;
  path.times.assign(t_grid.begin(), t_grid.end());
  path.measures.assign(levels, mu0);

  const auto aborted = map_blocks<std::size_t>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    std::size_t failures = 0;
    auto ws = stepper.make_workspace();
    SpectralField state(cfg.m);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(cfg.master_seed, i);
      state = mu0.particles.col(static_cast<Index>(i));
      bool alive = true;
      for (std::size_t j = 1; j < levels; ++j) {
        if (alive) {
          try {
            stepper.advance(state, t_grid[j - 1], t_grid[j] - t_grid[j - 1], rng, ws);
          } catch (const IntegrationError& e) {
            state = e.last_finite_state();
            alive = false;
            ++failures;
          }
        }
        path.measures[j].particles.col(static_cast<Index>(i)) = state;
      }
    }
    return failures;
  });
  path.aborted = std::accumulate(aborted.begin(), aborted.end(), std::size_t{0});
  return path;
}

Complex integrate(const ParticleMeasure& mu, const ExpFunction& f) {
  Complex sum{};
  for (Index i = 0; i < mu.size(); ++i) sum += mu.weights(i) * eval(f, mu.particles.col(i));
  return sum;
}

Complex ou_exact_increment(const ParticleMeasure& mu, const ExpFunction& f, double t) {
  Complex sum{};
  for (Index i = 0; i < mu.size(); ++i) {
    const SpectralField x = mu.particles.col(i);
    sum += mu.weights(i) * (ou_exact_semigroup(f, x, t) - eval(f, x));
  }
  return sum;
}

double WeakResidual::quad_shrink() const {
  const double coarse = std::abs(rhs - rhs_fine);
  const double fine = std::abs(rhs_fine - rhs_finest);
  if (fine == 0.0) return std::numeric_limits<double>::infinity();
  return coarse / fine;
}

WeakResidual weak_residual(const ParticleMeasure& mu0, const ExpFunction& f, double t, Index n_quad,
                           const SimConfig& cfg) {
  if (!(t > 0.0)) throw std::domain_error("weak_residual: t must be > 0");
  if (n_quad < 2) throw std::domain_error("weak_residual: n_quad must be >= 2");
  if (mu0.modes() != cfg.m) throw std::domain_error("weak_residual: measure and config disagree on m");

  const auto finest = static_cast<std::size_t>(4 * (n_quad - 1));
  SimConfig run = cfg;
  {
    const auto base = static_cast<std::size_t>(std::ceil(t / cfg.dt - 1e-9));
    const std::size_t steps = std::max(finest, (base + finest - 1) / finest * finest);
    run.dt = t / static_cast<double>(steps);
    run.T = t;
  }
  const std::size_t steps = run.steps_for(t);
  const std::size_t stride = steps / finest;
  const double h = t / static_cast<double>(finest);
  const Stepper stepper(run);
  const K0Evaluator k0(f, run.quadrature(), run.m);
  const bool use_k0 = run.drift_enabled;
  auto op = [&](const SpectralField& x) { return use_k0 ? k0(x) : apply_L0(f, x); };

  // Per particle: lhs_i - rhs_i at the three node densities, unweighted.
  struct Row {
    Complex lhs, r0, r1, r2;
  };
  const auto n = static_cast<std::size_t>(mu0.size());
  struct Block {
    std::vector<Row> rows;
    std::size_t aborted = 0;
  };
  const auto blocks = map_blocks<Block>(n, run.workers, [&](std::size_t begin, std::size_t end) {
    Block acc;
    acc.rows.resize(end - begin);
    auto ws = stepper.make_workspace();
    SpectralField state(run.m);
    std::vector<Complex> node(finest + 1);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(run.master_seed, i);
      state = mu0.particles.col(static_cast<Index>(i));
      const Complex phi0 = eval(f, state);
      node[0] = op(state);
      try {
        for (std::size_t j = 1; j <= finest; ++j) {
          stepper.advance(state, static_cast<double>(j - 1) * h, static_cast<double>(stride) * run.dt, rng, ws);
          node[j] = op(state);
        }
      } catch (const IntegrationError&) {
        ++acc.aborted;
        acc.rows[i - begin] = Row{};
        continue;
      }
      Row row{eval(f, state) - phi0, {}, {}, {}};
      for (std::size_t j = 0; j <= finest; ++j) {
        const double w = (j == 0 || j == finest) ? 0.5 : 1.0;
        row.r2 += w * node[j];
        if (j % 2 == 0) row.r1 += w * node[j];
        if (j % 4 == 0) row.r0 += w * node[j];
      }
      row.r2 *= h;
      row.r1 *= 2.0 * h;
      row.r0 *= 4.0 * h;
      acc.rows[i - begin] = row;
    }
    return acc;
  });

  WeakResidual out;
  out.used_k0 = use_k0;
  out.dt_used = run.dt;
  std::vector<Complex> diff, lhs;
  diff.reserve(n);
  lhs.reserve(n);
  std::size_t i = 0;
  for (const auto& b : blocks) {
    out.aborted += b.aborted;
    for (const auto& row : b.rows) {
      const double w = mu0.weights(static_cast<Index>(i++));
      out.lhs += w * row.lhs;
      out.rhs += w * row.r0;
      out.rhs_fine += w * row.r1;
      out.rhs_finest += w * row.r2;
      diff.push_back(row.lhs - row.r0);
      lhs.push_back(row.lhs);
    }
  }
  // sqrt(sum w_i^2 (r_i - mean r)^2) per component.
  auto spread = [&](const std::vector<Complex>& r) {
    Complex mean{};
    for (const auto& v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double w = mu0.weights(static_cast<Index>(j));
      const Complex c = r[j] - mean;
      re += w * w * c.real() * c.real();
      im += w * w * c.imag() * c.imag();
    }
    return std::pair{std::sqrt(re), std::sqrt(im)};
  };
  std::tie(out.mc_err_re, out.mc_err_im) = spread(diff);
  std::tie(out.lhs_err_re, out.lhs_err_im) = spread(lhs);
  out.quad_err_re = std::abs((out.rhs - out.rhs_fine).real());
  out.quad_err_im = std::abs((out.rhs - out.rhs_fine).imag());
  return out;
}

double v_integrability(const MeasurePath& path, const Quadrature& q) {
  if (path.times.size() != path.measures.size()) throw std::invalid_argument("v_integrability: malformed path");
  std::vector<double> mass(path.measures.size());
  for (std::size_t j = 0; j < path.measures.size(); ++j) {
    const auto& mu = path.measures[j];
    double s = 0.0;
    for (Index i = 0; i < mu.size(); ++i) s += std::abs(mu.weights(i)) * (1.0 + v_weight(mu.particles.col(i), q));
    mass[j] = s;
  }
  double total = 0.0;
  for (std::size_t j = 1; j < mass.size(); ++j) total += 0.5 * (path.times[j] - path.times[j - 1]) * (mass[j - 1] + mass[j]);
  if (!std::isfinite(total)) throw InvalidEstimate("v_integrability: the V-weighted mass is not integrable");
  return total;
}

namespace {

std::string_view trim_view(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double to_real(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError("measure descriptor: bad number '" + std::string(text) + "'");
  return v;
}

}  // namespace

MeasureDescriptor parse_measure_descriptor(std::string_view text) {
  text = trim_view(text);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw ConfigError("measure descriptor: expected name(...), got '" + std::string(text) + "'");
  const auto name = trim_view(text.substr(0, open));
  const auto body = text.substr(open + 1, text.size() - open - 2);

  if (name == "dirac") return DiracSpec{parse_sparse_field(body)};
  if (name == "gaussian_modes") {
    GaussianModesSpec spec;
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
      const std::size_t start = i;
      while (i < body.size() && body[i] != ' ' && body[i] != '\t') ++i;
      if (i > start) {
        const double s = to_real(body.substr(start, i - start));
        if (!(s >= 0.0)) throw ConfigError("measure descriptor: sigma must be >= 0");
        spec.sigma.push_back(s);
      }
    }
    if (spec.sigma.empty()) throw ConfigError("measure descriptor: gaussian_modes needs at least one sigma");
    return spec;
  }
  if (name == "mixture") {
    DiracMixtureSpec spec;
    std::size_t start = 0;
    for (;;) {
      const auto semi = body.find(';', start);
      const auto part = trim_view(body.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start));
      const auto at = part.find('@');
      if (at == std::string_view::npos) throw ConfigError("measure descriptor: mixture atoms are w@k:v ...");
      spec.weights.push_back(to_real(trim_view(part.substr(0, at))));
      spec.atoms.push_back(parse_sparse_field(part.substr(at + 1)));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    return spec;
  }
  throw ConfigError("measure descriptor: unknown kind '" + std::string(name) + "'");
}

ParticleMeasure sample_initial_measure(const MeasureDescriptor& spec, Index n_particles, Index m, RngStream& rng) {
  if (n_particles < 1) throw ConfigError("sample_initial_measure: need at least one particle");
  const double equal = 1.0 / static_cast<double>(n_particles);

  if (const auto* d = std::get_if<DiracSpec>(&spec)) {
    if (d->x.size() > m) throw ConfigError("dirac atom uses modes beyond m");
    return ParticleMeasure::dirac(resize_modes(d->x, m), n_particles);
  }
  if (const auto* g = std::get_if<GaussianModesSpec>(&spec)) {
    if (static_cast<Index>(g->sigma.size()) > m) throw ConfigError("gaussian_modes lists more modes than m");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, n_particles);
    for (Index i = 0; i < n_particles; ++i)
      for (std::size_t k = 0; k < g->sigma.size(); ++k) p(static_cast<Index>(k), i) = g->sigma[k] * rng.normal();
    return ParticleMeasure(std::move(p), Eigen::VectorXd::Constant(n_particles, equal));
  }
  const auto& mix = std::get<DiracMixtureSpec>(spec);
  const std::size_t atoms = mix.atoms.size();
  if (atoms == 0 || mix.weights.size() != atoms) throw ConfigError("mixture: need matching atoms and weights");
  if (static_cast<Index>(atoms) > n_particles) throw ConfigError("mixture: more atoms than particles");
  double tv = 0.0;
  for (double w : mix.weights) {
    if (!std::isfinite(w) || w == 0.0) throw ConfigError("mixture: weights must be finite and nonzero");
    tv += std::abs(w);
  }
  // Largest remainder, with at least one particle per atom.
  std::vector<Index> counts(atoms, 1);
  Index left = n_particles - static_cast<Index>(atoms);
  std::vector<double> rem(atoms);
  Index assigned = 0;
  for (std::size_t j = 0; j < atoms; ++j) {
    const double share = static_cast<double>(left) * std::abs(mix.weights[j]) / tv;
    const auto whole = static_cast<Index>(std::floor(share));
    counts[j] += whole;
    assigned += whole;
    rem[j] = share - static_cast<double>(whole);
  }
  std::vector<std::size_t> order(atoms);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t r = 0; assigned < left; ++r, ++assigned) ++counts[order[r % atoms]];

  Eigen::MatrixXd p(m, n_particles);
  Eigen::VectorXd w(n_particles);
  Index col = 0;
  for (std::size_t j = 0; j < atoms; ++j) {
    if (mix.atoms[j].size() > m) throw ConfigError("mixture atom uses modes beyond m");
    const SpectralField x = resize_modes(mix.atoms[j], m);
    for (Index c = 0; c < counts[j]; ++c, ++col) {
      p.col(col) = x;
      w(col) = mix.weights[j] / static_cast<double>(counts[j]);
    }
  }
  return ParticleMeasure(std::move(p), std::move(w));
}

void write_measure_csv(std::ostream& os, const ParticleMeasure& mu) {
  os << 'w';
  for (Index k = 1; k <= mu.modes(); ++k) os << ",c_" << k;
  os << '\n';
  for (Index i = 0; i < mu.size(); ++i) {
    os << format_double(mu.weights(i));
    for (Index k = 0; k < mu.modes(); ++k) os << ',' << format_double(mu.particles(k, i));
    os << '\n';
  }
}

}  // namespace sburgers
