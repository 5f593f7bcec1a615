#include "sburgers/semigroup.hpp"

#include "sburgers/parallel.hpp"
#include "sburgers/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sburgers {

namespace {

struct PanelBlock {
  std::vector<ComplexStats> stats;
  std::size_t aborted = 0;
};

void require_samples(std::size_t n) {
  if (n < 2) throw std::domain_error("Monte Carlo estimators need n >= 2");
}

McEstimate reduce_single(const std::vector<PanelBlock>& blocks, std::size_t index) {
  ComplexStats total;
  std::size_t aborted = 0;
  for (const auto& b : blocks) {
    total.merge(b.stats[index]);
    aborted += b.aborted;
  }
  return McEstimate::from(total, aborted);
}

/// Copy of cfg whose dt divides t into a multiple of `multiple` steps, using
/// the smallest such step count not below t / cfg.dt.
SimConfig aligned_config(const SimConfig& cfg, double t, std::size_t multiple) {
  SimConfig out = cfg;
  const auto base = static_cast<std::size_t>(std::ceil(t / cfg.dt - 1e-9));
  const std::size_t steps = std::max<std::size_t>(multiple, (base + multiple - 1) / multiple * multiple);
  out.dt = t / static_cast<double>(steps);
  out.T = t;
  return out;
}

}  // namespace

std::vector<McEstimate> estimate_Pt(std::span<const ExpFunction> fs, const SpectralField& x0, double t, std::size_t n,
                                    const SimConfig& cfg) {
  require_samples(n);
  if (!(t >= 0.0)) throw std::domain_error("estimate_Pt: t must be >= 0");
  const SpectralField x = resize_modes(x0, cfg.m);
  std::vector<McEstimate> out;
  if (t == 0.0) {
    for (const auto& f : fs) {
      McEstimate e = McEstimate::exact(eval(f, x));
      e.n = n;
      out.push_back(e);
    }
    return out;
  }
  const Stepper stepper(cfg);
  if (cfg.drift_enabled) (void)cfg.steps_for(t);

  const auto blocks = map_blocks<PanelBlock>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    PanelBlock acc{std::vector<ComplexStats>(fs.size()), 0};
    auto ws = stepper.make_workspace();
    SpectralField state(cfg.m);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(cfg.master_seed, i);
      state = x;
      try {
        stepper.advance(state, 0.0, t, rng, ws);
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      for (std::size_t j = 0; j < fs.size(); ++j) acc.stats[j].add(eval(fs[j], state));
    }
    return acc;
  });
  for (std::size_t j = 0; j < fs.size(); ++j) out.push_back(reduce_single(blocks, j));
  return out;
}

McEstimate estimate_Pt(const ExpFunction& f, const SpectralField& x, double t, std::size_t n, const SimConfig& cfg) {
  return estimate_Pt(std::span<const ExpFunction>(&f, 1), x, t, n, cfg).front();
}

std::vector<double> richardson_weights(std::span<const double> t_grid) {
  const std::size_t levels = t_grid.size();
  if (levels < 2) throw std::domain_error("generator_fd: t_grid needs at least two levels");
  for (double t : t_grid)
    if (!(t > 0.0)) throw std::domain_error("generator_fd: t_grid entries must be > 0");
  const double ratio = t_grid[0] / t_grid[1];
  if (!(ratio > 1.0)) throw std::domain_error("generator_fd: t_grid must be decreasing");
  for (std::size_t j = 1; j < levels; ++j) {
    if (std::abs(t_grid[j - 1] / t_grid[j] - ratio) > 1e-9 * ratio)
      throw std::domain_error("generator_fd: t_grid must be a geometric progression");
  }
  // Neville table on the basis vectors: column k removes the t^k term.
  std::vector<std::vector<double>> table(levels, std::vector<double>(levels, 0.0));
  for (std::size_t j = 0; j < levels; ++j) table[j][j] = 1.0;
  for (std::size_t k = 1; k < levels; ++k) {
    const double rk = std::pow(ratio, static_cast<double>(k));
    for (std::size_t j = levels - 1; j >= k; --j) {
      for (std::size_t c = 0; c < levels; ++c) table[j][c] = (rk * table[j][c] - table[j - 1][c]) / (rk - 1.0);
      if (j == k) break;
    }
  }
  return table[levels - 1];
}

GeneratorEstimate generator_fd(const ExpFunction& f, const SpectralField& x0, std::span<const double> t_grid,
                               std::size_t n, const SimConfig& cfg) {
  require_samples(n);
  const std::vector<double> weights = richardson_weights(t_grid);
  const SpectralField x = resize_modes(x0, cfg.m);
  const Complex phi0 = eval(f, x);
  const Stepper stepper(cfg);
  const std::size_t levels = t_grid.size();

  // Visit levels in increasing time; each path continues from the previous level.
  std::vector<std::size_t> order(levels);
  for (std::size_t j = 0; j < levels; ++j) order[j] = levels - 1 - j;
  if (cfg.drift_enabled)
    for (double t : t_grid) (void)cfg.steps_for(t);

  struct Block {
    ComplexStats combined;
    std::vector<ComplexStats> quotients;
    std::size_t aborted = 0;
  };
  const auto blocks = map_blocks<Block>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    Block acc{ComplexStats{}, std::vector<ComplexStats>(levels), 0};
    auto ws = stepper.make_workspace();
    SpectralField state(cfg.m);
    std::vector<Complex> q(levels);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(cfg.master_seed, i);
      state = x;
      double t_now = 0.0;
      try {
        for (const std::size_t j : order) {
          stepper.advance(state, t_now, t_grid[j] - t_now, rng, ws);
          t_now = t_grid[j];
          q[j] = (eval(f, state) - phi0) / t_grid[j];
        }
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      Complex d{};
      for (std::size_t j = 0; j < levels; ++j) {
        d += weights[j] * q[j];
        acc.quotients[j].add(q[j]);
      }
      acc.combined.add(d);
    }
    return acc;
  });

  ComplexStats combined;
  std::vector<ComplexStats> quotients(levels);
  GeneratorEstimate out;
  for (const auto& b : blocks) {
    combined.merge(b.combined);
    for (std::size_t j = 0; j < levels; ++j) quotients[j].merge(b.quotients[j]);
    out.aborted += b.aborted;
  }
  out.value = combined.mean();
  out.err_re = combined.real().std_error();
  out.err_im = combined.imag().std_error();
  out.n = combined.count();
  for (const auto& qs : quotients) out.quotients.push_back(qs.mean());
  return out;
}

std::vector<CkResult> chapman_kolmogorov(std::span<const ExpFunction> fs, const SpectralField& x0, double s, double t,
                                         std::size_t n_outer, std::size_t n_inner, const SimConfig& cfg) {
  if (!(s >= 0.0) || !(t >= 0.0)) throw std::domain_error("chapman_kolmogorov: s and t must be >= 0");
  if (n_outer < 2 || n_inner < 1) throw std::domain_error("chapman_kolmogorov: need n_outer >= 2, n_inner >= 1");
  const SpectralField x = resize_modes(x0, cfg.m);

  SimConfig direct_cfg = cfg;
  direct_cfg.master_seed = derive_seed(cfg.master_seed, "ck-direct");
  const auto direct = estimate_Pt(fs, x, s + t, n_outer * n_inner, direct_cfg);

  std::vector<CkResult> out;
  if (s == 0.0 || t == 0.0) {
    for (const auto& d : direct) out.push_back({d, d});
    return out;
  }

  const std::uint64_t outer_seed = derive_seed(cfg.master_seed, "ck-outer");
  const std::uint64_t inner_seed = derive_seed(cfg.master_seed, "ck-inner");
  const Stepper stepper(cfg);
  if (cfg.drift_enabled) {
    (void)cfg.steps_for(s);
    (void)cfg.steps_for(t);
  }

  const auto blocks = map_blocks<PanelBlock>(
      n_outer, cfg.workers,
      [&](std::size_t begin, std::size_t end) {
        PanelBlock acc{std::vector<ComplexStats>(fs.size()), 0};
        auto ws = stepper.make_workspace();
        SpectralField mid(cfg.m), state(cfg.m);
        std::vector<ComplexStats> inner(fs.size());
        for (std::size_t i = begin; i < end; ++i) {
          RngStream outer_rng(outer_seed, i);
          mid = x;
          try {
            stepper.advance(mid, 0.0, s, outer_rng, ws);
          } catch (const IntegrationError&) {
            ++acc.aborted;
            continue;
          }
          for (auto& st : inner) st = ComplexStats{};
          for (std::size_t j = 0; j < n_inner; ++j) {
            RngStream inner_rng(inner_seed, i * n_inner + j);
            state = mid;
            try {
              stepper.advance(state, s, t, inner_rng, ws);
            } catch (const IntegrationError&) {
              ++acc.aborted;
              continue;
            }
            for (std::size_t k = 0; k < fs.size(); ++k) inner[k].add(eval(fs[k], state));
          }
          if (inner.front().count() == 0) continue;
          for (std::size_t k = 0; k < fs.size(); ++k) acc.stats[k].add(inner[k].mean());
        }
        return acc;
      },
      8);

  for (std::size_t k = 0; k < fs.size(); ++k) out.push_back({direct[k], reduce_single(blocks, k)});
  return out;
}

CkResult chapman_kolmogorov(const ExpFunction& f, const SpectralField& x, double s, double t, std::size_t n_outer,
                            std::size_t n_inner, const SimConfig& cfg) {
  return chapman_kolmogorov(std::span<const ExpFunction>(&f, 1), x, s, t, n_outer, n_inner, cfg).front();
}

McEstimate estimate_feynman_kac(const ExpFunction& f, const SpectralField& x0, double t, double c, std::size_t n,
                                const SimConfig& cfg) {
  if (!(c >= 0.0)) throw std::domain_error("estimate_feynman_kac: c must be >= 0");
  // Without drift the weight is irrelevant and estimate_Pt samples exactly.
  if (c == 0.0 && !cfg.drift_enabled) return estimate_Pt(f, x0, t, n, cfg);
  require_samples(n);
  if (!(t >= 0.0)) throw std::domain_error("estimate_feynman_kac: t must be >= 0");
  const SpectralField x = resize_modes(x0, cfg.m);
  if (t == 0.0) {
    McEstimate e = McEstimate::exact(eval(f, x));
    e.n = n;
    return e;
  }
  const std::size_t steps = cfg.steps_for(t);
  const Stepper stepper(cfg);
  const FieldSampler sampler(Quadrature::for_norm(cfg.m, 4.0), cfg.m);
  const double half_dt = 0.5 * cfg.dt;

  const auto blocks = map_blocks<PanelBlock>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    PanelBlock acc{std::vector<ComplexStats>(1), 0};
    auto ws = stepper.make_workspace();
    SpectralField state(cfg.m);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(cfg.master_seed, i);
      state = x;
      double v_prev = sampler.lp_power(state, 4.0);
      double integral = 0.0;
      try {
        stepper.run(state, steps, 0.0, rng, ws, [&](std::size_t, double, const SpectralField& s) {
          const double v = sampler.lp_power(s, 4.0);
          integral += half_dt * (v_prev + v);
          v_prev = v;
        });
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      acc.stats[0].add(std::exp(-c * integral) * eval(f, state));
    }
    return acc;
  });
  return reduce_single(blocks, 0);
}

double FkReconstruction::sigma_re() const {
  return std::sqrt(direct.std_error_re * direct.std_error_re + damped.std_error_re * damped.std_error_re +
                   duhamel.std_error_re * duhamel.std_error_re);
}

double FkReconstruction::sigma_im() const {
  return std::sqrt(direct.std_error_im * direct.std_error_im + damped.std_error_im * damped.std_error_im +
                   duhamel.std_error_im * duhamel.std_error_im);
}

bool FkReconstruction::holds(double k) const {
  const Complex diff = lhs() - rhs();
  return std::abs(diff.real()) <= k * sigma_re() + quad_tol_re && std::abs(diff.imag()) <= k * sigma_im() + quad_tol_im;
}

FkReconstruction feynman_kac_reconstruction(const ExpFunction& f, const SpectralField& x0, double t, double c,
                                            std::size_t n, std::size_t n_nodes, const SimConfig& cfg) {
  require_samples(n);
  if (!(t > 0.0)) throw std::domain_error("feynman_kac_reconstruction: t must be > 0");
  if (!(c >= 0.0)) throw std::domain_error("feynman_kac_reconstruction: c must be >= 0");
  if (n_nodes < 2) throw std::domain_error("feynman_kac_reconstruction: need >= 2 nodes");
  const SpectralField x = resize_modes(x0, cfg.m);

  // Fine nodes (2 n_nodes - 1) must sit on the step grid.
  const std::size_t fine_intervals = 2 * (n_nodes - 1);
  const SimConfig run = aligned_config(cfg, t, fine_intervals);
  const std::size_t steps = run.steps_for(t);
  const std::size_t stride = steps / fine_intervals;

  FkReconstruction out;
  out.dt_used = run.dt;

  SimConfig direct_cfg = run;
  direct_cfg.master_seed = derive_seed(cfg.master_seed, "fk-direct");
  out.direct = estimate_Pt(f, x, t, n, direct_cfg);

  SimConfig damped_cfg = run;
  damped_cfg.master_seed = derive_seed(cfg.master_seed, "fk-damped");
  out.damped = estimate_feynman_kac(f, x, t, c, n, damped_cfg);

  const std::uint64_t duhamel_seed = derive_seed(cfg.master_seed, "fk-duhamel");
  const Stepper stepper(run);
  const FieldSampler sampler(Quadrature::for_norm(run.m, 4.0), run.m);
  const double half_dt = 0.5 * run.dt;
  const double h_fine = t / static_cast<double>(fine_intervals);

  const auto blocks = map_blocks<PanelBlock>(n, run.workers, [&](std::size_t begin, std::size_t end) {
    PanelBlock acc{std::vector<ComplexStats>(2), 0};
    auto ws = stepper.make_workspace();
    SpectralField state(run.m);
    std::vector<double> node_weight(fine_intervals + 1);  // exp(-c I(u)) V(X_u)
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(duhamel_seed, i);
      state = x;
      double v_prev = sampler.lp_power(state, 4.0);
      double integral = 0.0;
      node_weight[0] = v_prev;
      try {
        stepper.run(state, steps, 0.0, rng, ws, [&](std::size_t step, double, const SpectralField& s) {
          const double v = sampler.lp_power(s, 4.0);
          integral += half_dt * (v_prev + v);
          v_prev = v;
          if (step % stride == 0) node_weight[step / stride] = std::exp(-c * integral) * v;
        });
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      const Complex phi_t = eval(f, state);
      double fine = 0.0, coarse = 0.0;
      for (std::size_t j = 0; j <= fine_intervals; ++j) {
        const double wf = (j == 0 || j == fine_intervals) ? 0.5 : 1.0;
        fine += wf * node_weight[j];
        if (j % 2 == 0) coarse += wf * node_weight[j];
      }
      fine *= h_fine;
      coarse *= 2.0 * h_fine;
      acc.stats[0].add(c * coarse * phi_t);
      acc.stats[1].add(c * fine * phi_t);
    }
    return acc;
  });
  out.duhamel = reduce_single(blocks, 0);
  out.duhamel_refined = reduce_single(blocks, 1);
  // Trapezoid error of the coarse rule ~ (4/3)(T_h - T_{h/2}).
  const Complex delta = out.duhamel.mean - out.duhamel_refined.mean;
  out.quad_tol_re = 4.0 / 3.0 * std::abs(delta.real());
  out.quad_tol_im = 4.0 / 3.0 * std::abs(delta.imag());
  return out;
}

DerivativeEstimate directional_derivative_crn(const ExpFunction& f, const SpectralField& x0, const SpectralField& g0,
                                              double t, double eps, std::size_t n, const SimConfig& cfg) {
  require_samples(n);
  if (!(eps > 0.0)) throw std::domain_error("directional_derivative_crn: eps must be > 0");
  if (!(t >= 0.0)) throw std::domain_error("directional_derivative_crn: t must be >= 0");
  const SpectralField x = resize_modes(x0, cfg.m);
  const SpectralField g = resize_modes(g0, cfg.m);
  const SpectralField plus = x + eps * g;
  const SpectralField minus = x - eps * g;
  const Stepper stepper(cfg);
  if (cfg.drift_enabled) (void)cfg.steps_for(t);

  struct Block {
    ComplexStats stats;
    std::size_t aborted = 0;
  };
  const auto blocks = map_blocks<Block>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    Block acc;
    auto ws = stepper.make_workspace();
    SpectralField sp(cfg.m), sm(cfg.m);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng_p(cfg.master_seed, i);
      RngStream rng_m(cfg.master_seed, i);
      sp = plus;
      sm = minus;
      try {
        stepper.advance(sp, 0.0, t, rng_p, ws);
        stepper.advance(sm, 0.0, t, rng_m, ws);
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      acc.stats.add((eval(f, sp) - eval(f, sm)) / (2.0 * eps));
    }
    return acc;
  });
  ComplexStats total;
  DerivativeEstimate out;
  for (const auto& b : blocks) {
    total.merge(b.stats);
    out.aborted += b.aborted;
  }
  out.value = total.mean();
  out.err_re = total.real().std_error();
  out.err_im = total.imag().std_error();
  out.n = total.count();
  return out;
}

McEstimate moment_estimate(const SpectralField& x0, double p, double k, double T, std::size_t n,
                           const SimConfig& cfg) {
  if (!(p >= 2.0)) throw std::domain_error("moment_estimate: p must be >= 2");
  if (!(k >= 1.0)) throw std::domain_error("moment_estimate: k must be >= 1");
  if (!(T >= 0.0)) throw std::domain_error("moment_estimate: T must be >= 0");
  require_samples(n);
  const SpectralField x = resize_modes(x0, cfg.m);
  const FieldSampler sampler(Quadrature::for_norm(cfg.m, p), cfg.m);
  const double start = std::pow(sampler.lp_norm(x, p), k);
  if (T == 0.0) {
    McEstimate e = McEstimate::exact(start);
    e.n = n;
    return e;
  }
  const std::size_t steps = cfg.steps_for(T);
  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  const Stepper stepper(cfg);

  const auto blocks = map_blocks<PanelBlock>(n, cfg.workers, [&](std::size_t begin, std::size_t end) {
    PanelBlock acc{std::vector<ComplexStats>(1), 0};
    auto ws = stepper.make_workspace();
    SpectralField state(cfg.m);
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(cfg.master_seed, i);
      state = x;
      double sup = start;
      try {
        stepper.run(state, steps, 0.0, rng, ws, [&](std::size_t step, double, const SpectralField& s) {
          if (step % stride == 0 || step == steps) sup = std::max(sup, std::pow(sampler.lp_norm(s, p), k));
        });
      } catch (const IntegrationError&) {
        ++acc.aborted;
        continue;
      }
      acc.stats[0].add(Complex(sup, 0.0));
    }
    return acc;
  });
  return reduce_single(blocks, 0);
}

double v_weight(const SpectralField& x, const Quadrature& q) {
  return std::pow(lp_norm(x, 6.0, q), 8.0) * std::pow(lp_norm(x, 4.0, q), 2.0);
}

double v_weight(const SpectralField& x) {
  const FieldSampler six(Quadrature::for_norm(x.size(), 6.0), x.size());
  const FieldSampler four(Quadrature::for_norm(x.size(), 4.0), x.size());
  return std::pow(six.lp_norm(x, 6.0), 8.0) * std::pow(four.lp_norm(x, 4.0), 2.0);
}

}  // namespace sburgers
