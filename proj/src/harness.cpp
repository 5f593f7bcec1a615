#include "sburgers/harness.hpp"

#include "sburgers/fokker_planck.hpp"
#include "sburgers/format.hpp"
#include "sburgers/rng.hpp"
#include "sburgers/semigroup.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sburgers {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

json params_json(const Params& p) {
  json out = json::object();
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

json record_json(const EstimateRecord& r, std::uint64_t seed) {
  json params = params_json(r.params);
  params["t"] = r.t;
  params["h"] = r.h_spec;
  params["x"] = r.x_spec;
  return json{{"op", r.op},       {"params", params},      {"mean_re", r.mean.real()}, {"mean_im", r.mean.imag()},
              {"stderr", r.std_error}, {"n", r.n},         {"seed", seed},             {"wall_time_s", r.wall_time_s}};
}

json criterion_json(const CriterionResult& c) {
  return json{{"id", c.id},
              {"name", c.name},
              {"pass", c.pass()},
              {"numeric_pass", c.numeric_pass},
              {"measured", c.measured},
              {"threshold", c.threshold},
              {"wall_time_s", c.wall_time_s},
              {"budget_s", c.budget_s}};
}

template <typename Fn>
void write_file(const std::filesystem::path& p, Fn&& fn) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  fn(os);
}

void require_valid(std::size_t aborted, const std::string& what) {
  if (aborted != 0)
    throw InvalidEstimate(what + ": " + std::to_string(aborted) + " path(s) blew up");
}

EstimateRecord estimate_record(std::string op, double t, const SpectralField& h, const SpectralField& x,
                               const McEstimate& e, double wall) {
  return EstimateRecord{std::move(op), t, format_sparse_field(h), format_sparse_field(x), e.mean, e.std_error(), e.n,
                        {}, wall};
}

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Each command fills a RunOutput and returns whether its checks passed.
using Command = bool (*)(const RunConfig&, const std::filesystem::path&, RunOutput&, std::ostream&);

bool cmd_simulate(const RunConfig& cfg, const std::filesystem::path& dir, RunOutput& out, std::ostream& log) {
  RngStream rng(cfg.sim.master_seed, 0);
  const Trajectory traj = simulate(cfg.x, cfg.sim, rng);
  write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  write_file(dir / "trajectory.bin", [&](std::ostream& os) { write_trajectory_binary(os, traj); });
  out.extra.emplace_back("snapshots", std::to_string(traj.size()));
  log << "simulate: " << traj.size() << " snapshot(s), |X(T)|_2 = " << format_double(traj.terminal().norm()) << '\n';
  return true;
}

bool cmd_ou_validate(const RunConfig& cfg, const std::filesystem::path&, RunOutput& out, std::ostream& log) {
  SimConfig sim = cfg.sim;
  sim.drift_enabled = false;
  bool pass = true;
  for (const auto& h : cfg.h_panel) {
    const auto start = Clock::now();
    const ExpFunction f(h);
    const McEstimate e = estimate_Pt(f, cfg.x, cfg.t, cfg.n, sim);
    require_valid(e.aborted, "ou-validate");
    const Complex exact = ou_exact_semigroup(f, cfg.x, cfg.t);
    const bool ok = within_sigmas(e.mean - exact, e.std_error_re, e.std_error_im, 4.0);
    pass = pass && ok;
    out.estimates.push_back(estimate_record("Pt_ou", cfg.t, h, cfg.x, e, since(start)));
    out.estimates.push_back(estimate_record("ou_exact", cfg.t, h, cfg.x, McEstimate::exact(exact), 0.0));
    log << "ou-validate h=" << format_sparse_field(h) << ": |diff| = " << format_double(std::abs(e.mean - exact))
        << (ok ? " ok" : " FAIL") << '\n';
  }
  return pass;
}

bool cmd_generator(const RunConfig& cfg, const std::filesystem::path&, RunOutput& out, std::ostream& log) {
  bool pass = true;
  for (const auto& h : cfg.h_panel) {
    const auto start = Clock::now();
    const ExpFunction f(h);
    const GeneratorEstimate g = generator_fd(f, cfg.x, cfg.t_grid, cfg.n, cfg.sim);
    require_valid(g.aborted, "generator-check");
    const Complex target = cfg.sim.drift_enabled ? apply_K0(f, cfg.x, cfg.sim.quadrature()) : apply_L0(f, cfg.x);
    const double sigma = std::hypot(g.err_re, g.err_im);
    const double tol = std::max(3.0 * sigma, 0.1 * std::abs(target));
    const bool ok = std::abs(g.value - target) <= tol;
    pass = pass && ok;
    McEstimate e{g.value, g.err_re, g.err_im, g.n, 0};
    out.estimates.push_back(estimate_record("generator_fd", cfg.t_grid.back(), h, cfg.x, e, since(start)));
    out.estimates.push_back(estimate_record(cfg.sim.drift_enabled ? "K0" : "L0", 0.0, h, cfg.x, McEstimate::exact(target), 0.0));
    log << "generator-check h=" << format_sparse_field(h) << ": D* = " << format_double(g.value.real()) << "+"
        << format_double(g.value.imag()) << "i, target " << format_double(target.real()) << "+"
        << format_double(target.imag()) << "i" << (ok ? " ok" : " FAIL") << '\n';
  }
  return pass;
}

bool cmd_ck(const RunConfig& cfg, const std::filesystem::path&, RunOutput& out, std::ostream& log) {
  std::vector<ExpFunction> fs;
  for (const auto& h : cfg.h_panel) fs.emplace_back(h);
  const auto start = Clock::now();
  const auto res = chapman_kolmogorov(fs, cfg.x, cfg.s, cfg.t, cfg.n_outer, cfg.n_inner, cfg.sim);
  const double wall = since(start);
  bool pass = true;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& [a, b] = res[i];
    require_valid(a.aborted + b.aborted, "ck-check");
    const bool ok = within_sigmas(a.mean - b.mean, std::hypot(a.std_error_re, b.std_error_re),
                                  std::hypot(a.std_error_im, b.std_error_im), 4.0);
    pass = pass && ok;
    out.estimates.push_back(estimate_record("ck_direct", cfg.s + cfg.t, fs[i].h(), cfg.x, a, wall));
    out.estimates.push_back(estimate_record("ck_nested", cfg.s + cfg.t, fs[i].h(), cfg.x, b, wall));
    log << "ck-check h=" << format_sparse_field(fs[i].h()) << ": |direct - nested| = "
        << format_double(std::abs(a.mean - b.mean)) << (ok ? " ok" : " FAIL") << '\n';
  }
  return pass;
}

bool cmd_feynman_kac(const RunConfig& cfg, const std::filesystem::path&, RunOutput& out, std::ostream& log) {
  bool pass = true;
  for (const auto& h : cfg.h_panel) {
    const auto start = Clock::now();
    const ExpFunction f(h);
    const FkReconstruction rec = feynman_kac_reconstruction(f, cfg.x, cfg.t, cfg.c, cfg.n, cfg.n_nodes, cfg.sim);
    require_valid(rec.direct.aborted + rec.damped.aborted + rec.duhamel.aborted, "feynman-kac");
    const bool ok = rec.holds(4.0);
    pass = pass && ok;
    const double wall = since(start);
    const Params params{{"c", format_double(cfg.c)}, {"n_nodes", std::to_string(cfg.n_nodes)}};
    for (const auto& [op, e] : {std::pair{"fk_direct", &rec.direct}, std::pair{"fk_damped", &rec.damped},
                                std::pair{"fk_duhamel", &rec.duhamel}}) {
      out.estimates.push_back(estimate_record(op, cfg.t, h, cfg.x, *e, wall));
      out.estimates.back().params = params;
    }
    log << "feynman-kac h=" << format_sparse_field(h) << ": |lhs - rhs| = " << format_double(std::abs(rec.lhs() - rec.rhs()))
        << (ok ? " ok" : " FAIL") << '\n';
  }
  return pass;
}

bool cmd_fokker_planck(const RunConfig& cfg, const std::filesystem::path& dir, RunOutput& out, std::ostream& log) {
  const MeasureDescriptor desc = parse_measure_descriptor(cfg.measure);
  RngStream init_rng(derive_seed(cfg.sim.master_seed, "initial-measure"), 0);
  const ParticleMeasure mu = sample_initial_measure(desc, static_cast<Index>(cfg.particles), cfg.sim.m, init_rng);
  write_file(dir / "measure.csv", [&](std::ostream& os) { write_measure_csv(os, mu); });
  bool pass = true;
  for (const auto& h : cfg.h_panel) {
    const auto start = Clock::now();
    const ExpFunction f(h);
    const WeakResidual w = weak_residual(mu, f, cfg.t, static_cast<Index>(cfg.n_quad), cfg.sim);
    require_valid(w.aborted, "fokker-planck");
    const bool ok = within_sigmas(w.residual(), w.err_re(), w.err_im(), 4.0);
    pass = pass && ok;
    out.residuals.push_back(ResidualRecord{cfg.t, w.residual(), std::hypot(w.mc_err_re, w.mc_err_im),
                                           std::hypot(w.quad_err_re, w.quad_err_im)});
    McEstimate lhs{w.lhs, w.lhs_err_re, w.lhs_err_im, static_cast<std::size_t>(mu.size()), 0};
    out.estimates.push_back(estimate_record("fp_lhs", cfg.t, h, SpectralField(), lhs, since(start)));
    out.estimates.push_back(estimate_record("fp_rhs", cfg.t, h, SpectralField(), McEstimate::exact(w.rhs), 0.0));
    out.extra.emplace_back("quad_shrink[" + format_sparse_field(h) + "]", format_double(w.quad_shrink()));
    out.extra.emplace_back("mc_err_re[" + format_sparse_field(h) + "]", format_double(w.mc_err_re));
    out.extra.emplace_back("mc_err_im[" + format_sparse_field(h) + "]", format_double(w.mc_err_im));
    out.extra.emplace_back("quad_err_re[" + format_sparse_field(h) + "]", format_double(w.quad_err_re));
    out.extra.emplace_back("quad_err_im[" + format_sparse_field(h) + "]", format_double(w.quad_err_im));
    log << "fokker-planck h=" << format_sparse_field(h) << ": residual " << format_double(std::abs(w.residual()))
        << ", combined error (" << format_double(w.err_re()) << ", " << format_double(w.err_im()) << ")"
        << (ok ? " ok" : " FAIL") << '\n';
  }
  const std::vector<double> grid{0.0, cfg.t};
  const MeasurePath path = push_forward(mu, grid, cfg.sim);
  require_valid(path.aborted, "fokker-planck pushforward");
  const double vi = v_integrability(path, Quadrature::for_norm(cfg.sim.m, 6.0));
  out.extra.emplace_back("v_integrability", format_double(vi));
  return pass;
}

bool cmd_moments(const RunConfig& cfg, const std::filesystem::path&, RunOutput& out, std::ostream& log) {
  const Quadrature q = Quadrature::for_norm(cfg.sim.m, cfg.p);
  SpectralField dir = cfg.x.norm() > 0.0 ? cfg.x : unit_mode(cfg.sim.m, 1);
  dir /= lp_norm(dir, cfg.p, q);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double a : cfg.norm_grid) {
    const auto start = Clock::now();
    const SpectralField x = a * dir;
    const McEstimate e = moment_estimate(x, cfg.p, cfg.k, cfg.sim.T, cfg.n, cfg.sim);
    require_valid(e.aborted, "moments");
    if (!std::isfinite(e.mean.real())) throw InvalidEstimate("moments: estimate is not finite");
    const double ratio = e.mean.real() / (1.0 + std::pow(a, cfg.k));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    auto rec = estimate_record("moment", cfg.sim.T, SpectralField(), x, e, since(start));
    rec.params = {{"p", format_double(cfg.p)}, {"k", format_double(cfg.k)}, {"norm", format_double(a)}};
    out.estimates.push_back(std::move(rec));
    log << "moments |x|_p=" << format_double(a) << ": E sup = " << format_double(e.mean.real()) << ", ratio "
        << format_double(ratio) << '\n';
  }
  out.extra.emplace_back("ratio_max_over_min", format_double(hi / lo));
  log << "moments: max/min ratio " << format_double(hi / lo) << '\n';
  return hi / lo < 10.0;
}

bool cmd_acceptance(const RunConfig& cfg, const std::filesystem::path& dir, RunOutput& out, std::ostream& log) {
  const AcceptanceSummary s = run_acceptance(cfg.sim.master_seed, {1, 4, 8}, dir, &log);
  out.criteria = s.criteria;
  for (const auto& c : s.criteria)
    log << "criterion " << c.id << " " << (c.pass() ? "PASS" : "FAIL") << "  " << c.name << ": " << c.measured << '\n';
  return s.all_pass();
}

const std::vector<std::pair<std::string, Command>>& commands() {
  static const std::vector<std::pair<std::string, Command>> table{
      {"simulate", cmd_simulate},       {"ou-validate", cmd_ou_validate}, {"generator-check", cmd_generator},
      {"ck-check", cmd_ck},             {"feynman-kac", cmd_feynman_kac}, {"fokker-planck", cmd_fokker_planck},
      {"moments", cmd_moments},         {"acceptance", cmd_acceptance}};
  return table;
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<EstimateRecord>& rows) {
  os << "op,t,h_spec,x_spec,mean_re,mean_im,stderr,n\n";
  for (const auto& r : rows) {
    os << csv_field(r.op) << ',' << format_double(r.t) << ',' << csv_field(r.h_spec) << ',' << csv_field(r.x_spec)
       << ',' << format_double(r.mean.real()) << ',' << format_double(r.mean.imag()) << ','
       << format_double(r.std_error) << ',' << r.n << '\n';
  }
}

void write_residuals_csv(std::ostream& os, const std::vector<ResidualRecord>& rows) {
  os << "t,res_re,res_im,mc_err,quad_err\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.residual.real()) << ',' << format_double(r.residual.imag())
       << ',' << format_double(r.mc_err) << ',' << format_double(r.quad_err) << '\n';
  }
}

void write_acceptance_csv(std::ostream& os, const std::vector<CriterionResult>& rows) {
  os << "criterion,name,pass,measured,threshold\n";
  for (const auto& r : rows) {
    os << r.id << ',' << csv_field(r.name) << ',' << (r.numeric_pass ? "true" : "false") << ','
       << csv_field(r.measured) << ',' << csv_field(r.threshold) << '\n';
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : commands()) v.push_back(name);
    return v;
  }();
  return names;
}

int run_command(const std::string& command, const RunConfig& cfg, const std::string& config_text,
                const std::filesystem::path& out_dir, std::ostream& log) {
  const auto& table = commands();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == command; });
  if (it == table.end()) {
    log << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  }

  const std::string started = utc_now();
  const auto start = Clock::now();
  RunOutput out;
  int status = kExitOk;
  std::string error;
  try {
    std::filesystem::create_directories(out_dir);
    status = it->second(cfg, out_dir, out, log) ? kExitOk : kExitFailed;
  } catch (const ConfigError& e) {
    error = e.what();
    status = kExitConfig;
  } catch (const IntegrationError& e) {
    error = e.what();
    status = kExitNumerical;
  } catch (const InvalidEstimate& e) {
    error = e.what();
    status = kExitNumerical;
  } catch (const std::logic_error& e) {
    // argument checks inside the library: an unusable configuration
    error = e.what();
    status = kExitConfig;
  }
  if (!error.empty()) log << "error: " << error << '\n';
  if (status == kExitConfig) return status;

  if (command != "acceptance") {
    write_file(out_dir / "results.csv", [&](std::ostream& os) { write_results_csv(os, out.estimates); });
    if (!out.residuals.empty())
      write_file(out_dir / "residuals.csv", [&](std::ostream& os) { write_residuals_csv(os, out.residuals); });
  }

  json manifest;
  manifest["tool"] = "sburgers";
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["seed"] = cfg.sim.master_seed;
  manifest["workers"] = cfg.sim.workers;
  json config = json::object();
  std::string effective;
  for (const auto& [k, v] : cfg.echo()) {
    config[k] = v;
    effective += k + " = " + v + "\n";
  }
  manifest["config"] = config;
  manifest["config_file"] = effective;
  manifest["config_source"] = config_text;
  manifest["started"] = started;
  manifest["finished"] = utc_now();
  manifest["wall_time_s"] = since(start);
  manifest["status"] = status;
  if (!error.empty()) manifest["error"] = error;
  json records = json::array();
  for (const auto& r : out.estimates) records.push_back(record_json(r, cfg.sim.master_seed));
  manifest["records"] = records;
  if (!out.criteria.empty()) {
    json crit = json::array();
    for (const auto& c : out.criteria) crit.push_back(criterion_json(c));
    manifest["criteria"] = crit;
  }
  if (!out.extra.empty()) manifest["diagnostics"] = params_json(out.extra);
  write_file(out_dir / "manifest.json", [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  return status;
}

}  // namespace sburgers
