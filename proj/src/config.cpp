#include "sburgers/config.hpp"

#include "sburgers/format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace sburgers {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(std::string(key) + ": expected a real number, got '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(text) + "'");
}

std::vector<double> parse_reals(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto w : words(text)) out.push_back(parse_real(key, w));
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

SpectralField parse_sparse_field(std::string_view text, Index m) {
  text = trim(text);
  std::vector<std::pair<Index, double>> terms;
  Index top = 0;
  if (!text.empty() && text != "0") {
    for (auto w : words(text)) {
      const auto colon = w.find(':');
      if (colon == std::string_view::npos) throw ConfigError("sparse field: expected k:v, got '" + std::string(w) + "'");
      const auto k = parse_unsigned("sparse field mode", w.substr(0, colon));
      if (k < 1) throw ConfigError("sparse field: modes are 1-based");
      const double v = parse_real("sparse field value", w.substr(colon + 1));
      terms.emplace_back(static_cast<Index>(k), v);
      top = std::max(top, static_cast<Index>(k));
    }
  }
  SpectralField x = SpectralField::Zero(std::max(top, m));
  for (const auto& [k, v] : terms) x(k - 1) += v;
  return x;
}

std::string format_sparse_field(const SpectralField& x) {
  std::string out;
  for (Index k = 0; k < x.size(); ++k) {
    if (x(k) == 0.0) continue;
    if (!out.empty()) out += ' ';
    out += std::to_string(k + 1) + ':' + format_double(x(k));
  }
  return out.empty() ? "0" : out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "m",      "dt",      "T",       "drift", "noise", "record_stride", "quadrature_points", "seed",
      "workers", "x",      "g",       "h",     "t_grid", "norm_grid",    "measure",           "t",
      "s",      "c",       "eps",     "p",     "k",     "n",             "n_outer",           "n_inner",
      "n_nodes", "n_quad", "particles"};
  return keys;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::string panel;
  for (std::size_t i = 0; i < h_panel.size(); ++i) {
    if (i) panel += "; ";
    panel += format_sparse_field(h_panel[i]);
  }
  return {
      {"m", std::to_string(sim.m)},
      {"dt", format_double(sim.dt)},
      {"T", format_double(sim.T)},
      {"drift", sim.drift_enabled ? "true" : "false"},
      {"noise", sim.noise_enabled ? "true" : "false"},
      {"record_stride", std::to_string(sim.record_stride)},
      {"quadrature_points", std::to_string(sim.quadrature_points)},
      {"seed", std::to_string(sim.master_seed)},
      {"workers", std::to_string(sim.workers)},
      {"x", format_sparse_field(x)},
      {"g", format_sparse_field(g)},
      {"h", panel},
      {"t_grid", join_reals(t_grid)},
      {"norm_grid", join_reals(norm_grid)},
      {"measure", measure},
      {"t", format_double(t)},
      {"s", format_double(s)},
      {"c", format_double(c)},
      {"eps", format_double(eps)},
      {"p", format_double(p)},
      {"k", format_double(k)},
      {"n", std::to_string(n)},
      {"n_outer", std::to_string(n_outer)},
      {"n_inner", std::to_string(n_inner)},
      {"n_nodes", std::to_string(n_nodes)},
      {"n_quad", std::to_string(n_quad)},
      {"particles", std::to_string(particles)},
  };
}

RunConfig parse_run_config(std::istream& is) {
  std::map<std::string, std::string, std::less<>> values;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!values.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  RunConfig cfg;
  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  auto count = [&](std::string_view key, std::size_t& out) {
    if (const auto* v = get(key)) out = static_cast<std::size_t>(parse_unsigned(key, *v));
  };
  auto real = [&](std::string_view key, double& out) {
    if (const auto* v = get(key)) out = parse_real(key, *v);
  };

  if (const auto* v = get("m")) cfg.sim.m = static_cast<Index>(parse_unsigned("m", *v));
  real("dt", cfg.sim.dt);
  real("T", cfg.sim.T);
  if (const auto* v = get("drift")) cfg.sim.drift_enabled = parse_bool("drift", *v);
  if (const auto* v = get("noise")) cfg.sim.noise_enabled = parse_bool("noise", *v);
  if (const auto* v = get("record_stride")) cfg.sim.record_stride = static_cast<Index>(parse_unsigned("record_stride", *v));
  if (const auto* v = get("quadrature_points"))
    cfg.sim.quadrature_points = static_cast<Index>(parse_unsigned("quadrature_points", *v));
  if (const auto* v = get("seed")) cfg.sim.master_seed = parse_unsigned("seed", *v);
  if (const auto* v = get("workers")) cfg.sim.workers = static_cast<int>(parse_unsigned("workers", *v));

  if (const auto* v = get("x")) cfg.x = parse_sparse_field(*v);
  if (const auto* v = get("g")) cfg.g = parse_sparse_field(*v);
  if (const auto* v = get("h")) {
    for (auto part : split(*v, ';')) cfg.h_panel.push_back(parse_sparse_field(part));
  }
  if (const auto* v = get("t_grid")) cfg.t_grid = parse_reals("t_grid", *v);
  if (const auto* v = get("norm_grid")) cfg.norm_grid = parse_reals("norm_grid", *v);
  if (const auto* v = get("measure")) cfg.measure = *v;

  real("t", cfg.t);
  real("s", cfg.s);
  real("c", cfg.c);
  real("eps", cfg.eps);
  real("p", cfg.p);
  real("k", cfg.k);
  count("n", cfg.n);
  count("n_outer", cfg.n_outer);
  count("n_inner", cfg.n_inner);
  count("n_nodes", cfg.n_nodes);
  count("n_quad", cfg.n_quad);
  count("particles", cfg.particles);

  if (cfg.x.size() == 0) cfg.x = SpectralField::Zero(cfg.sim.m);
  if (cfg.g.size() == 0) cfg.g = SpectralField::Zero(cfg.sim.m);
  if (cfg.h_panel.empty()) cfg.h_panel.push_back(unit_mode(cfg.sim.m, 1));
  for (const SpectralField* f : {&cfg.x, &cfg.g}) {
    if (f->size() > cfg.sim.m) throw ConfigError("sparse field uses modes beyond m");
  }
  for (const auto& h : cfg.h_panel) {
    if (h.size() > cfg.sim.m) throw ConfigError("h uses modes beyond m");
  }
  cfg.x = resize_modes(cfg.x, cfg.sim.m);
  cfg.g = resize_modes(cfg.g, cfg.sim.m);
  for (auto& h : cfg.h_panel) h = resize_modes(h, cfg.sim.m);
  cfg.sim.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

}  // namespace sburgers
