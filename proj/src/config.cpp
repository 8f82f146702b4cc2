#include "msnest/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "msnest/data_io.hpp"

namespace msnest {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + s + "' is not a number");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + s + "' is not a non-negative integer");
  }
  return v;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_ws(s)) out.push_back(to_double(t));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

bool to_switch(const std::string& s) {
  if (s == "on" || s == "true") return true;
  if (s == "off" || s == "false") return false;
  throw std::invalid_argument("'" + s + "' is not on/off");
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_double(v[i]);
  return out;
}

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

void validate(const RunConfig& c, std::vector<std::string>& problems) {
  if (c.params.empty()) problems.push_back("no 'param <name> <min> <max>' lines");
  std::set<std::string> seen;
  for (const auto& p : c.params) {
    if (!seen.insert(p.name).second) problems.push_back("duplicate parameter '" + p.name + "'");
    if (!(p.lower < p.upper)) problems.push_back("parameter '" + p.name + "' needs min < max");
  }
  const std::size_t dim = c.params.size();
  if (c.needs_data()) {
    const std::size_t want = c.model_spec().param_count();
    if (dim != want && dim != 0) {
      problems.push_back("model expects " + std::to_string(want) + " parameters, config declares " +
                         std::to_string(dim));
    }
    if (c.data_path.empty() && !c.simulate) problems.push_back("missing 'data' (or simulate_* keys)");
    if (c.simulate && c.simulate->truth.size() != want) {
      problems.push_back("simulate_truth needs " + std::to_string(want) + " values");
    }
    if (c.simulate && c.simulate->grid_points < 1) problems.push_back("simulate_grid needs >= 1 point");
  } else if (c.model == ModelKind::GaussianTarget) {
    if (c.target_mean.size() != dim || c.target_sigma.size() != dim) {
      problems.push_back("target_mean and target_sigma need one value per parameter");
    }
    for (double s : c.target_sigma) {
      if (!(s > 0.0)) problems.push_back("target_sigma values must be > 0");
    }
  }
  if (c.model == ModelKind::GaussPeaks && c.n_peaks < 1) problems.push_back("gauss_peaks needs n >= 1");
  if (c.hist_bins < 1) problems.push_back("hist_bins must be >= 1");
  if (dim == 0) return;
  try {
    c.sampler_config().validate(dim);
  } catch (const std::invalid_argument& e) {
    problems.push_back(e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

ParameterSpace RunConfig::space() const {
  std::vector<std::string> names;
  std::vector<double> lo, hi;
  for (const auto& p : params) {
    names.push_back(p.name);
    lo.push_back(p.lower);
    hi.push_back(p.upper);
  }
  return ParameterSpace(std::move(names), std::move(lo), std::move(hi));
}

SamplerConfig RunConfig::sampler_config() const {
  SamplerConfig s = sampler;
  s.clustering.reset();
  if (clustering) s.clustering = cluster;
  return s;
}

ModelSpec RunConfig::model_spec() const {
  if (model == ModelKind::GaussPeaks) return ModelSpec::gauss_peaks(n_peaks);
  if (model == ModelKind::ModulatedDecay) return ModelSpec::modulated_decay();
  throw std::logic_error("model_spec: analytic targets have no spectral model");
}

std::filesystem::path RunConfig::resolved_data_path() const {
  const std::filesystem::path p(data_path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.model == b.model && a.n_peaks == b.n_peaks && a.target_mean == b.target_mean &&
         a.target_sigma == b.target_sigma && a.constant_log_l == b.constant_log_l &&
         a.data_path == b.data_path && a.data_kind == b.data_kind && a.simulate == b.simulate &&
         a.params == b.params && a.sampler == b.sampler && a.clustering == b.clustering &&
         a.cluster == b.cluster && a.hist_bins == b.hist_bins && a.output_dir == b.output_dir;
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  c.sampler.clustering.reset();
  std::vector<std::string> problems;
  bool have_model = false;
  SimulateSpec sim;
  bool have_sim = false;

  auto sim_key = [&](auto&& fn) {
    return [&, fn](const std::string& v) {
      fn(v);
      have_sim = true;
    };
  };

  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"model",
       [&](const std::string& v) {
         const auto t = split_ws(v);
         if (t.empty()) throw std::invalid_argument("empty model");
         if (t[0] == "gauss_peaks" && t.size() == 2) {
           c.model = ModelKind::GaussPeaks;
           c.n_peaks = to_unsigned(t[1]);
         } else if (t[0] == "decay" && t.size() == 1) {
           c.model = ModelKind::ModulatedDecay;
         } else if (t[0] == "gaussian_target" && t.size() == 1) {
           c.model = ModelKind::GaussianTarget;
         } else if (t[0] == "constant" && t.size() == 1) {
           c.model = ModelKind::Constant;
         } else {
           throw std::invalid_argument("unknown model '" + v +
                                       "' (gauss_peaks <n> | decay | gaussian_target | constant)");
         }
         have_model = true;
       }},
      {"target_mean", [&](const std::string& v) { c.target_mean = to_list(v); }},
      {"target_sigma", [&](const std::string& v) { c.target_sigma = to_list(v); }},
      {"constant_log_l", [&](const std::string& v) { c.constant_log_l = to_double(v); }},
      {"data", [&](const std::string& v) { c.data_path = v; }},
      {"data_kind",
       [&](const std::string& v) {
         if (v == "counts") {
           c.data_kind = DataKind::Counts;
         } else if (v == "gaussian") {
           c.data_kind = DataKind::GaussianErrors;
         } else {
           throw std::invalid_argument("data_kind must be counts or gaussian");
         }
       }},
      {"live_points", [&](const std::string& v) { c.sampler.live_points = to_unsigned(v); }},
      {"walk_steps", [&](const std::string& v) { c.sampler.walk_steps = to_unsigned(v); }},
      {"step_factor", [&](const std::string& v) { c.sampler.step_factor = to_double(v); }},
      {"tries_per_cycle", [&](const std::string& v) { c.sampler.tries_per_cycle = to_unsigned(v); }},
      {"cycles_per_cluster", [&](const std::string& v) { c.sampler.cycles_per_cluster = to_unsigned(v); }},
      {"try_budget", [&](const std::string& v) { c.sampler.try_budget = to_unsigned(v); }},
      {"quadrature",
       [&](const std::string& v) {
         if (v == "rectangle") {
           c.sampler.quadrature = Quadrature::Rectangle;
         } else if (v == "trapezoid") {
           c.sampler.quadrature = Quadrature::Trapezoid;
         } else {
           throw std::invalid_argument("quadrature must be rectangle or trapezoid");
         }
       }},
      {"term_eps", [&](const std::string& v) { c.sampler.term_eps = to_double(v); }},
      {"max_iter", [&](const std::string& v) { c.sampler.max_iter = to_unsigned(v); }},
      {"n_runs", [&](const std::string& v) { c.sampler.n_runs = to_unsigned(v); }},
      {"seed", [&](const std::string& v) { c.sampler.seed = to_unsigned(v); }},
      {"clustering", [&](const std::string& v) { c.clustering = to_switch(v); }},
      {"kernel",
       [&](const std::string& v) {
         if (v == "gaussian") {
           c.cluster.kernel = Kernel::Gaussian;
         } else if (v == "flat") {
           c.cluster.kernel = Kernel::Flat;
         } else {
           throw std::invalid_argument("kernel must be gaussian or flat");
         }
       }},
      {"radius", [&](const std::string& v) { c.cluster.radius = to_double(v); }},
      {"bandwidth", [&](const std::string& v) { c.cluster.bandwidth = to_double(v); }},
      {"squared_gaussian", [&](const std::string& v) { c.cluster.squared_gaussian = to_switch(v); }},
      {"shift_max_steps", [&](const std::string& v) { c.cluster.max_steps = to_unsigned(v); }},
      {"shift_tol", [&](const std::string& v) { c.cluster.shift_tol = to_double(v); }},
      {"merge_tol", [&](const std::string& v) { c.cluster.merge_tol = to_double(v); }},
      {"hist_bins", [&](const std::string& v) { c.hist_bins = to_unsigned(v); }},
      {"output", [&](const std::string& v) { c.output_dir = v; }},
      {"simulate_truth", sim_key([&](const std::string& v) { sim.truth = to_list(v); })},
      {"simulate_grid", sim_key([&](const std::string& v) {
         const auto t = split_ws(v);
         if (t.size() != 3) throw std::invalid_argument("simulate_grid needs: <low> <high> <points>");
         sim.grid_low = to_double(t[0]);
         sim.grid_high = to_double(t[1]);
         sim.grid_points = to_unsigned(t[2]);
       })},
      {"simulate_yerr", sim_key([&](const std::string& v) { sim.yerr = to_double(v); })},
      {"simulate_seed", sim_key([&](const std::string& v) { sim.seed = to_unsigned(v); })},
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      const auto words = split_ws(line);
      if (words[0] == "param") {
        if (words.size() != 4) throw std::invalid_argument("expected 'param <name> <min> <max>'");
        c.params.push_back({words[1], to_double(words[2]), to_double(words[3])});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected 'key = value'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      const auto it = setters.find(key);
      if (it == setters.end()) throw std::invalid_argument("unknown key '" + key + "'");
      if (value.empty()) throw std::invalid_argument("empty value for '" + key + "'");
      it->second(value);
    } catch (const std::invalid_argument& e) {
      problems.push_back(where + e.what());
    }
  }
  if (have_sim) c.simulate = sim;
  if (!have_model) problems.push_back("missing 'model'");
  if (problems.empty()) validate(c, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  RunConfig c = parse_config(in);
  c.base_dir = path.parent_path();
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  switch (c.model) {
    case ModelKind::GaussPeaks: out << "model = gauss_peaks " << c.n_peaks << '\n'; break;
    case ModelKind::ModulatedDecay: out << "model = decay\n"; break;
    case ModelKind::GaussianTarget: out << "model = gaussian_target\n"; break;
    case ModelKind::Constant: out << "model = constant\n"; break;
  }
  if (c.model == ModelKind::GaussianTarget) {
    out << "target_mean = " << join_list(c.target_mean) << '\n';
    out << "target_sigma = " << join_list(c.target_sigma) << '\n';
  }
  if (c.model == ModelKind::Constant) out << "constant_log_l = " << format_double(c.constant_log_l) << '\n';
  if (!c.data_path.empty()) out << "data = " << c.data_path << '\n';
  out << "data_kind = " << (c.data_kind == DataKind::Counts ? "counts" : "gaussian") << '\n';
  for (const auto& p : c.params) {
    out << "param " << p.name << ' ' << format_double(p.lower) << ' ' << format_double(p.upper) << '\n';
  }
  const auto& s = c.sampler;
  out << "live_points = " << s.live_points << '\n'
      << "walk_steps = " << s.walk_steps << '\n'
      << "step_factor = " << format_double(s.step_factor) << '\n'
      << "tries_per_cycle = " << s.tries_per_cycle << '\n'
      << "cycles_per_cluster = " << s.cycles_per_cluster << '\n'
      << "try_budget = " << s.try_budget << '\n'
      << "quadrature = " << (s.quadrature == Quadrature::Rectangle ? "rectangle" : "trapezoid") << '\n'
      << "term_eps = " << format_double(s.term_eps) << '\n'
      << "max_iter = " << s.max_iter << '\n'
      << "n_runs = " << s.n_runs << '\n'
      << "seed = " << s.seed << '\n';
  const auto& k = c.cluster;
  out << "clustering = " << (c.clustering ? "on" : "off") << '\n'
      << "kernel = " << (k.kernel == Kernel::Gaussian ? "gaussian" : "flat") << '\n'
      << "radius = " << format_double(k.radius) << '\n'
      << "bandwidth = " << format_double(k.bandwidth) << '\n'
      << "squared_gaussian = " << (k.squared_gaussian ? "on" : "off") << '\n'
      << "shift_max_steps = " << k.max_steps << '\n'
      << "shift_tol = " << format_double(k.shift_tol) << '\n'
      << "merge_tol = " << format_double(k.merge_tol) << '\n'
      << "hist_bins = " << c.hist_bins << '\n'
      << "output = " << c.output_dir << '\n';
  if (c.simulate) {
    const auto& m = *c.simulate;
    out << "simulate_truth = " << join_list(m.truth) << '\n'
        << "simulate_grid = " << format_double(m.grid_low) << ' ' << format_double(m.grid_high) << ' '
        << m.grid_points << '\n'
        << "simulate_yerr = " << format_double(m.yerr) << '\n'
        << "simulate_seed = " << m.seed << '\n';
  }
  return out.str();
}

std::vector<std::string> config_warnings(const RunConfig& config) {
  return config.sampler_config().warnings();
}

Dataset load_dataset(const RunConfig& config) {
  if (!config.data_path.empty()) return read_data(config.resolved_data_path(), config.data_kind);
  if (!config.simulate) throw ConfigError({"no data path and no simulate spec"});
  const auto& sim = *config.simulate;
  Rng rng(sim.seed);
  const auto grid = linear_grid(sim.grid_low, sim.grid_high, sim.grid_points);
  return simulate(config.model_spec(), sim.truth, grid, config.data_kind, sim.yerr, rng);
}

Problem make_problem(const RunConfig& config, const std::optional<Dataset>& data) {
  switch (config.model) {
    case ModelKind::GaussianTarget:
      return {config.space(), gaussian_target(config.target_mean, config.target_sigma)};
    case ModelKind::Constant:
      return {config.space(), constant_target(config.constant_log_l)};
    default:
      if (!data) throw ConfigError({"model needs a dataset"});
      return {config.space(), make_log_likelihood(config.model_spec(), *data)};
  }
}

}  // namespace msnest
