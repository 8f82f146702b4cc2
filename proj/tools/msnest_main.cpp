// msnest: nested sampling with mean-shift cluster recognition.
//
//   msnest run <config> [--seed S] [--runs R] [--no-cluster] [--quadrature rectangle|trapezoid]
//   msnest simulate <config> --out <dir>
//   msnest kscan <config> --k 250,500,1000 [--exclude-delta ...] [--exclude-cpu ...]
//
// Exit codes: 0 success, 1 one or more runs failed, 2 invalid input.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msnest/config.hpp"
#include "msnest/data_io.hpp"
#include "msnest/engine.hpp"
#include "msnest/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  bool no_cluster = false;
  std::string quadrature;
};

void apply(const Overrides& o, msnest::RunConfig& cfg) {
  if (o.seed) cfg.sampler.seed = *o.seed;
  if (o.runs) cfg.sampler.n_runs = *o.runs;
  if (o.no_cluster) cfg.clustering = false;
  if (o.quadrature == "rectangle") cfg.sampler.quadrature = msnest::Quadrature::Rectangle;
  if (o.quadrature == "trapezoid") cfg.sampler.quadrature = msnest::Quadrature::Trapezoid;
}

msnest::RunConfig load(const std::string& path, const Overrides& o) {
  msnest::RunConfig cfg = msnest::parse_config_file(path);
  apply(o, cfg);
  cfg.sampler_config().validate(cfg.params.size());
  for (const auto& w : msnest::config_warnings(cfg)) std::cerr << "warning: " << w << '\n';
  return cfg;
}

std::optional<msnest::Dataset> dataset_for(const msnest::RunConfig& cfg) {
  if (!cfg.needs_data()) return std::nullopt;
  return msnest::load_dataset(cfg);
}

int cmd_run(const std::string& path, const Overrides& o) {
  const msnest::RunConfig cfg = load(path, o);
  const auto data = dataset_for(cfg);
  const msnest::Problem problem = msnest::make_problem(cfg, data);
  const msnest::SamplerConfig sampler = cfg.sampler_config();

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<msnest::NestedRun> runs = msnest::run_many(problem, sampler);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  msnest::ResultsReport report =
      msnest::build_report(runs, problem.space.names(), sampler.live_points, wall);
  report.warnings = msnest::config_warnings(cfg);
  const std::filesystem::path out_dir(cfg.output_dir);
  msnest::write_outputs(out_dir, report, runs, problem.space, cfg.hist_bins);
  if (data && cfg.data_path.empty()) msnest::write_data(out_dir / "data.dat", *data);
  {
    std::ofstream echo(out_dir / "config_used.txt");
    echo << msnest::serialize_config(cfg);
  }

  std::cout << "ln E = "
            << (report.mean_log_evidence ? msnest::format_double(*report.mean_log_evidence) : "null")
            << " +/- "
            << (report.delta_log_evidence ? msnest::format_double(*report.delta_log_evidence) : "null")
            << "  (" << runs.size() - report.failed_runs << "/" << runs.size() << " runs, "
            << wall << " s)\n"
            << "results written to " << out_dir.string() << '\n';
  return report.failed_runs > 0 ? kExitPartial : kExitOk;
}

int cmd_simulate(const std::string& path, const Overrides& o, const std::string& out) {
  const msnest::RunConfig cfg = load(path, o);
  if (!cfg.needs_data() || !cfg.simulate) {
    throw msnest::ConfigError({"simulate needs a spectral model and simulate_* keys"});
  }
  msnest::RunConfig sim_only = cfg;
  sim_only.data_path.clear();
  const msnest::Dataset data = msnest::load_dataset(sim_only);
  const std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  msnest::write_data(dir / "data.dat", data);

  std::ofstream truth(dir / "truth.txt");
  const auto& s = *cfg.simulate;
  const std::string canon = msnest::serialize_config(cfg);
  const std::string model_line = canon.substr(0, canon.find('\n'));
  truth << "model: " << model_line.substr(model_line.find('=') + 2) << '\n'
        << "data_kind: " << (cfg.data_kind == msnest::DataKind::Counts ? "counts" : "gaussian") << '\n'
        << "seed: " << s.seed << '\n'
        << "grid: " << msnest::format_double(s.grid_low) << ' ' << msnest::format_double(s.grid_high)
        << ' ' << s.grid_points << '\n';
  if (cfg.data_kind == msnest::DataKind::GaussianErrors) {
    truth << "yerr: " << msnest::format_double(s.yerr) << '\n';
  }
  for (std::size_t j = 0; j < s.truth.size(); ++j) {
    truth << "truth." << cfg.params[j].name << ": " << msnest::format_double(s.truth[j]) << '\n';
  }
  std::cout << "wrote " << (dir / "data.dat").string() << " and " << (dir / "truth.txt").string() << '\n';
  return kExitOk;
}

int cmd_kscan(const std::string& path, const Overrides& o, const std::vector<std::size_t>& ks,
              const std::vector<std::size_t>& ex_delta, const std::vector<std::size_t>& ex_cpu) {
  const msnest::RunConfig cfg = load(path, o);
  if (ks.size() < 3) throw msnest::ConfigError({"--k needs at least three values"});
  const auto data = dataset_for(cfg);
  const msnest::Problem problem = msnest::make_problem(cfg, data);
  const msnest::KScanResult result = msnest::kscan(problem, cfg.sampler_config(), ks, ex_delta, ex_cpu);

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "kscan.csv") << msnest::format_kscan(result);
  std::cout << msnest::format_kscan(result);
  bool failed = false;
  for (const auto& row : result.rows) failed = failed || row.failed_runs > 0;
  return failed ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested sampling with mean-shift cluster recognition"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  std::string out_dir;
  std::vector<std::size_t> ks, ex_delta, ex_cpu;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration file")->required();
    sub->add_option("--seed", o.seed, "base seed (run i uses seed + i)");
    sub->add_option("--runs", o.runs, "number of independent runs");
    sub->add_flag("--no-cluster", o.no_cluster, "disable mean-shift clustering");
    sub->add_option("--quadrature", o.quadrature, "rectangle or trapezoid")
        ->check(CLI::IsMember({"rectangle", "trapezoid"}));
  };

  CLI::App* run = app.add_subcommand("run", "analyse data and write results");
  add_common(run);
  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim);
  sim->add_option("--out", out_dir, "output directory")->required();
  CLI::App* scan = app.add_subcommand("kscan", "scaling study over live-point counts");
  add_common(scan);
  scan->add_option("--k", ks, "live-point counts")->delimiter(',')->required();
  scan->add_option("--exclude-delta", ex_delta, "K values left out of the ln E spread fit")->delimiter(',');
  scan->add_option("--exclude-cpu", ex_cpu, "K values left out of the CPU time fit")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(config_path, o);
    if (*sim) return cmd_simulate(config_path, o, out_dir);
    if (*scan) return cmd_kscan(config_path, o, ks, ex_delta, ex_cpu);
  } catch (const msnest::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitInvalid;
  } catch (const msnest::DataError& e) {
    std::cerr << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitInvalid;
}
