#include "msnest/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "msnest/data_io.hpp"

namespace msnest {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "null"; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max_iterations";
    case RunStatus::Aborted: return "aborted";
  }
  return "unknown";
}

ResultsReport build_report(std::span<const NestedRun> runs, const std::vector<std::string>& names,
                           std::size_t live_points, double wall_seconds) {
  ResultsReport r;
  r.wall_seconds = wall_seconds;
  r.param_names = names;
  double h_sum = 0.0;
  double c_sum = 0.0;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    r.runs.push_back({i, run.seed, run.status, run.diagnostic, run.log_evidence, run.information,
                      run.complexity, run.iterations, run.total_tries, run.cluster_invocations,
                      run.cpu_seconds});
    r.iterations += run.iterations;
    r.total_tries += run.total_tries;
    r.cluster_invocations += run.cluster_invocations;
    r.constraint_violations += run.constraint_violations;
    r.out_of_bounds += run.out_of_bounds;
    r.cpu_seconds += run.cpu_seconds;
    if (run.status == RunStatus::Aborted) {
      ++r.failed_runs;
    } else {
      h_sum += run.information;
      c_sum += run.complexity;
      ++usable;
    }
  }
  const CombinedEvidence ev = combine_runs(runs);
  if (ev.usable_runs > 0) {
    r.mean_log_evidence = ev.mean_log_evidence;
    r.delta_log_evidence = ev.delta_log_evidence;
    r.information = h_sum / static_cast<double>(usable);
    r.complexity = c_sum / static_cast<double>(usable);
    r.sqrt_h_over_k = std::sqrt(*r.information / static_cast<double>(live_points));
    const WeightedPosterior post = pool_posteriors(runs);
    for (std::size_t j = 0; j < names.size(); ++j) r.summaries.emplace_back(summarize(post, j));
  } else {
    r.summaries.assign(names.size(), std::nullopt);
  }
  return r;
}

std::string format_results(const ResultsReport& r) {
  std::ostringstream out;
  out << "mean_log_evidence: " << opt(r.mean_log_evidence) << '\n'
      << "delta_log_evidence: " << opt(r.delta_log_evidence) << '\n'
      << "information: " << opt(r.information) << '\n'
      << "complexity: " << opt(r.complexity) << '\n'
      << "sqrt_h_over_k: " << opt(r.sqrt_h_over_k) << '\n'
      << "n_runs: " << r.runs.size() << '\n'
      << "failed_runs: " << r.failed_runs << '\n'
      << "iterations: " << r.iterations << '\n'
      << "total_tries: " << r.total_tries << '\n'
      << "cluster_invocations: " << r.cluster_invocations << '\n'
      << "constraint_violations: " << r.constraint_violations << '\n'
      << "out_of_bounds: " << r.out_of_bounds << '\n'
      << "wall_seconds: " << format_double(r.wall_seconds) << '\n'
      << "cpu_seconds: " << format_double(r.cpu_seconds) << '\n';
  for (const auto& run : r.runs) {
    const std::string p = "run." + std::to_string(run.index) + ".";
    const bool ok = run.status != RunStatus::Aborted;
    out << p << "seed: " << run.seed << '\n'
        << p << "status: " << to_string(run.status) << '\n'
        << p << "log_evidence: " << (ok ? format_double(run.log_evidence) : "null") << '\n'
        << p << "information: " << (ok ? format_double(run.information) : "null") << '\n'
        << p << "iterations: " << run.iterations << '\n'
        << p << "total_tries: " << run.total_tries << '\n'
        << p << "cluster_invocations: " << run.cluster_invocations << '\n'
        << p << "cpu_seconds: " << format_double(run.cpu_seconds) << '\n'
        << p << "diagnostic: " << (run.diagnostic.empty() ? "null" : run.diagnostic) << '\n';
  }
  for (std::size_t j = 0; j < r.param_names.size(); ++j) {
    const std::string p = "param." + r.param_names[j] + ".";
    const auto& s = r.summaries[j];
    auto field = [&](const char* key, auto get) {
      out << p << key << ": " << (s ? format_double(get(*s)) : "null") << '\n';
    };
    field("mean", [](const ParamSummary& v) { return v.mean; });
    field("median", [](const ParamSummary& v) { return v.median; });
    field("std", [](const ParamSummary& v) { return v.std; });
    field("ci68_low", [](const ParamSummary& v) { return v.ci68.low; });
    field("ci68_high", [](const ParamSummary& v) { return v.ci68.high; });
    field("ci95_low", [](const ParamSummary& v) { return v.ci95.low; });
    field("ci95_high", [](const ParamSummary& v) { return v.ci95.high; });
    field("ci99_low", [](const ParamSummary& v) { return v.ci99.low; });
    field("ci99_high", [](const ParamSummary& v) { return v.ci99.high; });
    field("ml_value", [](const ParamSummary& v) { return v.ml_value; });
  }
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    out << "warning." << i << ": " << r.warnings[i] << '\n';
  }
  return out.str();
}

std::string format_posterior_samples(const WeightedPosterior& post) {
  std::ostringstream out;
  out << "# weight logL params...\n";
  for (std::size_t i = 0; i < post.weights.size(); ++i) {
    out << format_double(post.weights[i]) << ' ' << format_double(post.log_l[i]);
    for (double v : post.params.row(i)) out << ' ' << format_double(v);
    out << '\n';
  }
  return out.str();
}

void write_outputs(const std::filesystem::path& dir, const ResultsReport& report,
                   std::span<const NestedRun> runs, const ParameterSpace& space,
                   std::size_t hist_bins) {
  std::filesystem::create_directories(dir);
  write_file(dir / "results.txt", format_results(report));

  const bool any = std::any_of(runs.begin(), runs.end(),
                               [](const NestedRun& r) { return r.status != RunStatus::Aborted; });
  WeightedPosterior post;
  if (any) post = pool_posteriors(runs);
  write_file(dir / "posterior_samples.dat", format_posterior_samples(post));

  std::ostringstream summary;
  summary << "name,mean,median,std,ci68_low,ci68_high,ci95_low,ci95_high,ci99_low,ci99_high,ml_value\n";
  for (std::size_t j = 0; j < report.param_names.size(); ++j) {
    summary << report.param_names[j];
    if (const auto& s = report.summaries[j]) {
      for (double v : {s->mean, s->median, s->std, s->ci68.low, s->ci68.high, s->ci95.low,
                       s->ci95.high, s->ci99.low, s->ci99.high, s->ml_value}) {
        summary << ',' << format_double(v);
      }
    } else {
      for (int k = 0; k < 10; ++k) summary << ",null";
    }
    summary << '\n';
  }
  write_file(dir / "summary.csv", summary.str());

  for (std::size_t j = 0; j < space.dim() && any; ++j) {
    const Histogram1D h = marginal_hist(post, j, hist_bins, space.lower()[j], space.upper()[j]);
    std::ostringstream text;
    text << "# out_of_range: " << format_double(h.out_of_range) << "\n# bin_center mass\n";
    for (std::size_t b = 0; b < h.mass.size(); ++b) {
      text << format_double(h.bin_center(b)) << ' ' << format_double(h.mass[b]) << '\n';
    }
    write_file(dir / ("hist_" + space.names()[j] + ".dat"), text.str());
  }

  std::ostringstream trace;
  trace << "run,m,log_weight,log_l";
  for (const auto& n : space.names()) trace << ',' << n;
  trace << '\n';
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t m = 0; m < runs[r].samples.size(); ++m) {
      const auto& s = runs[r].samples[m];
      trace << r << ',' << (m + 1) << ',' << format_double(s.log_weight) << ',' << format_double(s.log_l);
      for (double v : s.params) trace << ',' << format_double(v);
      trace << '\n';
    }
  }
  write_file(dir / "trace.csv", trace.str());
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  PowerLawFit fit;
  fit.points = lx.size();
  if (lx.size() < 2) return fit;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return fit;
  fit.available = true;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  return fit;
}

KScanRow summarize_k(std::span<const NestedRun> runs, std::size_t live_points) {
  KScanRow row;
  row.live_points = live_points;
  const CombinedEvidence ev = combine_runs(runs);
  if (ev.usable_runs > 0) row.mean_log_evidence = ev.mean_log_evidence;
  row.delta_log_evidence = ev.delta_log_evidence;
  double h = 0.0, cpu = 0.0;
  for (const auto& r : runs) {
    cpu += r.cpu_seconds;
    if (r.status == RunStatus::Aborted) {
      ++row.failed_runs;
    } else {
      h += r.information;
    }
  }
  if (ev.usable_runs > 0) row.mean_information = h / static_cast<double>(ev.usable_runs);
  row.sqrt_h_over_k = std::sqrt(row.mean_information / static_cast<double>(live_points));
  row.cpu_seconds = runs.empty() ? 0.0 : cpu / static_cast<double>(runs.size());
  return row;
}

KScanResult fit_kscan(std::vector<KScanRow> rows, std::span<const std::size_t> exclude_delta,
                      std::span<const std::size_t> exclude_cpu) {
  KScanResult result;
  std::vector<double> kd, dd, kc, cc;
  for (const auto& row : rows) {
    const auto k = static_cast<double>(row.live_points);
    const bool skip_d = std::find(exclude_delta.begin(), exclude_delta.end(), row.live_points) != exclude_delta.end();
    const bool skip_c = std::find(exclude_cpu.begin(), exclude_cpu.end(), row.live_points) != exclude_cpu.end();
    if (!skip_d && row.delta_log_evidence) {
      kd.push_back(k);
      dd.push_back(*row.delta_log_evidence);
    }
    if (!skip_c) {
      kc.push_back(k);
      cc.push_back(row.cpu_seconds);
    }
  }
  result.delta_fit = fit_power_law(kd, dd);
  result.cpu_fit = fit_power_law(kc, cc);
  result.rows = std::move(rows);
  return result;
}

KScanResult kscan(const Problem& problem, const SamplerConfig& base, std::span<const std::size_t> ks,
                  std::span<const std::size_t> exclude_delta, std::span<const std::size_t> exclude_cpu) {
  if (ks.size() < 3) throw std::invalid_argument("kscan needs at least three K values");
  std::vector<KScanRow> rows;
  for (std::size_t k : ks) {
    SamplerConfig cfg = base;
    cfg.live_points = k;
    const std::vector<NestedRun> runs = run_many(problem, cfg);
    rows.push_back(summarize_k(runs, k));
  }
  return fit_kscan(std::move(rows), exclude_delta, exclude_cpu);
}

std::string format_kscan(const KScanResult& result) {
  std::ostringstream out;
  out << "K,mean_log_evidence,delta_log_evidence,sqrt_h_over_k,information,cpu_seconds,failed_runs\n";
  for (const auto& row : result.rows) {
    out << row.live_points << ',' << opt(row.mean_log_evidence) << ',' << opt(row.delta_log_evidence)
        << ',' << format_double(row.sqrt_h_over_k) << ',' << format_double(row.mean_information) << ','
        << format_double(row.cpu_seconds) << ',' << row.failed_runs << '\n';
  }
  auto fit_line = [&](const char* name, const PowerLawFit& f) {
    out << "# " << name << "_exponent: " << (f.available ? format_double(f.exponent) : "null") << '\n'
        << "# " << name << "_prefactor: " << (f.available ? format_double(f.prefactor) : "null") << '\n'
        << "# " << name << "_points: " << f.points << '\n';
  };
  fit_line("delta_fit", result.delta_fit);
  fit_line("cpu_fit", result.cpu_fit);
  return out.str();
}

}  // namespace msnest
