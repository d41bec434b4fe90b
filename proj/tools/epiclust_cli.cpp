// Batch front-end for the functional clustering toolkit: scenario
// simulation, the (method x combination) grid, single clustering runs,
// silhouette-based cluster-count selection, and the benchmark methods.

#include <CLI11.hpp>

#include "epiclust/csv.hpp"
#include "epiclust/runner.hpp"
#include "epiclust/svg.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace epiclust;

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ' ' || c == '/') c = '_';
  return s;
}

void add_common_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--scenario", config.scenario, "Scenario name, e.g. \"S 1-4\"");
  cmd->add_option("--input", config.input_path, "Curve dataset CSV (rows are curves)");
  cmd->add_option("--reps", config.reps, "Monte Carlo replications");
  cmd->add_option("--k", config.k, "Number of clusters (0: scenario group count)");
  cmd->add_option("--seed", config.seed, "Master seed");
  cmd->add_option("--basis-size", config.basis_size, "B-spline basis size (0: max(4, m/3))");
  cmd->add_option("--methods", config.methods,
                  "Method filter (token or token:variant, e.g. kmeans:mahalanobis)");
  cmd->add_option("--combos", config.combos, "Combination filter, e.g. _d.MEI");
  cmd->add_option("--gamma", config.gamma, "Test-based k-means rejection threshold");
  cmd->add_option("--window", config.window, "Test-based k-means ANOVA window (odd)");
  cmd->add_option("--out", config.out_dir, "Output directory for CSV/SVG artifacts");
  cmd->add_option("--threads", config.threads, "Worker threads (0: hardware)");
  cmd->add_option("--sigma", config.sigma, "Gaussian kernel bandwidth (0: median heuristic)");
  cmd->add_option("--restarts", config.restarts, "k-means restarts per run");
  cmd->add_option("--candidates", config.candidates, "Cluster-count candidates for select-k");
  cmd->add_flag("--plots", config.plots, "Emit curve/index SVG plots next to reports");
  cmd->set_config("--config", "", "Flat key=value config file; flags override it");
}

fs::path ensure_out_dir(const RunConfig& config) {
  fs::path dir = config.out_dir.empty() ? fs::path(".") : fs::path(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

FunctionalSample load_input(const RunConfig& config) {
  if (!config.input_path.empty()) return ingest_csv(config.input_path);
  if (!config.scenario.empty()) return gen_scenario(config.scenario, config.seed);
  throw std::invalid_argument("need --scenario or --input");
}

void emit_plots(const RunConfig& config, const fs::path& dir, const std::string& stem) {
  const FunctionalSample sample = load_input(config);
  const SmoothedTriple triple = smooth(sample, config.basis_size);
  write_curves_svg(triple.data, (dir / (stem + "_curves.svg")).string());
  write_curves_svg(triple.d1, (dir / (stem + "_d1.svg")).string());
  write_curves_svg(triple.d2, (dir / (stem + "_d2.svg")).string());

  const FeatureMatrix ei = assemble_features(triple, parse_combo("_.EIHI"));
  write_scatter_svg(ei.values, 0, 1, sample.labels ? &*sample.labels : nullptr, "EI", "HI",
                    (dir / (stem + "_eihi.svg")).string());
  const FeatureMatrix mei = assemble_features(triple, parse_combo("_d.MEI"));
  write_scatter_svg(mei.values, 0, 1, sample.labels ? &*sample.labels : nullptr, "MEI", "dMEI",
                    (dir / (stem + "_mei.svg")).string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional clustering via epigraph/hypograph indexes"};
  app.require_subcommand(1);

  RunConfig config;

  auto* simulate = app.add_subcommand("simulate", "Generate a scenario and write it as CSV");
  add_common_flags(simulate, config);

  auto* run = app.add_subcommand("run", "Monte Carlo grid over methods and combinations");
  add_common_flags(run, config);

  auto* cluster = app.add_subcommand("cluster", "One method on one dataset");
  add_common_flags(cluster, config);
  std::string method_name = "kmeans._.EIHI";
  cluster->add_option("--method", method_name, "Full method name (a).(b).(c)");

  auto* selectk = app.add_subcommand("select-k", "Silhouette-based cluster-count selection");
  add_common_flags(selectk, config);

  auto* bench = app.add_subcommand("bench", "Functional k-means and test-based k-means");
  add_common_flags(bench, config);

  auto* combos = app.add_subcommand("combos", "List the 18 index combinations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (config.scenario.empty()) throw std::invalid_argument("simulate needs --scenario");
      const FunctionalSample sample = gen_scenario(config.scenario, config.seed);
      const fs::path dir = ensure_out_dir(config);
      const std::string stem = sanitize(config.scenario);
      const fs::path file = dir / (stem + ".csv");
      write_sample_csv(sample, file.string());
      std::cout << "wrote " << file.string() << " (" << sample.n() << " curves x " << sample.m()
                << " points)\n";
      if (config.plots) emit_plots(config, dir, stem);
    } else if (run->parsed()) {
      if (config.scenario.empty()) throw std::invalid_argument("run needs --scenario");
      const RunReport report = run_scenario(config);
      std::cout << format_report_table(report);
      if (!config.out_dir.empty()) {
        const fs::path dir = ensure_out_dir(config);
        const fs::path file = dir / (sanitize(config.scenario) + "_report.csv");
        write_report_csv(report, file.string());
        std::cout << "wrote " << file.string() << "\n";
        if (config.plots) emit_plots(config, dir, sanitize(config.scenario));
      }
    } else if (cluster->parsed()) {
      const FunctionalSample sample = load_input(config);
      const int k = config.k > 0 ? config.k
                    : !config.scenario.empty() ? scenario_by_name(config.scenario).k()
                                               : 2;
      const SingleRunResult res = run_single(sample, parse_method_name(method_name), k, config);
      std::cout << "method: " << res.method << "\n";
      if (res.eval)
        std::cout << std::fixed << std::setprecision(3) << "purity: " << res.eval->purity
                  << "  fmeasure: " << res.eval->fmeasure << "  rand: " << res.eval->rand
                  << "  time: " << std::setprecision(5) << res.eval->time_seconds << "s\n";
      const fs::path dir = ensure_out_dir(config);
      const fs::path file = dir / "partition.csv";
      std::ofstream out(file);
      out << "index,cluster\n";
      for (std::size_t i = 0; i < res.partition.assign.size(); ++i)
        out << i << "," << res.partition.assign[i] << "\n";
      std::cout << "wrote " << file.string() << "\n";
    } else if (selectk->parsed()) {
      if (config.scenario.empty()) throw std::invalid_argument("select-k needs --scenario");
      const SelectKReport report = select_k_scenario(config);
      std::cout << report.dataset << "  combo " << report.combo << "  (" << report.reps
                << " replications)\n  k:      ";
      for (int c : report.candidates) std::cout << std::setw(5) << c;
      std::cout << "\n  count:  ";
      for (int c : report.counts) std::cout << std::setw(5) << c;
      std::cout << "\n";
      if (!config.out_dir.empty()) {
        const fs::path dir = ensure_out_dir(config);
        const fs::path file = dir / (sanitize(config.scenario) + "_selectk.csv");
        write_selectk_csv(report, file.string());
        std::cout << "wrote " << file.string() << "\n";
      }
    } else if (bench->parsed()) {
      if (config.scenario.empty()) throw std::invalid_argument("bench needs --scenario");
      const RunReport report = run_bench(config);
      std::cout << format_report_table(report);
      if (!config.out_dir.empty()) {
        const fs::path dir = ensure_out_dir(config);
        const fs::path file = dir / (sanitize(config.scenario) + "_bench.csv");
        write_report_csv(report, file.string());
        std::cout << "wrote " << file.string() << "\n";
      }
    } else if (combos->parsed()) {
      for (const auto& c : enumerate_combos()) std::cout << c.name() << "\n";
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
