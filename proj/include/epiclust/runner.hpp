#pragma once

#include "epiclust/bspline.hpp"
#include "epiclust/csv.hpp"
#include "epiclust/distance.hpp"
#include "epiclust/fkmeans.hpp"
#include "epiclust/indexes.hpp"
#include "epiclust/kernels.hpp"
#include "epiclust/metrics.hpp"
#include "epiclust/names.hpp"
#include "epiclust/simgen.hpp"
#include "epiclust/spectral.hpp"
#include "epiclust/tbkmeans.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace epiclust {

/// One cell of the method grid: a clustering strategy plus its geometry
/// variant. The paper's tables distinguish the variants by row color; here
/// they ride along as a separate field.
struct GridMethodSpec {
  ClusterMethod method;
  KMeansMetric metric = KMeansMetric::Euclidean;         // kmeans only
  KernelSpec::Kind kernel = KernelSpec::Kind::Gaussian;  // kkmeans / spc only
  std::string variant;

  std::string token() const { return to_string(method); }
  std::string id() const { return variant.empty() ? token() : token() + ":" + variant; }
};

/// The ten rows the full grid evaluates per admissible combination:
/// five linkages, k-means under both metrics, kernel k-means under the
/// gaussian and polynomial kernels, and spectral clustering.
inline std::vector<GridMethodSpec> default_method_grid() {
  std::vector<GridMethodSpec> grid;
  for (ClusterMethod m : {ClusterMethod::Single, ClusterMethod::Complete, ClusterMethod::Average,
                          ClusterMethod::Centroid, ClusterMethod::WardD2})
    grid.push_back({m, KMeansMetric::Euclidean, KernelSpec::Kind::Gaussian, "euclidean"});
  grid.push_back({ClusterMethod::KMeans, KMeansMetric::Euclidean, KernelSpec::Kind::Gaussian,
                  "euclidean"});
  grid.push_back({ClusterMethod::KMeans, KMeansMetric::Mahalanobis, KernelSpec::Kind::Gaussian,
                  "mahalanobis"});
  grid.push_back({ClusterMethod::KKMeans, KMeansMetric::Euclidean, KernelSpec::Kind::Gaussian,
                  "gaussian"});
  grid.push_back({ClusterMethod::KKMeans, KMeansMetric::Euclidean, KernelSpec::Kind::Polynomial,
                  "polynomial"});
  grid.push_back({ClusterMethod::Spectral, KMeansMetric::Euclidean, KernelSpec::Kind::Gaussian,
                  "gaussian"});
  return grid;
}

struct RunConfig {
  std::string scenario;       // exclusive with input_path
  std::string input_path;
  int reps = 100;
  int k = 0;                  // 0: use the scenario's group count
  std::vector<std::string> methods;  // filter on token or token:variant
  std::vector<std::string> combos;   // filter on (b).(c) names
  int basis_size = 0;         // 0: max(4, m/3)
  double gamma = 1.65;
  int window = 5;
  std::uint64_t seed = 42;
  std::string out_dir;
  int threads = 0;            // 0: hardware concurrency
  double sigma = 0.0;         // 0: median heuristic per feature matrix
  int poly_degree = 2;
  double poly_scale = 1.0;
  double poly_offset = 1.0;
  std::vector<int> candidates = {2, 3, 4, 5, 6};
  bool plots = false;
  int restarts = 10;
};

struct ReportRow {
  std::string method_token;
  std::string variant;
  std::string combo;
  double purity = 0.0;
  double fmeasure = 0.0;
  double rand = 0.0;
  double time_seconds = 0.0;
  int n_ok = 0;       // replications that produced a value
  std::string note;   // NA reason when n_ok == 0

  std::string full_name() const { return method_token + "." + combo; }
  bool is_na() const { return n_ok == 0; }
};

struct RunReport {
  std::string dataset;
  int reps = 0;
  int k = 0;
  std::vector<ReportRow> rows;
};

/// Runs one grid method on a feature matrix. Deterministic under seed.
inline Partition run_grid_method(const GridMethodSpec& spec, const MatrixXd& features, int k,
                                 const RunConfig& config, std::uint64_t seed) {
  if (is_hierarchical(spec.method))
    return cut(hcluster(pairwise_distances(features), linkage_of(spec.method)), k);

  switch (spec.method) {
    case ClusterMethod::KMeans: {
      KMeansOptions opts;
      opts.metric = spec.metric;
      opts.seed = seed;
      opts.restarts = config.restarts;
      return kmeans(features, k, opts).partition;
    }
    case ClusterMethod::KKMeans: {
      KernelSpec kspec = spec.kernel == KernelSpec::Kind::Polynomial
                             ? KernelSpec::polynomial(config.poly_degree, config.poly_scale,
                                                      config.poly_offset)
                             : KernelSpec::gaussian(config.sigma > 0.0
                                                        ? config.sigma
                                                        : median_pairwise_distance(features));
      KernelKMeansOptions opts;
      opts.seed = seed;
      opts.restarts = config.restarts;
      opts.check_psd = false;  // kernel_matrix already vets polynomial kernels
      return kernel_kmeans(kernel_matrix(features, kspec), k, opts).partition;
    }
    case ClusterMethod::Spectral: {
      const KernelSpec kspec = KernelSpec::gaussian(
          config.sigma > 0.0 ? config.sigma : median_pairwise_distance(features));
      SpectralOptions opts;
      opts.seed = seed;
      opts.kmeans_restarts = config.restarts;
      return spectral_cluster(features, k, kspec, opts);
    }
    default:
      throw std::invalid_argument("run_grid_method: unhandled method");
  }
}

namespace detail {

inline bool method_selected(const GridMethodSpec& spec, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  for (const auto& f : filter)
    if (f == spec.token() || f == spec.id()) return true;
  return false;
}

inline bool combo_selected(const ComboSpec& combo, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  for (const auto& f : filter)
    if (f == combo.name()) return true;
  return false;
}

struct CellOutcome {
  double purity = 0.0, fmeasure = 0.0, rand = 0.0, time_seconds = 0.0;
  int status = 0;  // 0 pending, 1 ok, 2 inadmissible, 3 error
  std::string note;
};

/// Runs fn(rep) for rep in [0, reps) on up to `threads` workers. Results are
/// indexed by rep, so scheduling order cannot affect the aggregate.
inline void parallel_reps(int reps, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    for (int rep = 0; rep < reps; ++rep) fn(rep);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1)) {
        try {
          fn(rep);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// The full pipeline over one dataset draw: smooth, project through each
/// selected admissible combination, cluster with each selected method,
/// validate against the true labels.
inline void run_replication(const FunctionalSample& sample, int k, const RunConfig& config,
                            const std::vector<ComboSpec>& combos,
                            const std::vector<GridMethodSpec>& methods, std::uint64_t rep_seed,
                            std::vector<detail::CellOutcome>& out) {
  using clock = std::chrono::steady_clock;
  const SmoothedTriple triple = smooth(sample, config.basis_size);
  const IndexCache cache = IndexCache::compute(triple);

  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    const FeatureMatrix fm = assemble_features(triple, combos[ci], cache);
    const Admissibility adm = admissible(fm);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      detail::CellOutcome& cell = out[ci * methods.size() + mi];
      if (!adm.ok) {
        cell.status = 2;
        cell.note = adm.reason;
        continue;
      }
      const std::uint64_t cell_seed =
          derive_seed(rep_seed, fnv1a(methods[mi].id() + "|" + combos[ci].name()));
      try {
        const auto t0 = clock::now();
        const Partition part = run_grid_method(methods[mi], fm.values, k, config, cell_seed);
        const auto t1 = clock::now();
        const EvalReport ev = evaluate(part, *sample.labels,
                                       std::chrono::duration<double>(t1 - t0).count());
        cell.purity = ev.purity;
        cell.fmeasure = ev.fmeasure;
        cell.rand = ev.rand;
        cell.time_seconds = ev.time_seconds;
        cell.status = 1;
      } catch (const std::exception& err) {
        cell.status = 3;
        cell.note = err.what();
      }
    }
  }
}

/// Monte Carlo over a scenario: generate, run the grid, average the three
/// validation criteria per cell, and rank rows by mean Rand index.
inline RunReport run_scenario(const RunConfig& config) {
  const ScenarioSpec& spec = scenario_by_name(config.scenario);
  const int k = config.k > 0 ? config.k : spec.k();

  std::vector<ComboSpec> combos;
  for (const auto& c : enumerate_combos())
    if (detail::combo_selected(c, config.combos)) combos.push_back(c);
  std::vector<GridMethodSpec> methods;
  for (const auto& m : default_method_grid())
    if (detail::method_selected(m, config.methods)) methods.push_back(m);
  if (combos.empty()) throw std::invalid_argument("run: combo filter matched nothing");
  if (methods.empty()) throw std::invalid_argument("run: method filter matched nothing");

  const std::size_t cells = combos.size() * methods.size();
  std::vector<std::vector<detail::CellOutcome>> results(config.reps);

  detail::parallel_reps(config.reps, config.threads, [&](int rep) {
    results[rep].assign(cells, {});
    const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample sample = gen_scenario(spec, rep_seed);
    run_replication(sample, k, config, combos, methods, rep_seed, results[rep]);
  });

  RunReport report;
  report.dataset = spec.name;
  report.reps = config.reps;
  report.k = k;
  for (std::size_t ci = 0; ci < combos.size(); ++ci)
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      ReportRow row;
      row.method_token = methods[mi].token();
      row.variant = methods[mi].variant;
      row.combo = combos[ci].name();
      std::string note;
      for (int rep = 0; rep < config.reps; ++rep) {
        const auto& cell = results[rep][ci * methods.size() + mi];
        if (cell.status == 1) {
          row.purity += cell.purity;
          row.fmeasure += cell.fmeasure;
          row.rand += cell.rand;
          row.time_seconds += cell.time_seconds;
          ++row.n_ok;
        } else if (note.empty() && !cell.note.empty()) {
          note = cell.note;
        }
      }
      if (row.n_ok > 0) {
        row.purity /= row.n_ok;
        row.fmeasure /= row.n_ok;
        row.rand /= row.n_ok;
        row.time_seconds /= row.n_ok;
        if (row.n_ok < config.reps) row.note = "partial";
      } else {
        row.note = note.empty() ? "no successful replication" : note;
      }
      report.rows.push_back(std::move(row));
    }

  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.is_na() != b.is_na()) return b.is_na();
    if (!a.is_na() && a.rand != b.rand) return a.rand > b.rand;
    if (a.full_name() != b.full_name()) return a.full_name() < b.full_name();
    return a.variant < b.variant;
  });
  return report;
}

/// One clustering of one dataset (scenario draw or ingested file) with one
/// method name; reports metrics when true labels are available.
struct SingleRunResult {
  Partition partition;
  std::optional<EvalReport> eval;
  std::string method;
  std::string combo;
};

inline SingleRunResult run_single(const FunctionalSample& sample, const MethodName& name, int k,
                                  const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  const SmoothedTriple triple = smooth(sample, config.basis_size);
  const FeatureMatrix fm = assemble_features(triple, name.combo);
  const Admissibility adm = admissible(fm);
  if (!adm.ok) throw numerical_error("combination " + name.combo.name() + " is " + adm.reason);

  GridMethodSpec spec;
  spec.method = name.method;
  for (const auto& g : default_method_grid())
    if (g.method == name.method) {
      spec = g;
      break;
    }
  // a variant-qualified filter (e.g. kmeans:mahalanobis) picks that cell
  for (const auto& g : default_method_grid())
    for (const auto& f : config.methods)
      if (g.method == name.method && f == g.id()) spec = g;

  SingleRunResult out;
  out.method = name.str();
  out.combo = name.combo.name();
  const auto t0 = clock::now();
  out.partition = run_grid_method(spec, fm.values, k, config, derive_seed(config.seed, 0));
  const auto t1 = clock::now();
  if (sample.labels)
    out.eval = evaluate(out.partition, *sample.labels,
                        std::chrono::duration<double>(t1 - t0).count());
  return out;
}

/// Histogram of silhouette-selected cluster counts over the replications,
/// run with Euclidean k-means on the scenario's top combination.
struct SelectKReport {
  std::string dataset;
  std::string combo;
  int reps = 0;
  std::vector<int> candidates;
  std::vector<int> counts;
};

inline SelectKReport select_k_scenario(const RunConfig& config) {
  const ScenarioSpec& spec = scenario_by_name(config.scenario);
  const std::string combo_name =
      config.combos.empty() ? spec.default_combo : config.combos.front();
  const ComboSpec combo = parse_combo(combo_name);

  SelectKReport report;
  report.dataset = spec.name;
  report.combo = combo_name;
  report.reps = config.reps;
  report.candidates = config.candidates;
  report.counts.assign(config.candidates.size(), 0);

  std::vector<int> chosen(config.reps, -1);
  detail::parallel_reps(config.reps, config.threads, [&](int rep) {
    const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample sample = gen_scenario(spec, rep_seed);
    const SmoothedTriple triple = smooth(sample, config.basis_size);
    const FeatureMatrix fm = assemble_features(triple, combo);
    const int restarts = config.restarts;
    const KSelection sel = select_k(
        fm.values,
        [restarts](const MatrixXd& X, int k, std::uint64_t s) {
          KMeansOptions opts;
          opts.seed = s;
          opts.restarts = restarts;
          return kmeans(X, k, opts).partition;
        },
        config.candidates, rep_seed);
    chosen[rep] = sel.chosen;
  });

  for (int rep = 0; rep < config.reps; ++rep)
    for (std::size_t i = 0; i < report.candidates.size(); ++i)
      if (chosen[rep] == report.candidates[i]) ++report.counts[i];
  return report;
}

/// Benchmark harness: functional k-means (L2 and d_K) and test-based k-means
/// under its four initializations, averaged over the replications.
inline RunReport run_bench(const RunConfig& config) {
  const ScenarioSpec& spec = scenario_by_name(config.scenario);
  const int k = config.k > 0 ? config.k : spec.k();

  struct BenchMethod {
    std::string name;
    std::function<Partition(const FunctionalSample&, std::uint64_t)> run;
  };
  std::vector<BenchMethod> methods;

  auto add_fkm = [&](const std::string& name, FKMeansDistance dist) {
    methods.push_back({name, [dist, k](const FunctionalSample& s, std::uint64_t seed) {
                         FKMeansOptions opts;
                         opts.seed = seed;
                         return fkmeans(s, k, dist, opts).partition;
                       }});
  };
  add_fkm("fkm-L2", FKMeansDistance::l2());
  add_fkm("fkm-dK:2", FKMeansDistance::truncated(2));
  add_fkm("fkm-dK:3", FKMeansDistance::truncated(3));

  const std::pair<std::string, InitKind> inits[] = {{"kmeans++", InitKind::KMeansPlusPlus},
                                                    {"hclust", InitKind::Ward},
                                                    {"random", InitKind::Forgy},
                                                    {"kmeans", InitKind::KMeansOneStep}};
  for (const auto& [init_name, init] : inits) {
    TBConfig tb;
    tb.gamma = config.gamma;
    tb.window = config.window;
    methods.push_back(
        {"tbkm-" + init_name, [tb, init, k](const FunctionalSample& s, std::uint64_t seed) {
           return tb_kmeans(s, k, init, tb, seed).partition;
         }});
  }

  if (!config.methods.empty()) {
    std::vector<BenchMethod> kept;
    for (auto& m : methods)
      for (const auto& f : config.methods)
        if (m.name == f || m.name.rfind(f, 0) == 0) {
          kept.push_back(std::move(m));
          break;
        }
    methods = std::move(kept);
    if (methods.empty()) throw std::invalid_argument("bench: method filter matched nothing");
  }

  std::vector<std::vector<detail::CellOutcome>> results(config.reps);
  detail::parallel_reps(config.reps, config.threads, [&](int rep) {
    using clock = std::chrono::steady_clock;
    results[rep].assign(methods.size(), {});
    const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(rep));
    const FunctionalSample sample = gen_scenario(spec, rep_seed);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      auto& cell = results[rep][mi];
      try {
        const auto t0 = clock::now();
        const Partition part =
            methods[mi].run(sample, derive_seed(rep_seed, fnv1a(methods[mi].name)));
        const auto t1 = clock::now();
        const EvalReport ev =
            evaluate(part, *sample.labels, std::chrono::duration<double>(t1 - t0).count());
        cell.purity = ev.purity;
        cell.fmeasure = ev.fmeasure;
        cell.rand = ev.rand;
        cell.time_seconds = ev.time_seconds;
        cell.status = 1;
      } catch (const std::exception& err) {
        cell.status = 3;
        cell.note = err.what();
      }
    }
  });

  RunReport report;
  report.dataset = spec.name;
  report.reps = config.reps;
  report.k = k;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    ReportRow row;
    row.method_token = methods[mi].name;
    for (int rep = 0; rep < config.reps; ++rep) {
      const auto& cell = results[rep][mi];
      if (cell.status == 1) {
        row.purity += cell.purity;
        row.fmeasure += cell.fmeasure;
        row.rand += cell.rand;
        row.time_seconds += cell.time_seconds;
        ++row.n_ok;
      } else if (row.note.empty()) {
        row.note = cell.note;
      }
    }
    if (row.n_ok > 0) {
      row.purity /= row.n_ok;
      row.fmeasure /= row.n_ok;
      row.rand /= row.n_ok;
      row.time_seconds /= row.n_ok;
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.is_na() != b.is_na()) return b.is_na();
    if (!a.is_na() && a.rand != b.rand) return a.rand > b.rand;
    return a.full_name() < b.full_name();
  });
  return report;
}

/// Aligned text rendering of a report, one row per configuration.
inline std::string format_report_table(const RunReport& report) {
  std::ostringstream out;
  out << report.dataset << "  (" << report.reps << " replications, k = " << report.k << ")\n";
  out << std::left << std::setw(34) << "method" << std::right << std::setw(9) << "Purity"
      << std::setw(10) << "Fmeasure" << std::setw(9) << "RI" << std::setw(12) << "Time"
      << std::setw(7) << "n" << "  note\n";
  for (const auto& row : report.rows) {
    std::string name = row.combo.empty() ? row.method_token : row.full_name();
    if (!row.variant.empty()) name += " [" + row.variant + "]";
    out << std::left << std::setw(34) << name << std::right;
    if (row.is_na()) {
      out << std::setw(9) << "NA" << std::setw(10) << "NA" << std::setw(9) << "NA" << std::setw(12)
          << "NA";
    } else {
      out << std::fixed << std::setprecision(3) << std::setw(9) << row.purity << std::setw(10)
          << row.fmeasure << std::setw(9) << row.rand << std::setprecision(5) << std::setw(12)
          << row.time_seconds;
    }
    out << std::setw(7) << row.n_ok << "  " << row.note << "\n";
  }
  return out.str();
}

inline void write_report_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw csv_error("cannot write '" + path + "'");
  out << "method,variant,combo,purity,fmeasure,rand_index,time_seconds,n_ok,note\n";
  out << std::setprecision(10);
  for (const auto& row : report.rows) {
    out << row.method_token << "," << row.variant << "," << row.combo << ",";
    if (row.is_na())
      out << "NA,NA,NA,NA";
    else
      out << row.purity << "," << row.fmeasure << "," << row.rand << "," << row.time_seconds;
    out << "," << row.n_ok << "," << row.note << "\n";
  }
}

inline void write_selectk_csv(const SelectKReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw csv_error("cannot write '" + path + "'");
  out << "k,count\n";
  for (std::size_t i = 0; i < report.candidates.size(); ++i)
    out << report.candidates[i] << "," << report.counts[i] << "\n";
}

}  // namespace epiclust
