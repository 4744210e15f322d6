// Copyright 2026 The bimax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: solve single instances, run benchmark sweeps,
// drive bandit experiments, and generate seeded instances. All outputs are
// machine-readable (JSON or CSV with a metadata comment line).
//
// Exit codes: 0 success, 2 argument/input parse errors, 3 solver errors.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "bimax/bimax.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string out;
  int jobs = 1;
  bool no_times = false;
};

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

/// Opens --out for writing, or returns stdout when the path is empty.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw std::invalid_argument("cannot open output file: " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

bimax::SpectrumKind parse_dist(const std::string& name) {
  if (name == "stacked") return bimax::SpectrumKind::kStacked;
  if (name == "rstacked") return bimax::SpectrumKind::kRandomStacked;
  if (name == "oexp") return bimax::SpectrumKind::kOrderedExp;
  throw std::invalid_argument("unknown distribution '" + name +
                              "' (expected stacked|rstacked|oexp)");
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string instance_path;
  std::string solver = "maxnorm";
  double eps = 1e-8;
  double eta = 0.0;
  bool time_transform = false;
  std::string phases_out;
};

int run_solve(const GlobalOptions& global, const SolveArgs& args) {
  bimax::LoadedProblem problem;
  try {
    problem = bimax::read_problem_file(args.instance_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }

  try {
    const bimax::SolverKind kind = bimax::parse_solver(args.solver);
    if (kind == bimax::SolverKind::kOracle) {
      const int d = problem.instance  ? problem.instance->dim()
                    : problem.form    ? problem.form->dim()
                    : problem.lp      ? static_cast<int>(problem.lp->c.size())
                    : problem.polytope ? problem.polytope->dim()
                                       : 0;
      if (d > 10) {
        std::cerr << "warning: the oracle solver is a test/debug reference "
                     "and scales poorly above d = 10 (got d = "
                  << d << ")\n";
      }
    }
    bimax::SolveOptions opts;
    opts.epsilon = args.eps;
    opts.eta = args.eta;
    const bimax::Solution sol = bimax::solve_problem(problem, kind, opts);
    OutputTarget target(global.out);
    target.stream() << bimax::solution_to_json(sol, !global.no_times,
                                               args.time_transform)
                           .dump(2)
                    << '\n';
    if (!args.phases_out.empty() && !sol.phases.empty()) {
      std::ofstream phases(args.phases_out);
      if (!phases) {
        throw std::invalid_argument("cannot open phases file: " +
                                    args.phases_out);
      }
      bimax::write_csv_metadata(phases, "cmd=solve solver=" + args.solver +
                                            " eps=" +
                                            bimax::format_double(args.eps));
      bimax::write_csv_row(phases,
                           {"t", "damped_steps", "quadratic_steps",
                            "lambda_final"});
      for (const bimax::NewtonPhase& p : sol.phases) {
        bimax::write_csv_row(phases, {bimax::format_double(p.t),
                                      std::to_string(p.damped_steps),
                                      std::to_string(p.quadratic_steps),
                                      bimax::format_double(p.lambda_final)});
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::vector<std::string> dists{"stacked"};
  std::vector<double> kappas{10.0, 100.0, 1000.0};
  std::vector<int> dims{100};
  int reps = 20;
  std::vector<std::string> solvers{"maxnorm", "newton"};
  double eps = 1e-8;
  double a = 0.1;
  bool full = false;  ///< solve full instances instead of pre-diagonalized
  std::string summary_out;
};

struct BenchItem {
  std::string dist;
  int d = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
};

struct BenchRow {
  BenchItem item;
  std::string solver;
  double value = std::nan("");
  double wall_time_s = 0.0;
  int iterations = -1;
  bool failed = false;
};

int run_bench(const GlobalOptions& global, const BenchArgs& args) {
  try {
    std::vector<BenchItem> items;
    for (const std::string& dist : args.dists) {
      parse_dist(dist);  // validate early
      for (int d : args.dims) {
        for (double kappa : args.kappas) {
          for (int rep = 0; rep < args.reps; ++rep) {
            items.push_back({dist, d, kappa, global.seed + rep});
          }
        }
      }
    }
    for (const std::string& solver : args.solvers) {
      if (solver != "maxnorm" && solver != "newton") {
        throw std::invalid_argument("bench supports solvers maxnorm|newton, got '" +
                                    solver + "'");
      }
    }

    std::vector<std::vector<BenchRow>> rows(items.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= items.size()) break;
        const BenchItem& item = items[i];
        bimax::SpectrumSpec spec;
        spec.kind = parse_dist(item.dist);
        spec.a = args.a;
        spec.kappa = item.kappa;
        spec.d = item.d;
        spec.seed = item.seed ^ bimax::hash_label(
                                    item.dist + "/" + std::to_string(item.d) +
                                    "/" + bimax::format_double(item.kappa));
        const bimax::dvec lambda = bimax::generate_spectrum(spec);
        const bimax::dvec b = bimax::generate_center(item.d, spec.seed);
        for (const std::string& solver : args.solvers) {
          BenchRow row;
          row.item = item;
          row.solver = solver;
          try {
            bimax::Solution sol;
            if (args.full) {
              const bimax::BilinearInstance instance =
                  bimax::instance_from_diag(lambda, b, spec.seed);
              sol = solver == "maxnorm"
                        ? bimax::solve_maxnorm(instance, args.eps)
                        : bimax::solve_newton(instance, args.eps);
            } else {
              const bimax::DiagonalForm form =
                  bimax::make_diagonal_form(lambda, b);
              sol = solver == "maxnorm"
                        ? bimax::solve_maxnorm(form, args.eps)
                        : bimax::solve_newton(form, args.eps);
            }
            row.value = sol.value;
            row.wall_time_s = sol.wall_time_seconds;
            row.iterations = sol.iterations;
          } catch (const std::exception& e) {
            row.failed = true;
          }
          rows[i].push_back(std::move(row));
        }
      }
    };
    const int jobs = std::max(
        1, std::min<int>(global.jobs, static_cast<int>(items.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
    work();
    for (std::thread& th : pool) th.join();

    std::ostringstream params;
    params << "cmd=bench seed=" << global.seed
           << " dists=" << join(args.dists, '+')
           << " dims=" << args.dims.size() << " kappas=" << args.kappas.size()
           << " reps=" << args.reps << " solvers=" << join(args.solvers, '+')
           << " eps=" << bimax::format_double(args.eps)
           << " a=" << bimax::format_double(args.a)
           << " prediag=" << (args.full ? 0 : 1)
           << " times=" << (global.no_times ? 0 : 1);

    OutputTarget target(global.out);
    std::ostream& out = target.stream();
    bimax::write_csv_metadata(out, params.str());
    bimax::write_csv_row(out, {"dist", "d", "kappa", "seed", "solver", "value",
                               "wall_time_s", "iterations"});
    for (const auto& group : rows) {
      for (const BenchRow& row : group) {
        bimax::write_csv_row(
            out,
            {row.item.dist, std::to_string(row.item.d),
             bimax::format_double(row.item.kappa),
             std::to_string(row.item.seed), row.solver,
             row.failed ? "nan" : bimax::format_double(row.value),
             global.no_times ? bimax::format_time(0.0)
                             : bimax::format_time(row.wall_time_s),
             std::to_string(row.iterations)});
      }
    }

    // Per-cell summaries (median and 90% quantile of time, median value).
    struct CellStats {
      std::vector<double> times, values;
    };
    std::map<std::string, CellStats> cells;
    std::vector<std::string> cell_order;
    for (const auto& group : rows) {
      for (const BenchRow& row : group) {
        if (row.failed) continue;
        const std::string key = row.item.dist + "," +
                                std::to_string(row.item.d) + "," +
                                bimax::format_double(row.item.kappa) + "," +
                                row.solver;
        if (cells.find(key) == cells.end()) cell_order.push_back(key);
        cells[key].times.push_back(global.no_times ? 0.0 : row.wall_time_s);
        cells[key].values.push_back(row.value);
      }
    }
    const bool summary_to_stdout = args.summary_out.empty() && !global.out.empty();
    std::ofstream summary_file;
    std::ostream* summary = nullptr;
    if (!args.summary_out.empty()) {
      summary_file.open(args.summary_out);
      if (!summary_file) {
        throw std::invalid_argument("cannot open summary file: " +
                                    args.summary_out);
      }
      summary = &summary_file;
    } else {
      summary = summary_to_stdout ? &std::cout : &std::cerr;
    }
    bimax::write_csv_metadata(*summary, params.str() + " kind=summary");
    bimax::write_csv_row(*summary, {"dist", "d", "kappa", "solver",
                                    "median_time_s", "q90_time_s",
                                    "median_value"});
    for (const std::string& key : cell_order) {
      const CellStats& stats = cells[key];
      bimax::write_csv_row(
          *summary, {key, bimax::format_time(quantile(stats.times, 0.5)),
                     bimax::format_time(quantile(stats.times, 0.9)),
                     bimax::format_double(quantile(stats.values, 0.5))});
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

// ---------------------------------------------------------------------------
// bandit
// ---------------------------------------------------------------------------

struct BanditArgs {
  std::string alg = "oful-maxnorm";
  int d = 5;
  int T = 1000;
  double norm_zeta = 1.0;
  double eps = 0.2;
  int seeds = 1;
  double delta = 0.0;
  std::vector<int> snapshot_times;
  std::string hist_out;
};

void write_trace_csv(std::ostream& out, const bimax::RegretTrace& trace,
                     double optimal_reward, const std::string& params,
                     bool include_times) {
  bimax::write_csv_metadata(out, params);
  bimax::write_csv_row(out, {"t", "mean_reward", "cum_regret",
                             "solver_time_s"});
  for (std::size_t i = 0; i < trace.per_round.size(); ++i) {
    const bimax::RegretStep& step = trace.per_round[i];
    bimax::write_csv_row(
        out,
        {std::to_string(i + 1),
         bimax::format_double(optimal_reward - step.instant_regret),
         bimax::format_double(trace.cumulative[i]),
         include_times ? bimax::format_time(step.solver_time)
                       : bimax::format_time(0.0)});
  }
}

int run_bandit(const GlobalOptions& global, const BanditArgs& args) {
  try {
    const std::filesystem::path dir =
        global.out.empty() ? std::filesystem::path("bandit_out")
                           : std::filesystem::path(global.out);
    std::filesystem::create_directories(dir);

    std::ostringstream params;
    params << "cmd=bandit alg=" << args.alg << " d=" << args.d
           << " T=" << args.T << " seed=" << global.seed
           << " seeds=" << args.seeds
           << " norm_zeta=" << bimax::format_double(args.norm_zeta)
           << " eps=" << bimax::format_double(args.eps)
           << " times=" << (global.no_times ? 0 : 1);

    auto summary_row = [&](std::ostream& out, const std::string& alg,
                           const std::vector<double>& finals) {
      double mean = 0.0;
      for (double v : finals) mean += v;
      mean /= finals.size();
      double var = 0.0;
      for (double v : finals) var += (v - mean) * (v - mean);
      const double sd =
          finals.size() > 1 ? std::sqrt(var / (finals.size() - 1)) : 0.0;
      const double ci = 1.96 * sd / std::sqrt(double(finals.size()));
      bimax::write_csv_row(out, {alg, std::to_string(args.d),
                                 std::to_string(args.T),
                                 std::to_string(args.seeds),
                                 bimax::format_double(mean),
                                 bimax::format_double(ci)});
    };

    std::ofstream summary(dir / "summary.csv");
    bimax::write_csv_metadata(summary, params.str() + " kind=summary");
    bimax::write_csv_row(summary, {"alg", "d", "T", "seeds",
                                   "mean_final_regret", "ci95_halfwidth"});

    if (args.alg == "eps-linucb" || args.alg == "eps-linucb-cont") {
      std::vector<double> approx_finals, exact_finals;
      for (int k = 0; k < args.seeds; ++k) {
        const std::uint64_t seed = global.seed + k;
        const bimax::EpsLinUcbResult result =
            args.alg == "eps-linucb"
                ? bimax::run_eps_linucb_demo(args.eps, args.T, seed)
                : bimax::run_eps_linucb_continuous(args.eps, args.T, seed);
        for (const auto& [tag, trace] :
             {std::pair<std::string, const bimax::RegretTrace*>{
                  "approx", &result.approx},
              {"exact", &result.exact}}) {
          std::ofstream out(dir / (args.alg + "_" + tag + "_seed" +
                                   std::to_string(seed) + ".csv"));
          write_trace_csv(out, *trace, 1.0,
                          params.str() + " agent=" + tag +
                              " run_seed=" + std::to_string(seed),
                          !global.no_times);
        }
        approx_finals.push_back(result.approx.total_regret());
        exact_finals.push_back(result.exact.total_regret());
      }
      summary_row(summary, args.alg + "-approx", approx_finals);
      summary_row(summary, args.alg + "-exact", exact_finals);
      return kExitOk;
    }

    if (args.alg != "oful-maxnorm" && args.alg != "oful-newton") {
      throw std::invalid_argument(
          "unknown algorithm '" + args.alg +
          "' (expected oful-maxnorm|oful-newton|eps-linucb|eps-linucb-cont)");
    }
    bimax::OptimisticConfig cfg;
    cfg.solver = args.alg == "oful-maxnorm" ? bimax::PbSolver::kMaxNorm
                                            : bimax::PbSolver::kNewton;
    cfg.norm_bound = args.norm_zeta;
    cfg.delta = args.delta;
    cfg.snapshot_times = args.snapshot_times;

    std::vector<double> finals;
    std::vector<bimax::DesignSnapshot> all_snapshots;
    for (int k = 0; k < args.seeds; ++k) {
      const std::uint64_t seed = global.seed + k;
      const bimax::BanditEnv env =
          bimax::make_env(args.d, args.norm_zeta, args.T, seed);
      const bimax::RegretTrace trace = bimax::run_optimistic(env, cfg);
      std::ofstream out(dir /
                        (args.alg + "_seed" + std::to_string(seed) + ".csv"));
      write_trace_csv(out, trace, env.zeta.norm(),
                      params.str() + " run_seed=" + std::to_string(seed),
                      !global.no_times);
      finals.push_back(trace.total_regret());
      if (k == 0) all_snapshots = trace.snapshots;
    }
    summary_row(summary, args.alg, finals);

    if (!args.hist_out.empty() && !all_snapshots.empty()) {
      std::ofstream hist(args.hist_out);
      if (!hist) {
        throw std::invalid_argument("cannot open histogram file: " +
                                    args.hist_out);
      }
      bimax::write_design_histograms(hist, all_snapshots, params.str());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string dist = "stacked";
  double a = 0.1;
  double kappa = 10.0;
  int d = 2;
};

int run_gen(const GlobalOptions& global, const GenArgs& args) {
  try {
    bimax::SpectrumSpec spec;
    spec.kind = parse_dist(args.dist);
    spec.a = args.a;
    spec.kappa = args.kappa;
    spec.d = args.d;
    spec.seed = global.seed;
    const bimax::dvec lambda = bimax::generate_spectrum(spec);
    const bimax::dvec b = bimax::generate_center(args.d, global.seed);

    bimax::ordered_json j;
    j["dist"] = args.dist;
    j["a"] = args.a;
    j["kappa"] = args.kappa;
    j["d"] = args.d;
    j["seed"] = global.seed;
    j["lambda"] = bimax::vector_to_json(lambda);
    j["b"] = bimax::vector_to_json(b);
    OutputTarget target(global.out);
    target.stream() << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and experiment harness for bilinear maximization "
               "over ellipsoids"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base random seed")
      ->envname("BIMAX_SEED")
      ->capture_default_str();
  app.add_option("--out", global.out,
                 "Output file (bandit: output directory); stdout if empty")
      ->envname("BIMAX_OUT");
  app.add_option("--jobs", global.jobs, "Worker threads for sweeps")
      ->envname("BIMAX_JOBS")
      ->capture_default_str();
  app.add_flag("--no-times", global.no_times,
               "Zero all timing fields for byte-reproducible outputs");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Solve one instance file");
  solve->add_option("-i,--instance", solve_args.instance_path,
                    "Instance JSON file")
      ->required();
  solve->add_option("--solver", solve_args.solver,
                    "maxnorm|newton|centered|polytope|lp|oracle")
      ->capture_default_str();
  solve->add_option("--eps", solve_args.eps, "Accuracy target")
      ->capture_default_str();
  solve->add_option("--eta", solve_args.eta,
                    "Newton barrier schedule (0 = 1 + 1/sqrt(d+1))");
  solve->add_flag("--time-transform", solve_args.time_transform,
                  "Report diagonalization time separately");
  solve->add_option("--phases-out", solve_args.phases_out,
                    "Write per-phase barrier diagnostics CSV (newton)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  bench->add_option("--dists", bench_args.dists,
                    "Spectrum families: stacked|rstacked|oexp")
      ->delimiter(',');
  bench->add_option("--kappas", bench_args.kappas, "Condition numbers")
      ->delimiter(',');
  bench->add_option("--dims", bench_args.dims, "Dimensions")->delimiter(',');
  bench->add_option("--reps", bench_args.reps, "Seeds per cell")
      ->capture_default_str();
  bench->add_option("--solvers", bench_args.solvers, "maxnorm|newton")
      ->delimiter(',');
  bench->add_option("--eps", bench_args.eps, "Accuracy target")
      ->capture_default_str();
  bench->add_option("--a", bench_args.a, "Spectrum scale")
      ->capture_default_str();
  bench->add_flag("--full", bench_args.full,
                  "Solve full instances (include diagonalization)");
  bench->add_option("--summary-out", bench_args.summary_out,
                    "Write the per-cell summary CSV to this file");

  BanditArgs bandit_args;
  CLI::App* bandit = app.add_subcommand("bandit", "Run bandit experiments");
  bandit->add_option("--alg", bandit_args.alg,
                     "oful-maxnorm|oful-newton|eps-linucb|eps-linucb-cont")
      ->capture_default_str();
  bandit->add_option("--d", bandit_args.d, "Dimension")->capture_default_str();
  bandit->add_option("--T", bandit_args.T, "Horizon")->capture_default_str();
  bandit->add_option("--norm-zeta", bandit_args.norm_zeta,
                     "Hidden parameter norm")
      ->capture_default_str();
  bandit->add_option("--eps", bandit_args.eps,
                     "Approximation slack for eps-linucb")
      ->capture_default_str();
  bandit->add_option("--seeds", bandit_args.seeds, "Number of seeded runs")
      ->capture_default_str();
  bandit->add_option("--delta", bandit_args.delta,
                     "Confidence level (0 = 1/T)");
  bandit->add_option("--snapshot-times", bandit_args.snapshot_times,
                     "Rounds at which to record the confidence ellipsoid")
      ->delimiter(',');
  bandit->add_option("--hist-out", bandit_args.hist_out,
                     "Write snapshot eigenvalue/center histograms to this "
                     "CSV");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a seeded instance");
  gen->add_option("--dist", gen_args.dist, "stacked|rstacked|oexp")
      ->capture_default_str();
  gen->add_option("--a", gen_args.a, "Spectrum scale")->capture_default_str();
  gen->add_option("--kappa", gen_args.kappa, "Condition number")
      ->capture_default_str();
  gen->add_option("--d", gen_args.d, "Dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (solve->parsed()) return run_solve(global, solve_args);
  if (bench->parsed()) return run_bench(global, bench_args);
  if (bandit->parsed()) return run_bandit(global, bandit_args);
  if (gen->parsed()) return run_gen(global, gen_args);
  return kExitParse;
}
