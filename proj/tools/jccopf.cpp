#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jcc/baselines.hpp"
#include "jcc/caseio.hpp"
#include "jcc/errors.hpp"
#include "jcc/evaluation.hpp"
#include "jcc/report.hpp"

namespace fs = std::filesystem;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

struct CommonArgs {
  std::string case_path;
  std::string config_path;
  std::string method = "iterative";
  jcc::RunConfig config;
  bool force = false;
};

// Precedence: flags > config file > defaults. CLI11 reports which flags the
// user actually set, so file values only fill the untouched ones.
void attach_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
  cmd->add_option("--case", args.case_path, "Case file (JSON)")->required();
  cmd->add_option("--config", args.config_path, "Config file (JSON)");
  cmd->add_option("--alpha", args.config.alpha, "Joint violation risk");
  cmd->add_option("--epsilon", args.config.epsilon, "Supply-demand risk");
  cmd->add_option("--samples", args.config.n_samples, "Solve-side sample count");
  cmd->add_option("--eval-samples", args.config.n_eval,
                  "Evaluation sample count");
  cmd->add_option("--seed", args.config.seed, "Solve scenario seed");
  cmd->add_option("--eval-seed", args.config.eval_seed,
                  "Evaluation scenario seed");
  cmd->add_option("--tol", args.config.tolerance, "Convergence tolerance");
  cmd->add_option("--max-iter", args.config.max_iter, "Iteration cap");
  if (with_out) {
    cmd->add_option("--out", args.config.out_dir, "Output directory");
    cmd->add_flag("--force", args.force, "Overwrite existing outputs");
  }
}

void merge_config_file(CLI::App* cmd, CommonArgs& args) {
  if (args.config_path.empty()) return;
  jcc::RunConfig file = jcc::load_run_config(args.config_path);
  auto keep_flag = [&](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (!keep_flag("--alpha")) args.config.alpha = file.alpha;
  if (!keep_flag("--epsilon")) args.config.epsilon = file.epsilon;
  if (!keep_flag("--samples")) args.config.n_samples = file.n_samples;
  if (!keep_flag("--eval-samples")) args.config.n_eval = file.n_eval;
  if (!keep_flag("--seed")) args.config.seed = file.seed;
  if (!keep_flag("--eval-seed")) args.config.eval_seed = file.eval_seed;
  if (!keep_flag("--tol")) args.config.tolerance = file.tolerance;
  if (!keep_flag("--max-iter")) args.config.max_iter = file.max_iter;
  if (cmd->count("--out") == 0 && !file.out_dir.empty()) {
    args.config.out_dir = file.out_dir;
  }
  if (cmd->count("--method") == 0 && !file.methods.empty()) {
    args.method.clear();
    for (const auto& m : file.methods) {
      if (!args.method.empty()) args.method += ",";
      args.method += m;
    }
  }
}

// Creates the directory when absent; refuses to clobber existing report
// files unless --force.
void prepare_out_dir(const std::string& dir, bool force,
                     const std::vector<std::string>& files) {
  fs::create_directories(dir);
  if (force) return;
  for (const auto& name : files) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) {
      throw jcc::ValidationError(p.string() +
                                 " already exists (use --force to overwrite)");
    }
  }
}

std::vector<jcc::MethodId> parse_method_list(const std::string& spec) {
  if (spec.empty() || spec == "all") return jcc::all_methods();
  std::vector<jcc::MethodId> out;
  std::string token;
  std::stringstream ss(spec);
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(jcc::method_from_string(token));
  }
  if (out.empty()) throw jcc::ValidationError("empty method list");
  return out;
}

int cmd_solve(CommonArgs& args) {
  jcc::check_run_config(args.config);
  const jcc::Case study = jcc::parse_case(args.case_path);
  const jcc::MethodId id = jcc::method_from_string(args.method);

  prepare_out_dir(args.config.out_dir, args.force,
                  {"dispatch.csv", "trace.csv", "summary.csv"});

  const double t0 = now_ms();
  const jcc::DispatchSchedule schedule =
      jcc::run_method(id, study, args.config.framework());
  const double wall = now_ms() - t0;

  for (const auto& warning : schedule.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  const fs::path dir(args.config.out_dir);
  jcc::write_dispatch_csv((dir / "dispatch.csv").string(), study.network,
                          schedule);
  jcc::write_trace_csv((dir / "trace.csv").string(), schedule);
  jcc::write_summary_csv((dir / "summary.csv").string(), jcc::to_string(id),
                         schedule, wall);

  std::cout << "method=" << jcc::to_string(id)
            << " objective=" << jcc::format_double(schedule.objective)
            << " status=" << schedule.status << " iterations="
            << schedule.iterations << "\n";

  const bool clean = schedule.status == "converged" ||
                     schedule.status == "presolved" ||
                     schedule.status == "single-pass" ||
                     schedule.status == "no-line-views";
  return clean ? 0 : 3;
}

int cmd_compare(CommonArgs& args) {
  jcc::check_run_config(args.config);
  const jcc::Case study = jcc::parse_case(args.case_path);
  const auto methods = parse_method_list(args.method);

  prepare_out_dir(args.config.out_dir, args.force,
                  {"pos.csv", "cost.csv", "violations.csv"});

  const jcc::CompareResult result =
      jcc::compare_methods(study, args.config.framework(), methods,
                           args.config.n_eval, args.config.eval_seed);

  const fs::path dir(args.config.out_dir);
  jcc::write_pos_csv((dir / "pos.csv").string(), result.pos);
  jcc::write_cost_csv((dir / "cost.csv").string(), result.cost);
  jcc::write_violations_csv((dir / "violations.csv").string(),
                            result.attribution, args.config.n_eval);

  for (const auto& row : result.cost.rows) {
    if (row.ok) {
      std::cout << row.method << ": objective="
                << jcc::format_double(row.objective)
                << " gap=" << jcc::format_double(row.gap) << "\n";
    } else {
      std::cerr << row.method << ": error: " << row.error << "\n";
    }
  }
  return result.all_ok ? 0 : 4;
}

int cmd_evaluate(CommonArgs& args, const std::string& dispatch_path) {
  jcc::check_run_config(args.config);
  const jcc::Case study = jcc::parse_case(args.case_path);
  const auto dispatch = jcc::read_dispatch_csv(dispatch_path, study.network);

  prepare_out_dir(args.config.out_dir, args.force,
                  {"pos.csv", "violations.csv"});

  const jcc::EvalDetail detail =
      jcc::evaluate_pos(dispatch, study, args.config.n_eval,
                        args.config.eval_seed, args.config.alpha,
                        args.config.seed);

  const fs::path dir(args.config.out_dir);
  jcc::write_pos_csv((dir / "pos.csv").string(), {detail.pos});
  jcc::write_violations_csv((dir / "violations.csv").string(),
                            {{detail.pos.method, detail.attribution}},
                            args.config.n_eval);

  bool all_pass = true;
  for (const auto& entry : detail.pos.entries) {
    if (!entry.pass) all_pass = false;
  }
  std::cout << (all_pass ? "all time steps pass" : "some time steps fail")
            << "\n";
  return all_pass ? 0 : 5;
}

int cmd_validate(const std::string& case_path) {
  const jcc::Case study = jcc::parse_case(case_path);
  const auto views = jcc::constraint_views(study.network);
  jcc::build_ptdf(study.network);  // topology check included
  std::cout << "valid: " << study.network.buses.size() << " buses, "
            << study.network.lines.size() << " lines ("
            << views.size() / 2 << " monitored), "
            << study.network.generators.size() << " generators, "
            << study.network.wind_farms.size() << " wind farms, "
            << study.network.loads.size() << " loads, horizon "
            << study.network.horizon << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained DC dispatch toolkit"};
  app.require_subcommand(1);

  CommonArgs solve_args, compare_args, eval_args;
  std::string validate_case, eval_dispatch;

  CLI::App* solve = app.add_subcommand("solve", "Run one method on a case");
  solve->add_option("--method", solve_args.method,
                    "no_jcc|boole|improved_boole|improving_bound|iterative");
  attach_common(solve, solve_args, true);

  CLI::App* compare =
      app.add_subcommand("compare", "Run and evaluate several methods");
  compare->add_option("--method", compare_args.method,
                      "Comma-separated method list or 'all'");
  compare_args.method = "all";
  attach_common(compare, compare_args, true);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate a stored dispatch");
  evaluate->add_option("--dispatch", eval_dispatch, "dispatch.csv to evaluate")
      ->required();
  attach_common(evaluate, eval_args, true);

  CLI::App* validate = app.add_subcommand("validate", "Check a case file");
  validate->add_option("--case", validate_case, "Case file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      merge_config_file(solve, solve_args);
      return cmd_solve(solve_args);
    }
    if (compare->parsed()) {
      merge_config_file(compare, compare_args);
      return cmd_compare(compare_args);
    }
    if (evaluate->parsed()) {
      merge_config_file(evaluate, eval_args);
      return cmd_evaluate(eval_args, eval_dispatch);
    }
    if (validate->parsed()) {
      return cmd_validate(validate_case);
    }
  } catch (const jcc::ParseError& err) {
    std::cerr << "error:\n";
    for (const auto& issue : err.issues()) std::cerr << "  " << issue << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
