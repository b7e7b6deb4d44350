#include "ballcrit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

#include "CLI11.hpp"

#include "ballcrit/config.hpp"
#include "ballcrit/random.hpp"
#include "ballcrit/report.hpp"
#include "ballcrit/solution_io.hpp"

namespace ballcrit {

namespace {

const char* const kCommands[] = {"eigen", "pipeline", "sweep", "solve", "lambda-star",
                                 "certify", "check-hypotheses", "refine"};

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Context {
  RunConfig cfg;
  std::string command;
  int jobs = 1;
  bool quiet = false;
  std::string vector_path;
  std::ostream& out;
  SolveReport report;
  std::string trace;  // CSV body, lambda-ordered

  void say(const std::string& line) const {
    if (!quiet) out << line << '\n';
  }
};

GridShape problem_shape(const RunConfig& cfg) { return cfg.shape ? *cfg.shape : cfg.domain->shape(); }

LambdaStarResult lambda_star_of(const RunConfig& cfg, const StructureConstants& k) {
  BetaOptions b = cfg.beta;
  b.seed = derive_seed(cfg.solver.seed, "cli.beta");
  return compute_lambda_star(Nonlinearity(cfg.family), problem_shape(cfg), k, b);
}

std::vector<double> resolve_lambdas(Context& ctx) {
  const auto& mode = ctx.cfg.lambda;
  double ls = INFINITY;
  if (mode.kind == LambdaMode::Kind::auto_fraction) {
    if (!ctx.report.constants) ctx.report.constants = structure_for(ctx.cfg);
    ctx.report.lambda_star = lambda_star_of(ctx.cfg, *ctx.report.constants);
    ls = ctx.report.lambda_star->lambda_star;
  }
  return lambda_values(mode, ls);
}

double single_lambda(Context& ctx) {
  const auto values = resolve_lambdas(ctx);
  if (values.size() != 1)
    throw ConfigError("problem.lambda: command '" + ctx.command + "' takes a single lambda; use sweep");
  return values.front();
}

TraceSink trace_sink(std::string* buf, double lambda) {
  if (!buf) return {};
  const std::string prefix = fmt(lambda) + ",";
  return [buf, prefix](const TraceRecord& r) {
    *buf += prefix + std::string(r.stage) + "," + std::to_string(r.start) + "," + std::to_string(r.iteration) +
            "," + format_double(r.value) + "," + format_double(r.residual) + "," + format_double(r.norm) + "\n";
  };
}

int exit_for(const std::vector<StageIssue>& issues) {
  int code = kExitOk;
  for (const auto& i : issues) {
    if (i.code == "geometry_violated") return kExitGeometry;
    if (i.code == "unconverged" || i.code == "not_anti_coercive") code = kExitNonconvergence;
  }
  return code;
}

void export_points(const Context& ctx, std::size_t index, const PipelineResult& pr) {
  if (ctx.cfg.csv_dir.empty()) return;
  std::filesystem::create_directories(ctx.cfg.csv_dir);
  const auto write = [&](const CriticalPoint& cp) {
    const auto path = std::filesystem::path(ctx.cfg.csv_dir) /
                      ("lambda" + std::to_string(index) + "_" + to_string(cp.kind) + ".csv");
    export_solution(cp, cp.point.shape, path.string());
  };
  write(pr.ball_min);
  if (pr.mountain_pass) write(*pr.mountain_pass);
  if (pr.global_max) write(*pr.global_max);
}

std::string point_line(const char* label, const CriticalPoint& cp) {
  std::string s = std::string(label) + ": J=" + fmt(cp.value) + " |grad|=" + fmt(cp.residual) +
                  " |u|=" + fmt(cp.point.norm()) + " " + to_string(cp.classification) +
                  (cp.converged ? "" : " (unconverged)");
  if (cp.certificate) s += " certificate=" + to_string(cp.certificate->verdict);
  return s;
}

LambdaRun pipeline_run(const RunConfig& cfg, const StructureConstants& k, double lambda, std::uint64_t seed,
                       std::string* trace) {
  LambdaRun run;
  run.lambda = lambda;
  run.seed = seed;
  const GridProblem p = build_problem(cfg, lambda);
  run.energy_at_zero = p.energy_at_zero();
  PipelineOptions po;
  po.solver = cfg.solver;
  po.solver.seed = seed;
  po.solver.trace = trace_sink(trace, lambda);
  po.rho1 = cfg.rho1;
  po.beta = cfg.beta;
  po.certify = cfg.certify;
  po.geometry_samples = cfg.geometry_samples;
  run.pipeline = three_point_pipeline(p, k, po);
  return run;
}

void print_pipeline(const Context& ctx, const LambdaRun& run) {
  const PipelineResult& pr = *run.pipeline;
  ctx.say("lambda=" + fmt(run.lambda) + " lambda*=" + fmt(pr.lambda_star.lambda_star) +
          (pr.lambda_admissible ? " (admissible)" : " (above lambda*)"));
  ctx.say("  " + point_line("ball_min", pr.ball_min));
  if (pr.geometry)
    ctx.say("  geometry: rho1=" + fmt(pr.geometry->rho1) + " margin=" + fmt(pr.geometry->margin));
  if (pr.mountain_pass) ctx.say("  " + point_line("mountain_pass", *pr.mountain_pass));
  if (pr.global_max) ctx.say("  " + point_line("global_max", *pr.global_max));
  ctx.say("  distinct=" + std::to_string(pr.distinct_count));
  if (pr.coincidence_note) ctx.say("  note: " + *pr.coincidence_note);
  for (const auto& i : pr.issues) ctx.say("  issue[" + i.code + "] " + i.stage + ": " + i.message);
}

int cmd_eigen(Context& ctx) {
  const double scale = ctx.cfg.shape ? 1.0 : 1.0 / (ctx.cfg.domain->h * ctx.cfg.domain->h);
  ctx.report.eigenvalues = eigen_analytic(problem_shape(ctx.cfg), scale);
  std::string line;
  for (double v : ctx.report.eigenvalues) line += (line.empty() ? "" : " ") + fmt(v);
  ctx.say(line);
  return kExitOk;
}

int cmd_lambda_star(Context& ctx) {
  ctx.report.constants = structure_for(ctx.cfg);
  ctx.report.lambda_star = lambda_star_of(ctx.cfg, *ctx.report.constants);
  const auto& ls = *ctx.report.lambda_star;
  ctx.say("beta=" + fmt(ls.beta) + " lambda*=" + fmt(ls.lambda_star) + " method=" + to_string(ls.method) +
          (ls.estimate ? " (estimate)" : ""));
  return kExitOk;
}

int cmd_solve(Context& ctx) {
  ctx.report.constants = structure_for(ctx.cfg);
  int code = kExitOk;
  const auto values = resolve_lambdas(ctx);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const GridProblem p = build_problem(ctx.cfg, values[k]);
    SolverOptions so = ctx.cfg.solver;
    so.trace = trace_sink(ctx.cfg.trace_path.empty() ? nullptr : &ctx.trace, values[k]);
    CriticalPoint cp = ball_minimize(p, ctx.cfg.rho, so);
    CertifyOptions co = ctx.cfg.certify;
    co.rho = ctx.cfg.rho;
    cp.certificate = certify(p, cp.point, co);
    if (!cp.converged) code = kExitNonconvergence;
    ctx.say("lambda=" + fmt(values[k]) + " " + point_line("ball_min", cp));
    if (!ctx.cfg.csv_dir.empty()) {
      std::filesystem::create_directories(ctx.cfg.csv_dir);
      export_solution(cp, cp.point.shape,
                      (std::filesystem::path(ctx.cfg.csv_dir) / ("lambda" + std::to_string(k) + "_ball_min.csv"))
                          .string());
    }
    LambdaRun run;
    run.lambda = values[k];
    run.seed = so.seed;
    run.energy_at_zero = p.energy_at_zero();
    run.solve = std::move(cp);
    ctx.report.runs.push_back(std::move(run));
  }
  return code;
}

int cmd_pipeline(Context& ctx) {
  ctx.report.constants = structure_for(ctx.cfg);
  const double lambda = single_lambda(ctx);
  Clock clock;
  LambdaRun run = pipeline_run(ctx.cfg, *ctx.report.constants, lambda, ctx.cfg.solver.seed,
                               ctx.cfg.trace_path.empty() ? nullptr : &ctx.trace);
  ctx.report.timing["run[0]"] = clock.seconds();
  print_pipeline(ctx, run);
  export_points(ctx, 0, *run.pipeline);
  const int code = exit_for(run.pipeline->issues);
  ctx.report.runs.push_back(std::move(run));
  return code;
}

int cmd_sweep(Context& ctx) {
  ctx.report.constants = structure_for(ctx.cfg);
  const auto values = resolve_lambdas(ctx);
  const StructureConstants k = *ctx.report.constants;
  std::vector<LambdaRun> runs(values.size());
  std::vector<std::string> traces(values.size());
  std::vector<double> seconds(values.size(), 0.0);
  std::vector<std::string> errors(values.size());
  const bool tracing = !ctx.cfg.trace_path.empty();
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      Clock clock;
      try {
        runs[i] = pipeline_run(ctx.cfg, k, values[i], derive_seed(ctx.cfg.solver.seed, "sweep", i),
                               tracing ? &traces[i] : nullptr);
      } catch (const std::exception& e) {
        runs[i].lambda = values[i];
        runs[i].seed = derive_seed(ctx.cfg.solver.seed, "sweep", i);
        runs[i].error = e.what();
      }
      seconds[i] = clock.seconds();
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, ctx.jobs)), 1,
                                                        std::max<std::size_t>(values.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ctx.report.timing["run[" + std::to_string(i) + "]"] = seconds[i];
    ctx.trace += traces[i];
    if (runs[i].error) {
      ctx.say("lambda=" + fmt(values[i]) + " error: " + *runs[i].error);
      code = std::max(code, static_cast<int>(kExitNonconvergence));
    } else {
      print_pipeline(ctx, runs[i]);
      export_points(ctx, i, *runs[i].pipeline);
      code = std::max(code, exit_for(runs[i].pipeline->issues));
    }
    ctx.report.runs.push_back(std::move(runs[i]));
  }
  return code;
}

int cmd_certify(Context& ctx) {
  const std::string path = !ctx.vector_path.empty() ? ctx.vector_path : ctx.cfg.vector_path;
  if (path.empty()) throw ConfigError("certify.vector: a vector file is required (or pass --vector)");
  const double lambda = single_lambda(ctx);
  const GridProblem p = build_problem(ctx.cfg, lambda);
  const GridVector u = read_vector_file(path, p.shape());
  CertifyOptions co = ctx.cfg.certify;
  co.rho = ctx.cfg.rho;
  ctx.report.certificate = certify(p, u, co);
  const auto& c = *ctx.report.certificate;
  ctx.say("verdict=" + to_string(c.verdict) + " J(u)=" + fmt(c.j_u) + " J(v)=" + fmt(c.j_v) + " gap=" +
          fmt(c.energy_gap) + " residual=" + fmt(c.residual));
  if (!c.diagnostic.empty()) ctx.say("  " + c.diagnostic);
  return kExitOk;
}

int cmd_check_hypotheses(Context& ctx) {
  const Nonlinearity nl(ctx.cfg.family);
  ctx.report.hypotheses = check_all(nl, ctx.cfg.hypotheses, problem_shape(ctx.cfg).size());
  for (const auto& v : ctx.report.hypotheses) {
    std::string line = to_string(v.id) + ": " + to_string(v.verdict);
    if (v.witness)
      line += " witness x=" + fmt(v.witness->x) + (v.id == HypothesisId::H5_H10 ? " y=" + fmt(v.witness->y) : "") +
              " lhs=" + fmt(v.witness->lhs) + " rhs=" + fmt(v.witness->rhs);
    if (!v.note.empty()) line += " (" + v.note + ")";
    ctx.say(line);
  }
  ctx.say("H6: assumed (measurability is not checked)");
  return kExitOk;
}

int cmd_refine(Context& ctx) {
  if (!ctx.cfg.domain) throw ConfigError("problem.domain: refine needs a domain, not m and n");
  const double lambda = single_lambda(ctx);
  RefinementOptions ro;
  ro.rho = ctx.cfg.rho;
  ro.csv_dir = ctx.cfg.csv_dir;
  ro.pipeline.solver = ctx.cfg.solver;
  ro.pipeline.solver.trace = trace_sink(ctx.cfg.trace_path.empty() ? nullptr : &ctx.trace, lambda);
  ro.pipeline.rho1 = ctx.cfg.rho1;
  ro.pipeline.beta = ctx.cfg.beta;
  ro.pipeline.certify = ctx.cfg.certify;
  ro.pipeline.geometry_samples = ctx.cfg.geometry_samples;
  ctx.report.refinement = refinement_study(*ctx.cfg.domain, [&](double, double) { return ctx.cfg.family; }, lambda,
                                           ctx.cfg.ladder, ro);
  const auto& r = *ctx.report.refinement;
  ctx.report.constants = r.constants;
  ctx.say("lambda1~" + fmt(r.poincare.lambda1) + " c=" + fmt(r.poincare.c) +
          (r.poincare.extrapolated ? "" : " (unextrapolated)"));
  for (const auto& b : r.branches) {
    std::string line = b.label + ": levels=" + std::to_string(b.levels.size());
    for (double d : b.differences) line += " diff=" + fmt(d);
    for (double q : b.ratios) line += " ratio=" + fmt(q);
    if (b.order) line += " order=" + fmt(*b.order);
    if (b.lost) line += " lost at level " + std::to_string(*b.lost_at_level);
    ctx.say(line);
  }
  for (const auto& i : r.issues) ctx.say("issue[" + i.code + "] " + i.stage + ": " + i.message);
  return exit_for(r.issues);
}

int dispatch(Context& ctx) {
  const std::string& c = ctx.command;
  if (c == "eigen") return cmd_eigen(ctx);
  if (c == "lambda-star") return cmd_lambda_star(ctx);
  if (c == "solve") return cmd_solve(ctx);
  if (c == "pipeline") return cmd_pipeline(ctx);
  if (c == "sweep") return cmd_sweep(ctx);
  if (c == "certify") return cmd_certify(ctx);
  if (c == "check-hypotheses") return cmd_check_hypotheses(ctx);
  if (c == "refine") return cmd_refine(ctx);
  return kExitUsage;
}

void write_outputs(const Context& ctx) {
  if (!ctx.cfg.report_path.empty()) write_file_atomic(ctx.cfg.report_path, serialize_report(ctx.report));
  if (!ctx.cfg.trace_path.empty())
    write_file_atomic(ctx.cfg.trace_path, "lambda,stage,start,iteration,value,residual,norm\n" + ctx.trace);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical points of discrete and semilinear variational problems on a norm ball", "ballcrit"};
  std::string config_path, command, vector_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration (falls back to BALLCRIT_CONFIG)");
  app.add_option("--command", command,
                 "eigen | lambda-star | solve | pipeline | sweep | certify | check-hypotheses | refine");
  app.add_option("--seed", seed, "override solver.seed");
  app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_option("--vector", vector_path, "vector file for certify");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");
  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitUsage;
  }

  if (config_path.empty()) {
    if (const char* env = std::getenv("BALLCRIT_CONFIG")) config_path = env;
  }
  if (config_path.empty()) {
    err << "ballcrit: --config PATH is required (or set BALLCRIT_CONFIG)\n";
    return kExitUsage;
  }

  Clock total;
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "ballcrit: invalid config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitIo;
  }
  if (seed) {
    cfg.solver.seed = *seed;
    cfg.hypotheses.seed = *seed;
  }
  if (command.empty()) command = cfg.command;
  if (command.empty()) {
    err << "ballcrit: no command given (use --command or the config's \"command\" key)\n";
    return kExitUsage;
  }
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
    err << "ballcrit: unknown command '" << command << "'\n";
    return kExitUsage;
  }

  Context ctx{std::move(cfg), command, jobs, quiet, vector_path, out, {}, {}};
  ctx.report.command = command;
  ctx.report.config = ctx.cfg.source;
  ctx.report.config["solver"]["seed"] = ctx.cfg.solver.seed;

  int code = kExitOk;
  try {
    code = dispatch(ctx);
  } catch (const ConfigError& e) {
    err << "ballcrit: invalid config: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitIo;
  } catch (const GeometryViolated& e) {
    err << "ballcrit: geometry violated: " << e.what() << '\n';
    code = kExitGeometry;
  } catch (const ConvergenceFailure& e) {
    err << "ballcrit: did not converge: " << e.what() << '\n';
    code = kExitNonconvergence;
  } catch (const NotAntiCoercive& e) {
    err << "ballcrit: " << e.what() << '\n';
    code = kExitNonconvergence;
  } catch (const std::invalid_argument& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::length_error& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitValidation;
  }
  ctx.report.exit_code = code;
  ctx.report.timing["total"] = total.seconds();
  try {
    write_outputs(ctx);
  } catch (const std::exception& e) {
    err << "ballcrit: " << e.what() << '\n';
    return kExitIo;
  }
  return code;
}

}  // namespace ballcrit
