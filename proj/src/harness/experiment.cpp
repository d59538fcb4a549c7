#include "aprox/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "aprox/calculus.hpp"
#include "aprox/divergence.hpp"
#include "aprox/errors.hpp"
#include "aprox/harness/generators.hpp"
#include "aprox/harness/libsvm.hpp"
#include "aprox/harness/trace_io.hpp"

namespace aprox {

double logistic_euclidean_constant(const Matrix& A) {
  if (A.rows() == 0) return kLogisticLFloor;
  const Matrix gram = A.transpose() * A;
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return std::max(top / (4.0 * static_cast<double>(A.rows())), kLogisticLFloor);
}

namespace {

LogisticRegularization logistic_reg(const ExperimentConfig& cfg) {
  if (cfg.reg == "l1") return {LogisticRegularization::Kind::l1, cfg.nu};
  if (cfg.reg == "sql2") return {LogisticRegularization::Kind::sql2, cfg.nu};
  return {LogisticRegularization::Kind::none, 0.0};
}

ExperimentProblem logistic_problem(const ExperimentConfig& cfg) {
  DenseData data = cfg.data.empty() ? generate_logistic(cfg.m, cfg.n, cfg.seed)
                                    : to_dense(load_libsvm(cfg.data), cfg.rescale);
  const auto reg = logistic_reg(cfg);
  ExperimentProblem p;
  p.bundle = build_logistic(data.A, data.b, reg);
  const double euclid_L = logistic_euclidean_constant(data.A);
  p.euclid_value = p.bundle.f.value;
  p.euclid_gradient = p.bundle.f.gradient;
  p.euclid_L = euclid_L;
  if (cfg.reference == "euclidean") {
    p.bundle.f.reference = ReferenceFunction::euclidean(Vector::Ones(data.A.cols()));
    p.bundle.f.L = euclid_L;
  }
  p.x0 = Vector::Zero(data.A.cols());
  p.gap_lambda = cfg.solver.gap_lambda > 0.0 ? cfg.solver.gap_lambda : 1.0 / *p.bundle.f.L;
  if (reg.kind != LogisticRegularization::Kind::l1) {
    const double nu = reg.kind == LogisticRegularization::Kind::sql2 ? reg.nu : 0.0;
    auto value = p.bundle.f.value;
    auto gradient = p.bundle.f.gradient;
    p.total_value = [value, nu](const Vector& x) { return value(x) + 0.5 * nu * x.squaredNorm(); };
    p.total_gradient = [gradient, nu](const Vector& x) { return Vector(gradient(x) + nu * x); };
    p.total_x0 = p.x0;
    const ProblemBundle b = p.bundle;
    const double lam = p.gap_lambda;
    p.total_gap = [b, lam](const Vector& x) { return gap(b.f, b.g, lam, x); };
  }
  return p;
}

ExperimentProblem exp_lp_problem(const ExperimentConfig& cfg) {
  const ExpLpData d = generate_exp_lp(cfg.m, cfg.n, cfg.seed, cfg.sigma);
  const LiftedExpLpModel model = make_lifted_exp_lp(d.A, d.b, d.c, d.sigma, cfg.epsilon);
  ExperimentProblem p;
  p.bundle = build_lifted_exp_lp(model);
  p.x0 = Vector::Zero(2 * model.n());
  p.gap_lambda = cfg.solver.gap_lambda > 0.0 ? cfg.solver.gap_lambda : 1.0 / model.L;
  p.default_lambda_init = 100.0;
  p.linesearch_floor = 1.0 / model.L;
  const Matrix A = d.A;
  const Vector b = d.b, c = d.c;
  const double sigma = d.sigma;
  p.total_value = [A, b, c, sigma](const Vector& x) { return exp_lp_objective(A, b, c, sigma, x); };
  p.total_gradient = [A, b, c, sigma](const Vector& x) { return exp_lp_gradient(A, b, c, sigma, x); };
  p.total_x0 = Vector::Zero(model.n());
  const ProblemBundle bundle = p.bundle;
  const double lam = p.gap_lambda;
  p.total_gap = [bundle, lam](const Vector& x) {
    Vector z(2 * x.size());
    z << x, -x;
    return gap(bundle.f, bundle.g, lam, z);
  };
  return p;
}

ExperimentProblem ot_problem(const ExperimentConfig& cfg) {
  const OtData d = generate_ot(cfg.m, cfg.n, cfg.seed);
  const OtDualModel model = make_ot_dual(d.C, d.r, d.s, cfg.sigma, OtMode::joint);
  ExperimentProblem p;
  p.bundle = build_ot_dual(model);
  const Index dim = p.bundle.f.dim();
  p.x0 = Vector::Zero(dim);
  p.gap_lambda = cfg.solver.gap_lambda > 0.0 ? cfg.solver.gap_lambda : 1.0 / *p.bundle.f.L;
  auto value = p.bundle.f.value;
  auto gradient = p.bundle.f.gradient;
  const Vector c = p.bundle.g.coefficients();
  p.total_value = [value, c](const Vector& z) { return value(z) + c.dot(z); };
  p.total_gradient = [gradient, c](const Vector& z) { return Vector(gradient(z) + c); };
  p.total_x0 = p.x0;
  const ProblemBundle bundle = p.bundle;
  const double lam = p.gap_lambda;
  p.total_gap = [bundle, lam](const Vector& z) { return gap(bundle.f, bundle.g, lam, z); };
  return p;
}

double L_of(const ExperimentProblem& p) {
  if (!p.bundle.f.L) throw ConfigError("problem has no declared smoothness constant");
  return *p.bundle.f.L;
}

}  // namespace

ExperimentProblem build_experiment_problem(const ExperimentConfig& config) {
  config.validate();
  if (config.problem == "logistic") return logistic_problem(config);
  if (config.problem == "exp_lp") return exp_lp_problem(config);
  return ot_problem(config);
}

std::vector<std::string> default_solvers(const ExperimentConfig& config) {
  if (config.problem == "logistic") {
    std::vector<std::string> s{"fixed", "linesearch", "warmstart", "euclidean"};
    if (config.reg != "l1") s.push_back("armijo");
    return s;
  }
  return {"fixed", "warmstart", "armijo"};
}

RunOutcome run_named_solver(const ExperimentProblem& problem, const ExperimentConfig& config,
                            const std::string& solver) {
  RunOutcome out{solver, {}, {}};
  try {
    SolverConfig cfg = config.solver;
    cfg.gap_lambda = problem.gap_lambda;
    const double L = L_of(problem);
    if (solver == "fixed") {
      cfg.mode = SolverConfig::Mode::fixed;
      if (cfg.lambda <= 0.0) cfg.lambda = 1.0 / L;
      out.trace = run_fixed(problem.bundle.f, problem.bundle.g, cfg, problem.x0);
    } else if (solver == "linesearch") {
      cfg.mode = SolverConfig::Mode::linesearch;
      if (cfg.lambda_max <= 0.0) cfg.lambda_max = 4.0 / L;
      cfg.lambda_min = std::max(cfg.lambda_min, problem.linesearch_floor);
      out.trace = run_linesearch(problem.bundle.f, problem.bundle.g, cfg, problem.x0);
    } else if (solver == "warmstart") {
      cfg.mode = SolverConfig::Mode::linesearch_warmstart;
      if (cfg.lambda_init <= 0.0)
        cfg.lambda_init = problem.default_lambda_init > 0.0 ? problem.default_lambda_init : 1.0 / L;
      cfg.lambda_min = std::max(cfg.lambda_min, problem.linesearch_floor);
      out.trace = run_linesearch(problem.bundle.f, problem.bundle.g, cfg, problem.x0);
    } else if (solver == "euclidean") {
      if (!problem.euclid_L) throw ConfigError("the Euclidean baseline needs a Euclidean Lipschitz constant");
      cfg.mode = SolverConfig::Mode::fixed;
      cfg.lambda = 1.0 / *problem.euclid_L;
      cfg.gap_lambda = 0.0;
      out.trace = run_euclidean_baseline(problem.euclid_value, problem.euclid_gradient, problem.bundle.g,
                                         Vector::Ones(problem.x0.size()), problem.euclid_L, cfg, problem.x0);
    } else if (solver == "armijo") {
      if (!problem.total_value) throw ConfigError("Armijo descent needs a smooth total objective");
      if (cfg.lambda_init <= 0.0)
        cfg.lambda_init = problem.default_lambda_init > 0.0 ? problem.default_lambda_init : 1.0;
      // backtracking may go all the way down to the smallest normal double
      cfg.lambda_min = 0.0;
      out.trace = run_armijo_gd(problem.total_value, problem.total_gradient, cfg, problem.total_x0,
                                problem.total_gap);
    } else {
      throw ConfigError("unknown solver '" + solver + "'");
    }
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

void run_parallel(std::size_t jobs, unsigned workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w)
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) job(i);
    });
  for (auto& t : threads) t.join();
}

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

nlohmann::json outcome_json(const RunOutcome& r) {
  if (!r.error.empty()) return {{"status", "not_run"}, {"error", r.error}};
  return trace_summary(r.trace);
}

}  // namespace

nlohmann::json run_solve(const ExperimentConfig& config, unsigned workers) {
  (void)workers;
  const ExperimentProblem problem = build_experiment_problem(config);
  const std::string name = config.solver.mode == SolverConfig::Mode::fixed        ? "fixed"
                           : config.solver.mode == SolverConfig::Mode::linesearch ? "linesearch"
                                                                                  : "warmstart";
  const RunOutcome r = run_named_solver(problem, config, name);
  nlohmann::json summary = outcome_json(r);
  summary["problem"] = problem.bundle.name;
  summary["solver"] = name;
  summary["config"] = config.to_json();
  if (r.error.empty()) write_file_atomic(join(config.out_dir, "trace.csv"), trace_to_csv(r.trace, config.wall_time));
  write_file_atomic(join(config.out_dir, "summary.json"), summary.dump(2) + "\n");
  return summary;
}

nlohmann::json run_experiment(const ExperimentConfig& config, unsigned workers) {
  const ExperimentProblem problem = build_experiment_problem(config);
  const std::vector<std::string> solvers = config.solvers.empty() ? default_solvers(config) : config.solvers;
  std::vector<RunOutcome> outcomes(solvers.size());
  run_parallel(solvers.size(), workers, [&](std::size_t i) {
    outcomes[i] = run_named_solver(problem, config, solvers[i]);
    if (outcomes[i].error.empty()) {
      write_file_atomic(join(config.out_dir, solvers[i] + ".csv"), trace_to_csv(outcomes[i].trace, config.wall_time));
      nlohmann::json s = outcome_json(outcomes[i]);
      s["solver"] = solvers[i];
      write_file_atomic(join(config.out_dir, solvers[i] + ".json"), s.dump(2) + "\n");
    }
  });

  // F* estimate: the smallest final objective over all runs, no extrapolation.
  double f_star = kInf;
  std::size_t longest = 0;
  for (const auto& o : outcomes) {
    if (!o.error.empty() || o.trace.records.empty()) continue;
    f_star = std::min(f_star, o.trace.final_F());
    longest = std::max(longest, o.trace.records.size());
  }

  std::string plot = "k";
  for (const auto& s : solvers) plot += "," + s;
  plot += '\n';
  for (std::size_t k = 0; k < longest; ++k) {
    plot += std::to_string(k);
    for (const auto& o : outcomes) {
      plot += ',';
      if (o.error.empty() && k < o.trace.records.size()) plot += format_double(o.trace.records[k].F - f_star);
    }
    plot += '\n';
  }
  write_file_atomic(join(config.out_dir, "plot_data.csv"), plot);

  nlohmann::json summary;
  summary["problem"] = problem.bundle.name;
  summary["config"] = config.to_json();
  summary["F_star_estimate"] = f_star;
  summary["F_star_rule"] = "minimum final F over all runs";
  summary["gap_lambda"] = problem.gap_lambda;
  summary["runs"] = nlohmann::json::object();
  for (const auto& o : outcomes) summary["runs"][o.solver] = outcome_json(o);
  write_file_atomic(join(config.out_dir, "summary.json"), summary.dump(2) + "\n");
  return summary;
}

nlohmann::json run_grid(const ExperimentConfig& config, unsigned workers) {
  const ExperimentProblem problem = build_experiment_problem(config);
  struct Cell {
    double alpha, lambda_init;
    RunOutcome outcome;
  };
  std::vector<Cell> cells;
  for (double a : config.grid_alphas)
    for (double l : config.grid_lambda_inits) cells.push_back({a, l, {}});
  run_parallel(cells.size(), workers, [&](std::size_t i) {
    ExperimentConfig c = config;
    c.solver.alpha = cells[i].alpha;
    c.solver.lambda_init = cells[i].lambda_init;
    cells[i].outcome = run_named_solver(problem, c, "warmstart");
  });

  std::string csv = "alpha,lambda_init,status,grad_evals,iterations,final_F,final_gap\n";
  nlohmann::json rows = nlohmann::json::array();
  std::ptrdiff_t best = -1;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    const auto& t = cell.outcome.trace;
    const bool ok = cell.outcome.error.empty();
    const std::string status = ok ? status_name(t.status) : "not_run";
    csv += format_double(cell.alpha) + ',' + format_double(cell.lambda_init) + ',' + status + ',' +
           std::to_string(ok ? t.grad_evals() : 0) + ',' + std::to_string(ok ? t.iterations() : 0) + ',' +
           (ok ? format_double(t.final_F()) : "") + ',' + (ok ? format_double(t.final_gap()) : "") + '\n';
    rows.push_back({{"alpha", cell.alpha}, {"lambda_init", cell.lambda_init}, {"status", status},
                    {"grad_evals", ok ? t.grad_evals() : 0}});
    if (ok && t.status == RunStatus::converged &&
        (best < 0 || t.grad_evals() < cells[static_cast<std::size_t>(best)].outcome.trace.grad_evals()))
      best = static_cast<std::ptrdiff_t>(i);
  }
  write_file_atomic(join(config.out_dir, "grid.csv"), csv);

  nlohmann::json summary;
  summary["problem"] = problem.bundle.name;
  summary["config"] = config.to_json();
  summary["selection_rule"] = "fewest gradient evaluations among converged runs";
  summary["configurations"] = rows;
  if (best >= 0) {
    const auto& c = cells[static_cast<std::size_t>(best)];
    summary["best"] = {{"alpha", c.alpha}, {"lambda_init", c.lambda_init},
                       {"grad_evals", c.outcome.trace.grad_evals()}};
  } else {
    summary["best"] = nullptr;
  }
  write_file_atomic(join(config.out_dir, "bench_summary.json"), summary.dump(2) + "\n");
  return summary;
}

std::string run_generate(const ExperimentConfig& config) {
  config.validate();
  if (config.problem == "logistic") {
    const std::string path = join(config.out_dir, "logistic.svm");
    write_file_atomic(path, serialize_libsvm(to_sparse(generate_logistic(config.m, config.n, config.seed))));
    return path;
  }
  nlohmann::json j;
  auto matrix = [](const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < M.rows(); ++i) {
      std::vector<double> row;
      for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  std::string path;
  if (config.problem == "exp_lp") {
    const ExpLpData d = generate_exp_lp(config.m, config.n, config.seed, config.sigma);
    j = {{"A", matrix(d.A)}, {"b", vec(d.b)}, {"c", vec(d.c)}, {"sigma", d.sigma}};
    path = join(config.out_dir, "exp_lp.json");
  } else {
    const OtData d = generate_ot(config.m, config.n, config.seed);
    j = {{"C", matrix(d.C)}, {"r", vec(d.r)}, {"s", vec(d.s)}, {"sigma", config.sigma}};
    path = join(config.out_dir, "ot.json");
  }
  write_file_atomic(path, j.dump(2) + "\n");
  return path;
}

std::vector<std::pair<Vector, Vector>> sinkhorn_scaling(const Matrix& C, const Vector& r, const Vector& s,
                                                        double sigma, int sweeps) {
  const Matrix K = (-C / sigma).array().exp().matrix();
  Vector u = Vector::Ones(C.cols()), v = Vector::Ones(C.rows());
  std::vector<std::pair<Vector, Vector>> out{{u, v}};
  for (int k = 0; k < sweeps; ++k) {
    u = r.cwiseQuotient(K.transpose() * v);
    v = s.cwiseQuotient(K * u);
    out.emplace_back(u, v);
  }
  return out;
}

ProblemBundle logistic_toy(LogisticRegularization reg, int m, int n, std::uint64_t seed) {
  const DenseData d = generate_logistic(m, n, seed);
  return build_logistic(d.A, d.b, reg);
}

ProblemBundle logistic_tiny(LogisticRegularization reg) {
  Matrix A(4, 2);
  A << 1.0, -0.5, -0.3, 0.8, 0.6, 0.6, -1.0, 0.2;
  Vector b(4);
  b << 1.0, -1.0, 1.0, -1.0;
  return build_logistic(A, b, reg);
}

ProblemBundle logistic_sharp() {
  Matrix A(1, 3);
  A << 1.0, -0.5, 0.25;
  return build_logistic(A, Vector::Constant(1, -1.0), {});
}

ProblemBundle exp_sum_toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 0.5);
  Matrix A(5, 3);
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) A(i, j) = unif(rng);
  Vector b(5);
  for (Index i = 0; i < b.size(); ++i) b[i] = normal(rng);
  return build_exp_lp(A, b, -Vector::Ones(3), 0.5);
}

ProblemBundle lifted_exp_lp_toy(int m, int n, std::uint64_t seed, double sigma) {
  const ExpLpData d = generate_exp_lp(m, n, seed, sigma);
  return build_lifted_exp_lp(make_lifted_exp_lp(d.A, d.b, d.c, d.sigma));
}

ProblemBundle ot_joint_toy(int m, int n, std::uint64_t seed, double sigma) {
  const OtData d = generate_ot(m, n, seed);
  return build_ot_dual(make_ot_dual(d.C, d.r, d.s, sigma, OtMode::joint));
}

// ---------------------------------------------------------------------------
// check suites

namespace {

SuiteResult suite_legendre() {
  SuiteResult r{"legendre", false, 0.0, 6e-10, ""};
  Vector w(5);
  w << 0.5, 1.0, 2.0, 3.0, 0.25;
  const ReferenceFunction refs[] = {ReferenceFunction::euclidean(w), ReferenceFunction::exp(5),
                                    ReferenceFunction::sym_logistic(5)};
  for (const auto& phi : refs) r.worst = std::max(r.worst, legendre_roundtrip_check(phi, 1000, 0, 5.0));
  r.passed = r.worst <= r.threshold;
  r.detail = "max |grad phi*(grad phi(x)) - x| on [-5,5]^5, euclidean/exp/symlog";
  return r;
}

SuiteResult suite_bregman() {
  SuiteResult r{"bregman", false, 0.0, 1e-9, ""};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.01, 5.0), sym(-0.99, 0.99);
  const ReferenceFunction exp3 = ReferenceFunction::exp(3), sl3 = ReferenceFunction::sym_logistic(3);
  double most_negative = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vector x(3), y(3), u(3), v(3);
    for (Index j = 0; j < 3; ++j) {
      x[j] = pos(rng);
      y[j] = pos(rng);
      u[j] = sym(rng);
      v[j] = sym(rng);
    }
    r.worst = std::max({r.worst, dual_identity_residual(exp3, x, y), dual_identity_residual(sl3, u, v)});
    most_negative = std::min({most_negative, bregman_dual(exp3, x, y).value(), bregman_dual(sl3, u, v).value()});
  }
  r.passed = r.worst <= r.threshold && most_negative >= -1e-12;
  r.detail = "dual Bregman identity, 1000 interior pairs each for exp and symlog";
  return r;
}

SuiteResult suite_moreau() {
  SuiteResult r{"moreau", false, 0.0, 1e-8, ""};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> nu_d(0.05, 1.5), lam_d(0.2, 2.0), y_d(-2.0, 2.0);
  const ReferenceFunction phi = ReferenceFunction::sym_logistic(3);
  for (int i = 0; i < 500; ++i) {
    const double nu = nu_d(rng), lambda = lam_d(rng);
    Vector y(3);
    for (Index j = 0; j < 3; ++j) y[j] = y_d(rng);
    r.worst = std::max(r.worst, moreau_decomposition_residual(Regularizer::l1(3, nu), phi, lambda, y));
  }
  r.passed = r.worst <= r.threshold;
  r.detail = "l1 under symlog, 500 random (nu, lambda, y)";
  return r;
}

SuiteResult suite_descent(const CheckOptions& o) {
  SuiteResult r{"descent", false, -kInf, 1e-8, ""};
  const ProblemBundle problems[] = {logistic_toy({}), logistic_sharp(), exp_sum_toy()};
  double tight = 0.0;
  long skipped = 0;
  for (const auto& p : problems) {
    const auto rep = descent_inequality_sampler(p.f, *p.f.L * o.l_scale, 10000, 0, {3.0, o.workers});
    r.worst = std::max(r.worst, rep.worst_violation);
    tight = std::max(tight, rep.tightness_residual);
    skipped += rep.skipped;
  }
  r.passed = r.worst <= r.threshold && tight <= 1e-12;
  r.detail = "10^4 pairs each on the logistic toy, the single-row logistic model and the exp-sum toy, L scale " + format_double(o.l_scale) +
             ", skipped " + std::to_string(skipped);
  return r;
}

SuiteResult suite_sinkhorn() {
  SuiteResult r{"sinkhorn", false, 0.0, 1e-8, ""};
  const double sigma = 0.1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const OtData d = generate_ot(5, 5, seed);
    const OtDualModel model = make_ot_dual(d.C, d.r, d.s, sigma, OtMode::gauss_seidel);
    const auto pg = ot_gauss_seidel(model, 100, Vector::Zero(5), Vector::Zero(5));
    const auto sk = sinkhorn_scaling(d.C, d.r, d.s, sigma, 100);
    for (std::size_t k = 0; k < pg.size(); ++k) {
      const Vector a = sigma * sk[k].first.array().log().matrix();
      const Vector b = sigma * sk[k].second.array().log().matrix();
      r.worst = std::max({r.worst, (pg[k].alpha - a).lpNorm<Eigen::Infinity>(),
                          (pg[k].beta - b).lpNorm<Eigen::Infinity>()});
    }
  }
  r.passed = r.worst <= r.threshold;
  r.detail = "Gauss-Seidel dual steps vs Sinkhorn scaling, 5x5, sigma 0.1, seeds 0-4, 100 sweeps";
  return r;
}

SuiteResult suite_sufficient_decrease() {
  SuiteResult r{"sufficient-decrease", false, -kInf, 0.0, ""};
  const ProblemBundle problems[] = {logistic_toy({LogisticRegularization::Kind::l1, 0.01}),
                                    logistic_toy({LogisticRegularization::Kind::sql2, 0.1}),
                                    lifted_exp_lp_toy(20, 10, 0, 0.1), ot_joint_toy(5, 5, 0, 0.1)};
  SolverConfig cfg;
  cfg.max_iter = 300;
  cfg.gap_tol = 0.0;
  long steps = 0;
  std::string failures;
  for (const auto& p : problems) {
    const Vector x0 = Vector::Zero(p.f.dim());
    const IterateTrace t = run_fixed(p.f, p.g, cfg, x0);
    if (t.status != RunStatus::max_iter && t.status != RunStatus::converged) failures += p.name + " ";
    const double lambda = 1.0 / *p.f.L;
    for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
      const auto& a = t.records[k];
      const auto& b = t.records[k + 1];
      // excess normalized by the allowed slack 1e-10 (1 + |F|)
      r.worst = std::max(r.worst, (b.F - (a.F - lambda * a.gap)) / (1e-10 * (1.0 + std::abs(a.F))));
      ++steps;
    }
  }
  r.threshold = 1.0;
  r.passed = r.worst <= r.threshold && failures.empty();
  r.detail = "F(x+) - F(x) + lambda gap over 1e-10 (1 + |F|), " + std::to_string(steps) + " steps" +
             (failures.empty() ? "" : ", failed runs: " + failures);
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"legendre", "bregman", "moreau", "descent", "sinkhorn", "sufficient-decrease"};
}

std::vector<SuiteResult> check_suites(const std::string& selector, const CheckOptions& options) {
  const auto names = suite_names();
  if (selector != "all" && std::find(names.begin(), names.end(), selector) == names.end())
    throw ConfigError("unknown suite '" + selector + "'");
  std::vector<SuiteResult> out;
  for (const auto& name : names) {
    if (selector != "all" && selector != name) continue;
    if (name == "legendre") out.push_back(suite_legendre());
    else if (name == "bregman") out.push_back(suite_bregman());
    else if (name == "moreau") out.push_back(suite_moreau());
    else if (name == "descent") out.push_back(suite_descent(options));
    else if (name == "sinkhorn") out.push_back(suite_sinkhorn());
    else out.push_back(suite_sufficient_decrease());
  }
  return out;
}

void print_suite_table(std::ostream& os, const std::vector<SuiteResult>& results) {
  os << "suite\tresult\tworst\tthreshold\tdetail\n";
  for (const auto& r : results)
    os << r.name << '\t' << (r.passed ? "PASS" : "FAIL") << '\t' << format_double(r.worst) << '\t'
       << format_double(r.threshold) << '\t' << r.detail << '\n';
}

}  // namespace aprox
