#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aprox/errors.hpp"
#include "aprox/harness/config.hpp"
#include "aprox/harness/experiment.hpp"
#include "aprox/harness/generators.hpp"
#include "aprox/harness/libsvm.hpp"
#include "aprox/harness/trace_io.hpp"
#include "support.hpp"

using namespace aprox;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("aprox_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("LIBSVM parser examples") {
  const SparseDataset d = parse_libsvm("+1 1:0.5 3:-1\n");
  REQUIRE(d.size() == 1);
  CHECK(d.rows[0] == std::vector<std::pair<int, double>>{{1, 0.5}, {3, -1.0}});
  CHECK(d.labels[0] == 1.0);
  CHECK(d.n_features >= 3);

  try {
    parse_libsvm("-1 2:1 1:1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 0);
  }

  const SparseDataset empty = parse_libsvm("");
  CHECK(empty.size() == 0);
  CHECK(empty.n_features == 0);
}

TEST_CASE("LIBSVM parser tolerance and errors") {
  const SparseDataset d = parse_libsvm("# header\n\n-1 2:3 \t\n+1 1:1e-3 7:2 # trailing\n   \n");
  REQUIRE(d.size() == 2);
  CHECK(d.n_features == 7);
  CHECK(d.labels == std::vector<double>{-1.0, 1.0});
  for (const char* bad : {"+1 1:0.5 1:2\n", "+1 0:1\n", "+1 a:1\n", "+1 1:\n", "+1 1:nan\n", "+1 1 2\n",
                          "1\n2\n3\n"}) {
    CHECK_THROWS_AS(parse_libsvm(bad), ParseError);
  }
  try {
    parse_libsvm("+1 1:1\n-1 2:2\n+1 3:x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("label mapping") {
  const SparseDataset d = parse_libsvm("2 1:1\n4 1:2\n2 1:3\n");
  CHECK(d.labels == std::vector<double>{-1.0, 1.0, -1.0});
  const SparseDataset z = parse_libsvm("1 1:1\n0 1:2\n");
  CHECK(z.labels == std::vector<double>{1.0, -1.0});
  CHECK(parse_libsvm("10 1:1\n9 1:2\n").labels == std::vector<double>{1.0, -1.0});
  CHECK(parse_libsvm("b 1:1\na 1:2\n").labels == std::vector<double>{1.0, -1.0});
  CHECK_THROWS_AS(parse_libsvm("1 1:1\n2 1:1\n3 1:1\n"), ParseError);
}

TEST_CASE("property: serialize then parse keeps every triple") {
  oracle::Gen gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    const int rows = gen.integer(0, 6);
    for (int i = 0; i < rows; ++i) {
      text += gen.uniform(0, 1) < 0.5 ? "-1" : "+1";
      int idx = 0;
      const int nnz = gen.integer(0, 5);
      for (int k = 0; k < nnz; ++k) {
        idx += gen.integer(1, 4);
        std::string sep(static_cast<std::size_t>(gen.integer(1, 3)), gen.uniform(0, 1) < 0.5 ? ' ' : '\t');
        text += sep + std::to_string(idx) + ":" + format_double(gen.normal() * std::pow(10.0, gen.integer(-5, 5)));
      }
      text += gen.uniform(0, 1) < 0.3 ? "  \n" : "\n";
    }
    const SparseDataset a = parse_libsvm(text);
    const SparseDataset b = parse_libsvm(serialize_libsvm(a));
    CHECK(a.rows == b.rows);
    CHECK(a.labels == b.labels);
    CHECK(serialize_libsvm(a) == serialize_libsvm(b));
  }
}

TEST_CASE("column rescaling") {
  const SparseDataset d = parse_libsvm("+1 1:2 2:5\n-1 1:4 2:5\n+1 1:3\n");
  const DenseData dense = to_dense(d, true);
  CHECK(dense.A(0, 0) == -1.0);
  CHECK(dense.A(1, 0) == 1.0);
  CHECK(dense.A(2, 0) == 0.0);
  CHECK(dense.A(0, 1) == 1.0);
  CHECK(dense.A(2, 1) == -1.0);
  const DenseData constant = to_dense(parse_libsvm("+1 1:3\n-1 1:3\n"), true);
  CHECK(constant.A(0, 0) == 0.0);
  CHECK(to_dense(d, false).A(0, 1) == 5.0);
}

TEST_CASE("synthetic generators") {
  const ExpLpData d = generate_exp_lp(30, 7, 3);
  CHECK(d.sigma == 0.001);
  for (Index i = 0; i < d.A.rows(); ++i) CHECK(d.A.row(i).lpNorm<1>() <= 1.0 + 1e-15);
  CHECK((d.A.array().abs() <= 1.0).all());
  const ExpLpData again = generate_exp_lp(30, 7, 3);
  CHECK(d.A == again.A);
  CHECK(d.b == again.b);
  CHECK(d.c == again.c);
  CHECK_FALSE(generate_exp_lp(30, 7, 4).A == d.A);

  const ExpLpData tiny = generate_exp_lp(1, 1, 0);
  const ProblemBundle p = build_lifted_exp_lp(make_lifted_exp_lp(tiny.A, tiny.b, tiny.c, tiny.sigma));
  CHECK(std::isfinite(p.f.value(Vector::Zero(2))));

  const DenseData logistic = generate_logistic(20, 4, 1);
  CHECK((logistic.A.array().abs() <= 1.0).all());
  CHECK((logistic.b.array().abs() == 1.0).all());
  CHECK(serialize_libsvm(to_sparse(logistic)) == serialize_libsvm(to_sparse(generate_logistic(20, 4, 1))));

  const OtData ot = generate_ot(3, 4, 0);
  CHECK(ot.C.rows() == 3);
  CHECK(ot.r.size() == 4);
  CHECK(ot.r.sum() == doctest::Approx(1.0));
  CHECK((ot.s.array() > 0.0).all());
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment\n[problem]\ntype = exp_lp\nm = 5\nn = 3\nsigma = 0.01\n[solver]\nmode = warmstart\nalpha = 0.3\n"
      "[grid]\nalphas = 0.2, 0.4\nlambda_inits = 1\n[compare]\nsolvers = fixed,armijo\n[output]\ndir = x\ntiming = "
      "wall\n");
  CHECK(c.problem == "exp_lp");
  CHECK(c.m == 5);
  CHECK(c.sigma == 0.01);
  CHECK(c.solver.mode == SolverConfig::Mode::linesearch_warmstart);
  CHECK(c.solver.alpha == 0.3);
  CHECK(c.grid_alphas == std::vector<double>{0.2, 0.4});
  CHECK(c.solvers == std::vector<std::string>{"fixed", "armijo"});
  CHECK(c.wall_time);

  const ExperimentConfig defaults = parse_config("");
  CHECK(defaults.grid_alphas.size() == 9);
  CHECK(defaults.grid_lambda_inits == std::vector<double>{1, 5, 10, 15});
  CHECK_FALSE(defaults.wall_time);

  CHECK_THROWS_AS(parse_config("[problem]\nsize = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nm = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\nm = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\nalpha = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nalphas =\n"), ConfigError);
  CHECK(config_reference().find("lambda_init") != std::string::npos);
}

TEST_CASE("trace CSV round trip") {
  const ProblemBundle p = logistic_toy({LogisticRegularization::Kind::l1, 0.01});
  SolverConfig cfg;
  cfg.max_iter = 50;
  const IterateTrace t = run_fixed(p.f, p.g, cfg, Vector::Zero(10));
  const std::string csv = trace_to_csv(t, false);
  CHECK(csv.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  const auto records = parse_trace_csv(csv);
  REQUIRE(records.size() == t.records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    CHECK(records[k].F == t.records[k].F);
    CHECK(records[k].gap == t.records[k].gap);
    CHECK(records[k].time_s == 0.0);
    if (k > 0) CHECK(records[k].F <= records[k - 1].F);
  }
  const auto summary = trace_summary(t);
  CHECK(summary["status"] == "max_iter");
  CHECK(summary["iterations"] == 50);
  CHECK_THROWS(parse_trace_csv("k,F\n1,2\n"));
}

TEST_CASE("compare run writes deterministic artifacts") {
  ExperimentConfig cfg;
  cfg.problem = "logistic";
  cfg.m = 40;
  cfg.n = 5;
  cfg.reg = "sql2";
  cfg.nu = 0.1;
  cfg.solver.max_iter = 300;
  const fs::path a = scratch("cmp_a"), b = scratch("cmp_b");
  cfg.out_dir = a.string();
  const auto summary = run_experiment(cfg, 2);
  cfg.out_dir = b.string();
  run_experiment(cfg, 1);
  for (const char* file : {"fixed.csv", "linesearch.csv", "warmstart.csv", "euclidean.csv", "armijo.csv",
                           "plot_data.csv"}) {
    REQUIRE(fs::exists(a / file));
    CHECK(slurp(a / file) == slurp(b / file));
  }
  CHECK(summary["runs"].size() == 5);
  CHECK(summary.contains("F_star_estimate"));
  for (const char* solver : {"fixed", "linesearch", "warmstart", "armijo"}) {
    const auto records = parse_trace_csv(slurp(a / (std::string(solver) + ".csv")));
    for (std::size_t k = 1; k < records.size(); ++k) CHECK(records[k].F <= records[k - 1].F + 1e-12);
  }
  const std::string plot = slurp(a / "plot_data.csv");
  CHECK(plot.rfind("k,fixed,linesearch,warmstart,euclidean,armijo\n", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("failed runs are recorded without stopping the batch") {
  ExperimentConfig cfg;
  cfg.problem = "logistic";
  cfg.m = 20;
  cfg.n = 3;
  cfg.reg = "l1";
  cfg.solvers = {"fixed", "armijo"};
  cfg.solver.max_iter = 50;
  const fs::path dir = scratch("fail");
  cfg.out_dir = dir.string();
  const auto summary = run_experiment(cfg, 1);
  CHECK(summary["runs"]["armijo"]["status"] == "not_run");
  CHECK(summary["runs"]["fixed"]["status"] != "not_run");
  fs::remove_all(dir);
}

TEST_CASE("grid search bookkeeping") {
  ExperimentConfig cfg;
  cfg.problem = "logistic";
  cfg.m = 30;
  cfg.n = 4;
  cfg.solver.max_iter = 2000;
  const fs::path dir = scratch("grid");
  cfg.out_dir = dir.string();
  const auto summary = run_grid(cfg, 2);
  REQUIRE(summary["configurations"].size() == 36);
  long best = -1;
  for (const auto& row : summary["configurations"])
    if (row["status"] == "converged" && (best < 0 || row["grad_evals"].get<long>() < best))
      best = row["grad_evals"].get<long>();
  CHECK(summary["best"]["grad_evals"].get<long>() == best);
  const std::string csv = slurp(dir / "grid.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 37);
  fs::remove_all(dir);
}

TEST_CASE("check suites") {
  const auto only = check_suites("bregman");
  REQUIRE(only.size() == 1);
  CHECK(only[0].name == "bregman");
  CHECK(only[0].passed);
  CHECK_THROWS_AS(check_suites("everything"), ConfigError);
  const auto halved = check_suites("descent", {0.5, 1});
  CHECK_FALSE(halved[0].passed);
  std::ostringstream os;
  print_suite_table(os, only);
  CHECK(os.str().find("bregman\tPASS\t") != std::string::npos);
}

TEST_CASE("atomic writes create directories and replace files") {
  const fs::path dir = scratch("atomic");
  const std::string path = (dir / "nested" / "f.txt").string();
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  CHECK(slurp(path) == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "nested")) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
}
