#include "aprox/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"type", "data", "m", "n", "seed", "reg", "nu", "sigma", "epsilon", "reference", "rescale"}},
      {"solver",
       {"mode", "lambda", "lambda_max", "lambda_init", "alpha", "lambda_min", "tau", "max_iter", "gap_tol",
        "gap_lambda", "domain_policy"}},
      {"compare", {"solvers"}},
      {"grid", {"alphas", "lambda_inits"}},
      {"output", {"dir", "timing"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T convert(const std::string& key, const std::string& text) {
  std::istringstream in(trim(text));
  T value;
  in >> value;
  if (in.fail() || !in.eof()) throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  return value;
}

bool convert_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> convert_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(convert<double>(key, item));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (problem != "logistic" && problem != "exp_lp" && problem != "ot")
    throw ConfigError("problem.type must be logistic, exp_lp or ot");
  if (m < 1 || n < 1) throw ConfigError("problem.m and problem.n must be positive");
  if (reg != "none" && reg != "l1" && reg != "sql2") throw ConfigError("problem.reg must be none, l1 or sql2");
  if (reg != "none" && !(nu > 0.0)) throw ConfigError("problem.nu must be positive");
  if (!(sigma > 0.0)) throw ConfigError("problem.sigma must be positive");
  if (!(epsilon >= 0.0)) throw ConfigError("problem.epsilon must be nonnegative");
  if (!reference.empty() && reference != "symlog" && reference != "euclidean")
    throw ConfigError("problem.reference must be symlog or euclidean");
  if (!reference.empty() && problem != "logistic")
    throw ConfigError("problem.reference applies to the logistic problem only");
  if (!(solver.alpha > 0.0 && solver.alpha < 1.0)) throw ConfigError("solver.alpha must lie in (0, 1)");
  if (solver.lambda < 0.0 || solver.lambda_max < 0.0 || solver.lambda_init < 0.0 || solver.gap_lambda < 0.0)
    throw ConfigError("solver step sizes must be nonnegative");
  if (!(solver.lambda_min > 0.0)) throw ConfigError("solver.lambda_min must be positive");
  if (!(solver.tau > 0.0 && solver.tau < 1.0)) throw ConfigError("solver.tau must lie in (0, 1)");
  if (solver.max_iter < 0) throw ConfigError("solver.max_iter must be nonnegative");
  if (!(solver.gap_tol >= 0.0)) throw ConfigError("solver.gap_tol must be nonnegative");
  if (grid_alphas.empty() || grid_lambda_inits.empty()) throw ConfigError("grid lists must be nonempty");
  for (double a : grid_alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("grid.alphas entries must lie in (0, 1)");
  for (double l : grid_lambda_inits)
    if (!(l > 0.0)) throw ConfigError("grid.lambda_inits entries must be positive");
  static const std::set<std::string> known{"fixed", "linesearch", "warmstart", "euclidean", "armijo"};
  for (const auto& s : solvers)
    if (!known.count(s)) throw ConfigError("compare.solvers: unknown solver '" + s + "'");
  if (out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["problem"] = {{"type", problem}, {"data", data},       {"m", m},         {"n", n},
                  {"seed", seed},    {"reg", reg},         {"nu", nu},       {"sigma", sigma},
                  {"epsilon", epsilon}, {"reference", reference}, {"rescale", rescale}};
  j["solver"] = {{"mode", mode_name(solver.mode)},
                 {"lambda", solver.lambda},
                 {"lambda_max", solver.lambda_max},
                 {"lambda_init", solver.lambda_init},
                 {"alpha", solver.alpha},
                 {"lambda_min", solver.lambda_min},
                 {"tau", solver.tau},
                 {"max_iter", solver.max_iter},
                 {"gap_tol", solver.gap_tol},
                 {"gap_lambda", solver.gap_lambda},
                 {"domain_policy", solver.domain_policy == DomainPolicy::clamp ? "clamp" : "strict"}};
  j["compare"] = {{"solvers", solvers}};
  j["grid"] = {{"alphas", grid_alphas}, {"lambda_inits", grid_lambda_inits}};
  j["output"] = {{"dir", out_dir}, {"timing", wall_time ? "wall" : "none"}};
  return j;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line(), 1);
  }

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      if (body.empty()) throw ConfigError("config keys must live in a [section]; found '" + section + "'");
      throw ConfigError("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
      const std::string v = trim(value.data());
      const std::string name = section + "." + key;
      if (section == "problem") {
        if (key == "type") cfg.problem = v;
        else if (key == "data") cfg.data = v;
        else if (key == "m") cfg.m = convert<int>(name, v);
        else if (key == "n") cfg.n = convert<int>(name, v);
        else if (key == "seed") cfg.seed = convert<std::uint64_t>(name, v);
        else if (key == "reg") cfg.reg = v;
        else if (key == "nu") cfg.nu = convert<double>(name, v);
        else if (key == "sigma") cfg.sigma = convert<double>(name, v);
        else if (key == "epsilon") cfg.epsilon = convert<double>(name, v);
        else if (key == "reference") cfg.reference = v;
        else if (key == "rescale") cfg.rescale = convert_bool(name, v);
      } else if (section == "solver") {
        if (key == "mode") cfg.solver.mode = parse_mode(v);
        else if (key == "lambda") cfg.solver.lambda = convert<double>(name, v);
        else if (key == "lambda_max") cfg.solver.lambda_max = convert<double>(name, v);
        else if (key == "lambda_init") cfg.solver.lambda_init = convert<double>(name, v);
        else if (key == "alpha") cfg.solver.alpha = convert<double>(name, v);
        else if (key == "lambda_min") cfg.solver.lambda_min = convert<double>(name, v);
        else if (key == "tau") cfg.solver.tau = convert<double>(name, v);
        else if (key == "max_iter") cfg.solver.max_iter = convert<int>(name, v);
        else if (key == "gap_tol") cfg.solver.gap_tol = convert<double>(name, v);
        else if (key == "gap_lambda") cfg.solver.gap_lambda = convert<double>(name, v);
        else if (key == "domain_policy") {
          if (v == "clamp") cfg.solver.domain_policy = DomainPolicy::clamp;
          else if (v == "strict") cfg.solver.domain_policy = DomainPolicy::strict;
          else throw ConfigError("solver.domain_policy must be clamp or strict");
        }
      } else if (section == "compare") {
        cfg.solvers = split_list(v);
      } else if (section == "grid") {
        if (key == "alphas") cfg.grid_alphas = convert_list(name, v);
        else cfg.grid_lambda_inits = convert_list(name, v);
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = v;
        else if (v == "wall") cfg.wall_time = true;
        else if (v == "none") cfg.wall_time = false;
        else throw ConfigError("output.timing must be none or wall");
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_reference() {
  return R"(Config file (INI sections, key = value, ';' or '#' comments):
  [problem]
    type        logistic | exp_lp | ot                      (logistic)
    data        LIBSVM file for logistic; synthetic data if empty
    m, n        synthetic sizes (rows, columns)              (100, 10)
    seed        generator seed; --seed overrides             (0)
    reg         none | l1 | sql2 (logistic)                  (l1)
    nu          regularization weight                        (0.01)
    sigma       smoothing for exp_lp and ot                  (0.001)
    epsilon     lifting shift for exp_lp                     (1e-8)
    reference   symlog | euclidean (logistic)                (symlog)
    rescale     map LIBSVM columns onto [-1, 1]              (true)
  [solver]
    mode        fixed | linesearch | warmstart               (fixed)
    lambda      fixed step, 0 = 1/L                          (0)
    lambda_max  linesearch start, 0 = 4/L                    (0)
    lambda_init warm-start and Armijo start, 0 = 1/L         (0)
    alpha       backtracking factor in (0, 1)                (0.5)
    lambda_min  backtracking safeguard                       (1e-12)
    tau         Armijo parameter                             (1e-4)
    max_iter    iteration budget                             (10000)
    gap_tol     stop when gap <= gap_tol (1 + |F|)           (1e-9)
    gap_lambda  step at which the gap is reported, 0 = 1/L   (0)
    domain_policy clamp | strict                             (clamp)
  [compare]
    solvers     comma list: fixed, linesearch, warmstart, euclidean, armijo
  [grid]
    alphas      warm-start alphas      (0.1, ..., 0.9)
    lambda_inits warm-start initial steps (1, 5, 10, 15)
  [output]
    dir         output directory; --out overrides            (out)
    timing      none | wall; wall fills the time_s column    (none)
)";
}

}  // namespace aprox
