#include "aprox/harness/generators.hpp"

#include <random>

#include "aprox/errors.hpp"

namespace aprox {

namespace {

void require_sizes(int m, int n) {
  if (m < 1 || n < 1) throw ConfigError("generator sizes must be positive");
}

}  // namespace

ExpLpData generate_exp_lp(int m, int n, std::uint64_t seed, double sigma) {
  require_sizes(m, n);
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  ExpLpData d{Matrix(m, n), Vector(m), Vector(n), sigma};
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) d.A(i, j) = unif(rng);
  for (Index i = 0; i < m; ++i) d.b[i] = normal(rng);
  for (Index j = 0; j < n; ++j) d.c[j] = normal(rng);
  for (Index i = 0; i < m; ++i) {
    const double norm = d.A.row(i).lpNorm<1>();
    if (norm > 0.0) {
      d.A.row(i) /= norm;
      d.b[i] /= norm;
    }
  }
  const double cnorm = d.c.lpNorm<1>();
  if (cnorm > 0.0) d.c /= cnorm;
  return d;
}

DenseData generate_logistic(int m, int n, std::uint64_t seed) {
  require_sizes(m, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseData d{Matrix(m, n), Vector(m)};
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) d.A(i, j) = unif(rng);
  Vector truth(n);
  for (Index j = 0; j < n; ++j) truth[j] = normal(rng);
  for (Index i = 0; i < m; ++i) d.b[i] = d.A.row(i).dot(truth) + normal(rng) >= 0.0 ? 1.0 : -1.0;
  return d;
}

OtData generate_ot(int m, int n, std::uint64_t seed) {
  require_sizes(m, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  OtData d{Matrix(m, n), Vector(n), Vector(m)};
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) d.C(i, j) = unif(rng);
  for (Index j = 0; j < n; ++j) d.r[j] = 0.5 + unif(rng);
  for (Index i = 0; i < m; ++i) d.s[i] = 0.5 + unif(rng);
  d.r /= d.r.sum();
  d.s /= d.s.sum();
  return d;
}

SparseDataset to_sparse(const DenseData& data) {
  SparseDataset out;
  out.n_features = static_cast<int>(data.A.cols());
  for (Index i = 0; i < data.A.rows(); ++i) {
    std::vector<std::pair<int, double>> row;
    for (Index j = 0; j < data.A.cols(); ++j)
      if (data.A(i, j) != 0.0) row.emplace_back(static_cast<int>(j) + 1, data.A(i, j));
    out.rows.push_back(std::move(row));
    out.labels.push_back(data.b[i]);
    out.raw_labels.push_back(data.b[i] > 0.0 ? "+1" : "-1");
  }
  return out;
}

}  // namespace aprox
