#pragma once

#include <cstdint>

#include "aprox/harness/libsvm.hpp"
#include "aprox/numeric.hpp"

namespace aprox {

struct ExpLpData {
  Matrix A;
  Vector b;
  Vector c;
  double sigma = 0.001;
};

/// A uniform in [-1, 1]^{m x n}, b and c standard normal. Each row (a_i, b_i)
/// is divided by ||a_i||_1 and c by ||c||_1, so ||a_i||_1 = 1.
ExpLpData generate_exp_lp(int m, int n, std::uint64_t seed, double sigma = 0.001);

/// A uniform in [-1, 1]^{m x n}, labels sign(<a_i, x_true> + noise) with
/// x_true and noise standard normal (zero maps to +1).
DenseData generate_logistic(int m, int n, std::uint64_t seed);

struct OtData {
  Matrix C;  ///< m x n, uniform in [0, 1]
  Vector r;  ///< length n, positive, sums to 1
  Vector s;  ///< length m, positive, sums to 1
};

OtData generate_ot(int m, int n, std::uint64_t seed);

/// Dense data back to LIBSVM rows (zeros omitted, labels +1/-1).
SparseDataset to_sparse(const DenseData& data);

}  // namespace aprox
