#pragma once

#include <initializer_list>

#include "aprox/numeric.hpp"
#include "oracles.hpp"

namespace test {

inline aprox::Vector vec(std::initializer_list<double> values) {
  aprox::Vector v(static_cast<aprox::Index>(values.size()));
  aprox::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline aprox::Vector random_vec(oracle::Gen& gen, aprox::Index n, double lo, double hi) {
  aprox::Vector v(n);
  for (aprox::Index i = 0; i < n; ++i) v[i] = gen.uniform(lo, hi);
  return v;
}

}  // namespace test
