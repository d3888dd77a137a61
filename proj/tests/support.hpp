#pragma once

#include "quadcurl/poly.hpp"

#include <Eigen/Core>

#include <memory>
#include <random>

namespace quadcurl::test {

inline Poly random_poly(int degree, std::mt19937& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p(degree);
  for (int d = 0; d <= degree; ++d)
    for (int b = 0; b <= d; ++b) p.set_coeff(d - b, b, u(rng));
  return p;
}

inline PolyVec random_polyvec(int degree, std::mt19937& rng)
{
  return {random_poly(degree, rng), random_poly(degree, rng)};
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng)
{
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

}  // namespace quadcurl::test
