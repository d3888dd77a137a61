#include "quadcurl/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace quadcurl {

Rule1D gauss_legendre(int n)
{
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D r;
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.points.push_back(0.5 * (x + 1.0));
    r.weights.push_back(v * v);  // total weight 2 on [-1,1] maps to 1 on [0,1]
  }
  return r;
}

QuadratureRule quadrature_rule(int d)
{
  if (d < 1 || d > 20) throw std::invalid_argument("quadrature_rule: degree must be in 1..20");

  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(d); it != cache.end()) return it->second;

  QuadratureRule q;
  q.exactness = d;
  if (d == 1) {
    q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    q.weights.push_back(0.5);
  } else {
    // x = s, y = t (1 - s), dx dy = (1 - s) ds dt; the s-integrand has degree d + 1.
    const int n = (d + 3) / 2;
    const Rule1D g = gauss_legendre(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double s = g.points[i];
        const double t = g.points[j];
        q.points.emplace_back(s, t * (1.0 - s));
        q.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - s));
      }
  }
  for (const auto& p : q.points) q.bary.emplace_back(1.0 - p.x() - p.y(), p.x(), p.y());
  cache.emplace(d, q);
  return q;
}

double legendre01(int j, double t)
{
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = x;
  double p = (j == 0) ? p0 : p1;
  for (int n = 1; n < j; ++n) {
    p = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p;
  }
  return std::sqrt(2.0 * j + 1.0) * p;
}

namespace {
const Rule1D& edge_rule()
{
  static const Rule1D r = gauss_legendre(12);
  return r;
}
}  // namespace

Eigen::VectorXd edge_moments(const std::function<double(double)>& trace, double length, int up_to)
{
  Eigen::VectorXd m = Eigen::VectorXd::Zero(up_to + 1);
  const Rule1D& g = edge_rule();
  // q_j(s) = legendre01(j, s/L) / sqrt(L), ds = L dt.
  const double scale = std::sqrt(length);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const double f = trace(g.points[i]) * g.weights[i] * scale;
    for (int j = 0; j <= up_to; ++j) m(j) += f * legendre01(j, g.points[i]);
  }
  return m;
}

double trace_from_moments(const Eigen::VectorXd& moments, double length, double t)
{
  double v = 0.0;
  for (int j = 0; j < moments.size(); ++j) v += moments(j) * legendre01(j, t);
  return v / std::sqrt(length);
}

}  // namespace quadcurl
