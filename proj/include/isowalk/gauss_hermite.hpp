#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace isowalk {

// Nodes and weights for ∫ e^{-x^2} f(x) dx, exact for deg f ≤ 2m - 1 (Golub-Welsch).
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    w[i] = std::sqrt(std::numbers::pi) * v * v;
  }
  return {x, w};
}

}  // namespace isowalk
