#pragma once

#include <Eigen/Core>
#include <functional>

namespace sospopt {

/// Gauss-Hermite rule for expectations under the standard normal law:
/// E[f(X)] with X ~ N(0,1) is approximated by sum_i weights[i]*f(nodes[i]).
/// Weights sum to one.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  double expect(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Nodes and weights via Golub-Welsch on the probabilists' Hermite
/// three-term recurrence.
GaussHermiteRule gauss_hermite(int n);

}  // namespace sospopt
