#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sospopt/objective.hpp"
#include "sospopt/param_vector.hpp"

namespace sospopt {

enum class StepEvent { kStep, kPerturb, kEigStep, kDone };

const char* to_string(StepEvent e);

struct TrajectoryPoint {
  int iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  StepEvent event = StepEvent::kStep;
};

/// Writes `iter,value,grad_norm,event` rows.
void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryPoint>& trajectory);

/// Verdicts of the second-order stationarity test at a point:
/// first order requires ||grad|| <= rho, second order requires
/// lambda_min(Hessian) >= -sqrt(K*rho).
struct SOSPReport {
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  double rho = 0.0;
  double K = 0.0;
  bool first_order_ok = false;
  bool second_order_ok = false;

  bool certified() const { return first_order_ok && second_order_ok; }
};

SOSPReport make_sosp_report(double grad_norm, double lambda_min, double rho, double K);

struct PGDConfig {
  double eta = 0.0;                 // step size; <= 1/L when L is declared
  int T = 1;                        // iteration budget
  double perturb_threshold = 1e-6;  // gradient-norm trigger
  double perturb_scale = 0.005;     // noise standard deviation per coordinate
  int perturb_cooldown = 0;         // minimum steps between perturbations
  std::uint64_t seed = 0;
};

struct PGDResult {
  ParamVector final;
  std::vector<TrajectoryPoint> trajectory;
  int perturbations = 0;
};

/// Gradient descent with Gaussian perturbations whenever the gradient norm
/// falls below the trigger (and the cooldown has elapsed). Bit-reproducible
/// for a fixed seed. Aborts with the iterate index on non-finite values.
PGDResult pgd_minimize(
    const SmoothObjective& obj, const ParamVector& init, const PGDConfig& cfg,
    const std::function<void(int, const ParamVector&)>& observer = {});

struct HDConfig {
  double nu = 0.0;    // gradient step size (1/L when available)
  double h = 0.0;     // eigenvector step length; default 3*sqrt(rho)/K
  double rho = 1e-3;  // first-order target
  double K = 1.0;     // declared Hessian Lipschitz constant
  int max_iters = 1000;
};

struct HDResult {
  ParamVector final;
  SOSPReport report;
  bool certified = false;
  std::vector<TrajectoryPoint> trajectory;
};

/// Deterministic SOSP-seeking loop: gradient steps while ||grad|| > rho,
/// otherwise a step of length h along the most-negative-curvature
/// eigenvector (trying both signs and keeping the lower objective value).
/// Terminates at a point it can certify, or returns the best iterate
/// uncertified when the budget runs out.
HDResult hessian_descent(const SmoothObjective& obj, const ParamVector& init,
                         const HDConfig& cfg);

/// Second-order stationarity test. Uses a dense symmetric eigendecomposition
/// when the Hessian is available and small enough, otherwise a shifted power
/// iteration on Hessian-vector products.
SOSPReport check_sosp(const SmoothObjective& obj, const ParamVector& p, double rho,
                      double K);

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
/// Validates symmetry to 1e-10 relative.
std::pair<double, Eigen::VectorXd> min_eig(const Eigen::MatrixXd& H);

/// Smallest eigenvalue via power iteration on ||H||*I - H, given only
/// matrix-vector products. Used as the large-scale fallback and as an
/// independent cross-check of the dense route.
std::pair<double, Eigen::VectorXd> min_eig_hvp(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hvp,
    Eigen::Index dim, double tol = 1e-10, int max_iters = 20000);

/// Central-difference derivatives; verification utilities for tests.
Eigen::VectorXd fd_gradient(const SmoothObjective& obj, const ParamVector& p,
                            double step);
Eigen::MatrixXd fd_hessian(const SmoothObjective& obj, const ParamVector& p,
                           double step);

}  // namespace sospopt
