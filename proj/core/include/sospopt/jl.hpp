#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sospopt/objective.hpp"
#include "sospopt/param_vector.hpp"
#include "sospopt/reparam.hpp"
#include "sospopt/smoothing.hpp"

namespace sospopt::jl {

/// Unit-norm data points, one per row; rows are normalized on ingest and a
/// zero row is rejected.
struct JLDataset {
  Eigen::MatrixXd X;  // n x d, unit rows

  static JLDataset from_matrix(Eigen::MatrixXd rows);
  /// Whitespace-separated n x d matrix, one row per line.
  static JLDataset load(const std::string& path);

  static JLDataset random_unit(int n, int d, std::uint64_t seed);

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

void save_matrix(const std::string& path, const Eigen::MatrixXd& M);

/// Distortion |(1/k)*||A x||^2 - 1| of a unit vector under A.
double distortion(const Eigen::MatrixXd& A, const Eigen::VectorXd& x);

struct DistortionReport {
  Eigen::VectorXd per_point;
  double max = 0.0;

  int violations(double eps) const {
    return static_cast<int>((per_point.array() > eps).count());
  }
};

DistortionReport distortion_report(const Eigen::MatrixXd& A, const JLDataset& ds);

struct BaselineResult {
  double mean_maxdist = 0.0;
  double min_maxdist = 0.0;
};

/// Max-distortion statistics of i.i.d. N(0,1) projection matrices over the
/// dataset: mean and minimum across trials.
BaselineResult random_gaussian_baseline(const JLDataset& ds, int k, int trials,
                                        std::uint64_t seed);

/// Mean and elementwise standard deviation of the projection distribution
/// A = M + sigma .* Z.
struct ProjDistribution {
  Eigen::MatrixXd M;      // k x d
  Eigen::MatrixXd sigma;  // k x d, nonnegative

  ProjDistribution(Eigen::MatrixXd M_, Eigen::MatrixXd sigma_);
  static ProjDistribution theorem_init(Eigen::Index k, Eigen::Index d);

  GaussianReparam reparam() const;
  Eigen::MatrixXd sample(std::uint64_t seed, int index) const;
  double sigma_max() const { return sigma.maxCoeff(); }
};

/// Smoothed surrogate of the per-point violation objective:
///   sum_i E_z[ I~(distortion(M + sigma.*Z, x_i)) ]
///     + lambda_scale * ||sigma||_F^2 / (2kd)
/// over ParamVector segments sigma and M (both k x d). The sigma segment is
/// free-signed and enters through its absolute value, keeping standard
/// deviations nonnegative.
class JLObjective : public SmoothObjective {
 public:
  JLObjective(const JLDataset& ds, Eigen::Index k, double eps, double eps1,
              double lambda_scale, MCConfig mc);

  ParamVector make_params(const ProjDistribution& pd) const;
  ProjDistribution to_distribution(const ParamVector& p) const;

  Eigen::Index dim() const override { return 2 * k_ * d_; }
  double value(const ParamVector& p) const override;
  Eigen::VectorXd gradient(const ParamVector& p) const override;

  /// The two value components (smoothed indicator sum, regularizer).
  std::pair<double, double> value_terms(const ParamVector& p) const;

  const JLIndicatorSmoothing& indicator() const { return ind_; }
  const MCConfig& mc() const { return mc_; }

 private:
  Eigen::MatrixXd X_;  // n x d
  Eigen::Index k_ = 0, d_ = 0;
  JLIndicatorSmoothing ind_;
  double lambda_scale_ = 1.0;
  MCConfig mc_;
};

struct JLLearnConfig {
  int batch = 20;
  double lr = 0.01;
  int iters = 5000;
  double early_stop = 0.01;  // stop when the sampled max distortion dips below
  double eps = 0.05;         // smoothing threshold
  double eps1 = 0.05;        // smoothing width
  double lambda_scale = 1.0;
  int mc_samples = 25;
  std::uint64_t seed = 0;
  int log_value_every = 0;  // 0 disables objective-value logging

  // Theorem-faithful variant: full-batch PGD with the regularizer scaled to
  // lambda = (sqrt(rho/eps1^3) + delta)/2.
  bool use_pgd = false;
  double pgd_rho = 1e-6;
  double pgd_delta = 0.05;
  double pgd_perturb_scale = 0.005;
};

struct JLTrajPoint {
  int iter = 0;
  double distortion = 0.0;  // sampled max distortion of a draw A ~ (M, sigma)
  double max_sigma2 = 0.0;
  double value = std::numeric_limits<double>::quiet_NaN();  // when logged
};

struct JLLearnResult {
  Eigen::MatrixXd M;
  Eigen::MatrixXd sigma;
  std::vector<JLTrajPoint> trajectory;
  int iters_run = 0;
  bool early_stopped = false;
};

/// Learns a deterministic projection by minimizing the smoothed violation
/// objective from the M = 0, sigma = 1 initialization with minibatch
/// adaptive-moment updates (or full-batch PGD behind the flag).
/// Bit-reproducible for a fixed seed.
JLLearnResult learn_projection(const JLDataset& ds, int k, const JLLearnConfig& cfg);

struct ExtractResult {
  Eigen::MatrixXd M;
  double upper_excess = 0.0;       // 2*sqrt(2)*sigma_max/k*sqrt(1+eps) + 2*sigma_max^2
  double lower_additive = 0.0;     // sigma_max^2
  double lower_multiplicative = 0.5;  // the 1/2 factor of the lower chain
};

/// Distortion-threshold excess incurred by using the mean matrix instead of
/// sampling; both sides of the bound are reported as derived.
ExtractResult extract_deterministic(const ProjDistribution& pd, double eps);

struct GuaranteeCheck {
  bool ok = false;
  DistortionReport report;
};

GuaranteeCheck jl_guarantee_check(const Eigen::MatrixXd& M, const JLDataset& ds,
                                  double eps);

/// Writes `iter,distortion,max_sigma2` rows.
void write_jl_csv(const std::string& path, const std::vector<JLTrajPoint>& traj);

}  // namespace sospopt::jl
