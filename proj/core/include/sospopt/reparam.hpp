#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>

#include "sospopt/objective.hpp"
#include "sospopt/param_vector.hpp"

namespace sospopt {

/// Smooth scalar function on R^k with optional derivatives; the inner g of
/// objectives of the form E_z[g(W z + b)].
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual Eigen::Index arity() const = 0;
  virtual double value(const Eigen::VectorXd& u) const = 0;
  virtual bool has_gradient() const { return false; }
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& u) const {
    (void)u;
    throw CapabilityError("SmoothFunction: gradient not available");
  }
  virtual bool has_hessian() const { return false; }
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const {
    (void)u;
    throw CapabilityError("SmoothFunction: Hessian not available");
  }
};

struct MCConfig {
  int samples = 1000;
  std::uint64_t seed = 0;
  int chunk = 1024;  // parallel granularity; results are chunk-independent
};

/// The standard-normal vector used for sample `index` of a stream. All Monte
/// Carlo estimators share this stream, which is what makes common random
/// numbers work across value/gradient/Stein computations.
Eigen::VectorXd mc_sample_z(std::uint64_t seed, int index, Eigen::Index dim);

/// Evaluates per-sample contributions (column s of a size x samples buffer)
/// and reduces them in sample order. Parallelism never changes the result.
struct MCMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd se;  // standard error of each mean entry
  int samples = 0;

  double se_norm() const { return se.norm(); }
};

MCMoments mc_accumulate(
    const MCConfig& mc, Eigen::Index size,
    const std::function<void(int, Eigen::Ref<Eigen::VectorXd>)>& fill);

struct McScalar {
  double value = 0.0;
  double se = 0.0;
  int samples = 0;
};

/// Monte Carlo estimate of E_z[g(W z + b)], z ~ N(0, I_d).
McScalar mc_value(const SmoothFunction& g, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& b, const MCConfig& mc);

struct McGradient {
  Eigen::MatrixXd dW;  // estimate of E[grad_g(Wz+b) z^T]
  Eigen::VectorXd db;  // estimate of E[grad_g(Wz+b)]
  double se_dW = 0.0;  // aggregate (Frobenius) standard error of dW
  double se_db = 0.0;
  int samples = 0;
};

/// Pathwise estimates of the expectation parts of the (W, b) gradient; the
/// caller adds the 2*lambda*W regularizer term. Shares the z stream of
/// mc_value for the same seed.
McGradient mc_gradient(const SmoothFunction& g, const Eigen::MatrixXd& W,
                       const Eigen::VectorXd& b, const MCConfig& mc);

struct SteinResult {
  double residual = 0.0;  // || mean_s [grad_g z^T - hess_g W] ||_F
  double se = 0.0;        // aggregate standard error of the averaged matrix
  int samples = 0;
};

/// Empirical residual of Stein's identity E[grad_g(Wz+b) z^T] =
/// E[hess_g(Wz+b)] W, computed on a single shared sample stream.
SteinResult stein_residual(const SmoothFunction& g, const Eigen::MatrixXd& W,
                           const Eigen::VectorXd& b, const MCConfig& mc);

struct SOSPBoundInput {
  double rho = 0.0;     // > 0
  double lambda = 0.0;  // > sqrt(K*rho)/2
  double K = 0.0;       // >= 0
  double Delta = 0.0;   // slack in lambda = (sqrt(K*rho) + Delta)/2
};

/// Regularizer value that leaves slack Delta above the certification
/// threshold: lambda = (sqrt(K*rho) + Delta)/2.
double lambda_for_slack(double rho, double K, double Delta);

/// Frobenius bound rho / (2*lambda - sqrt(K*rho)) satisfied by the mixing
/// matrix W at any rho-SOSP of E[g(Wx+b)] + lambda*||W||_F^2.
double sosp_w_bound(const SOSPBoundInput& inp);

/// Mean/standard-deviation parameterization of a random matrix A = M + Z
/// with independent entries, Z_ij ~ N(0, sigma_ij^2). Stored flattened
/// column-major as kd-dimensional vectors.
struct GaussianReparam {
  Eigen::VectorXd mean;
  Eigen::VectorXd sigma;
  Eigen::Index k = 0;
  Eigen::Index d = 0;

  GaussianReparam(Eigen::VectorXd mean_, Eigen::VectorXd sigma_, Eigen::Index k_,
                  Eigen::Index d_);

  Eigen::Map<const Eigen::MatrixXd> mean_matrix() const {
    return {mean.data(), k, d};
  }
  Eigen::Map<const Eigen::MatrixXd> sigma_matrix() const {
    return {sigma.data(), k, d};
  }

  /// Draw A = M + sigma .* Z for sample `index` of the stream.
  Eigen::MatrixXd sample(std::uint64_t seed, int index) const;
};

/// The objective family E_z[g(W z + b)] + lambda*||W||_F^2 over the
/// ParamVector segments W (k x d) and b (k), with pathwise Monte Carlo
/// gradients on a fixed sample stream. Deterministic given (seed, samples).
class ReparamRiskObjective : public SmoothObjective {
 public:
  ReparamRiskObjective(std::shared_ptr<const SmoothFunction> g, Eigen::Index d,
                       double lambda, MCConfig mc);

  ParamVector make_params() const;

  Eigen::Index dim() const override { return k_ * d_ + k_; }
  double value(const ParamVector& p) const override;
  Eigen::VectorXd gradient(const ParamVector& p) const override;
  bool has_hessian() const override;
  Eigen::MatrixXd hessian(const ParamVector& p) const override;

  /// Same objective re-estimated with a different sample count (same seed);
  /// used for high-sample SOSP re-certification.
  ReparamRiskObjective with_samples(int samples) const;

  double lambda() const { return lambda_; }
  const MCConfig& mc() const { return mc_; }

 private:
  std::shared_ptr<const SmoothFunction> g_;
  Eigen::Index k_ = 0;
  Eigen::Index d_ = 0;
  double lambda_ = 0.0;
  MCConfig mc_;
};

// Small stock functions used by tests, demos and benchmarks.

class ConstantFunction : public SmoothFunction {
 public:
  ConstantFunction(Eigen::Index k, double c) : k_(k), c_(c) {}
  Eigen::Index arity() const override { return k_; }
  double value(const Eigen::VectorXd&) const override { return c_; }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd gradient(const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Zero(k_);
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Zero(k_, k_);
  }

 private:
  Eigen::Index k_;
  double c_;
};

class LinearFunction : public SmoothFunction {
 public:
  explicit LinearFunction(Eigen::VectorXd a) : a_(std::move(a)) {}
  Eigen::Index arity() const override { return a_.size(); }
  double value(const Eigen::VectorXd& u) const override { return a_.dot(u); }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd gradient(const Eigen::VectorXd&) const override { return a_; }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Zero(a_.size(), a_.size());
  }

 private:
  Eigen::VectorXd a_;
};

class HalfSquaredNorm : public SmoothFunction {
 public:
  explicit HalfSquaredNorm(Eigen::Index k) : k_(k) {}
  Eigen::Index arity() const override { return k_; }
  double value(const Eigen::VectorXd& u) const override { return 0.5 * u.squaredNorm(); }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override { return u; }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override {
    return Eigen::MatrixXd::Identity(k_, k_);
  }

 private:
  Eigen::Index k_;
};

/// g(u) = sum_i cosh(u_i); smooth, convex, with closed-form Gaussian moments.
class CoshSum : public SmoothFunction {
 public:
  explicit CoshSum(Eigen::Index k) : k_(k) {}
  Eigen::Index arity() const override { return k_; }
  double value(const Eigen::VectorXd& u) const override {
    return u.array().cosh().sum();
  }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override {
    return u.array().sinh();
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const override {
    return u.array().cosh().matrix().asDiagonal();
  }

 private:
  Eigen::Index k_;
};

/// g(u) = a . tanh(u) elementwise.
class DotTanh : public SmoothFunction {
 public:
  explicit DotTanh(Eigen::VectorXd a) : a_(std::move(a)) {}
  Eigen::Index arity() const override { return a_.size(); }
  double value(const Eigen::VectorXd& u) const override {
    return a_.dot(u.array().tanh().matrix());
  }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const override {
    return a_.array() * (1.0 - u.array().tanh().square());
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const override {
    const Eigen::ArrayXd t = u.array().tanh();
    return (-2.0 * a_.array() * t * (1.0 - t.square())).matrix().asDiagonal();
  }

 private:
  Eigen::VectorXd a_;
};

}  // namespace sospopt
