#pragma once

#include <Eigen/Core>
#include <optional>

#include "sospopt/errors.hpp"
#include "sospopt/param_vector.hpp"

namespace sospopt {

/// Contract for everything optimizable in this library: value and gradient
/// are mandatory, the Hessian (or Hessian-vector products) are optional
/// capabilities. Stochastic implementations must be deterministic functions
/// of (point, declared seed, sample count).
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double value(const ParamVector& p) const = 0;
  virtual Eigen::VectorXd gradient(const ParamVector& p) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual Eigen::MatrixXd hessian(const ParamVector& p) const {
    (void)p;
    throw CapabilityError("objective does not expose a Hessian");
  }

  virtual bool has_hessian_vec() const { return has_hessian(); }
  virtual Eigen::VectorXd hessian_vec(const ParamVector& p,
                                      const Eigen::VectorXd& v) const {
    return hessian(p) * v;
  }

  /// Declared gradient Lipschitz constant L, when known.
  virtual std::optional<double> grad_lipschitz() const { return std::nullopt; }
  /// Declared Hessian Lipschitz constant K, when known.
  virtual std::optional<double> hessian_lipschitz() const { return std::nullopt; }
  virtual bool lower_bounded() const { return true; }
};

}  // namespace sospopt
