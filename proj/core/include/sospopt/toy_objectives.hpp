#pragma once

#include <Eigen/Core>
#include <utility>

#include "sospopt/objective.hpp"

namespace sospopt {

/// f(x) = 0.5 * x' Q x + c' x for symmetric Q.
class QuadraticObjective : public SmoothObjective {
 public:
  explicit QuadraticObjective(Eigen::MatrixXd Q,
                              Eigen::VectorXd c = Eigen::VectorXd())
      : Q_(std::move(Q)), c_(std::move(c)) {
    if (Q_.rows() != Q_.cols())
      throw std::invalid_argument("QuadraticObjective: Q must be square");
    if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(Q_.rows());
    if (c_.size() != Q_.rows())
      throw std::invalid_argument("QuadraticObjective: c dimension mismatch");
    L_ = Q_.cwiseAbs().rowwise().sum().maxCoeff();  // ||Q||_inf >= ||Q||_2
  }

  Eigen::Index dim() const override { return Q_.rows(); }
  double value(const ParamVector& p) const override {
    return 0.5 * p.data().dot(Q_ * p.data()) + c_.dot(p.data());
  }
  Eigen::VectorXd gradient(const ParamVector& p) const override {
    return Q_ * p.data() + c_;
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const ParamVector&) const override { return Q_; }
  std::optional<double> grad_lipschitz() const override { return L_; }
  std::optional<double> hessian_lipschitz() const override { return 0.0; }

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd c_;
  double L_ = 0.0;
};

/// f(x, y) = x^2 - y^2; the canonical strict saddle at the origin.
class SaddleObjective : public SmoothObjective {
 public:
  Eigen::Index dim() const override { return 2; }
  double value(const ParamVector& p) const override {
    const auto& x = p.data();
    return x[0] * x[0] - x[1] * x[1];
  }
  Eigen::VectorXd gradient(const ParamVector& p) const override {
    return Eigen::Vector2d(2.0 * p.data()[0], -2.0 * p.data()[1]);
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const ParamVector&) const override {
    Eigen::Matrix2d H;
    H << 2.0, 0.0, 0.0, -2.0;
    return H;
  }
  std::optional<double> grad_lipschitz() const override { return 2.0; }
  std::optional<double> hessian_lipschitz() const override { return 0.0; }
  bool lower_bounded() const override { return false; }
};

/// f(x) = x^4; gradient and curvature both vanish at the flat minimum.
class QuarticObjective : public SmoothObjective {
 public:
  Eigen::Index dim() const override { return 1; }
  double value(const ParamVector& p) const override {
    const double x = p.data()[0];
    return x * x * x * x;
  }
  Eigen::VectorXd gradient(const ParamVector& p) const override {
    const double x = p.data()[0];
    return Eigen::VectorXd::Constant(1, 4.0 * x * x * x);
  }
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const ParamVector& p) const override {
    const double x = p.data()[0];
    return Eigen::MatrixXd::Constant(1, 1, 12.0 * x * x);
  }
};

}  // namespace sospopt
