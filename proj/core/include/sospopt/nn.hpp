#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sospopt/objective.hpp"
#include "sospopt/optim.hpp"
#include "sospopt/param_vector.hpp"
#include "sospopt/reparam.hpp"
#include "sospopt/smoothing.hpp"

namespace sospopt::nn {

/// Hidden-layer nonlinearity; must be C^2.
class Activation {
 public:
  static Activation smooth_relu(double iota) { return Activation(Kind::kSmoothRelu, iota); }
  static Activation tanh_act() { return Activation(Kind::kTanh, 0.0); }

  double value(double z) const {
    return kind_ == Kind::kTanh ? std::tanh(z) : relu_.value(z);
  }
  double d1(double z) const {
    if (kind_ == Kind::kTanh) {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    return relu_.d1(z);
  }
  double d2(double z) const {
    if (kind_ == Kind::kTanh) {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    return relu_.d2(z);
  }

 private:
  enum class Kind { kSmoothRelu, kTanh };
  Activation(Kind kind, double iota)
      : kind_(kind), relu_(kind == Kind::kSmoothRelu ? iota : 1.0) {}
  Kind kind_;
  SmoothRelu relu_;
};

/// Multiple-index data generator: y = link(U x) + noise_std * eps.
struct TeacherModel {
  Eigen::MatrixXd U;  // k x d direction matrix, rows linearly independent
  std::function<double(const Eigen::VectorXd&)> link;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  static TeacherModel single_index_tanh(const Eigen::VectorXd& theta,
                                        double noise_std, std::uint64_t seed);

  double label(const Eigen::VectorXd& x, double noise) const {
    return link(U * x) + noise_std * noise;
  }
};

struct StudentNet {
  Eigen::MatrixXd W;  // h x d
  Eigen::VectorXd b;  // h
  Eigen::VectorXd a;  // h, second layer
  Activation activation = Activation::smooth_relu(2.0);
  bool a_trainable = false;

  /// W ~ N(0, 1/d), b and a ~ N(0, 1/h^2) entrywise.
  static StudentNet init_random(Eigen::Index h, Eigen::Index d,
                                const Activation& act, std::uint64_t seed);

  Eigen::Index width() const { return W.rows(); }
  Eigen::Index input_dim() const { return W.cols(); }
  double predict(const Eigen::VectorXd& x) const;
};

/// Orthonormal basis of the teacher's principal subspace together with the
/// induced parallel/perpendicular split of weight matrices.
class Decomposition {
 public:
  explicit Decomposition(const Eigen::MatrixXd& U);

  /// k x d matrix with orthonormal rows spanning the row space of U.
  const Eigen::MatrixXd& basis() const { return basis_; }
  /// d x (d-k) matrix with orthonormal columns spanning the complement.
  const Eigen::MatrixXd& perp_basis() const { return perp_basis_; }

  Eigen::MatrixXd project_par(const Eigen::MatrixXd& W) const;
  Eigen::MatrixXd project_perp(const Eigen::MatrixXd& W) const;
  double perp_norm(const Eigen::MatrixXd& W) const {
    return project_perp(W).norm();
  }

 private:
  Eigen::MatrixXd basis_;       // k x d
  Eigen::MatrixXd perp_basis_;  // d x (d-k)
};

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decompose(const Eigen::MatrixXd& W,
                                                      const TeacherModel& teacher);

/// Squared-error regularized risk of a two-layer student on teacher data:
/// (1/S) sum_s (y_s - yhat_s)^2 + lambda*||W||_F^2 over segments W, b
/// (and a when trainable). The sample set is drawn once from the MCConfig
/// seed (or supplied explicitly), so the objective is deterministic.
class StudentRiskObjective : public SmoothObjective {
 public:
  StudentRiskObjective(const StudentNet& student, const TeacherModel& teacher,
                       double lambda, const MCConfig& mc);
  StudentRiskObjective(const StudentNet& student, Eigen::MatrixXd X,
                       Eigen::VectorXd y, double lambda);

  ParamVector make_params(const StudentNet& student) const;
  StudentNet to_student(const ParamVector& p) const;

  Eigen::Index dim() const override;
  double value(const ParamVector& p) const override;
  Eigen::VectorXd gradient(const ParamVector& p) const override;
  bool has_hessian() const override { return dim() <= 2000; }
  Eigen::MatrixXd hessian(const ParamVector& p) const override;

  /// Hessian block with respect to the biases only (h x h); the block the
  /// derandomization argument certifies.
  Eigen::MatrixXd b_block_hessian(const ParamVector& p) const;

  const Eigen::MatrixXd& samples() const { return X_; }
  const Eigen::VectorXd& labels() const { return y_; }
  double lambda() const { return lambda_; }

 private:
  friend class PerpRestrictedRisk;
  StudentNet proto_;
  Eigen::MatrixXd X_;  // S x d
  Eigen::VectorXd y_;  // S
  double lambda_ = 0.0;
};

/// The risk as a function of (C, b) where W = W_par + C * Bperp^T and W_par
/// is held fixed; the coordinates C live in the orthonormal perpendicular
/// basis, so ||C||_F = ||W_perp||_F and the regularizer splits exactly.
class PerpRestrictedRisk : public SmoothObjective {
 public:
  PerpRestrictedRisk(const StudentRiskObjective& base, const ParamVector& at,
                     const Decomposition& dec);

  ParamVector make_params(const Eigen::MatrixXd& W_full,
                          const Eigen::VectorXd& b) const;
  Eigen::MatrixXd full_W(const ParamVector& p) const;

  Eigen::Index dim() const override;
  double value(const ParamVector& p) const override;
  Eigen::VectorXd gradient(const ParamVector& p) const override;
  bool has_hessian() const override { return dim() <= 2000; }
  Eigen::MatrixXd hessian(const ParamVector& p) const override;
  Eigen::MatrixXd b_block_hessian(const ParamVector& p) const;

 private:
  StudentNet proto_;
  Eigen::MatrixXd Xt_;      // S x p inputs in the perp basis
  Eigen::MatrixXd offsets_; // S x h fixed contributions W_par x_s
  Eigen::VectorXd y_;
  Eigen::MatrixXd W_par_;
  Eigen::MatrixXd Bperp_;   // d x p
  double lambda_ = 0.0;
};

struct PerpPoint {
  int iter = 0;
  double perp_norm = 0.0;
  double total_norm = 0.0;
  double risk = 0.0;
};

struct TrainResult {
  StudentNet student;
  std::vector<PerpPoint> perp_trajectory;
  std::vector<TrajectoryPoint> optimizer_trajectory;
};

/// Appendix-style teacher-student run: PGD over (W, b) with the second layer
/// frozen, recording ||W_perp||_F every iteration.
TrainResult train_student(const TeacherModel& teacher, const StudentNet& init,
                          const PGDConfig& pgd, double lambda, const MCConfig& mc);

/// Writes `iter,perp_norm,total_norm,risk` rows.
void write_perp_csv(const std::string& path, const std::vector<PerpPoint>& traj);

/// The 1-D structure-discovery toy: f(w, b) = E[(relu(w x + b)^3 - 1)^2] +
/// lambda w^2 with x ~ N(0,1), as a smooth objective with Gauss-Hermite
/// expectations (exact ReLU; the cube is C^2).
class Toy1DObjective : public SmoothObjective {
 public:
  Toy1DObjective(double lambda, bool train_bias, double frozen_b = 0.0,
                 int quadrature_nodes = 300);

  Eigen::Index dim() const override { return train_bias_ ? 2 : 1; }
  double value(const ParamVector& p) const override;
  Eigen::VectorXd gradient(const ParamVector& p) const override;
  bool has_hessian() const override { return true; }
  Eigen::MatrixXd hessian(const ParamVector& p) const override;

  double eval(double w, double b) const;

 private:
  double lambda_;
  bool train_bias_;
  double frozen_b_;
  Eigen::VectorXd nodes_, weights_;
};

struct Toy1DGrid {
  double w_max = 2.0;
  int w_points = 401;
  double b_min = -2.0;
  double b_max = 2.0;
  int b_points = 201;
  int zoom_rounds = 6;
};

struct Toy1DResult {
  double w_star = 0.0;
  double b_star = 0.0;
  double f_star = 0.0;
};

/// Global minimizer by dense grid search with local grid-zoom refinement;
/// expectations by Gauss-Hermite quadrature. Doubling the node count at the
/// reported optimum must not move the value by more than 1e-6.
Toy1DResult toy_1d(double lambda, bool train_bias, const Toy1DGrid& grid,
                   int quadrature_nodes = 800);

/// Grid-sampled bound on the Hessian Lipschitz constant of an arbitrary
/// matrix-valued Hessian map, times a safety factor.
double estimate_hessian_lipschitz(
    const std::function<Eigen::MatrixXd(const ParamVector&)>& hessian_at,
    const ParamVector& center, double radius, int pairs, std::uint64_t seed,
    double safety = 3.0);

}  // namespace sospopt::nn
