#include "sospopt/nn.hpp"

#include <Eigen/QR>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "sospopt/quadrature.hpp"
#include "sospopt/rng.hpp"

namespace sospopt::nn {

namespace {

constexpr std::uint64_t kTeacherXTag = 0x7ea0'0001ull;
constexpr std::uint64_t kTeacherNoiseTag = 0x7ea0'0002ull;

// (relu(u)^3 - 1)^2 and its first two derivatives; C^2 across the kink.
inline double toy_loss(double u) {
  if (u <= 0) return 1.0;
  const double c = u * u * u - 1.0;
  return c * c;
}
inline double toy_loss_d1(double u) {
  if (u <= 0) return 0.0;
  return 6.0 * u * u * (u * u * u - 1.0);
}
inline double toy_loss_d2(double u) {
  if (u <= 0) return 0.0;
  return 30.0 * u * u * u * u - 12.0 * u;
}

}  // namespace

TeacherModel TeacherModel::single_index_tanh(const Eigen::VectorXd& theta,
                                             double noise_std, std::uint64_t seed) {
  TeacherModel t;
  t.U = theta.transpose();
  t.link = [](const Eigen::VectorXd& u) { return std::tanh(u[0]); };
  t.noise_std = noise_std;
  t.seed = seed;
  return t;
}

StudentNet StudentNet::init_random(Eigen::Index h, Eigen::Index d,
                                   const Activation& act, std::uint64_t seed) {
  if (h < 1 || d < 1)
    throw std::invalid_argument("StudentNet: width and input dim must be positive");
  StudentNet s;
  s.W = normal_matrix(mix_seed(seed, 1), h, d) / std::sqrt(static_cast<double>(d));
  s.b = normal_vector(mix_seed(seed, 2), h) / static_cast<double>(h);
  s.a = normal_vector(mix_seed(seed, 3), h) / static_cast<double>(h);
  s.activation = act;
  return s;
}

double StudentNet::predict(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = W * x + b;
  double out = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) out += a[j] * activation.value(z[j]);
  return out;
}

Decomposition::Decomposition(const Eigen::MatrixXd& U) {
  const Eigen::Index k = U.rows();
  const Eigen::Index d = U.cols();
  if (k < 1 || d < 1) throw std::invalid_argument("Decomposition: empty U");
  if (k > d) throw std::invalid_argument("Decomposition: more directions than dims");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(U.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < k)
    throw std::invalid_argument("Decomposition: teacher directions are rank deficient");
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  basis_ = Q.leftCols(k).transpose();
  perp_basis_ = Q.rightCols(d - k);
}

Eigen::MatrixXd Decomposition::project_par(const Eigen::MatrixXd& W) const {
  return (W * basis_.transpose()) * basis_;
}

Eigen::MatrixXd Decomposition::project_perp(const Eigen::MatrixXd& W) const {
  return W - project_par(W);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> decompose(const Eigen::MatrixXd& W,
                                                      const TeacherModel& teacher) {
  if (W.cols() != teacher.U.cols())
    throw std::invalid_argument("decompose: W and U must share the input dimension");
  Decomposition dec(teacher.U);
  Eigen::MatrixXd par = dec.project_par(W);
  return {par, W - par};
}

// ---------------------------------------------------------------------------
// StudentRiskObjective

namespace {

struct Forward {
  Eigen::MatrixXd smat, d1, d2;  // h x S activations and derivatives
  Eigen::VectorXd yhat, r;       // S
};

Forward forward_pass(const Activation& act, const Eigen::MatrixXd& W,
                     const Eigen::VectorXd& b, const Eigen::VectorXd& a,
                     const Eigen::MatrixXd& X, const Eigen::MatrixXd* offsets,
                     const Eigen::VectorXd& y) {
  Forward f;
  Eigen::MatrixXd Z = W * X.transpose();
  if (offsets) Z += offsets->transpose();
  Z.colwise() += b;
  const Eigen::Index h = Z.rows(), S = Z.cols();
  f.smat.resize(h, S);
  f.d1.resize(h, S);
  f.d2.resize(h, S);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index j = 0; j < h; ++j) {
      const double z = Z(j, s);
      f.smat(j, s) = act.value(z);
      f.d1(j, s) = act.d1(z);
      f.d2(j, s) = act.d2(z);
    }
  f.yhat = f.smat.transpose() * a;
  f.r = f.yhat - y;
  return f;
}

}  // namespace

StudentRiskObjective::StudentRiskObjective(const StudentNet& student,
                                           const TeacherModel& teacher,
                                           double lambda, const MCConfig& mc)
    : proto_(student), lambda_(lambda) {
  if (teacher.U.cols() != student.W.cols())
    throw std::invalid_argument("regularized_risk: teacher/student dim mismatch");
  if (student.b.size() != student.W.rows() || student.a.size() != student.W.rows())
    throw std::invalid_argument("regularized_risk: student shapes inconsistent");
  if (lambda < 0) throw std::invalid_argument("regularized_risk: lambda < 0");
  if (mc.samples < 1) throw std::invalid_argument("regularized_risk: samples < 1");
  const Eigen::Index d = student.W.cols();
  X_.resize(mc.samples, d);
  y_.resize(mc.samples);
  for (int s = 0; s < mc.samples; ++s) {
    const Eigen::VectorXd x =
        normal_vector(mix_seed(mc.seed, kTeacherXTag, static_cast<std::uint64_t>(s)), d);
    const double noise =
        normal_scalar(mix_seed(mc.seed, kTeacherNoiseTag, static_cast<std::uint64_t>(s)));
    X_.row(s) = x.transpose();
    y_[s] = teacher.label(x, noise);
  }
}

StudentRiskObjective::StudentRiskObjective(const StudentNet& student,
                                           Eigen::MatrixXd X, Eigen::VectorXd y,
                                           double lambda)
    : proto_(student), X_(std::move(X)), y_(std::move(y)), lambda_(lambda) {
  if (X_.cols() != student.W.cols())
    throw std::invalid_argument("regularized_risk: dataset dim mismatch");
  if (X_.rows() != y_.size())
    throw std::invalid_argument("regularized_risk: labels/dataset size mismatch");
  if (student.b.size() != student.W.rows() || student.a.size() != student.W.rows())
    throw std::invalid_argument("regularized_risk: student shapes inconsistent");
  if (lambda < 0) throw std::invalid_argument("regularized_risk: lambda < 0");
}

ParamVector StudentRiskObjective::make_params(const StudentNet& student) const {
  const Eigen::Index h = student.width(), d = student.input_dim();
  std::vector<SegmentSpec> specs{{"W", h, d}, {"b", h, 1}};
  if (student.a_trainable) specs.push_back({"a", h, 1});
  ParamVector p(specs);
  p.set_matrix("W", student.W);
  p.set_vector("b", student.b);
  if (student.a_trainable) p.set_vector("a", student.a);
  return p;
}

StudentNet StudentRiskObjective::to_student(const ParamVector& p) const {
  StudentNet s = proto_;
  s.W = p.matrix("W");
  s.b = p.vector("b");
  if (p.has_segment("a")) s.a = p.vector("a");
  return s;
}

Eigen::Index StudentRiskObjective::dim() const {
  const Eigen::Index h = proto_.width(), d = proto_.input_dim();
  return h * d + h + (proto_.a_trainable ? h : 0);
}

double StudentRiskObjective::value(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::VectorXd a = p.has_segment("a") ? Eigen::VectorXd(p.vector("a")) : proto_.a;
  const Forward f = forward_pass(proto_.activation, W, b, a, X_, nullptr, y_);
  return f.r.squaredNorm() / X_.rows() + lambda_ * W.squaredNorm();
}

Eigen::VectorXd StudentRiskObjective::gradient(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const bool train_a = p.has_segment("a");
  const Eigen::VectorXd a = train_a ? Eigen::VectorXd(p.vector("a")) : proto_.a;
  const Eigen::Index S = X_.rows();
  const Forward f = forward_pass(proto_.activation, W, b, a, X_, nullptr, y_);

  // gamma(j,s) = (2/S) * r_s * a_j * act'(z_js)
  Eigen::MatrixXd gamma =
      (a * ((2.0 / S) * f.r).transpose()).cwiseProduct(f.d1);
  Eigen::VectorXd out(dim());
  ParamVector grad = p;  // reuse the segment layout
  grad.data().setZero();
  grad.matrix("W") = gamma * X_ + 2.0 * lambda_ * W;
  grad.vector("b") = gamma.rowwise().sum();
  if (train_a) grad.vector("a") = (2.0 / S) * (f.smat * f.r);
  return grad.data();
}

Eigen::MatrixXd StudentRiskObjective::hessian(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const bool train_a = p.has_segment("a");
  const Eigen::VectorXd a = train_a ? Eigen::VectorXd(p.vector("a")) : proto_.a;
  const Eigen::Index S = X_.rows(), h = W.rows(), d = W.cols(), D = dim();
  const Forward f = forward_pass(proto_.activation, W, b, a, X_, nullptr, y_);

  // Gauss-Newton part from the per-sample prediction Jacobian J (S x D).
  Eigen::MatrixXd J(S, D);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index j = 0; j < h; ++j) {
      const double q = a[j] * f.d1(j, s);
      for (Eigen::Index c = 0; c < d; ++c) J(s, c * h + j) = q * X_(s, c);
      J(s, h * d + j) = q;
      if (train_a) J(s, h * d + h + j) = f.smat(j, s);
    }
  }
  Eigen::MatrixXd H = (2.0 / S) * (J.transpose() * J);

  // Residual curvature: 2 r * d2yhat. z_j touches W row j and b_j; the a_j
  // cross terms touch (a_j, z_j).
  for (Eigen::Index j = 0; j < h; ++j) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd cross = Eigen::VectorXd::Zero(d + 1);
    for (Eigen::Index s = 0; s < S; ++s) {
      Eigen::VectorXd xs(d + 1);
      xs.head(d) = X_.row(s).transpose();
      xs[d] = 1.0;
      const double wcurv = (2.0 / S) * f.r[s] * a[j] * f.d2(j, s);
      block += wcurv * (xs * xs.transpose());
      if (train_a) cross += (2.0 / S) * f.r[s] * f.d1(j, s) * xs;
    }
    std::vector<Eigen::Index> idx(d + 1);
    for (Eigen::Index c = 0; c < d; ++c) idx[c] = c * h + j;
    idx[d] = h * d + j;
    for (Eigen::Index u = 0; u <= d; ++u)
      for (Eigen::Index v = 0; v <= d; ++v) H(idx[u], idx[v]) += block(u, v);
    if (train_a) {
      const Eigen::Index ja = h * d + h + j;
      for (Eigen::Index u = 0; u <= d; ++u) {
        H(ja, idx[u]) += cross[u];
        H(idx[u], ja) += cross[u];
      }
    }
  }
  for (Eigen::Index i = 0; i < h * d; ++i) H(i, i) += 2.0 * lambda_;
  return H;
}

Eigen::MatrixXd StudentRiskObjective::b_block_hessian(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::VectorXd a = p.has_segment("a") ? Eigen::VectorXd(p.vector("a")) : proto_.a;
  const Eigen::Index S = X_.rows();
  const Forward f = forward_pass(proto_.activation, W, b, a, X_, nullptr, y_);
  const Eigen::MatrixXd M = a.asDiagonal() * f.d1;  // h x S
  Eigen::MatrixXd H = (2.0 / S) * (M * M.transpose());
  const Eigen::VectorXd curv = (2.0 / S) * (a.array() * (f.d2 * f.r).array()).matrix();
  H += curv.asDiagonal();
  return H;
}

// ---------------------------------------------------------------------------
// PerpRestrictedRisk

PerpRestrictedRisk::PerpRestrictedRisk(const StudentRiskObjective& base,
                                       const ParamVector& at, const Decomposition& dec)
    : proto_(base.proto_), y_(base.y_), lambda_(base.lambda_) {
  const Eigen::MatrixXd W = at.matrix("W");
  W_par_ = dec.project_par(W);
  Bperp_ = dec.perp_basis();
  if (Bperp_.cols() == 0)
    throw std::invalid_argument("PerpRestrictedRisk: perpendicular space is trivial");
  Xt_ = base.X_ * Bperp_;                 // S x p
  offsets_ = base.X_ * W_par_.transpose();  // S x h
}

ParamVector PerpRestrictedRisk::make_params(const Eigen::MatrixXd& W_full,
                                            const Eigen::VectorXd& b) const {
  const Eigen::Index h = proto_.width(), px = Bperp_.cols();
  ParamVector p({{"C", h, px}, {"b", h, 1}});
  p.set_matrix("C", W_full * Bperp_);
  p.set_vector("b", b);
  return p;
}

Eigen::MatrixXd PerpRestrictedRisk::full_W(const ParamVector& p) const {
  return W_par_ + Eigen::MatrixXd(p.matrix("C")) * Bperp_.transpose();
}

Eigen::Index PerpRestrictedRisk::dim() const {
  return proto_.width() * (Bperp_.cols() + 1);
}

double PerpRestrictedRisk::value(const ParamVector& p) const {
  const Eigen::MatrixXd C = p.matrix("C");
  const Eigen::VectorXd b = p.vector("b");
  const Forward f =
      forward_pass(proto_.activation, C, b, proto_.a, Xt_, &offsets_, y_);
  return f.r.squaredNorm() / Xt_.rows() +
         lambda_ * (W_par_.squaredNorm() + C.squaredNorm());
}

Eigen::VectorXd PerpRestrictedRisk::gradient(const ParamVector& p) const {
  const Eigen::MatrixXd C = p.matrix("C");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::Index S = Xt_.rows();
  const Forward f =
      forward_pass(proto_.activation, C, b, proto_.a, Xt_, &offsets_, y_);
  Eigen::MatrixXd gamma =
      (proto_.a * ((2.0 / S) * f.r).transpose()).cwiseProduct(f.d1);
  ParamVector grad = p;
  grad.data().setZero();
  grad.matrix("C") = gamma * Xt_ + 2.0 * lambda_ * C;
  grad.vector("b") = gamma.rowwise().sum();
  return grad.data();
}

Eigen::MatrixXd PerpRestrictedRisk::hessian(const ParamVector& p) const {
  const Eigen::MatrixXd C = p.matrix("C");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::VectorXd& a = proto_.a;
  const Eigen::Index S = Xt_.rows(), h = C.rows(), px = C.cols(), D = dim();
  const Forward f =
      forward_pass(proto_.activation, C, b, a, Xt_, &offsets_, y_);

  Eigen::MatrixXd J(S, D);
  for (Eigen::Index s = 0; s < S; ++s)
    for (Eigen::Index j = 0; j < h; ++j) {
      const double q = a[j] * f.d1(j, s);
      for (Eigen::Index c = 0; c < px; ++c) J(s, c * h + j) = q * Xt_(s, c);
      J(s, h * px + j) = q;
    }
  Eigen::MatrixXd H = (2.0 / S) * (J.transpose() * J);

  for (Eigen::Index j = 0; j < h; ++j) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(px + 1, px + 1);
    for (Eigen::Index s = 0; s < S; ++s) {
      Eigen::VectorXd xs(px + 1);
      xs.head(px) = Xt_.row(s).transpose();
      xs[px] = 1.0;
      block += (2.0 / S) * f.r[s] * a[j] * f.d2(j, s) * (xs * xs.transpose());
    }
    std::vector<Eigen::Index> idx(px + 1);
    for (Eigen::Index c = 0; c < px; ++c) idx[c] = c * h + j;
    idx[px] = h * px + j;
    for (Eigen::Index u = 0; u <= px; ++u)
      for (Eigen::Index v = 0; v <= px; ++v) H(idx[u], idx[v]) += block(u, v);
  }
  for (Eigen::Index i = 0; i < h * px; ++i) H(i, i) += 2.0 * lambda_;
  return H;
}

Eigen::MatrixXd PerpRestrictedRisk::b_block_hessian(const ParamVector& p) const {
  const Eigen::MatrixXd C = p.matrix("C");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::VectorXd& a = proto_.a;
  const Eigen::Index S = Xt_.rows();
  const Forward f =
      forward_pass(proto_.activation, C, b, a, Xt_, &offsets_, y_);
  const Eigen::MatrixXd M = a.asDiagonal() * f.d1;
  Eigen::MatrixXd H = (2.0 / S) * (M * M.transpose());
  const Eigen::VectorXd curv = (2.0 / S) * (a.array() * (f.d2 * f.r).array()).matrix();
  H += curv.asDiagonal();
  return H;
}

// ---------------------------------------------------------------------------

TrainResult train_student(const TeacherModel& teacher, const StudentNet& init,
                          const PGDConfig& pgd, double lambda, const MCConfig& mc) {
  StudentRiskObjective obj(init, teacher, lambda, mc);
  Decomposition dec(teacher.U);
  ParamVector p0 = obj.make_params(init);

  std::vector<double> perp(pgd.T + 1, 0.0), total(pgd.T + 1, 0.0);
  perp[0] = dec.perp_norm(init.W);
  total[0] = init.W.norm();
  auto observer = [&](int iter, const ParamVector& p) {
    if (iter + 1 <= pgd.T) {
      const Eigen::MatrixXd W = p.matrix("W");
      perp[iter + 1] = dec.perp_norm(W);
      total[iter + 1] = W.norm();
    }
  };

  PGDResult res = pgd_minimize(obj, p0, pgd, observer);

  TrainResult out;
  out.student = obj.to_student(res.final);
  out.optimizer_trajectory = res.trajectory;
  out.perp_trajectory.reserve(pgd.T + 1);
  for (int t = 0; t <= pgd.T; ++t)
    out.perp_trajectory.push_back(
        {t, perp[t], total[t], res.trajectory[t].value});
  return out;
}

void write_perp_csv(const std::string& path, const std::vector<PerpPoint>& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
  out << "iter,perp_norm,total_norm,risk\n";
  out << std::setprecision(17);
  for (const auto& pt : traj)
    out << pt.iter << ',' << pt.perp_norm << ',' << pt.total_norm << ','
        << pt.risk << '\n';
}

// ---------------------------------------------------------------------------
// 1-D toy

Toy1DObjective::Toy1DObjective(double lambda, bool train_bias, double frozen_b,
                               int quadrature_nodes)
    : lambda_(lambda), train_bias_(train_bias), frozen_b_(frozen_b) {
  if (lambda < 0) throw std::invalid_argument("Toy1DObjective: lambda < 0");
  const GaussHermiteRule rule = gauss_hermite(quadrature_nodes);
  nodes_ = rule.nodes;
  weights_ = rule.weights;
}

double Toy1DObjective::eval(double w, double b) const {
  double acc = 0.0;
  for (Eigen::Index q = 0; q < nodes_.size(); ++q)
    acc += weights_[q] * toy_loss(w * nodes_[q] + b);
  return acc + lambda_ * w * w;
}

double Toy1DObjective::value(const ParamVector& p) const {
  const double w = p.data()[0];
  const double b = train_bias_ ? p.data()[1] : frozen_b_;
  return eval(w, b);
}

Eigen::VectorXd Toy1DObjective::gradient(const ParamVector& p) const {
  const double w = p.data()[0];
  const double b = train_bias_ ? p.data()[1] : frozen_b_;
  double dw = 0.0, db = 0.0;
  for (Eigen::Index q = 0; q < nodes_.size(); ++q) {
    const double g = toy_loss_d1(w * nodes_[q] + b);
    dw += weights_[q] * g * nodes_[q];
    db += weights_[q] * g;
  }
  Eigen::VectorXd out(dim());
  out[0] = dw + 2.0 * lambda_ * w;
  if (train_bias_) out[1] = db;
  return out;
}

Eigen::MatrixXd Toy1DObjective::hessian(const ParamVector& p) const {
  const double w = p.data()[0];
  const double b = train_bias_ ? p.data()[1] : frozen_b_;
  double hww = 0.0, hwb = 0.0, hbb = 0.0;
  for (Eigen::Index q = 0; q < nodes_.size(); ++q) {
    const double g2 = toy_loss_d2(w * nodes_[q] + b);
    hww += weights_[q] * g2 * nodes_[q] * nodes_[q];
    hwb += weights_[q] * g2 * nodes_[q];
    hbb += weights_[q] * g2;
  }
  Eigen::MatrixXd H(dim(), dim());
  H(0, 0) = hww + 2.0 * lambda_;
  if (train_bias_) {
    H(0, 1) = hwb;
    H(1, 0) = hwb;
    H(1, 1) = hbb;
  }
  return H;
}

Toy1DResult toy_1d(double lambda, bool train_bias, const Toy1DGrid& grid,
                   int quadrature_nodes) {
  if (!(grid.w_max > 0) || grid.w_points < 2)
    throw std::invalid_argument("toy_1d: grid must cover [0, w_max]");
  if (train_bias && (grid.b_points < 2 || !(grid.b_max > grid.b_min)))
    throw std::invalid_argument("toy_1d: bias grid must be a proper range");

  Toy1DObjective obj(lambda, train_bias, 0.0, quadrature_nodes);

  double w_lo = 0.0, w_hi = grid.w_max;
  double b_lo = train_bias ? grid.b_min : 0.0;
  double b_hi = train_bias ? grid.b_max : 0.0;
  const int nw = grid.w_points;
  const int nb = train_bias ? grid.b_points : 1;

  Toy1DResult best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int round = 0; round <= grid.zoom_rounds; ++round) {
    const double wstep = (w_hi - w_lo) / (nw - 1);
    const double bstep = nb > 1 ? (b_hi - b_lo) / (nb - 1) : 0.0;
    for (int i = 0; i < nw; ++i) {
      const double w = w_lo + i * wstep;
      for (int j = 0; j < nb; ++j) {
        const double b = b_lo + j * bstep;
        const double f = obj.eval(w, b);
        if (f < best.f_star) best = {w, b, f};
      }
    }
    if (round == grid.zoom_rounds) break;
    // Zoom into a window of two old grid steps around the incumbent.
    const double wr = 2.0 * wstep;
    w_lo = std::max(0.0, best.w_star - wr);
    w_hi = best.w_star + wr;
    if (train_bias) {
      const double br = 2.0 * bstep;
      b_lo = best.b_star - br;
      b_hi = best.b_star + br;
    }
  }

  Toy1DObjective check(lambda, train_bias, 0.0, 2 * quadrature_nodes);
  const double f2 = check.eval(best.w_star, best.b_star);
  if (std::abs(f2 - best.f_star) > 1e-6)
    throw PrecisionError("toy_1d: quadrature did not converge (node doubling moved the optimum value)");
  return best;
}

double estimate_hessian_lipschitz(
    const std::function<Eigen::MatrixXd(const ParamVector&)>& hessian_at,
    const ParamVector& center, double radius, int pairs, std::uint64_t seed,
    double safety) {
  if (pairs < 1) throw std::invalid_argument("estimate_hessian_lipschitz: pairs < 1");
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    ParamVector p1 = center, p2 = center;
    p1.data() += radius * normal_vector(mix_seed(seed, 2 * i), center.dim()).normalized();
    p2.data() += radius * normal_vector(mix_seed(seed, 2 * i + 1), center.dim()).normalized();
    const double dist = (p1.data() - p2.data()).norm();
    if (dist < 1e-12) continue;
    const double diff = (hessian_at(p1) - hessian_at(p2)).norm();
    worst = std::max(worst, diff / dist);
  }
  return safety * worst;
}

}  // namespace sospopt::nn
