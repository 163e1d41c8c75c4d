#include "sospopt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sospopt/rng.hpp"

namespace sospopt {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void require_finite(double value, const Eigen::VectorXd& grad, int iter,
                    const char* who) {
  if (std::isfinite(value) && all_finite(grad)) return;
  std::ostringstream oss;
  oss << who << ": non-finite " << (std::isfinite(value) ? "gradient" : "value")
      << " at iteration " << iter;
  throw NumericError(oss.str());
}

}  // namespace

const char* to_string(StepEvent e) {
  switch (e) {
    case StepEvent::kStep: return "step";
    case StepEvent::kPerturb: return "perturb";
    case StepEvent::kEigStep: return "eig_step";
    case StepEvent::kDone: return "done";
  }
  return "step";
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryPoint>& trajectory) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
  out << "iter,value,grad_norm,event\n";
  out << std::setprecision(17);
  for (const auto& pt : trajectory)
    out << pt.iter << ',' << pt.value << ',' << pt.grad_norm << ','
        << to_string(pt.event) << '\n';
}

SOSPReport make_sosp_report(double grad_norm, double lambda_min, double rho,
                            double K) {
  if (!(rho > 0)) throw std::invalid_argument("SOSPReport: rho must be positive");
  if (K < 0) throw std::invalid_argument("SOSPReport: K must be nonnegative");
  SOSPReport r;
  r.grad_norm = grad_norm;
  r.lambda_min = lambda_min;
  r.rho = rho;
  r.K = K;
  r.first_order_ok = grad_norm <= rho;
  r.second_order_ok = lambda_min >= -std::sqrt(K * rho);
  return r;
}

PGDResult pgd_minimize(const SmoothObjective& obj, const ParamVector& init,
                       const PGDConfig& cfg,
                       const std::function<void(int, const ParamVector&)>& observer) {
  if (!(cfg.eta > 0)) throw std::invalid_argument("pgd: eta must be positive");
  if (cfg.T < 1) throw std::invalid_argument("pgd: T must be positive");
  if (!(cfg.perturb_threshold > 0))
    throw std::invalid_argument("pgd: perturb_threshold must be positive");
  if (!(cfg.perturb_scale > 0))
    throw std::invalid_argument("pgd: perturb_scale must be positive");
  if (cfg.perturb_cooldown < 0)
    throw std::invalid_argument("pgd: perturb_cooldown must be nonnegative");
  if (auto L = obj.grad_lipschitz(); L && *L > 0 && cfg.eta * *L > 1.0 + 1e-12)
    throw std::invalid_argument("pgd: eta exceeds 1/L for the declared L");
  if (init.dim() != obj.dim())
    throw std::invalid_argument("pgd: init dimension mismatch");

  std::mt19937_64 eng(splitmix64(cfg.seed));
  std::normal_distribution<double> n01;

  PGDResult res;
  res.final = init;
  res.trajectory.reserve(static_cast<size_t>(cfg.T) + 1);
  ParamVector& p = res.final;
  long last_perturb = -static_cast<long>(cfg.perturb_cooldown) - 1;

  for (int t = 0; t < cfg.T; ++t) {
    double v = obj.value(p);
    Eigen::VectorXd g = obj.gradient(p);
    require_finite(v, g, t, "pgd");
    StepEvent event = StepEvent::kStep;

    if (g.norm() < cfg.perturb_threshold &&
        t - last_perturb >= static_cast<long>(cfg.perturb_cooldown)) {
      for (Eigen::Index i = 0; i < p.dim(); ++i)
        p.data()[i] += cfg.perturb_scale * n01(eng);
      last_perturb = t;
      ++res.perturbations;
      v = obj.value(p);
      g = obj.gradient(p);
      require_finite(v, g, t, "pgd");
      event = StepEvent::kPerturb;
    }

    res.trajectory.push_back({t, v, g.norm(), event});
    p.data() -= cfg.eta * g;
    if (observer) observer(t, p);
  }

  const double v = obj.value(p);
  const Eigen::VectorXd g = obj.gradient(p);
  require_finite(v, g, cfg.T, "pgd");
  res.trajectory.push_back({cfg.T, v, g.norm(), StepEvent::kDone});
  return res;
}

HDResult hessian_descent(const SmoothObjective& obj, const ParamVector& init,
                         const HDConfig& cfg) {
  if (!obj.has_hessian())
    throw CapabilityError("hessian_descent: objective must expose a full Hessian");
  if (!(cfg.rho > 0)) throw std::invalid_argument("hd: rho must be positive");
  if (!(cfg.K > 0)) throw std::invalid_argument("hd: K must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("hd: max_iters must be positive");

  double nu = cfg.nu;
  if (nu <= 0) {
    if (auto L = obj.grad_lipschitz(); L && *L > 0) nu = 1.0 / *L;
    else throw std::invalid_argument("hd: nu not set and no declared L");
  }
  const double h = cfg.h > 0 ? cfg.h : 3.0 * std::sqrt(cfg.rho) / cfg.K;
  const double curvature_cut = -std::sqrt(cfg.K * cfg.rho);

  HDResult res;
  res.final = init;
  ParamVector& p = res.final;
  ParamVector best = p;
  double best_value = obj.value(p);

  for (int t = 0; t < cfg.max_iters; ++t) {
    const double v = obj.value(p);
    Eigen::VectorXd g = obj.gradient(p);
    require_finite(v, g, t, "hd");
    if (v < best_value) {
      best_value = v;
      best = p;
    }
    const double gn = g.norm();

    if (gn > cfg.rho) {
      res.trajectory.push_back({t, v, gn, StepEvent::kStep});
      p.data() -= nu * g;
      continue;
    }

    const auto [lmin, u] = min_eig(obj.hessian(p));
    if (lmin < curvature_cut) {
      res.trajectory.push_back({t, v, gn, StepEvent::kEigStep});
      ParamVector plus = p;
      plus.data() += h * u;
      ParamVector minus = p;
      minus.data() -= h * u;
      p = obj.value(plus) <= obj.value(minus) ? plus : minus;
      continue;
    }

    res.trajectory.push_back({t, v, gn, StepEvent::kDone});
    res.report = make_sosp_report(gn, lmin, cfg.rho, cfg.K);
    res.certified = true;
    return res;
  }

  // Budget exhausted: hand back the best iterate, uncertified.
  p = best;
  const double v = obj.value(p);
  const Eigen::VectorXd g = obj.gradient(p);
  const auto [lmin, u] = min_eig(obj.hessian(p));
  res.trajectory.push_back({cfg.max_iters, v, g.norm(), StepEvent::kDone});
  res.report = make_sosp_report(g.norm(), lmin, cfg.rho, cfg.K);
  res.certified = false;
  return res;
}

SOSPReport check_sosp(const SmoothObjective& obj, const ParamVector& p, double rho,
                      double K) {
  const double gn = obj.gradient(p).norm();
  double lmin = 0.0;
  if (obj.has_hessian() && obj.dim() <= 2000) {
    lmin = min_eig(obj.hessian(p)).first;
  } else if (obj.has_hessian_vec()) {
    auto hvp = [&](const Eigen::VectorXd& v) { return obj.hessian_vec(p, v); };
    lmin = min_eig_hvp(hvp, obj.dim()).first;
  } else {
    throw CapabilityError("check_sosp: objective exposes neither Hessian nor HVP");
  }
  return make_sosp_report(gn, lmin, rho, K);
}

std::pair<double, Eigen::VectorXd> min_eig(const Eigen::MatrixXd& H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("min_eig: matrix not square");
  const double scale = 1.0 + H.cwiseAbs().maxCoeff();
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw std::invalid_argument("min_eig: matrix is not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
  Eigen::VectorXd v = es.eigenvectors().col(0);
  v.normalize();
  return {es.eigenvalues()(0), v};
}

std::pair<double, Eigen::VectorXd> min_eig_hvp(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hvp,
    Eigen::Index dim, double tol, int max_iters) {
  if (dim < 1) throw std::invalid_argument("min_eig_hvp: empty matrix");
  Eigen::VectorXd v = normal_vector(0x5eedULL, dim).normalized();

  // Bound ||H|| with a short power iteration on H itself.
  double norm_h = 0.0;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd w = hvp(v);
    const double n = w.norm();
    if (n < 1e-300) return {0.0, Eigen::VectorXd::Unit(dim, 0)};
    norm_h = std::max(norm_h, n);
    v = w / n;
  }
  const double shift = 1.01 * norm_h + 1e-12;

  v = normal_vector(0x5eed2ULL, dim).normalized();
  double lambda = 0.0;
  for (int i = 0; i < max_iters; ++i) {
    Eigen::VectorXd w = shift * v - hvp(v);
    const double n = w.norm();
    if (n < 1e-300) break;  // v already an eigenvector of the shifted operator
    v = w / n;
    Eigen::VectorXd hv = hvp(v);
    lambda = v.dot(hv);
    if ((hv - lambda * v).norm() <= tol * (1.0 + norm_h)) return {lambda, v};
  }
  Eigen::VectorXd hv = hvp(v);
  lambda = v.dot(hv);
  if ((hv - lambda * v).norm() <= 1e-6 * (1.0 + norm_h)) return {lambda, v};
  throw PrecisionError("min_eig_hvp: power iteration did not converge");
}

Eigen::VectorXd fd_gradient(const SmoothObjective& obj, const ParamVector& p,
                            double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_gradient: step must be positive");
  Eigen::VectorXd g(p.dim());
  ParamVector q = p;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    const double saved = q.data()[i];
    q.data()[i] = saved + step;
    const double fp = obj.value(q);
    q.data()[i] = saved - step;
    const double fm = obj.value(q);
    q.data()[i] = saved;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const SmoothObjective& obj, const ParamVector& p,
                           double step) {
  if (!(step > 0)) throw std::invalid_argument("fd_hessian: step must be positive");
  const Eigen::Index n = p.dim();
  Eigen::MatrixXd H(n, n);
  ParamVector q = p;
  const double f0 = obj.value(q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double si = q.data()[i];
    q.data()[i] = si + step;
    const double fp = obj.value(q);
    q.data()[i] = si - step;
    const double fm = obj.value(q);
    q.data()[i] = si;
    H(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sj = q.data()[j];
      q.data()[i] = si + step;
      q.data()[j] = sj + step;
      const double fpp = obj.value(q);
      q.data()[j] = sj - step;
      const double fpm = obj.value(q);
      q.data()[i] = si - step;
      const double fmm = obj.value(q);
      q.data()[j] = sj + step;
      const double fmp = obj.value(q);
      q.data()[i] = si;
      q.data()[j] = sj;
      H(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

}  // namespace sospopt
