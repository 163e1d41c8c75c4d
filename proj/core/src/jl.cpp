#include "sospopt/jl.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "sospopt/optim.hpp"
#include "sospopt/rng.hpp"

namespace sospopt::jl {

namespace {
constexpr std::uint64_t kBaselineTag = 0x11aa'0001ull;
constexpr std::uint64_t kLearnZTag = 0x11aa'0002ull;
constexpr std::uint64_t kLearnEvalTag = 0x11aa'0003ull;
constexpr std::uint64_t kLearnBatchTag = 0x11aa'0004ull;

inline double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
}  // namespace

JLDataset JLDataset::from_matrix(Eigen::MatrixXd rows) {
  if (rows.rows() < 1 || rows.cols() < 1)
    throw std::invalid_argument("JLDataset: empty matrix");
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm < 1e-12)
      throw std::invalid_argument("JLDataset: zero row " + std::to_string(i) +
                                  " cannot be normalized");
    rows.row(i) /= norm;
  }
  return JLDataset{std::move(rows)};
}

JLDataset JLDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream iss(line);
    std::vector<double> row;
    double v = 0.0;
    while (iss >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("dataset file: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset file: no rows in " + path);
  Eigen::MatrixXd X(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      X(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return from_matrix(std::move(X));
}

JLDataset JLDataset::random_unit(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("JLDataset: n, d must be positive");
  return from_matrix(normal_matrix(seed, n, d));
}

void save_matrix(const std::string& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open matrix file: " + path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << M(i, j);
    }
    out << '\n';
  }
}

double distortion(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) {
  if (A.cols() != x.size())
    throw std::invalid_argument("distortion: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("distortion: x must be unit norm");
  const double k = static_cast<double>(A.rows());
  return std::abs((A * x).squaredNorm() / k - 1.0);
}

DistortionReport distortion_report(const Eigen::MatrixXd& A, const JLDataset& ds) {
  DistortionReport rep;
  rep.per_point.resize(ds.size());
  const double k = static_cast<double>(A.rows());
  const Eigen::MatrixXd proj = ds.X * A.transpose();  // n x k
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    rep.per_point[i] = std::abs(proj.row(i).squaredNorm() / k - 1.0);
  rep.max = rep.per_point.maxCoeff();
  return rep;
}

BaselineResult random_gaussian_baseline(const JLDataset& ds, int k, int trials,
                                        std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_gaussian_baseline: k must be positive");
  if (trials < 1)
    throw std::invalid_argument("random_gaussian_baseline: trials must be positive");
  double sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd A =
        normal_matrix(mix_seed(seed, kBaselineTag, static_cast<std::uint64_t>(t)), k,
                      ds.dim());
    const double maxdist = distortion_report(A, ds).max;
    sum += maxdist;
    best = std::min(best, maxdist);
  }
  return {sum / trials, best};
}

ProjDistribution::ProjDistribution(Eigen::MatrixXd M_, Eigen::MatrixXd sigma_)
    : M(std::move(M_)), sigma(std::move(sigma_)) {
  if (M.rows() != sigma.rows() || M.cols() != sigma.cols())
    throw std::invalid_argument("ProjDistribution: M/sigma shape mismatch");
  if ((sigma.array() < 0).any())
    throw std::invalid_argument("ProjDistribution: sigma must be nonnegative");
}

ProjDistribution ProjDistribution::theorem_init(Eigen::Index k, Eigen::Index d) {
  return ProjDistribution(Eigen::MatrixXd::Zero(k, d), Eigen::MatrixXd::Ones(k, d));
}

GaussianReparam ProjDistribution::reparam() const {
  const Eigen::Index k = M.rows(), d = M.cols();
  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(M.data(), k * d);
  Eigen::VectorXd sd = Eigen::Map<const Eigen::VectorXd>(sigma.data(), k * d);
  return GaussianReparam(std::move(mean), std::move(sd), k, d);
}

Eigen::MatrixXd ProjDistribution::sample(std::uint64_t seed, int index) const {
  const Eigen::VectorXd z = mc_sample_z(seed, index, M.size());
  return M + sigma.cwiseProduct(
                 Eigen::Map<const Eigen::MatrixXd>(z.data(), M.rows(), M.cols()));
}

// ---------------------------------------------------------------------------
// JLObjective

JLObjective::JLObjective(const JLDataset& ds, Eigen::Index k, double eps, double eps1,
                         double lambda_scale, MCConfig mc)
    : X_(ds.X), k_(k), d_(ds.dim()), ind_(eps, eps1), lambda_scale_(lambda_scale),
      mc_(mc) {
  if (k_ < 1) throw std::invalid_argument("JLObjective: k must be positive");
  if (lambda_scale_ < 0) throw std::invalid_argument("JLObjective: lambda_scale < 0");
}

ParamVector JLObjective::make_params(const ProjDistribution& pd) const {
  if (pd.M.rows() != k_ || pd.M.cols() != d_)
    throw std::invalid_argument("JLObjective: distribution shape mismatch");
  ParamVector p({{"sigma", k_, d_}, {"M", k_, d_}});
  p.set_matrix("sigma", pd.sigma);
  p.set_matrix("M", pd.M);
  return p;
}

ProjDistribution JLObjective::to_distribution(const ParamVector& p) const {
  return ProjDistribution(p.matrix("M"), p.matrix("sigma").cwiseAbs());
}

std::pair<double, double> JLObjective::value_terms(const ParamVector& p) const {
  const Eigen::MatrixXd sigma_eff = p.matrix("sigma").cwiseAbs();
  const Eigen::MatrixXd M = p.matrix("M");
  const Eigen::Index n = X_.rows();
  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc_.seed, s, k_ * d_);
    const Eigen::MatrixXd A =
        M + sigma_eff.cwiseProduct(Eigen::Map<const Eigen::MatrixXd>(z.data(), k_, d_));
    double acc = 0.0;
    const Eigen::MatrixXd proj = X_ * A.transpose();  // n x k
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = std::abs(proj.row(i).squaredNorm() / k_ - 1.0);
      acc += ind_.value(t);
    }
    if (!std::isfinite(acc)) {
      std::ostringstream oss;
      oss << "jl_objective: non-finite sample at index " << s;
      throw NumericError(oss.str());
    }
    out[0] = acc;
  };
  const MCMoments m = mc_accumulate(mc_, 1, fill);
  const double reg =
      lambda_scale_ * sigma_eff.squaredNorm() / (2.0 * k_ * d_);
  return {m.mean[0], reg};
}

double JLObjective::value(const ParamVector& p) const {
  const auto [ind, reg] = value_terms(p);
  return ind + reg;
}

Eigen::VectorXd JLObjective::gradient(const ParamVector& p) const {
  const Eigen::MatrixXd sigma_param = p.matrix("sigma");
  const Eigen::MatrixXd sigma_eff = sigma_param.cwiseAbs();
  const Eigen::MatrixXd M = p.matrix("M");
  const Eigen::Index n = X_.rows();
  const Eigen::Index kd = k_ * d_;

  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc_.seed, s, kd);
    const Eigen::Map<const Eigen::MatrixXd> Z(z.data(), k_, d_);
    const Eigen::MatrixXd A = M + sigma_eff.cwiseProduct(Z);
    Eigen::MatrixXd gA = Eigen::MatrixXd::Zero(k_, d_);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd v = A * X_.row(i).transpose();
      const double q = v.squaredNorm() / k_ - 1.0;
      const double w = ind_.d1(std::abs(q));
      if (w == 0.0) continue;
      gA += (w * sign_of(q) * 2.0 / k_) * (v * X_.row(i));
    }
    if (!gA.allFinite()) {
      std::ostringstream oss;
      oss << "jl_objective gradient: non-finite sample at index " << s;
      throw NumericError(oss.str());
    }
    Eigen::Map<Eigen::MatrixXd>(out.data(), k_, d_) = gA.cwiseProduct(Z);  // d/d sigma_eff
    Eigen::Map<Eigen::MatrixXd>(out.data() + kd, k_, d_) = gA;             // d/d M
  };
  const MCMoments m = mc_accumulate(mc_, 2 * kd, fill);

  ParamVector grad = p;
  grad.data() = m.mean;
  // Regularizer and the |.| reparameterization of sigma.
  Eigen::Map<Eigen::MatrixXd> gsig(grad.data().data(), k_, d_);
  gsig += (lambda_scale_ / (k_ * d_)) * sigma_eff;
  gsig = gsig.cwiseProduct(sigma_param.unaryExpr([](double v) { return sign_of(v); }));
  return grad.data();
}

// ---------------------------------------------------------------------------
// learn_projection

namespace {

double sampled_max_distortion(const Eigen::MatrixXd& M, const Eigen::MatrixXd& sigma_eff,
                              const Eigen::MatrixXd& X, std::uint64_t seed, int iter) {
  const Eigen::Index k = M.rows(), d = M.cols();
  const Eigen::VectorXd z =
      normal_vector(mix_seed(seed, kLearnEvalTag, static_cast<std::uint64_t>(iter)),
                    k * d);
  const Eigen::MatrixXd A =
      M + sigma_eff.cwiseProduct(Eigen::Map<const Eigen::MatrixXd>(z.data(), k, d));
  const Eigen::MatrixXd proj = X * A.transpose();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    worst = std::max(worst, std::abs(proj.row(i).squaredNorm() / k - 1.0));
  return worst;
}

}  // namespace

JLLearnResult learn_projection(const JLDataset& ds, int k, const JLLearnConfig& cfg) {
  if (k < 1) throw std::invalid_argument("learn_projection: k must be positive");
  if (cfg.batch < 1 || cfg.iters < 1 || cfg.mc_samples < 1)
    throw std::invalid_argument("learn_projection: bad budget");
  if (!(cfg.lr > 0)) throw std::invalid_argument("learn_projection: lr must be positive");

  const Eigen::Index n = ds.size(), d = ds.dim(), kd = k * d;
  const JLIndicatorSmoothing ind(cfg.eps, cfg.eps1);

  JLLearnResult res;
  res.trajectory.reserve(cfg.iters);

  if (cfg.use_pgd) {
    // Theorem-faithful variant: full-batch PGD on the surrogate with the
    // regularizer scaled to lambda = (sqrt(rho/eps1^3) + delta)/2.
    const double lambda =
        0.5 * (std::sqrt(cfg.pgd_rho / (cfg.eps1 * cfg.eps1 * cfg.eps1)) + cfg.pgd_delta);
    MCConfig mc{cfg.mc_samples, cfg.seed, 1024};
    JLObjective obj(ds, k, cfg.eps, cfg.eps1, lambda * 2.0 * kd, mc);
    ParamVector p = obj.make_params(ProjDistribution::theorem_init(k, d));
    PGDConfig pgd;
    pgd.eta = cfg.lr;
    pgd.T = 1;
    pgd.perturb_threshold = 1e-12;
    pgd.perturb_scale = cfg.pgd_perturb_scale;
    pgd.seed = cfg.seed;
    for (int t = 0; t < cfg.iters; ++t) {
      Eigen::VectorXd g = obj.gradient(p);
      if (!g.allFinite()) throw NumericError("learn_projection: non-finite gradient");
      p.data() -= cfg.lr * g;
      const Eigen::MatrixXd sig_eff = Eigen::MatrixXd(p.matrix("sigma")).cwiseAbs();
      const Eigen::MatrixXd M = p.matrix("M");
      JLTrajPoint pt;
      pt.iter = t;
      pt.distortion = sampled_max_distortion(M, sig_eff, ds.X, cfg.seed, t);
      pt.max_sigma2 = sig_eff.maxCoeff() * sig_eff.maxCoeff();
      if (cfg.log_value_every > 0 && t % cfg.log_value_every == 0)
        pt.value = obj.value(p);
      res.trajectory.push_back(pt);
      res.iters_run = t + 1;
      if (pt.distortion < cfg.early_stop) {
        res.early_stopped = true;
        break;
      }
    }
    res.M = p.matrix("M");
    res.sigma = Eigen::MatrixXd(p.matrix("sigma")).cwiseAbs();
    return res;
  }

  MCConfig value_mc{cfg.mc_samples, cfg.seed, 1024};
  JLObjective value_obj(ds, k, cfg.eps, cfg.eps1, cfg.lambda_scale, value_mc);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, d);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Ones(k, d);  // free-signed, |.| effective

  // Adam state over (sigma, M) flattened.
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(2 * kd);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(2 * kd);
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int t = 0; t < cfg.iters; ++t) {
    // Deterministic minibatch: shuffle indices with an iteration-keyed engine.
    std::mt19937_64 eng(mix_seed(cfg.seed, kLearnBatchTag, static_cast<std::uint64_t>(t)));
    std::shuffle(order.begin(), order.end(), eng);
    const int bsize = std::min<int>(cfg.batch, static_cast<int>(n));
    const double point_scale = static_cast<double>(n) / bsize;

    const Eigen::MatrixXd sigma_eff = sigma.cwiseAbs();
    Eigen::MatrixXd gM = Eigen::MatrixXd::Zero(k, d);
    Eigen::MatrixXd gSig = Eigen::MatrixXd::Zero(k, d);
    for (int s = 0; s < cfg.mc_samples; ++s) {
      const Eigen::VectorXd z = normal_vector(
          mix_seed(mix_seed(cfg.seed, kLearnZTag, static_cast<std::uint64_t>(t)),
                   static_cast<std::uint64_t>(s)),
          kd);
      const Eigen::Map<const Eigen::MatrixXd> Z(z.data(), k, d);
      const Eigen::MatrixXd A = M + sigma_eff.cwiseProduct(Z);
      Eigen::MatrixXd gA = Eigen::MatrixXd::Zero(k, d);
      for (int bi = 0; bi < bsize; ++bi) {
        const int i = order[static_cast<size_t>(bi)];
        const Eigen::VectorXd v = A * ds.X.row(i).transpose();
        const double q = v.squaredNorm() / k - 1.0;
        const double w = ind.d1(std::abs(q));
        if (w == 0.0) continue;
        gA += (point_scale * w * sign_of(q) * 2.0 / k) * (v * ds.X.row(i));
      }
      gM += gA;
      gSig += gA.cwiseProduct(Z);
    }
    gM /= cfg.mc_samples;
    gSig /= cfg.mc_samples;
    gSig += (cfg.lambda_scale / kd) * sigma_eff;
    gSig = gSig.cwiseProduct(sigma.unaryExpr([](double v) { return sign_of(v); }));
    if (!gM.allFinite() || !gSig.allFinite()) {
      std::ostringstream oss;
      oss << "learn_projection: non-finite gradient at iteration " << t;
      throw NumericError(oss.str());
    }

    Eigen::VectorXd g(2 * kd);
    Eigen::Map<Eigen::MatrixXd>(g.data(), k, d) = gSig;
    Eigen::Map<Eigen::MatrixXd>(g.data() + kd, k, d) = gM;
    m1 = beta1 * m1 + (1.0 - beta1) * g;
    m2 = beta2 * m2 + (1.0 - beta2) * g.cwiseAbs2();
    const double bc1 = 1.0 - std::pow(beta1, t + 1);
    const double bc2 = 1.0 - std::pow(beta2, t + 1);
    const Eigen::VectorXd update =
        (m1 / bc1).cwiseQuotient(((m2 / bc2).cwiseSqrt().array() + adam_eps).matrix());
    sigma -= cfg.lr * Eigen::Map<const Eigen::MatrixXd>(update.data(), k, d);
    M -= cfg.lr * Eigen::Map<const Eigen::MatrixXd>(update.data() + kd, k, d);

    const Eigen::MatrixXd sig_now = sigma.cwiseAbs();
    JLTrajPoint pt;
    pt.iter = t;
    pt.distortion = sampled_max_distortion(M, sig_now, ds.X, cfg.seed, t);
    pt.max_sigma2 = sig_now.maxCoeff() * sig_now.maxCoeff();
    if (cfg.log_value_every > 0 && t % cfg.log_value_every == 0) {
      ParamVector p({{"sigma", k, d}, {"M", k, d}});
      p.set_matrix("sigma", sigma);
      p.set_matrix("M", M);
      pt.value = value_obj.value(p);
    }
    res.trajectory.push_back(pt);
    res.iters_run = t + 1;
    if (pt.distortion < cfg.early_stop) {
      res.early_stopped = true;
      break;
    }
  }

  res.M = M;
  res.sigma = sigma.cwiseAbs();
  return res;
}

ExtractResult extract_deterministic(const ProjDistribution& pd, double eps) {
  if (eps < 0) throw std::invalid_argument("extract_deterministic: eps < 0");
  const double smax = pd.sigma_max();
  const double k = static_cast<double>(pd.M.rows());
  ExtractResult out;
  out.M = pd.M;
  out.upper_excess =
      2.0 * std::sqrt(2.0) * smax / k * std::sqrt(1.0 + eps) + 2.0 * smax * smax;
  out.lower_additive = smax * smax;
  out.lower_multiplicative = 0.5;
  return out;
}

GuaranteeCheck jl_guarantee_check(const Eigen::MatrixXd& M, const JLDataset& ds,
                                  double eps) {
  GuaranteeCheck out;
  out.report = distortion_report(M, ds);
  out.ok = out.report.max <= eps;
  return out;
}

void write_jl_csv(const std::string& path, const std::vector<JLTrajPoint>& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
  out << "iter,distortion,max_sigma2\n";
  out << std::setprecision(17);
  for (const auto& pt : traj)
    out << pt.iter << ',' << pt.distortion << ',' << pt.max_sigma2 << '\n';
}

}  // namespace sospopt::jl
