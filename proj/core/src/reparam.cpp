#include "sospopt/reparam.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "sospopt/rng.hpp"

namespace sospopt {

namespace {

constexpr std::uint64_t kZStreamTag = 0x7a5f'5ee4'0001ull;

void validate_mc(const MCConfig& mc) {
  if (mc.samples < 1) throw std::invalid_argument("MCConfig: samples must be >= 1");
  if (mc.chunk < 1) throw std::invalid_argument("MCConfig: chunk must be >= 1");
}

}  // namespace

Eigen::VectorXd mc_sample_z(std::uint64_t seed, int index, Eigen::Index dim) {
  return normal_vector(mix_seed(seed, kZStreamTag, static_cast<std::uint64_t>(index)),
                       dim);
}

MCMoments mc_accumulate(
    const MCConfig& mc, Eigen::Index size,
    const std::function<void(int, Eigen::Ref<Eigen::VectorXd>)>& fill) {
  validate_mc(mc);
  const int S = mc.samples;
  Eigen::MatrixXd buffer(size, S);

  const int tasks = (S + mc.chunk - 1) / mc.chunk;
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks));

  if (workers <= 1) {
    for (int s = 0; s < S; ++s) fill(s, buffer.col(s));
  } else {
    std::atomic<int> next_task{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&]() {
      try {
        for (;;) {
          const int task = next_task.fetch_add(1);
          if (task >= tasks) return;
          const int begin = task * mc.chunk;
          const int end = std::min(S, begin + mc.chunk);
          for (int s = begin; s < end; ++s) fill(s, buffer.col(s));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Reduce strictly in sample order so results do not depend on chunking.
  MCMoments out;
  out.samples = S;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(size);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(size);
  for (int s = 0; s < S; ++s) {
    sum += buffer.col(s);
    sumsq += buffer.col(s).cwiseAbs2();
  }
  out.mean = sum / S;
  if (S > 1) {
    Eigen::VectorXd var =
        (sumsq - S * out.mean.cwiseAbs2()).cwiseMax(0.0) / (S - 1.0);
    out.se = (var / S).cwiseSqrt();
  } else {
    out.se = Eigen::VectorXd::Zero(size);
  }
  return out;
}

McScalar mc_value(const SmoothFunction& g, const Eigen::MatrixXd& W,
                  const Eigen::VectorXd& b, const MCConfig& mc) {
  if (W.rows() != g.arity() || b.size() != g.arity())
    throw std::invalid_argument("mc_value: shape mismatch with g arity");
  const Eigen::Index d = W.cols();
  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc.seed, s, d);
    const double v = g.value(W * z + b);
    if (!std::isfinite(v)) {
      std::ostringstream oss;
      oss << "mc_value: non-finite sample at index " << s;
      throw NumericError(oss.str());
    }
    out[0] = v;
  };
  const MCMoments m = mc_accumulate(mc, 1, fill);
  return {m.mean[0], m.se[0], m.samples};
}

McGradient mc_gradient(const SmoothFunction& g, const Eigen::MatrixXd& W,
                       const Eigen::VectorXd& b, const MCConfig& mc) {
  if (!g.has_gradient())
    throw CapabilityError("mc_gradient: g does not expose a gradient");
  if (W.rows() != g.arity() || b.size() != g.arity())
    throw std::invalid_argument("mc_gradient: shape mismatch with g arity");
  const Eigen::Index k = W.rows();
  const Eigen::Index d = W.cols();
  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc.seed, s, d);
    const Eigen::VectorXd grad = g.gradient(W * z + b);
    if (!grad.allFinite()) {
      std::ostringstream oss;
      oss << "mc_gradient: non-finite sample at index " << s;
      throw NumericError(oss.str());
    }
    Eigen::Map<Eigen::MatrixXd>(out.data(), k, d) = grad * z.transpose();
    out.tail(k) = grad;
  };
  const MCMoments m = mc_accumulate(mc, k * d + k, fill);
  McGradient out;
  out.dW = Eigen::Map<const Eigen::MatrixXd>(m.mean.data(), k, d);
  out.db = m.mean.tail(k);
  out.se_dW = m.se.head(k * d).norm();
  out.se_db = m.se.tail(k).norm();
  out.samples = m.samples;
  return out;
}

SteinResult stein_residual(const SmoothFunction& g, const Eigen::MatrixXd& W,
                           const Eigen::VectorXd& b, const MCConfig& mc) {
  if (!g.has_gradient() || !g.has_hessian())
    throw CapabilityError("stein_residual: g needs gradient and Hessian");
  if (W.rows() != g.arity() || b.size() != g.arity())
    throw std::invalid_argument("stein_residual: shape mismatch with g arity");
  const Eigen::Index k = W.rows();
  const Eigen::Index d = W.cols();
  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc.seed, s, d);
    const Eigen::VectorXd u = W * z + b;
    const Eigen::VectorXd grad = g.gradient(u);
    const Eigen::MatrixXd hess = g.hessian(u);
    if (!grad.allFinite() || !hess.allFinite()) {
      std::ostringstream oss;
      oss << "stein_residual: non-finite sample at index " << s;
      throw NumericError(oss.str());
    }
    Eigen::Map<Eigen::MatrixXd>(out.data(), k, d) =
        grad * z.transpose() - hess * W;
  };
  const MCMoments m = mc_accumulate(mc, k * d, fill);
  return {m.mean.norm(), m.se.norm(), m.samples};
}

double lambda_for_slack(double rho, double K, double Delta) {
  if (!(rho > 0) || K < 0 || !(Delta > 0))
    throw std::invalid_argument("lambda_for_slack: need rho > 0, K >= 0, Delta > 0");
  return 0.5 * (std::sqrt(K * rho) + Delta);
}

double sosp_w_bound(const SOSPBoundInput& inp) {
  if (!(inp.rho > 0)) throw std::invalid_argument("sosp_w_bound: rho must be positive");
  if (inp.K < 0) throw std::invalid_argument("sosp_w_bound: K must be nonnegative");
  const double root = std::sqrt(inp.K * inp.rho);
  if (!(inp.lambda > 0.5 * root))
    throw std::invalid_argument("sosp_w_bound: bound undefined for lambda <= sqrt(K*rho)/2");
  return inp.rho / (2.0 * inp.lambda - root);
}

GaussianReparam::GaussianReparam(Eigen::VectorXd mean_, Eigen::VectorXd sigma_,
                                 Eigen::Index k_, Eigen::Index d_)
    : mean(std::move(mean_)), sigma(std::move(sigma_)), k(k_), d(d_) {
  if (mean.size() != k * d || sigma.size() != k * d)
    throw std::invalid_argument("GaussianReparam: mean/sigma must have k*d entries");
  if ((sigma.array() < 0).any())
    throw std::invalid_argument("GaussianReparam: sigma entries must be nonnegative");
}

Eigen::MatrixXd GaussianReparam::sample(std::uint64_t seed, int index) const {
  const Eigen::VectorXd z = mc_sample_z(seed, index, k * d);
  Eigen::VectorXd flat = mean + sigma.cwiseProduct(z);
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), k, d);
}

ReparamRiskObjective::ReparamRiskObjective(std::shared_ptr<const SmoothFunction> g,
                                           Eigen::Index d, double lambda, MCConfig mc)
    : g_(std::move(g)), d_(d), lambda_(lambda), mc_(mc) {
  if (!g_) throw std::invalid_argument("ReparamRiskObjective: null function");
  if (d_ < 1) throw std::invalid_argument("ReparamRiskObjective: d must be positive");
  if (lambda_ < 0) throw std::invalid_argument("ReparamRiskObjective: lambda < 0");
  validate_mc(mc_);
  k_ = g_->arity();
}

ParamVector ReparamRiskObjective::make_params() const {
  return ParamVector({{"W", k_, d_}, {"b", k_, 1}});
}

double ReparamRiskObjective::value(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const McScalar v = mc_value(*g_, W, b, mc_);
  return v.value + lambda_ * W.squaredNorm();
}

Eigen::VectorXd ReparamRiskObjective::gradient(const ParamVector& p) const {
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const McGradient g = mc_gradient(*g_, W, b, mc_);
  Eigen::VectorXd out(dim());
  Eigen::Map<Eigen::MatrixXd>(out.data(), k_, d_) = g.dW + 2.0 * lambda_ * W;
  out.tail(k_) = g.db;
  return out;
}

bool ReparamRiskObjective::has_hessian() const { return g_->has_hessian(); }

Eigen::MatrixXd ReparamRiskObjective::hessian(const ParamVector& p) const {
  if (!g_->has_hessian())
    throw CapabilityError("ReparamRiskObjective: inner function has no Hessian");
  const Eigen::MatrixXd W = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  const Eigen::Index D = dim();
  auto fill = [&](int s, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd z = mc_sample_z(mc_.seed, s, d_);
    const Eigen::MatrixXd G = g_->hessian(W * z + b);
    if (!G.allFinite()) {
      std::ostringstream oss;
      oss << "ReparamRiskObjective: non-finite Hessian sample at index " << s;
      throw NumericError(oss.str());
    }
    // u_i = sum_c W(i,c) z_c + b_i: the Jacobian row for u_i touches W row i
    // and b_i only.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k_, D);
    for (Eigen::Index i = 0; i < k_; ++i) {
      for (Eigen::Index c = 0; c < d_; ++c) J(i, c * k_ + i) = z[c];
      J(i, k_ * d_ + i) = 1.0;
    }
    Eigen::Map<Eigen::MatrixXd>(out.data(), D, D) = J.transpose() * G * J;
  };
  const MCMoments m = mc_accumulate(mc_, D * D, fill);
  Eigen::MatrixXd H = Eigen::Map<const Eigen::MatrixXd>(m.mean.data(), D, D);
  for (Eigen::Index i = 0; i < k_ * d_; ++i) H(i, i) += 2.0 * lambda_;
  return 0.5 * (H + H.transpose());
}

ReparamRiskObjective ReparamRiskObjective::with_samples(int samples) const {
  ReparamRiskObjective copy = *this;
  copy.mc_.samples = samples;
  return copy;
}

}  // namespace sospopt
