#include "sospopt/maxcut.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "sospopt/rng.hpp"
#include "sospopt/smoothing.hpp"

namespace sospopt::maxcut {

namespace {
constexpr std::uint64_t kDerandZTag = 0x3a8c'0001ull;
constexpr std::uint64_t kDerandEvalTag = 0x3a8c'0002ull;
constexpr std::uint64_t kDerandEpsTag = 0x3a8c'0003ull;
constexpr std::uint64_t kGWTag = 0x3a8c'0004ull;
}  // namespace

Graph::Graph(int n_vertices, std::vector<std::pair<int, int>> edge_list)
    : n(n_vertices), edges(std::move(edge_list)) {
  if (n < 1) throw std::invalid_argument("Graph: need at least one vertex");
  std::set<std::pair<int, int>> seen;
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("Graph: self-loop");
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n) throw std::invalid_argument("Graph: vertex index out of range");
    if (!seen.insert({i, j}).second)
      throw std::invalid_argument("Graph: duplicate edge");
  }
  std::sort(edges.begin(), edges.end());
}

std::vector<std::vector<int>> Graph::adjacency_lists() const {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges) {
    A(i, j) = 1.0;
    A(j, i) = 1.0;
  }
  return A;
}

Graph Graph::erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: n must be positive");
  if (p < 0 || p > 1) throw std::invalid_argument("erdos_renyi: p must be in [0,1]");
  std::mt19937_64 eng(splitmix64(seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(eng) < p) edges.emplace_back(i, j);
  return Graph(n, std::move(edges));
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("graph file: bad header: " + path);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (int e = 0; e < m; ++e) {
    int i = 0, j = 0;
    if (!(in >> i >> j))
      throw std::runtime_error("graph file: truncated edge list: " + path);
    edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

void Graph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open graph file: " + path);
  out << n << ' ' << edges.size() << '\n';
  for (const auto& [i, j] : edges) out << i << ' ' << j << '\n';
}

double cut_value(const Graph& g, const Eigen::VectorXi& x) {
  if (x.size() != g.n) throw std::invalid_argument("cut_value: wrong assignment length");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 1 && x[i] != -1)
      throw std::invalid_argument("cut_value: entries must be +-1");
  double cut = 0.0;
  for (const auto& [i, j] : g.edges) cut += (1 - x[i] * x[j]) * 0.5;
  return cut;
}

CutAssignment brute_force_maxcut(const Graph& g) {
  if (g.n > 24)
    throw CapabilityError("brute_force_maxcut: guarded to n <= 24 vertices");
  const auto adj = g.adjacency_lists();

  // Gray-code walk over the 2^(n-1) patterns with x_0 = +1; flipping one
  // vertex changes the cut by (same-side neighbors) - (cross neighbors).
  Eigen::VectorXi x = Eigen::VectorXi::Ones(g.n);
  double cut = 0.0;
  double best = 0.0;
  Eigen::VectorXi best_x = x;
  const std::uint64_t total = g.n > 1 ? (1ull << (g.n - 1)) : 1;
  for (std::uint64_t code = 1; code < total; ++code) {
    const int bit = __builtin_ctzll(code);
    const int v = bit + 1;  // vertex 0 stays fixed
    double delta = 0.0;
    for (int u : adj[v]) delta += (x[u] == x[v]) ? 1.0 : -1.0;
    x[v] = -x[v];
    cut += delta;
    if (cut > best) {
      best = cut;
      best_x = x;
    }
  }
  return {best_x, best};
}

void Embedding::validate() const {
  for (Eigen::Index i = 0; i < V.rows(); ++i)
    if (std::abs(V.row(i).norm() - 1.0) > 1e-8)
      throw std::invalid_argument("Embedding: row " + std::to_string(i) +
                                  " is not unit norm");
}

Embedding spectral_embedding(const Graph& g, int r) {
  if (r < 1 || r > g.n)
    throw std::invalid_argument("spectral_embedding: need 1 <= r <= n");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency_matrix());
  Eigen::MatrixXd V = es.eigenvectors().leftCols(r);  // ascending: most negative first
  for (int c = 0; c < r; ++c) {
    Eigen::Index argmax = 0;
    V.col(c).cwiseAbs().maxCoeff(&argmax);
    if (V(argmax, c) < 0) V.col(c) = -V.col(c);
  }
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    if (V.row(i).norm() < 1e-300) V(i, 0) += 1e-12;
    V.row(i).normalize();
  }
  Embedding emb{V};
  emb.validate();
  return emb;
}

double sdp_objective(const Graph& g, const Eigen::MatrixXd& V) {
  double obj = 0.0;
  for (const auto& [i, j] : g.edges) obj += 0.5 * (1.0 - V.row(i).dot(V.row(j)));
  return obj;
}

Embedding sdp_embedding(const Graph& g, int r, int iters) {
  Embedding emb = spectral_embedding(g, r);
  Eigen::MatrixXd V = emb.V;
  const auto adj = g.adjacency_lists();
  size_t max_degree = 1;
  for (const auto& nbrs : adj) max_degree = std::max(max_degree, nbrs.size());
  const double step = 1.0 / (2.0 * static_cast<double>(max_degree));

  Eigen::MatrixXd best_V = V;
  double best_obj = sdp_objective(g, V);
  for (int t = 0; t < iters; ++t) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(g.n, r);
    for (int i = 0; i < g.n; ++i)
      for (int u : adj[i]) grad.row(i) -= 0.5 * V.row(u);
    V += step * grad;
    for (int i = 0; i < g.n; ++i) {
      const double norm = V.row(i).norm();
      if (norm < 1e-300) V(i, 0) = 1.0;
      else V.row(i) /= norm;
    }
    if (!V.allFinite()) throw NumericError("sdp_embedding: non-finite iterate");
    const double obj = sdp_objective(g, V);
    if (obj > best_obj) {
      best_obj = obj;
      best_V = V;
    }
  }
  Embedding out{best_V};
  out.validate();
  return out;
}

GWRoundResult gw_randomized_round(const Embedding& emb, const Graph& g, int trials,
                                  std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("gw_randomized_round: trials >= 1");
  emb.validate();
  if (emb.V.rows() != g.n)
    throw std::invalid_argument("gw_randomized_round: embedding/graph size mismatch");
  GWRoundResult out;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd z =
        normal_vector(mix_seed(seed, kGWTag, static_cast<std::uint64_t>(t)),
                      emb.V.cols());
    const Eigen::VectorXd proj = emb.V * z;
    Eigen::VectorXi x(g.n);
    for (int i = 0; i < g.n; ++i) x[i] = proj[i] < 0 ? -1 : 1;
    const double cut = cut_value(g, x);
    sum += cut;
    sumsq += cut * cut;
    if (t == 0 || cut > out.best_cut) {
      out.best_cut = cut;
      out.best_x = x;
    }
  }
  out.mean_cut = sum / trials;
  if (trials > 1) {
    const double var =
        std::max(0.0, (sumsq - trials * out.mean_cut * out.mean_cut) / (trials - 1.0));
    out.se_mean = std::sqrt(var / trials);
  }
  return out;
}

DerandResult derandomize_round(const Embedding& emb, const Graph& g,
                               const DerandConfig& cfg) {
  emb.validate();
  if (emb.V.rows() != g.n)
    throw std::invalid_argument("derandomize_round: embedding/graph size mismatch");
  if (cfg.mc_samples < 1 || cfg.iters < 1)
    throw std::invalid_argument("derandomize_round: bad budget");
  if (!(cfg.scale_floor > 0) || !(cfg.scale_cap >= cfg.scale_floor))
    throw std::invalid_argument("derandomize_round: bad scale clip range");

  const Eigen::MatrixXd& V = emb.V;
  const int n = g.n;
  const Eigen::Index r = V.cols();

  DerandResult res;

  // Smoothing width: fraction of the typical margin magnitude at init.
  double eps = cfg.eps;
  if (eps <= 0) {
    std::vector<double> margins;
    margins.reserve(16 * n);
    for (int t = 0; t < 16; ++t) {
      Eigen::VectorXd z = normal_vector(
          mix_seed(cfg.seed, kDerandEpsTag, static_cast<std::uint64_t>(t)), r);
      if (cfg.negate_samples) z = -z;
      const Eigen::VectorXd proj = V * z;
      for (int i = 0; i < n; ++i) margins.push_back(std::abs(proj[i]));
    }
    auto mid = margins.begin() + margins.size() / 2;
    std::nth_element(margins.begin(), mid, margins.end());
    eps = 0.05 * *mid;
    if (!(eps > 0)) eps = 0.05;
  }
  res.eps_used = eps;
  res.rho_used = cfg.rho > 0 ? cfg.rho : 8.0 * eps * eps * eps;
  res.lambda_used = 0.5 * (std::sqrt(res.rho_used / (eps * eps * eps)) + cfg.delta);

  const StepSmoothing step(eps);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  res.trajectory.reserve(cfg.iters);

  double lr_m = cfg.lr_mean;
  double lr_s = cfg.lr_sigma;
  for (int t = 0; t < cfg.iters; ++t) {
    if (t > 0 && cfg.decay_every > 0 && t % cfg.decay_every == 0) {
      lr_m *= cfg.lr_decay;
      lr_s *= cfg.lr_decay;
    }

    Eigen::VectorXd gmu = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd gscale = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < cfg.mc_samples; ++s) {
      Eigen::VectorXd z = normal_vector(
          mix_seed(mix_seed(cfg.seed, kDerandZTag, static_cast<std::uint64_t>(t)),
                   static_cast<std::uint64_t>(s)),
          r);
      if (cfg.negate_samples) z = -z;
      const Eigen::VectorXd proj = V * z;
      const Eigen::VectorXd m = scale.cwiseProduct(proj) + mu;
      for (const auto& [i, j] : g.edges) {
        const double dx = step.disagree_dx(m[i], m[j]);
        const double dy = step.disagree_dy(m[i], m[j]);
        gmu[i] -= dx;  // descending the negative expected cut
        gmu[j] -= dy;
        gscale[i] -= dx * proj[i];
        gscale[j] -= dy * proj[j];
      }
    }
    gmu /= cfg.mc_samples;
    gscale /= cfg.mc_samples;
    gscale += 2.0 * res.lambda_used * scale;

    mu -= lr_m * gmu;
    scale -= lr_s * gscale;
    scale = scale.cwiseMax(cfg.scale_floor).cwiseMin(cfg.scale_cap);
    if (!mu.allFinite() || !scale.allFinite()) {
      std::ostringstream oss;
      oss << "derandomize_round: non-finite state at iteration " << t;
      throw NumericError(oss.str());
    }

    Eigen::VectorXd z_eval = normal_vector(
        mix_seed(cfg.seed, kDerandEvalTag, static_cast<std::uint64_t>(t)), r);
    if (cfg.negate_samples) z_eval = -z_eval;
    const Eigen::VectorXd m_eval = scale.cwiseProduct(V * z_eval) + mu;
    Eigen::VectorXi x(n);
    for (int i = 0; i < n; ++i) x[i] = m_eval[i] < 0 ? -1 : 1;
    res.trajectory.push_back({t, cut_value(g, x), scale.maxCoeff()});
  }

  res.mu = mu;
  Eigen::VectorXi x(n);
  for (int i = 0; i < n; ++i) x[i] = mu[i] < 0 ? -1 : 1;
  res.assignment = {x, cut_value(g, x)};
  return res;
}

void write_derand_csv(const std::string& path, const std::vector<DerandPoint>& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
  out << "iter,sampled_cut,max_scale\n";
  out << std::setprecision(17);
  for (const auto& pt : traj)
    out << pt.iter << ',' << pt.sampled_cut << ',' << pt.max_scale << '\n';
}

}  // namespace sospopt::maxcut
