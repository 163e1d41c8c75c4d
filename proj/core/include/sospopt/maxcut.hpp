#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sospopt/errors.hpp"

namespace sospopt::maxcut {

/// Simple undirected unit-weight graph. Edges are stored with i < j; no
/// self-loops or duplicates.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  Graph() = default;
  Graph(int n_vertices, std::vector<std::pair<int, int>> edge_list);

  int num_edges() const { return static_cast<int>(edges.size()); }
  std::vector<std::vector<int>> adjacency_lists() const;
  Eigen::MatrixXd adjacency_matrix() const;

  static Graph erdos_renyi(int n, double p, std::uint64_t seed);
  /// Plain text: first line `n m`, then m lines `i j` (0-indexed).
  static Graph load(const std::string& path);
  void save(const std::string& path) const;
};

struct CutAssignment {
  Eigen::VectorXi x;  // entries +-1
  double value = 0.0;
};

/// Exact cut value sum_{(i,j) in E} (1 - x_i x_j)/2.
double cut_value(const Graph& g, const Eigen::VectorXi& x);

/// Exhaustive maximum over sign patterns with x_0 fixed to +1. Guarded to
/// n <= 24.
CutAssignment brute_force_maxcut(const Graph& g);

/// Unit-row vertex embedding.
struct Embedding {
  Eigen::MatrixXd V;  // n x r, rows unit norm

  void validate() const;
};

/// Embedding from the cut-relevant end of the adjacency spectrum (the r most
/// negative eigenvalues; minimizing x'Ax is maximizing the cut), rows
/// renormalized. Eigenvector signs are fixed by making the
/// largest-magnitude entry positive. A zero row is perturbed by 1e-12*e1
/// before normalization.
Embedding spectral_embedding(const Graph& g, int r);

double sdp_objective(const Graph& g, const Eigen::MatrixXd& V);

/// Low-rank factorized SDP relaxation solved by projected gradient ascent on
/// unit rows, warm-started from the spectral embedding; returns the best
/// iterate, so its objective is at least the spectral one.
Embedding sdp_embedding(const Graph& g, int r, int iters = 2000);

struct GWRoundResult {
  double best_cut = 0.0;
  double mean_cut = 0.0;
  double se_mean = 0.0;
  Eigen::VectorXi best_x;
};

/// Classical randomized hyperplane rounding: per trial draw z ~ N(0, I_r)
/// and assign x_i = sign(v_i . z), zeros rounding to +1.
GWRoundResult gw_randomized_round(const Embedding& emb, const Graph& g, int trials,
                                  std::uint64_t seed);

struct DerandConfig {
  int mc_samples = 100;
  double lr_mean = 0.01;
  double lr_sigma = 0.001;
  double scale_floor = 1e-3;
  double scale_cap = 1.5;
  double lr_decay = 0.98;  // applied every decay_every iterations
  int decay_every = 100;
  int iters = 5000;
  double eps = 0.0;    // smoothing width; 0 = 0.05 * median |v_i . z| at init
  double rho = 0.0;    // SOSP accuracy driving lambda; 0 = 8 * eps^3
  double delta = 0.05;
  std::uint64_t seed = 0;
  bool negate_samples = false;  // mirrors the whole z stream
};

struct DerandPoint {
  int iter = 0;
  double sampled_cut = 0.0;
  double max_scale = 0.0;
};

struct DerandResult {
  Eigen::VectorXd mu;
  CutAssignment assignment;  // from sign(mu), zeros to +1
  std::vector<DerandPoint> trajectory;
  double eps_used = 0.0;
  double rho_used = 0.0;
  double lambda_used = 0.0;
};

/// Mean-shift derandomization of the rounding step: minimizes the smoothed
/// negative expected cut over per-vertex means and per-row randomness scales
/// (scales clipped to [scale_floor, scale_cap]; the lambda*||V||^2 term
/// anneals them to the floor), then rounds the final means.
DerandResult derandomize_round(const Embedding& emb, const Graph& g,
                               const DerandConfig& cfg);

/// Writes `iter,sampled_cut,max_scale` rows.
void write_derand_csv(const std::string& path, const std::vector<DerandPoint>& traj);

}  // namespace sospopt::maxcut
