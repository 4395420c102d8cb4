#pragma once

// Heat kernels on weighted Abelian Cayley graphs (row at the identity, via the
// convolutional exponential) and on arbitrary weighted graphs (dense
// eigendecomposition), monotonic-diffusion checks, a violation search over
// general graphs and a continuous-time random walk simulator.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cayleyheat/group.hpp"
#include "cayleyheat/report.hpp"

namespace cayleyheat {

/// Even nonnegative weight function on G with w(0) = 0.
class CayleyWeights {
 public:
  explicit CayleyWeights(GroupFunction w);

  /// Builds from {element index -> weight}; each entry is mirrored to -g.
  /// Rejects index 0, negative weights and conflicting mirrored entries.
  static CayleyWeights from_orbit_map(const FiniteAbelianGroup& group,
                                      const std::map<std::size_t, double>& weights);

  const FiniteAbelianGroup& group() const { return w_.group(); }
  const GroupFunction& weights() const { return w_; }
  double degree() const { return degree_; }

 private:
  GroupFunction w_;
  double degree_ = 0.0;
};

/// Symmetric nonnegative weight matrix with zero diagonal.
class GeneralGraph {
 public:
  explicit GeneralGraph(Eigen::MatrixXd w);

  std::size_t size() const { return static_cast<std::size_t>(w_.rows()); }
  const Eigen::MatrixXd& weights() const { return w_; }
  Eigen::MatrixXd laplacian() const;

  /// Circulant embedding: W(u, v) = w(v - u).
  static GeneralGraph from_cayley(const CayleyWeights& cw);

 private:
  Eigen::MatrixXd w_;
};

struct HeatRow {
  double t;
  GroupFunction values;  // H_t(0, .)
};

enum class HeatMethod {
  spectral,         // idft(exp(t * tau^)), absolute accuracy ~1e-16
  scaling_squaring  // positive series for small t then repeated squaring; entrywise relative accuracy
};

/// tau = w - deg * delta (the negated Laplacian row at the identity).
GroupFunction tau_from_weights(const CayleyWeights& cw);

/// H_t(0, .) = e^{-t deg} cexp(t w) = cexp(t tau).
HeatRow heat_row_cayley(const CayleyWeights& cw, double t, HeatMethod method = HeatMethod::spectral);

/// Symmetric eigendecomposition of a general graph Laplacian, reusable across t.
class GraphHeatKernel {
 public:
  explicit GraphHeatKernel(const GeneralGraph& g);

  /// exp(-t L)
  Eigen::MatrixXd at(double t) const;
  /// ||L Q - Q Lambda|| / ||L||
  double residual() const { return residual_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd eigenvalues_;
  double residual_ = 0.0;
};

Eigen::MatrixXd heat_matrix_general(const GeneralGraph& g, double t);

/// n log-spaced points on [t_min, t_max].
std::vector<double> log_spaced_grid(double t_min, double t_max, std::size_t n);

/// Worst margin of H_t'(0,v)/H_t'(0,0) - H_t(0,v)/H_t(0,0) over consecutive
/// grid pairs and all v.
CheckReport monotone_check_cayley(const CayleyWeights& cw, const std::vector<double>& t_grid,
                                  double tol, HeatMethod method = HeatMethod::spectral);

/// Ratios H_t(0, v)/H_t(0, 0), one row per grid point.
std::vector<std::vector<double>> cayley_ratio_table(const CayleyWeights& cw,
                                                    const std::vector<double>& t_grid,
                                                    HeatMethod method = HeatMethod::spectral);

/// Same check over all ordered pairs (u, v) of a general graph. A failed
/// report is a violation of monotonic diffusion.
CheckReport monotone_violation_search(const GeneralGraph& g, const std::vector<double>& t_grid,
                                      double tol);

struct CounterexampleSearchConfig {
  std::size_t max_vertices = 8;
  std::size_t trials = 5000;
  std::uint64_t seed = 7;
  std::vector<double> t_grid;  // empty -> default grid
  double tol = 1e-10;
  std::size_t jobs = 1;
};

struct CounterexampleSearchResult {
  bool found = false;
  std::size_t trials_run = 0;
  std::size_t first_trial = 0;
  std::optional<GeneralGraph> graph;
  CheckReport report;  // report of the witness graph, or aggregate if none found
};

/// Random weighted graphs on 3..max_vertices vertices with log-normal
/// (heavy-tailed) weights and random sparsity; stops at the first violation.
/// Trial i draws from a generator seeded by (seed, i), so the outcome does
/// not depend on jobs.
CounterexampleSearchResult search_counterexample(const CounterexampleSearchConfig& cfg);

/// Random graph for trial `index` of a search with master seed `seed`.
GeneralGraph random_heavy_tailed_graph(std::uint64_t seed, std::uint64_t index,
                                       std::size_t max_vertices);

/// Continuous-time random walk from 0 with jump rate deg and steps drawn
/// from w/deg; returns empirical frequencies at time t.
GroupFunction ctrw_simulate(const CayleyWeights& cw, double t, std::size_t trials,
                            std::uint64_t seed, std::size_t jobs = 1);

/// Total variation distance 1/2 sum |p - q|.
double total_variation(const GroupFunction& p, const GroupFunction& q);

/// Deterministic 64-bit mixing of (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cayleyheat
