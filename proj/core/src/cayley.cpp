#include "cayleyheat/cayley.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "cayleyheat/errors.hpp"
#include "cayleyheat/tolerance.hpp"

namespace cayleyheat {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.size() < 2) throw DomainError("t_grid needs at least two points");
  if (!(t_grid.front() > 0.0)) throw DomainError("t_grid must be positive");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("t_grid must be strictly increasing");
  }
}

// e^{-s deg} sum_n (s w)^{*n}/n! for s deg <= 1/2; every term is nonnegative.
GroupFunction short_time_row(const CayleyWeights& cw, double s) {
  const FiniteAbelianGroup& g = cw.group();
  std::vector<std::pair<std::size_t, double>> support;
  for (std::size_t i = 0; i < g.order(); ++i) {
    if (cw.weights()[i] > 0.0) support.emplace_back(i, s * cw.weights()[i]);
  }
  GroupFunction term = delta(g);
  GroupFunction sum = term;
  for (int n = 1; n < 200; ++n) {
    GroupFunction next(g);
    for (std::size_t x = 0; x < g.order(); ++x) {
      const double tx = term[x];
      if (tx == 0.0) continue;
      for (const auto& [y, wy] : support) next[g.add_index(x, y)] += tx * wy;
    }
    next *= 1.0 / n;
    term = std::move(next);
    sum += term;
    // Terms shrink by at least (s deg)/(n+1) <= 1/4 in sup norm; stop once the
    // latest one is invisible in every entry.
    bool negligible = true;
    for (std::size_t x = 0; x < g.order() && negligible; ++x) {
      if (term[x] > 1e-18 * sum[x]) negligible = false;
    }
    if (negligible) break;
  }
  return sum * std::exp(-s * cw.degree());
}

}  // namespace

// ---------------------------------------------------------------------------

CayleyWeights::CayleyWeights(GroupFunction w) : w_(std::move(w)) {
  if (w_[0] != 0.0) throw DomainError("CayleyWeights: weight at the identity must be 0");
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (w_[i] < 0.0) throw DomainError("CayleyWeights: negative weight");
    if (w_[i] != w_[w_.group().neg_index(i)]) throw DomainError("CayleyWeights: weights must be even");
  }
  degree_ = w_.sum();
}

CayleyWeights CayleyWeights::from_orbit_map(const FiniteAbelianGroup& group,
                                            const std::map<std::size_t, double>& weights) {
  GroupFunction w(group);
  std::vector<bool> set(group.order(), false);
  for (const auto& [index, value] : weights) {
    if (index == 0) throw DomainError("weights: entry at the identity (index 0) is not allowed");
    if (index >= group.order()) {
      throw DomainError("weights: index " + std::to_string(index) + " out of range for " +
                        group.to_string());
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw DomainError("weights: weight at index " + std::to_string(index) +
                        " must be finite and nonnegative");
    }
    const std::size_t mirror = group.neg_index(index);
    for (std::size_t k : {index, mirror}) {
      if (set[k] && w[k] != value) {
        throw DomainError("weights: conflicting values for index " + std::to_string(k) +
                          " and its inverse");
      }
      w[k] = value;
      set[k] = true;
    }
  }
  return CayleyWeights(std::move(w));
}

GeneralGraph::GeneralGraph(Eigen::MatrixXd w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols()) throw DomainError("GeneralGraph: weight matrix must be square");
  if (!w_.allFinite()) throw DomainError("GeneralGraph: non-finite weights");
  const double scale = std::max(1.0, w_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    if (w_(i, i) != 0.0) throw DomainError("GeneralGraph: diagonal must be zero");
    for (Eigen::Index j = 0; j < w_.cols(); ++j) {
      if (w_(i, j) < 0.0) throw DomainError("GeneralGraph: negative weight");
      if (std::abs(w_(i, j) - w_(j, i)) > 1e-12 * scale) {
        throw DomainError("GeneralGraph: weight matrix must be symmetric");
      }
    }
  }
}

Eigen::MatrixXd GeneralGraph::laplacian() const {
  Eigen::MatrixXd l = -w_;
  l.diagonal() = w_.rowwise().sum();
  return l;
}

GeneralGraph GeneralGraph::from_cayley(const CayleyWeights& cw) {
  const FiniteAbelianGroup& g = cw.group();
  const Eigen::Index n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      w(u, v) = cw.weights()[g.sub_index(static_cast<std::size_t>(v), static_cast<std::size_t>(u))];
    }
  }
  return GeneralGraph(std::move(w));
}

GroupFunction tau_from_weights(const CayleyWeights& cw) {
  GroupFunction tau = cw.weights();
  tau[0] -= cw.degree();
  return tau;
}

HeatRow heat_row_cayley(const CayleyWeights& cw, double t, HeatMethod method) {
  if (!(t > 0.0)) throw DomainError("heat_row_cayley: t must be positive");
  if (method == HeatMethod::spectral) {
    // cexp(t tau) rather than e^{-t deg} cexp(t w): same function, no overflow
    // of exp(t w^) for large t deg.
    return {t, cexp_spectral(tau_from_weights(cw) * t)};
  }
  int squarings = 0;
  double s = t;
  while (s * cw.degree() > 0.5) {
    s *= 0.5;
    ++squarings;
  }
  GroupFunction row = short_time_row(cw, s);
  for (int i = 0; i < squarings; ++i) row = convolve(row, row, ConvolutionMethod::direct);
  return {t, std::move(row)};
}

GraphHeatKernel::GraphHeatKernel(const GeneralGraph& g) {
  const Eigen::MatrixXd l = g.laplacian();
  if (l.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) throw NumericalError("GraphHeatKernel: eigensolver failed");
  eigenvectors_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues();
  const double norm = std::max(l.norm(), std::numeric_limits<double>::min());
  residual_ = (l * eigenvectors_ - eigenvectors_ * eigenvalues_.asDiagonal()).norm() / norm;
  if (residual_ > 1e-9) throw NumericalError("GraphHeatKernel: eigendecomposition residual too large");
}

Eigen::MatrixXd GraphHeatKernel::at(double t) const {
  if (!(t > 0.0)) throw DomainError("heat kernel: t must be positive");
  const Eigen::VectorXd e = (-t * eigenvalues_.array().max(0.0)).exp();
  return eigenvectors_ * e.asDiagonal() * eigenvectors_.transpose();
}

Eigen::MatrixXd heat_matrix_general(const GeneralGraph& g, double t) {
  return GraphHeatKernel(g).at(t);
}

std::vector<double> log_spaced_grid(double t_min, double t_max, std::size_t n) {
  if (!(t_min > 0.0) || !(t_max > t_min) || n < 2) {
    throw DomainError("log_spaced_grid: need 0 < t_min < t_max and n >= 2");
  }
  std::vector<double> grid(n);
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = t_min;
  grid.back() = t_max;
  return grid;
}

std::vector<std::vector<double>> cayley_ratio_table(const CayleyWeights& cw,
                                                    const std::vector<double>& t_grid,
                                                    HeatMethod method) {
  std::vector<std::vector<double>> table;
  table.reserve(t_grid.size());
  for (double t : t_grid) {
    const HeatRow row = heat_row_cayley(cw, t, method);
    std::vector<double> ratios(row.values.size());
    for (std::size_t v = 0; v < ratios.size(); ++v) ratios[v] = row.values[v] / row.values[0];
    table.push_back(std::move(ratios));
  }
  return table;
}

CheckReport monotone_check_cayley(const CayleyWeights& cw, const std::vector<double>& t_grid,
                                  double tol, HeatMethod method) {
  require_grid(t_grid);
  const auto table = cayley_ratio_table(cw, t_grid, method);
  const FiniteAbelianGroup& g = cw.group();
  CheckReport report = make_report("monotone_cayley", tol);
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    for (std::size_t v = 0; v < g.order(); ++v) {
      const double margin = table[k][v] - table[k - 1][v];
      const bool new_min = report.count == 0 || margin < report.worst_margin;
      report.observe(margin, new_min ? "v=" + g.element_to_string(g.element(v)) + " t=" +
                                           fmt_double(t_grid[k - 1]) + " t'=" + fmt_double(t_grid[k])
                                     : std::string());
    }
  }
  return report;
}

CheckReport monotone_violation_search(const GeneralGraph& graph, const std::vector<double>& t_grid,
                                      double tol) {
  require_grid(t_grid);
  const GraphHeatKernel kernel(graph);
  const std::size_t n = graph.size();
  CheckReport report = make_report("monotone_general", tol);
  Eigen::MatrixXd prev = kernel.at(t_grid.front());
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const Eigen::MatrixXd cur = kernel.at(t_grid[k]);
    for (std::size_t u = 0; u < n; ++u) {
      const auto ui = static_cast<Eigen::Index>(u);
      for (std::size_t v = 0; v < n; ++v) {
        const auto vi = static_cast<Eigen::Index>(v);
        const double margin = cur(ui, vi) / cur(ui, ui) - prev(ui, vi) / prev(ui, ui);
        const bool new_min = report.count == 0 || margin < report.worst_margin;
        report.observe(margin, new_min ? "u=" + std::to_string(u) + " v=" + std::to_string(v) +
                                             " t=" + fmt_double(t_grid[k - 1]) +
                                             " t'=" + fmt_double(t_grid[k])
                                       : std::string());
      }
    }
    prev = cur;
  }
  return report;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over a combined state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GeneralGraph random_heavy_tailed_graph(std::uint64_t seed, std::uint64_t index,
                                       std::size_t max_vertices) {
  if (max_vertices < 3) throw DomainError("random graph: need at least 3 vertices");
  std::mt19937_64 rng(derive_seed(seed, index));
  std::uniform_int_distribution<std::size_t> size_dist(3, max_vertices);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  const std::size_t n = size_dist(rng);
  const double density = 0.3 + 0.7 * unit(rng);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool present = unit(rng) < density;
      const double weight = std::exp(normal(rng));
      if (present) {
        w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = weight;
        w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = weight;
      }
    }
  }
  return GeneralGraph(std::move(w));
}

CounterexampleSearchResult search_counterexample(const CounterexampleSearchConfig& cfg) {
  const std::vector<double> grid = cfg.t_grid.empty() ? log_spaced_grid(0.05, 50.0, 20) : cfg.t_grid;
  CounterexampleSearchResult result;
  result.report = make_report("monotone_general", cfg.tol);
  const std::size_t batch = std::max<std::size_t>(1, cfg.jobs) * 16;
  for (std::size_t start = 0; start < cfg.trials; start += batch) {
    const std::size_t count = std::min(batch, cfg.trials - start);
    std::vector<CheckReport> reports(count);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
      const GeneralGraph g = random_heavy_tailed_graph(cfg.seed, start + i, cfg.max_vertices);
      reports[i] = monotone_violation_search(g, grid, cfg.tol);
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (!reports[i].passed) {
        result.found = true;
        result.first_trial = start + i;
        result.trials_run = start + i + 1;
        result.graph = random_heavy_tailed_graph(cfg.seed, start + i, cfg.max_vertices);
        result.report = reports[i];
        result.report.witness = "trial=" + std::to_string(start + i) + " " + reports[i].witness;
        return result;
      }
      result.report.merge(reports[i]);
    }
    result.trials_run = start + count;
  }
  return result;
}

GroupFunction ctrw_simulate(const CayleyWeights& cw, double t, std::size_t trials,
                            std::uint64_t seed, std::size_t jobs) {
  if (trials < 1) throw DomainError("ctrw_simulate: trials must be >= 1");
  if (!(t >= 0.0)) throw DomainError("ctrw_simulate: t must be nonnegative");
  const FiniteAbelianGroup& g = cw.group();
  if (cw.degree() <= 0.0) return delta(g);

  std::vector<std::size_t> steps;
  std::vector<double> probs;
  for (std::size_t i = 0; i < g.order(); ++i) {
    if (cw.weights()[i] > 0.0) {
      steps.push_back(i);
      probs.push_back(cw.weights()[i]);
    }
  }

  // Fixed shard count keeps the result independent of the number of workers.
  constexpr std::size_t kShards = 16;
  std::vector<std::vector<std::uint64_t>> counts(kShards, std::vector<std::uint64_t>(g.order(), 0));
  parallel_for(kShards, jobs, [&](std::size_t shard) {
    const std::size_t lo = trials * shard / kShards;
    const std::size_t hi = trials * (shard + 1) / kShards;
    std::mt19937_64 rng(derive_seed(seed, shard));
    std::exponential_distribution<double> holding(cw.degree());
    std::discrete_distribution<std::size_t> jump(probs.begin(), probs.end());
    for (std::size_t k = lo; k < hi; ++k) {
      std::size_t pos = 0;
      double clock = holding(rng);
      while (clock <= t) {
        pos = g.add_index(pos, steps[jump(rng)]);
        clock += holding(rng);
      }
      ++counts[shard][pos];
    }
  });

  GroupFunction freq(g);
  for (std::size_t i = 0; i < g.order(); ++i) {
    std::uint64_t c = 0;
    for (const auto& shard : counts) c += shard[i];
    freq[i] = static_cast<double>(c) / static_cast<double>(trials);
  }
  return freq;
}

double total_variation(const GroupFunction& p, const GroupFunction& q) {
  if (!(p.group() == q.group())) throw StructuralError("total_variation: group mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace cayleyheat
