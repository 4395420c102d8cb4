// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "cayleyheat/approx.hpp"
#include "cayleyheat/cayley.hpp"
#include "cayleyheat/continuum.hpp"
#include "cayleyheat/lattice.hpp"

using namespace cayleyheat;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0 = no limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

FiniteAbelianGroup random_group(std::mt19937_64& rng, std::size_t max_order, bool force_product) {
  std::uniform_int_distribution<int> factors(force_product ? 2 : 1, 3), size(2, 16);
  while (true) {
    std::vector<int> sizes;
    const int k = factors(rng);
    std::size_t order = 1;
    for (int i = 0; i < k; ++i) {
      sizes.push_back(size(rng));
      order *= static_cast<std::size_t>(sizes.back());
    }
    if (order <= max_order) return FiniteAbelianGroup(sizes);
  }
}

CayleyWeights random_weights(const FiniteAbelianGroup& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::lognormal_distribution<double> w(0.0, 1.0);
  const double density = 0.2 + 0.8 * u(rng);
  std::map<std::size_t, double> m;
  for (std::size_t i = 1; i < g.order(); ++i)
    if (g.neg_index(i) >= i && u(rng) < density) m[i] = w(rng);
  if (m.empty()) m[1] = 1.0;
  return CayleyWeights::from_orbit_map(g, m);
}

LatticeHom random_hom(const FiniteAbelianGroup& g, std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-0.45, 0.45), s(0.6, 1.4);
  Eigen::MatrixXd b(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b(i, j) = i == j ? s(rng) : u(rng);
  std::vector<GroupElement> images;
  for (int i = 0; i < dim; ++i) images.push_back(g.element(rng() % g.order()));
  return LatticeHom(Lattice(b), g, images);
}

GroupFunction random_even_nonneg(const FiniteAbelianGroup& g, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  GroupFunction f(g);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const std::size_t j = g.neg_index(i);
    if (j >= i) f[i] = f[j] = u(rng);
  }
  return f;
}

// Pushforwards built in criteria 2 and 3, swept in criterion 4.
std::vector<GroupFunction> g_pushforwards;

constexpr int kLatticeInstances = 60;

Outcome criterion_direct_sum() {
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  for (int k = 0; k < kLatticeInstances; ++k) {
    std::uniform_int_distribution<int> dim(1, 2);
    const auto g = random_group(rng, 24, k % 3 == 0);
    const auto h1 = random_hom(g, rng, dim(rng)), h2 = random_hom(g, rng, dim(rng));
    const auto p1 = pushforward(h1, 1e-12).chi, p2 = pushforward(h2, 1e-12).chi;
    const auto sum = pushforward(direct_sum(h1, h2), 1e-12).chi;
    worst = std::max(worst, max_abs_diff(sum, convolve(p1, p2)));
    g_pushforwards.insert(g_pushforwards.end(), {p1, p2, sum});
  }
  return {worst < 1e-8, std::to_string(kLatticeInstances) + " instances, max error " + fmt("%.3e", worst) +
                            " (limit 1e-8)"};
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> c;

  c.push_back({1, "monotonic diffusion on random weighted Abelian Cayley graphs", 30.0, [] {
                 std::mt19937_64 rng(1001);
                 const auto grid = log_spaced_grid(0.05, 50.0, 20);
                 std::size_t products = 0, max_order = 0, violations = 0;
                 double worst = INFINITY;
                 std::string witness;
                 for (int k = 0; k < 100; ++k) {
                   const auto g = random_group(rng, 256, k % 2 == 0);
                   products += g.rank() > 1;
                   max_order = std::max(max_order, g.order());
                   const auto r = monotone_check_cayley(random_weights(g, rng), grid, 1e-10);
                   violations += !r.passed;
                   if (r.worst_margin < worst) {
                     worst = r.worst_margin;
                     witness = g.to_string() + " " + r.witness;
                   }
                 }
                 return Outcome{violations == 0 && products > 0,
                                "100 graphs (" + std::to_string(products) + " non-cyclic, max order " +
                                    std::to_string(max_order) + "), violations " + std::to_string(violations) +
                                    ", worst margin " + fmt("%.3e", worst) + " at " + witness};
               }});

  c.push_back({2, "pushforward of direct sum equals convolution", 60.0, criterion_direct_sum});

  c.push_back({3, "pushforward of fiber product equals pointwise product", 60.0, [] {
                 std::mt19937_64 rng(3003);
                 double worst = 0.0;
                 for (int k = 0; k < kLatticeInstances; ++k) {
                   std::uniform_int_distribution<int> dim(1, 2);
                   const auto g = random_group(rng, 24, k % 3 == 0);
                   const auto h1 = random_hom(g, rng, dim(rng)), h2 = random_hom(g, rng, dim(rng));
                   const auto p1 = pushforward(h1, 1e-12).chi, p2 = pushforward(h2, 1e-12).chi;
                   const auto prod = pushforward(fiber_product(h1, h2), 1e-12).chi;
                   worst = std::max(worst, max_abs_diff(prod, multiply(p1, p2)));
                   g_pushforwards.insert(g_pushforwards.end(), {p1, p2, prod});
                 }
                 return Outcome{worst < 1e-8, std::to_string(kLatticeInstances) + " instances, max error " +
                                                  fmt("%.3e", worst) + " (limit 1e-8)"};
               }});

  c.push_back({4, "four-term and mean inequalities on every pushforward above", 0.0, [] {
                 CheckReport rsd = make_report("rsd", 1e-12), mean = make_report("mean", 1e-12);
                 for (const auto& chi : g_pushforwards) {
                   rsd.merge(sweep_rsd(chi, 1e-12));
                   mean.merge(sweep_mean_ineq(chi, 1e-12));
                 }
                 return Outcome{!g_pushforwards.empty() && rsd.passed && mean.passed,
                                std::to_string(g_pushforwards.size()) + " functions, " +
                                    std::to_string(rsd.count) + " pairs; worst relative margins " +
                                    fmt("%.3e", rsd.worst_margin) + " / " + fmt("%.3e", mean.worst_margin) +
                                    " (limit -1e-12)"};
               }});

  c.push_back({5, "chi_n approximation error is fourth order", 0.0, [] {
                 const auto g = FiniteAbelianGroup::parse("Z12");
                 const auto rr = rate_check_lemma35(1.0, g.element(1), g, {16, 32, 64, 128, 256});
                 bool ratios_ok = true;
                 std::string ratios;
                 for (std::size_t i = 1; i < rr.errors.size(); ++i) {
                   const double q = rr.errors[i] / rr.errors[i - 1];
                   ratios_ok = ratios_ok && q >= 1.0 / 32 && q <= 1.0 / 8;
                   ratios += fmt(" %.4f", q);
                 }
                 return Outcome{rr.fitted_order <= -3.5 && ratios_ok,
                                "slope " + fmt("%.4f", rr.fitted_order) + " (limit -3.5), ratios" + ratios +
                                    " (band [1/32, 1/8])"};
               }});

  c.push_back({6, "chi_n^{*n} converges to cexp(alpha phi) on Z8", 0.0, [] {
                 const auto g = FiniteAbelianGroup::parse("Z8");
                 bool ok = true;
                 std::string detail;
                 for (double alpha : {0.5, 1.0, 2.0}) {
                   const auto rr = convergence_check_lemma37(alpha, g.element(1), g, {16, 64, 256});
                   const bool mono = rr.errors[0] > rr.errors[1] && rr.errors[1] > rr.errors[2];
                   const double drop = rr.errors[0] / rr.errors[2];
                   ok = ok && mono && drop >= 4.0;
                   detail += "alpha=" + fmt("%g", alpha) + " drop " + fmt("%.2f", drop) + "x; ";
                 }
                 return Outcome{ok, detail + "(limit 4x, strictly decreasing)"};
               }});

  c.push_back({7, "cexp routes, heat semigroup and general-matrix agreement", 0.0, [] {
                 std::mt19937_64 rng(7007);
                 double series = 0.0, semigroup = 0.0, general = 0.0;
                 for (int k = 0; k < 100; ++k) {
                   const auto g = random_group(rng, 64, k % 2 == 0);
                   const auto u = random_even_nonneg(g, rng, 2.0 / static_cast<double>(g.order()) + 0.05);
                   series = std::max(series, max_abs_diff(cexp_series(u), cexp_spectral(u)));
                 }
                 for (int k = 0; k < 20; ++k) {
                   const auto g = random_group(rng, 48, k % 2 == 0);
                   const auto cw = random_weights(g, rng);
                   const double t = 0.1 + 0.2 * k, s = 0.05 + 0.1 * k;
                   semigroup = std::max(semigroup,
                                        max_abs_diff(heat_row_cayley(cw, t + s).values,
                                                     convolve(heat_row_cayley(cw, t).values,
                                                              heat_row_cayley(cw, s).values)));
                   const auto h = heat_matrix_general(GeneralGraph::from_cayley(cw), t);
                   const auto row = heat_row_cayley(cw, t).values;
                   for (std::size_t a = 0; a < g.order(); ++a)
                     for (std::size_t b = 0; b < g.order(); ++b)
                       general = std::max(general, std::abs(h(Eigen::Index(a), Eigen::Index(b)) - row[g.sub_index(b, a)]));
                 }
                 return Outcome{series < 1e-9 && semigroup < 1e-10 && general < 1e-9,
                                "series/spectral " + fmt("%.2e", series) + " (1e-9), semigroup " +
                                    fmt("%.2e", semigroup) + " (1e-10), Cayley/general " + fmt("%.2e", general) +
                                    " (1e-9)"};
               }});

  c.push_back({8, "continuous-time random walk matches the heat row", 0.0, [] {
                 const auto g = FiniteAbelianGroup::parse("Z6");
                 const auto cw = CayleyWeights::from_orbit_map(g, {{1, 1.0}});
                 const std::size_t trials = 1000000;
                 const auto emp = ctrw_simulate(cw, 0.7, trials, 8008);
                 const auto exact = heat_row_cayley(cw, 0.7).values;
                 const double tv = total_variation(emp, exact);
                 // parity marginal: Z6 -> Z2
                 const double p = exact[1] + exact[3] + exact[5];
                 const double phat = emp[1] + emp[3] + emp[5];
                 const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(trials));
                 const double z = std::abs(phat - p) / sigma;
                 return Outcome{tv < 0.005 && z <= 3.0, "TV " + fmt("%.5f", tv) + " (limit 0.005), Z2 marginal " +
                                                            fmt("%.5f", phat) + " vs " + fmt("%.5f", p) + ", " +
                                                            fmt("%.2f", z) + " sigma (limit 3)"};
               }});

  c.push_back({9, "hyperbolic 3-space reduced inequality violation", 1.0, [] {
                 const auto r = h3_reduced_check(3.0, 1.0);
                 std::vector<double> d1s;
                 for (int i = 0; i <= 50; ++i) d1s.push_back(5.0 + 0.5 * i);
                 const auto fit = h3_asymptotic_fit(d1s, 1.0);
                 const double els = std::abs(r.ls / 9.96e-4 - 1), ers = std::abs(r.rs / 4.53e-5 - 1);
                 const double fls = std::abs(fit.log_ls.a / -0.5 - 1), frs = std::abs(fit.log_rs.a / -1.0 - 1);
                 return Outcome{r.violated && els < 0.01 && ers < 0.01 && fls < 0.1 && frs < 0.1,
                                "LS " + fmt("%.4e", r.ls) + " RS " + fmt("%.4e", r.rs) + " violated=" +
                                    (r.violated ? "yes" : "no") + "; quadratic coefficients " +
                                    fmt("%.4f", fit.log_ls.a) + " / " + fmt("%.4f", fit.log_rs.a) +
                                    " (targets -0.5 / -1, 10%)"};
               }});

  c.push_back({10, "four-point inequality on S2 and RP2", 120.0, [] {
                 bool ok = true;
                 std::string detail;
                 for (Space sp : {Space::s2, Space::rp2}) {
                   const auto s = sphere_sweep(sp, 1000, {0.05, 0.2, 1.0, 5.0}, 10010, 1e-12, 200);
                   ok = ok && s.inequality.passed && s.inequality.count >= 1000;
                   detail += std::string(sp == Space::s2 ? "S2" : "RP2") + ": " +
                             std::to_string(s.inequality.count) + " instances, worst margin " +
                             fmt("%.3e", s.inequality.worst_margin) + "; ";
                 }
                 return Outcome{ok, detail + "l_max 200, truncation-aware"};
               }});

  c.push_back({11, "monotonic diffusion on hyperbolic 3-space", 0.0, [] {
                 const auto grid = log_spaced_grid(0.05, 50.0, 20);
                 bool ok = true;
                 std::string detail;
                 for (double d : {0.5, 2.0, 8.0}) {
                   const auto r = h3_monotone_check(d, grid);
                   ok = ok && r.passed;
                   detail += "d=" + fmt("%g", d) + " worst " + fmt("%.2e", r.worst_margin) + "; ";
                 }
                 return Outcome{ok, detail + "20-point grid [0.05, 50]"};
               }});

  c.push_back({12, "violation found on a random non-Cayley graph", 0.0, [] {
                 const std::vector<std::string> args{"cayleyheat", "search-counterexample", "--n", "8",
                                                     "--trials", "5000", "--seed", "7"};
                 std::vector<const char*> argv;
                 for (const auto& a : args) argv.push_back(a.c_str());
                 std::ostringstream out, err;
                 const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
                 if (code != 0) return Outcome{false, "search exit " + std::to_string(code) + ": " + err.str()};
                 const auto j = nlohmann::json::parse(out.str());
                 const auto& data = j["reports"][0]["data"];
                 const auto& w = data["weights"];
                 const bool ok = data["found"].get<bool>() && w.is_array() && w.size() >= 3 && w.size() <= 8;
                 // reload the serialized witness and confirm the violation independently
                 Eigen::MatrixXd m(w.size(), w.size());
                 for (std::size_t a = 0; a < w.size(); ++a)
                   for (std::size_t b = 0; b < w.size(); ++b) m(Eigen::Index(a), Eigen::Index(b)) = w[a][b].get<double>();
                 const auto r = monotone_violation_search(GeneralGraph(m), log_spaced_grid(0.05, 50.0, 20), 1e-10);
                 return Outcome{ok && !r.passed, "trial " + std::to_string(data["trial"].get<std::size_t>()) +
                                                     " of 5000 (seed 7), " + std::to_string(w.size()) +
                                                     " vertices, margin " + fmt("%.3e", r.worst_margin) + " at " +
                                                     r.witness};
               }});
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  for (const auto& c : criteria()) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || secs < c.time_limit_s;
    const bool ok = o.ok && in_time;
    failures += !ok;
    std::printf("[%s] criterion %2d: %s -- %s; %.2fs%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
                o.detail.c_str(), secs,
                c.time_limit_s > 0.0 ? (" (limit " + fmt("%g", c.time_limit_s) + "s)").c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
