#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cayleyheat/approx.hpp"
#include "cayleyheat/continuum.hpp"
#include "cayleyheat/errors.hpp"
#include "cayleyheat/group.hpp"
#include "cayleyheat/lattice.hpp"

namespace cayleyheat::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json report_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  j["worst_margin"] = number_or_null(r.worst_margin);
  j["witness"] = r.witness;
  j["count"] = r.count;
  return j;
}

struct Outcome {
  Json config = Json::object();
  std::vector<CheckReport> reports;
  std::vector<Json> data;  // parallel to reports; null when absent
  int exit_code = kOk;
  std::string message;

  void add(CheckReport r, Json d = nullptr) {
    reports.push_back(std::move(r));
    data.push_back(std::move(d));
  }
  void fail_unless_all_passed(const std::string& what) {
    for (const auto& r : reports) {
      if (!r.passed) {
        exit_code = kCheckFailed;
        message = what + ": check '" + r.name + "' failed (" + r.witness + ")";
        return;
      }
    }
  }
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  for (double v : parse_double_list(s)) {
    if (v != std::floor(v)) throw ParseError("expected integers in list '" + s + "'");
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

std::vector<std::vector<double>> parse_basis(const std::string& s) {
  std::vector<std::vector<double>> vectors;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) vectors.push_back(parse_double_list(item));
  return vectors;
}

std::optional<double> env_double(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != std::string(v).size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParseError(std::string("environment variable ") + name + " is not a number: '" + v + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json vector_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

Json check_grid_json(double tmin, double tmax, std::size_t steps) {
  return Json{{"tmin", tmin}, {"tmax", tmax}, {"steps", steps}};
}

// --- Self test ------------------------------------------------------------

struct SelfTestCase {
  std::string name;
  std::function<CheckReport()> run;
  std::function<CheckReport()> run_flipped = {};  // same check with the inequality reversed
};

// Fallback mutation for checks without a reversed variant.
CheckReport inject_sign_flip(CheckReport r) {
  r.worst_margin = -r.worst_margin;
  r.passed = r.worst_margin >= -r.tolerance;
  return r;
}

CheckReport from_bool(const std::string& name, bool ok, double margin, const std::string& witness) {
  CheckReport r = make_report(name, 0.0);
  r.observe(ok ? std::max(margin, 0.0) : -std::abs(margin) - 1.0, witness);
  r.passed = ok;
  return r;
}

// Pairwise sweep with the comparison reversed, as a sign bug would produce.
CheckReport reversed_sweep(const std::string& name, const GroupFunction& chi, int power,
                           CheckReport (*check)(const GroupFunction&, const GroupElement&,
                                                const GroupElement&, double)) {
  const auto& g = chi.group();
  const double scale = std::pow(chi[0], power);
  CheckReport r = make_report(name, 1e-12);
  for (std::size_t i = 0; i < g.order(); ++i)
    for (std::size_t j = 0; j < g.order(); ++j) {
      const CheckReport one = check(chi, g.element(i), g.element(j), 0.0);
      r.observe(-one.worst_margin / scale, one.witness);
    }
  return r;
}

GroupFunction random_function(const FiniteAbelianGroup& g, std::mt19937_64& rng, bool even) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GroupFunction f(g);
  for (std::size_t i = 0; i < g.order(); ++i) f[i] = u(rng);
  if (even) {
    GroupFunction e(g);
    for (std::size_t i = 0; i < g.order(); ++i) e[i] = 0.5 * (f[i] + f[g.neg_index(i)]);
    return e;
  }
  return f;
}

LatticeHom random_hom(const FiniteAbelianGroup& g, std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dim, dim) * 0.9;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b(i, j) += u(rng);
  std::vector<GroupElement> images;
  for (int i = 0; i < dim; ++i) images.push_back(g.element(pick(rng)));
  return LatticeHom(Lattice(std::move(b)), g, std::move(images));
}

std::vector<SelfTestCase> selftest_cases() {
  std::vector<SelfTestCase> cases;
  cases.push_back({"dft_roundtrip", [] {
                     std::mt19937_64 rng(1);
                     const auto g = FiniteAbelianGroup::parse("Z6xZ4");
                     const GroupFunction f = random_function(g, rng, false);
                     const double err = max_abs_diff(idft(dft(f)), f);
                     return from_bool("dft_roundtrip", err < 1e-12, 1e-12 - err, "Z6xZ4");
                   }});
  cases.push_back({"convolution_methods", [] {
                     std::mt19937_64 rng(2);
                     const auto g = FiniteAbelianGroup::parse("Z12");
                     const GroupFunction a = random_function(g, rng, false);
                     const GroupFunction b = random_function(g, rng, false);
                     const double err = max_abs_diff(convolve(a, b, ConvolutionMethod::direct),
                                                     convolve(a, b, ConvolutionMethod::spectral));
                     return from_bool("convolution_methods", err < 1e-10, 1e-10 - err, "Z12");
                   }});
  cases.push_back({"cexp_series_vs_spectral", [] {
                     std::mt19937_64 rng(3);
                     const auto g = FiniteAbelianGroup::parse("Z3xZ4");
                     const GroupFunction u = random_function(g, rng, true) * 0.5;
                     const GroupFunction s = cexp_series(u), p = cexp_spectral(u);
                     const double err = max_abs_diff(s, p) / p.sup_norm();
                     return from_bool("cexp_series_vs_spectral", err < 1e-9, 1e-9 - err, "Z3xZ4");
                   }});
  cases.push_back({"direct_sum_convolution", [] {
                     std::mt19937_64 rng(4);
                     const auto g = FiniteAbelianGroup::parse("Z6");
                     double worst = 0.0;
                     for (int i = 0; i < 5; ++i) {
                       const LatticeHom h1 = random_hom(g, rng, 1 + i % 2), h2 = random_hom(g, rng, 1);
                       worst = std::max(worst, max_abs_diff(pushforward(direct_sum(h1, h2)).chi,
                                                            convolve(pushforward(h1).chi, pushforward(h2).chi)));
                     }
                     return from_bool("direct_sum_convolution", worst < 1e-8, 1e-8 - worst, "Z6");
                   }});
  cases.push_back({"fiber_product_multiplication", [] {
                     std::mt19937_64 rng(5);
                     const auto g = FiniteAbelianGroup::parse("Z2xZ3");
                     double worst = 0.0;
                     for (int i = 0; i < 5; ++i) {
                       const LatticeHom h1 = random_hom(g, rng, 1), h2 = random_hom(g, rng, 1 + i % 2);
                       worst = std::max(worst, max_abs_diff(pushforward(fiber_product(h1, h2)).chi,
                                                            multiply(pushforward(h1).chi, pushforward(h2).chi)));
                     }
                     return from_bool("fiber_product_multiplication", worst < 1e-8, 1e-8 - worst, "Z2xZ3");
                   }});
  cases.push_back({"check_rsd", [] {
                     std::mt19937_64 rng(6);
                     const auto g = FiniteAbelianGroup::parse("Z12");
                     CheckReport r = sweep_rsd(pushforward(random_hom(g, rng, 2)).chi, 1e-12);
                     r.name = "check_rsd";
                     return r;
                   },
                   [] {
                     std::mt19937_64 rng(6);
                     const auto g = FiniteAbelianGroup::parse("Z12");
                     return reversed_sweep("check_rsd", pushforward(random_hom(g, rng, 2)).chi, 4, check_rsd);
                   }});
  cases.push_back({"check_mean_ineq", [] {
                     std::mt19937_64 rng(7);
                     const auto g = FiniteAbelianGroup::parse("Z2xZ4");
                     CheckReport r = sweep_mean_ineq(pushforward(random_hom(g, rng, 2)).chi, 1e-12);
                     r.name = "check_mean_ineq";
                     return r;
                   },
                   [] {
                     std::mt19937_64 rng(7);
                     const auto g = FiniteAbelianGroup::parse("Z2xZ4");
                     return reversed_sweep("check_mean_ineq", pushforward(random_hom(g, rng, 2)).chi, 1,
                                           check_mean_ineq);
                   }});
  cases.push_back({"chi_n_rate", [] {
                     const auto g = FiniteAbelianGroup::parse("Z12");
                     const RateReport rr = rate_check_lemma35(1.0, g.element(1), g, {16, 32, 64, 128, 256});
                     return from_bool("chi_n_rate", rr.passed, -3.5 - rr.fitted_order,
                                      "fitted_order=" + fmt17(rr.fitted_order));
                   }});
  cases.push_back({"chi_n_power_convergence", [] {
                     const auto g = FiniteAbelianGroup::parse("Z8");
                     const RateReport rr = convergence_check_lemma37(1.0, g.element(1), g, {16, 64, 256});
                     return from_bool("chi_n_power_convergence", rr.passed,
                                      rr.errors.front() / 4.0 - rr.errors.back(),
                                      "d_256=" + fmt17(rr.errors.back()));
                   }});
  cases.push_back({"monotone_cayley", [] {
                     std::mt19937_64 rng(8);
                     std::uniform_real_distribution<double> u(0.0, 2.0);
                     const auto g = FiniteAbelianGroup::parse("Z3xZ4");
                     std::map<std::size_t, double> w;
                     for (std::size_t i = 1; i < g.order(); ++i) w[i] = u(rng);
                     // mirrored entries would conflict; keep one per orbit
                     std::map<std::size_t, double> orbit;
                     for (auto [k, v] : w)
                       if (g.neg_index(k) >= k) orbit[k] = v;
                     CheckReport r = monotone_check_cayley(CayleyWeights::from_orbit_map(g, orbit),
                                                           log_spaced_grid(0.05, 50.0, 20), 1e-10);
                     r.name = "monotone_cayley";
                     return r;
                   }});
  cases.push_back({"heat_semigroup", [] {
                     const auto g = FiniteAbelianGroup::parse("Z10");
                     const auto cw = CayleyWeights::from_orbit_map(g, {{1, 1.0}, {3, 0.5}});
                     const GroupFunction lhs = heat_row_cayley(cw, 1.2).values;
                     const GroupFunction rhs = convolve(heat_row_cayley(cw, 0.5).values, heat_row_cayley(cw, 0.7).values);
                     const double err = max_abs_diff(lhs, rhs);
                     return from_bool("heat_semigroup", err < 1e-10, 1e-10 - err, "Z10");
                   }});
  cases.push_back({"cayley_vs_general", [] {
                     const auto g = FiniteAbelianGroup::parse("Z2xZ4");
                     const auto cw = CayleyWeights::from_orbit_map(g, {{1, 1.0}, {4, 0.3}, {5, 2.0}});
                     const Eigen::MatrixXd h = heat_matrix_general(GeneralGraph::from_cayley(cw), 0.8);
                     const GroupFunction row = heat_row_cayley(cw, 0.8).values;
                     double err = 0.0;
                     for (std::size_t v = 0; v < g.order(); ++v) err = std::max(err, std::abs(h(0, static_cast<Eigen::Index>(v)) - row[v]));
                     return from_bool("cayley_vs_general", err < 1e-9, 1e-9 - err, "Z2xZ4");
                   }});
  cases.push_back({"ctrw_total_variation", [] {
                     const auto g = FiniteAbelianGroup::parse("Z6");
                     const auto cw = CayleyWeights::from_orbit_map(g, {{1, 1.0}});
                     const double tv = total_variation(ctrw_simulate(cw, 0.7, 200000, 11),
                                                       heat_row_cayley(cw, 0.7).values);
                     return from_bool("ctrw_total_variation", tv < 0.01, 0.01 - tv, "tv=" + fmt17(tv));
                   }});
  cases.push_back({"counterexample_search", [] {
                     CounterexampleSearchConfig cfg;
                     cfg.trials = 500;
                     const auto res = search_counterexample(cfg);
                     return from_bool("counterexample_search", res.found, -res.report.worst_margin,
                                      res.report.witness);
                   }});
  cases.push_back({"h3_violation", [] {
                     const H3ReducedCheck r = h3_reduced_check(3.0, 1.0);
                     return from_bool("h3_violation", r.violated, r.ls - r.rs,
                                      "LS=" + fmt17(r.ls) + " RS=" + fmt17(r.rs));
                   }});
  cases.push_back({"h3_monotone", [] {
                     CheckReport r = h3_monotone_check(2.0, log_spaced_grid(0.1, 10.0, 20), 0.0);
                     r.name = "h3_monotone";
                     return r;
                   }});
  cases.push_back({"sphere_inequality", [] {
                     const SymmetricSweep s = sphere_sweep(Space::s2, 50, {0.05, 0.2, 1.0, 5.0}, 13);
                     CheckReport r = s.inequality;
                     r.name = "sphere_inequality";
                     return r;
                   }});
  cases.push_back({"rp2_inequality", [] {
                     const SymmetricSweep s = sphere_sweep(Space::rp2, 50, {0.05, 0.2, 1.0, 5.0}, 17);
                     CheckReport r = s.inequality;
                     r.name = "rp2_inequality";
                     return r;
                   }});
  return cases;
}

// --- Output ----------------------------------------------------------------

void emit(const std::string& command, const Outcome& o, const std::string& format,
          const std::string& output, bool timing, double elapsed_ms, std::ostream& out) {
  std::string text;
  if (format == "csv") {
    std::vector<ReportRow> rows;
    for (const auto& r : o.reports) rows.push_back(to_row(r));
    text = reports_to_csv(rows);
  } else {
    Json env;
    env["command"] = command;
    env["config"] = o.config;
    Json reports = Json::array();
    for (std::size_t i = 0; i < o.reports.size(); ++i) {
      Json r = report_json(o.reports[i]);
      if (!o.data[i].is_null()) r["data"] = o.data[i];
      reports.push_back(std::move(r));
    }
    env["reports"] = std::move(reports);
    env["timing_ms"] = timing ? elapsed_ms : 0.0;
    env["version"] = kVersion;
    text = env.dump(2) + "\n";
  }
  if (output == "-" || output.empty()) {
    out << text;
  } else {
    std::ofstream f(output);
    if (!f) throw ParseError("cannot write '" + output + "'");
    f << text;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

CayleyWeights parse_weights_json(const std::string& text, const std::optional<std::string>& group_override) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("weights JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("weights JSON: top level must be an object");
  std::optional<FiniteAbelianGroup> group;
  if (j.contains("group")) {
    if (!j["group"].is_string()) throw ParseError("weights JSON: \"group\" must be a string");
    group = FiniteAbelianGroup::parse(j["group"].get<std::string>());
  }
  if (group_override) {
    const auto g = FiniteAbelianGroup::parse(*group_override);
    if (group && !(*group == g)) {
      throw ParseError("weights JSON: group " + group->to_string() + " does not match --group " +
                       g.to_string());
    }
    group = g;
  }
  if (!group) throw ParseError("weights JSON: no group given (file or --group)");
  if (!j.contains("weights") || !j["weights"].is_object()) {
    throw ParseError("weights JSON: \"weights\" must be an object of index -> weight");
  }
  std::map<std::size_t, double> weights;
  for (const auto& [key, value] : j["weights"].items()) {
    std::size_t index = 0;
    try {
      std::size_t pos = 0;
      const long long k = std::stoll(key, &pos);
      if (pos != key.size() || k < 0) throw std::invalid_argument(key);
      index = static_cast<std::size_t>(k);
    } catch (const std::exception&) {
      throw ParseError("weights JSON: key '" + key + "' is not a nonnegative element index");
    }
    if (!value.is_number()) throw ParseError("weights JSON: weight for '" + key + "' is not a number");
    weights[index] = value.get<double>();
  }
  return CayleyWeights::from_orbit_map(*group, weights);
}

std::string reports_to_csv(const std::vector<ReportRow>& rows) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "name,passed,worst_margin,witness,count\n";
  for (const auto& r : rows) {
    out += quote(r.name) + "," + (r.passed ? "true" : "false") + "," + fmt17(r.worst_margin) + "," +
           quote(r.witness) + "," + std::to_string(r.count) + "\n";
  }
  return out;
}

std::vector<ReportRow> parse_reports_csv(const std::string& csv) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(fields));
      fields.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !fields.empty()) {
    fields.push_back(std::move(field));
    records.push_back(std::move(fields));
  }
  if (records.empty() || records.front().size() != 5 || records.front()[0] != "name") {
    throw ParseError("report CSV: missing header");
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 5) throw ParseError("report CSV: expected 5 fields on line " + std::to_string(i + 1));
    rows.push_back({f[0], f[1] == "true", std::strtod(f[2].c_str(), nullptr), f[3],
                    static_cast<std::size_t>(std::stoull(f[4]))});
  }
  return rows;
}

ReportRow to_row(const CheckReport& r) {
  return {r.name, r.passed, r.worst_margin, r.witness, r.count};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heat kernels on weighted Abelian Cayley graphs and monotonic diffusion checks",
               "cayleyheat"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::string format = "json";
  std::string output = "-";
  bool timing = false;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> tol_flag, eps_flag;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", output, "Output path, '-' for standard output");
  app.add_flag("--timing", timing, "Record wall-clock time in timing_ms (otherwise 0)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol_flag, "Tolerance (default from HEAT_TOL or per command)");
  app.add_option("--eps", eps_flag, "Lattice tail epsilon (default from HEAT_EPS or 1e-12)");

  // Shared t-grid options.
  double tmin = 0.05, tmax = 50.0;
  std::size_t steps = 20;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--tmin", tmin, "Smallest t")->check(CLI::PositiveNumber);
    sub->add_option("--tmax", tmax, "Largest t")->check(CLI::PositiveNumber);
    sub->add_option("--steps", steps, "Number of log-spaced t values")->check(CLI::Range(2, 100000));
  };

  auto* selftest = app.add_subcommand("selftest", "Run the reduced-scale invariant suite");
  std::string fault;
  selftest->add_option("--inject-fault", fault, "Flip the margin sign of the named check");

  auto* monotone = app.add_subcommand("check-monotone", "Monotonic diffusion on a weighted Cayley graph");
  std::optional<std::string> group_spec;
  std::string weights_path;
  std::string method = "spectral";
  monotone->add_option("--group", group_spec, "Group, e.g. Z12xZ2");
  monotone->add_option("--weights", weights_path, "Weights JSON file")->required();
  monotone->add_option("--method", method, "Heat row method")
      ->check(CLI::IsMember({"spectral", "scaling-squaring"}));
  add_grid(monotone);

  auto* push = app.add_subcommand("pushforward", "Gaussian pushforward of a lattice homomorphism");
  std::string pf_group, basis_text, images_text;
  push->add_option("--group", pf_group, "Target group")->required();
  push->add_option("--basis", basis_text, "Basis vectors, e.g. '1,0;0.5,1.2'")->required();
  push->add_option("--images", images_text, "Element index of each basis vector's image, e.g. '1,3'")->required();

  auto* rate = app.add_subcommand("rate-check", "Approximation rate of chi_n and convergence of chi_n^{*n}");
  int lemma = 35;
  double alpha = 1.0;
  std::string rate_group = "Z12";
  std::size_t g0 = 1;
  std::string ns_text;
  rate->add_option("--lemma", lemma, "35: delta + alpha phi/n - chi_n rate; 37: chi_n^{*n} -> cexp(alpha phi)")
      ->check(CLI::IsMember({35, 37}));
  rate->add_option("--alpha", alpha, "alpha")->check(CLI::NonNegativeNumber);
  rate->add_option("--group", rate_group, "Group");
  rate->add_option("--g0", g0, "Element index of g0");
  rate->add_option("--ns", ns_text, "Comma-separated n values");

  auto* search = app.add_subcommand("search-counterexample", "Look for monotonic diffusion violations on general graphs");
  std::size_t n_max = 8, trials = 5000;
  std::uint64_t seed = 7;
  search->add_option("--n", n_max, "Maximum vertex count")->check(CLI::Range(3, 64));
  search->add_option("--trials", trials, "Number of random graphs")->check(CLI::PositiveNumber);
  search->add_option("--seed", seed, "Master seed");
  add_grid(search);

  auto* h3v = app.add_subcommand("h3-violation", "Four-point inequality on hyperbolic 3-space");
  double d1 = 3.0, t_h3 = 1.0, fit_min = 5.0, fit_max = 30.0;
  h3v->add_option("--d1", d1, "Distance d1")->check(CLI::PositiveNumber);
  h3v->add_option("--t", t_h3, "Time")->check(CLI::PositiveNumber);
  h3v->add_option("--fit-min", fit_min, "Smallest d1 of the asymptotic fit")->check(CLI::PositiveNumber);
  h3v->add_option("--fit-max", fit_max, "Largest d1 of the asymptotic fit")->check(CLI::PositiveNumber);

  auto* h3m = app.add_subcommand("h3-monotone", "Monotonic diffusion on hyperbolic 3-space");
  std::string ds_text = "0.5,2,8";
  h3m->add_option("--d", ds_text, "Comma-separated distances");
  add_grid(h3m);

  auto* sphere = app.add_subcommand("sphere-check", "Four-point inequality and monotonicity on S2 / RP2");
  std::string space_name = "both", ts_text = "0.05,0.2,1,5";
  std::size_t triples = 1000;
  int l_max = kDefaultLmax;
  std::uint64_t sphere_seed = 2024;
  sphere->add_option("--space", space_name, "s2, rp2 or both")->check(CLI::IsMember({"s2", "rp2", "both"}));
  sphere->add_option("--triples", triples, "Random triples per space")->check(CLI::PositiveNumber);
  sphere->add_option("--t", ts_text, "Comma-separated times");
  sphere->add_option("--lmax", l_max, "Series truncation degree")->check(CLI::Range(1, 100000));
  sphere->add_option("--seed", sphere_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const double default_tol = tol_flag ? *tol_flag : env_double("HEAT_TOL").value_or(1e-10);
    const double eps = eps_flag ? *eps_flag : env_double("HEAT_EPS").value_or(kDefaultTailEpsilon);
    if (!(default_tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!(eps > 0.0)) throw DomainError("tail epsilon must be positive");
    if (!(tmax > tmin)) throw DomainError("--tmax must exceed --tmin");

    Outcome o;
    if (command == "selftest") {
      o.config = Json{{"inject_fault", fault}};
      bool known = fault.empty();
      for (const auto& c : selftest_cases()) {
        const bool inject = c.name == fault;
        known = known || inject;
        if (inject && c.run_flipped) {
          o.add(c.run_flipped());
        } else {
          o.add(inject ? inject_sign_flip(c.run()) : c.run());
        }
      }
      if (!known) throw DomainError("selftest: unknown check '" + fault + "'");
      o.fail_unless_all_passed("selftest");
    } else if (command == "check-monotone") {
      const CayleyWeights cw = parse_weights_json(read_file(weights_path), group_spec);
      const auto grid = log_spaced_grid(tmin, tmax, steps);
      const HeatMethod hm = method == "spectral" ? HeatMethod::spectral : HeatMethod::scaling_squaring;
      o.config = Json{{"group", cw.group().to_string()}, {"weights", weights_path}, {"method", method},
                      {"grid", check_grid_json(tmin, tmax, steps)}, {"tolerance", default_tol}};
      Json data;
      data["t"] = vector_json(grid);
      Json ratios = Json::array();
      for (const auto& row : cayley_ratio_table(cw, grid, hm)) ratios.push_back(vector_json(row));
      data["ratios"] = std::move(ratios);
      o.add(monotone_check_cayley(cw, grid, default_tol, hm), std::move(data));
      o.fail_unless_all_passed("check-monotone");
    } else if (command == "pushforward") {
      const auto g = FiniteAbelianGroup::parse(pf_group);
      std::vector<GroupElement> images;
      for (long long idx : parse_int_list(images_text)) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= g.order()) {
          throw DomainError("--images: index " + std::to_string(idx) + " out of range");
        }
        images.push_back(g.element(static_cast<std::size_t>(idx)));
      }
      const LatticeHom hom(Lattice::from_vectors(parse_basis(basis_text)), g, std::move(images));
      const PushforwardResult pf = pushforward(hom, eps);
      const GaussianMass mass = gaussian_mass(hom.lattice(), eps);
      o.config = Json{{"group", g.to_string()}, {"basis", basis_text}, {"images", images_text}, {"epsilon", eps}};
      Json data{{"chi", vector_json(pf.chi.values())}, {"tail_bound", pf.tail_bound},
                {"mass", mass.mass}, {"mass_tail_bound", mass.tail_bound}};
      const double tol = tol_flag ? *tol_flag : env_double("HEAT_TOL").value_or(1e-12);
      o.add(sweep_rsd(pf.chi, tol), std::move(data));
      o.add(sweep_mean_ineq(pf.chi, tol));
      o.fail_unless_all_passed("pushforward");
    } else if (command == "rate-check") {
      const auto g = FiniteAbelianGroup::parse(rate_group);
      if (g0 >= g.order()) throw DomainError("--g0 out of range");
      std::vector<long long> ns = ns_text.empty()
                                      ? (lemma == 35 ? std::vector<long long>{16, 32, 64, 128, 256}
                                                     : std::vector<long long>{16, 64, 256})
                                      : parse_int_list(ns_text);
      o.config = Json{{"lemma", lemma}, {"alpha", alpha}, {"group", g.to_string()}, {"g0", g0}, {"ns", ns}};
      const RateReport rr = lemma == 35 ? rate_check_lemma35(alpha, g.element(g0), g, ns)
                                        : convergence_check_lemma37(alpha, g.element(g0), g, ns);
      CheckReport r = make_report(lemma == 35 ? "chi_n_rate" : "chi_n_power_convergence", 0.0);
      if (lemma == 35) {
        r.observe(-3.5 - rr.fitted_order, "fitted_order=" + fmt17(rr.fitted_order));
      } else {
        for (std::size_t i = 1; i < rr.errors.size(); ++i) {
          r.observe(rr.errors[i - 1] - rr.errors[i], "n=" + std::to_string(rr.ns[i]));
        }
        r.observe(rr.errors.front() / 4.0 - rr.errors.back(), "drop over range");
      }
      r.passed = rr.passed;
      o.add(std::move(r), Json{{"ns", rr.ns}, {"errors", vector_json(rr.errors)},
                               {"fitted_order", number_or_null(rr.fitted_order)}});
      o.fail_unless_all_passed("rate-check");
    } else if (command == "search-counterexample") {
      CounterexampleSearchConfig cfg;
      cfg.max_vertices = n_max;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.t_grid = log_spaced_grid(tmin, tmax, steps);
      cfg.tol = default_tol;
      cfg.jobs = jobs;
      o.config = Json{{"n", n_max}, {"trials", trials}, {"seed", seed},
                      {"grid", check_grid_json(tmin, tmax, steps)}, {"tolerance", default_tol}};
      const auto res = search_counterexample(cfg);
      CheckReport r = res.report;
      r.name = "counterexample_search";
      r.passed = res.found;
      Json data{{"found", res.found}, {"trials_run", res.trials_run}};
      if (res.graph) {
        data["trial"] = res.first_trial;
        Json w = Json::array();
        const auto& m = res.graph->weights();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          Json row = Json::array();
          for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
          w.push_back(std::move(row));
        }
        data["weights"] = std::move(w);
      }
      o.add(std::move(r), std::move(data));
      if (!res.found) {
        o.exit_code = kCheckFailed;
        o.message = "search-counterexample: none found after " + std::to_string(res.trials_run) + " trials";
      }
    } else if (command == "h3-violation") {
      if (!(fit_max > fit_min)) throw DomainError("--fit-max must exceed --fit-min");
      const H3ReducedCheck rc = h3_reduced_check(d1, t_h3);
      std::vector<double> d1s;
      for (int i = 0; i <= 50; ++i) d1s.push_back(fit_min + (fit_max - fit_min) * i / 50.0);
      const H3Asymptotics fit = h3_asymptotic_fit(d1s, t_h3);
      o.config = Json{{"d1", d1}, {"t", t_h3}, {"fit_min", fit_min}, {"fit_max", fit_max}};
      CheckReport r = make_report("h3_reduced_inequality_violation", 0.0);
      r.observe(rc.ls - rc.rs, "d1=" + fmt17(d1) + " t=" + fmt17(t_h3));
      r.passed = rc.violated;
      o.add(std::move(r), Json{{"LS", rc.ls}, {"RS", rc.rs}, {"violated", rc.violated}, {"d2", rc.d2},
                               {"log_LS", rc.log_ls}, {"log_RS", rc.log_rs},
                               {"unreduced_log_LS", rc.unreduced_log_ls},
                               {"unreduced_log_RS", rc.unreduced_log_rs},
                               {"fit_log_LS_quadratic", fit.log_ls.a}, {"fit_log_RS_quadratic", fit.log_rs.a},
                               {"expected_log_LS_quadratic", -1.0 / (2.0 * t_h3)},
                               {"expected_log_RS_quadratic", -1.0 / t_h3}});
      CheckReport fr = make_report("h3_asymptotic_fit", 0.0);
      const double rel_ls = std::abs(fit.log_ls.a * 2.0 * t_h3 + 1.0);
      const double rel_rs = std::abs(fit.log_rs.a * t_h3 + 1.0);
      fr.observe(0.1 - rel_ls, "log LS quadratic coefficient");
      fr.observe(0.1 - rel_rs, "log RS quadratic coefficient");
      o.add(std::move(fr));
      o.fail_unless_all_passed("h3-violation");
    } else if (command == "h3-monotone") {
      const auto grid = log_spaced_grid(tmin, tmax, steps);
      const auto ds = parse_double_list(ds_text);
      o.config = Json{{"d", ds}, {"grid", check_grid_json(tmin, tmax, steps)}};
      for (double d : ds) {
        if (!(d >= 0.0)) throw DomainError("--d: distances must be nonnegative");
        o.add(h3_monotone_check(d, grid, 0.0));
      }
      o.fail_unless_all_passed("h3-monotone");
    } else if (command == "sphere-check") {
      const auto ts = parse_double_list(ts_text);
      const double tol = tol_flag ? *tol_flag : env_double("HEAT_TOL").value_or(1e-12);
      o.config = Json{{"space", space_name}, {"triples", triples}, {"t", ts}, {"lmax", l_max},
                      {"seed", sphere_seed}, {"tolerance", tol}};
      std::vector<Space> spaces;
      if (space_name != "rp2") spaces.push_back(Space::s2);
      if (space_name != "s2") spaces.push_back(Space::rp2);
      const auto grid = log_spaced_grid(std::max(tmin, 0.05), tmax, steps);
      for (Space sp : spaces) {
        const SymmetricSweep sw = sphere_sweep(sp, triples, ts, sphere_seed, tol, l_max);
        o.add(sw.inequality);
        o.add(sw.lemma);
        CheckReport impl = make_report(sp == Space::s2 ? "implication_s2" : "implication_rp2", 0.0);
        impl.observe(-static_cast<double>(sw.implication_failures), "passes four-point form, fails averaged form");
        o.add(std::move(impl));
        CheckReport mono = make_report(sp == Space::s2 ? "s2_monotone" : "rp2_monotone", 0.0);
        for (double c : {0.5, 0.0, -0.5, -1.0}) mono.merge(sphere_monotone_check(c, grid, l_max, sp));
        o.add(std::move(mono));
      }
      o.fail_unless_all_passed("sphere-check");
    }
    const double elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(command, o, format, output, timing, elapsed, out);
    if (o.exit_code != kOk) err << o.message << "\n";
    return o.exit_code;
  } catch (const NumericalError& e) {
    err << command << ": numerical guard: " << e.what() << "\n";
    return kNumericalGuard;
  } catch (const Error& e) {
    err << command << ": input error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace cayleyheat::cli
