// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs one.

#include "weakgrad/harness.hpp"
#include "weakgrad/levelset.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace weakgrad;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// Pass when every assertion passes; the summary lists the others.
Outcome judge(const std::vector<ExperimentReport>& reports, std::string summary) {
  Outcome o{true, std::move(summary)};
  for (const auto& r : reports)
    for (const auto& a : r.assertions)
      if (a.verdict != Verdict::Pass) {
        o.pass = false;
        o.summary += "; " + to_string(a.verdict) + " " + a.name + " (" + fmt(a.measured) + " vs " + fmt(a.bound) + ")";
      }
  return o;
}

ExperimentConfig kind(const std::string& k) {
  ExperimentConfig c;
  c.kind = k;
  return c;
}

Outcome c1() {
  const auto t0 = Clock::now();
  const auto r = run_experiment(kind("limit-identity"));
  const double t = seconds_since(t0);
  std::string s = "errors";
  for (const auto& row : r.table) s += " " + std::to_string(row.grid) + ":" + fmt(row.rel_err, 3);
  Outcome o = judge({r}, s + ", " + fmt(t, 3) + " s");
  if (t > 30.0) {
    o.pass = false;
    o.summary += "; runtime above 30 s";
  }
  return o;
}

Outcome c2() {
  ExperimentConfig c = kind("limit-identity");
  c.functions = {smoothed_hat(0.0, 1.0, 16)};
  c.spaces = {WeightedLebesgue{1.0, power_weight(-0.5, 0.37)}};
  c.p = 1.0;
  c.q = {1.0, 2.0};
  c.min_radius_cells = {8.0, 4.0};
  c.grids = {4097};
  c.tolerances["rel_err"] = 0.10;
  const auto r = run_experiment(c);
  std::string s = "errors";
  for (const auto& row : r.table) s += " " + row.label.substr(row.label.rfind('/') + 1) + ":" + fmt(row.rel_err, 3);
  return judge({r}, s);
}

Outcome c3() {
  ExperimentConfig c = kind("limit-identity");
  c.dim = 2;
  c.q = {2.0};
  c.min_radius_cells = {4.0};
  c.tolerances["rel_err"] = 0.05;
  const auto t0 = Clock::now();
  const auto r = run_experiment(c);
  const double t = seconds_since(t0);
  Outcome o = judge({r}, "256^2 error " + fmt(r.table.back().rel_err, 3) + ", " + fmt(t, 3) + " s");
  if (t > 300.0) {
    o.pass = false;
    o.summary += "; runtime above 5 min";
  }
  return o;
}

Outcome c4() {
  ExperimentConfig one = kind("sandwich");
  ExperimentConfig two = kind("sandwich");
  two.dim = 2;
  const auto r1 = run_experiment(one);
  const auto r2 = run_experiment(two);
  std::string s = "upper constants";
  for (const auto* r : {&r1, &r2})
    for (const auto& [k, v] : r->constants)
      if (k.ends_with("measured_upper")) s += " " + k.substr(0, k.find('{')) + ":" + fmt(v, 3);
  return judge({r1, r2}, s);
}

Outcome c5() {
  const auto r = run_experiment(kind("s1-divergence"));
  std::string s = "growth";
  for (std::size_t i = 1; i < r.table.size(); ++i) s += " " + fmt(r.table[i].rel_err, 3);
  s += ", control change";
  for (std::size_t i = 1; i < r.table.size(); ++i)
    s += " " + fmt(std::abs(r.table[i].rhs / r.table[i - 1].rhs - 1.0), 3);
  return judge({r}, s);
}

Outcome c6() {
  const auto r = run_experiment(kind("space-identities"));
  double worst = 0.0;
  for (const auto& [k, v] : r.constants) worst = std::max(worst, v);
  return judge({r}, "20 fields, worst relative difference " + fmt(worst, 3));
}

Outcome c7() {
  const auto r = run_experiment(kind("dyadic-cover"));
  return judge({r}, "max side/diameter " + fmt(r.constants.at("cover/max_side_over_diameter"), 5));
}

Outcome c8() {
  const auto r = run_experiment(kind("rubio"));
  std::string s;
  for (const auto& [k, v] : r.constants) {
    const std::string weight = k.find("power") != std::string::npos ? "|x|^-1/2" : "w=1";
    s += (s.empty() ? "" : ", ") + weight + " " + k.substr(k.rfind('/') + 1) + " " + fmt(v, 3);
  }
  return judge({r}, s);
}

Outcome c9() {
  const auto r = run_experiment(kind("ap-necessity"));
  std::string s = "ratios";
  for (const auto& row : r.table) s += " " + row.label + ":" + fmt(row.ratio, 4);
  return judge({r}, s);
}

Outcome c10() {
  ExperimentConfig a = kind("sobolev-interp");
  ExperimentConfig b = kind("sobolev-interp");
  b.q1 = 4.0;
  ExperimentConfig g = kind("gn-interp");
  std::vector<ExperimentReport> rs{run_experiment(a), run_experiment(b), run_experiment(g)};
  std::string s = "fitted C";
  const char* names[] = {"(inf,1/2)", "(4,1/2)", "GN"};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& r = rs[i];
    s += " " + std::string(names[i]) + ":" + fmt(r.constants.at("fitted_C/" + std::to_string(r.config.grids.back())), 3);
  }
  return judge(rs, s);
}

Outcome c11() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int mismatched = 0;
  for (int t = 0; t < 50; ++t) {
    const int dim = t % 2 == 0 ? 1 : 2;
    const Lattice lat = make_lattice(dim, -1.5, 1.5, dim == 1 ? 257 : 33);
    Eigen::ArrayXd v(lat.size());
    for (Index i = 0; i < lat.size(); ++i) v(i) = uni(rng) * 2.0 - 1.0;
    const GridFunction f(lat, v);
    const double q = 0.5 + 2.5 * uni(rng);
    const double s = 0.05 + 0.95 * uni(rng);
    const double lambda = std::pow(10.0, -1.0 + 3.0 * uni(rng));
    const LevelSetParams par{q, s, lambda};
    const auto a = measure_field(f, par, ScanMode::Accelerated);
    const auto b = measure_field(f, par, ScanMode::Brute);
    mismatched += a.counts != b.counts;
  }
  // Timing on the top valid decade at 2^14 nodes.
  const Lattice lat = make_lattice(1, -2.0, 2.0, (Index{1} << 14) + 1);
  const GridFunction f = sample(smoothed_hat(0.0, 1.0, 16), lat);
  const auto grid = lambda_grid(f, 1.0, 1.0, {});
  const std::vector<double> lambdas{grid.back() / 10.0, grid.back() / std::sqrt(10.0), grid.back()};
  double t_fast = 0.0, t_brute = 0.0;
  for (double lambda : lambdas) {
    const LevelSetParams par{1.0, 1.0, lambda};
    auto t0 = Clock::now();
    const auto a = measure_field(f, par, ScanMode::Accelerated);
    t_fast += seconds_since(t0);
    t0 = Clock::now();
    const auto b = measure_field(f, par, ScanMode::Brute);
    t_brute += seconds_since(t0);
    mismatched += a.counts != b.counts;
  }
  const double speedup = t_brute / t_fast;
  return {mismatched == 0 && speedup >= 5.0,
          std::to_string(mismatched) + " mismatched cases of 53, speedup " + fmt(speedup, 4) + "x at 16385 nodes"};
}

Outcome c12() {
  double worst = 0.0;
  bool exact = true;
  for (double q : {0.5, 1.0, 2.0, 3.0})
    for (int n : {1, 2, 3}) {
      const auto k = sphere_constant(q, n);
      worst = std::max(worst, std::abs(k.closed_form - k.quadrature));
      if (n == 1) exact &= k.closed_form == 2.0 && k.quadrature == 2.0;
    }
  const double e22 = std::abs(sphere_constant(2.0, 2).value - std::numbers::pi);
  const double e12 = std::abs(sphere_constant(1.0, 2).value - 4.0);
  const bool pass = worst <= 1e-8 && exact && e22 <= 1e-8 && e12 <= 1e-8;
  return {pass, "max |closed - quadrature| " + fmt(worst, 3) + ", K(q,1)=2 " + (exact ? "exact" : "inexact") +
                    ", |K(2,2)-pi| " + fmt(e22, 3) + ", |K(1,2)-4| " + fmt(e12, 3)};
}

Outcome c13() {
  ExperimentConfig two = kind("poincare");
  two.dim = 2;
  const auto r1 = run_experiment(kind("poincare"));
  const auto r2 = run_experiment(two);
  double worst = 0.0;
  for (const auto* r : {&r1, &r2})
    for (const auto& [k, v] : r->constants)
      if (k.ends_with("/slope")) worst = std::max(worst, std::abs(v));
  return judge({r1, r2}, "max |slope| " + fmt(worst, 3));
}

Outcome c14() {
  const auto r = run_experiment(kind("duality"));
  double lebesgue_dev = 0.0, lo = 1e300, hi = 0.0;
  for (const auto& [k, v] : r.constants) {
    if (k.starts_with("lebesgue")) {
      lebesgue_dev = std::max(lebesgue_dev, std::abs(v - 1.0));
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return judge({r}, "L^p max |value - 1| " + fmt(lebesgue_dev, 3) + ", weighted/Orlicz values in [" + fmt(lo, 5) +
                         ", " + fmt(hi, 5) + "]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14};
  const char* titles[] = {"limit identity 1D",   "limit identity weighted", "limit identity 2D",
                          "sandwich",            "s=1 divergence",          "space identities",
                          "dyadic systems",      "Rubio de Francia",        "A_p necessity",
                          "interpolation",       "brute/accelerated scan",  "sphere constant",
                          "Poincare",            "indicator duality"};
  bool all = true;
  for (int i = 1; i <= 14; ++i) {
    if (only && i != only) continue;
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << i << " [" << titles[i - 1] << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.summary << std::endl;
    all &= o.pass;
  }
  return all ? 0 : 1;
}
