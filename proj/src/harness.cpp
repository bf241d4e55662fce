#include "weakgrad/harness.hpp"

#include "weakgrad/dyadic.hpp"
#include "weakgrad/operators.hpp"
#include "weakgrad/weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace weakgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

Eigen::VectorXd point(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

FunctionSpec sum_of(std::vector<FunctionSpec> parts) {
  FunctionSpec f;
  f.family = Family::Sum;
  f.parts = std::move(parts);
  return f;
}

FunctionSpec tensor_of(std::vector<FunctionSpec> parts) {
  FunctionSpec f;
  f.family = Family::TensorProduct;
  f.parts = std::move(parts);
  return f;
}

double tol(const ExperimentConfig& c, const std::string& name) {
  auto it = c.tolerances.find(name);
  if (it == c.tolerances.end()) throw std::logic_error("tolerance '" + name + "' missing after resolve");
  return it->second;
}

Lattice lattice_for(const ExperimentConfig& c, Index points) {
  return make_lattice(c.dim, c.window[0], c.window[1], points);
}

void add(ExperimentReport& r, std::string name, bool ok, double measured, double bound, std::string detail = {}) {
  r.assertions.push_back({std::move(name), ok ? Verdict::Pass : Verdict::Fail, measured, bound, std::move(detail)});
}

void add_unreliable(ExperimentReport& r, std::string name, std::string detail) {
  r.assertions.push_back({std::move(name), Verdict::Unreliable, kNaN, kNaN, std::move(detail)});
}

/// Exponent playing the role of p in the level-set hypotheses.
double natural_exponent(const SpaceSpec& space) {
  if (const auto* l = std::get_if<Lebesgue>(&space)) return l->p;
  if (const auto* w = std::get_if<WeightedLebesgue>(&space)) return w->p;
  if (const auto* m = std::get_if<Morrey>(&space)) return m->r;
  if (const auto* mx = std::get_if<MixedNorm>(&space)) return *std::min_element(mx->r.begin(), mx->r.end());
  if (const auto* v = std::get_if<VariableLebesgue>(&space)) return std::min(v->r.minus, v->r.plus);
  if (const auto* o = std::get_if<Orlicz>(&space)) return o->phi.p;
  if (const auto* s = std::get_if<OrliczSlice>(&space)) return std::min(s->phi.p, s->r);
  return 1.0;
}

// Unique, readable key: name followed by the parameters.
std::string space_label(const SpaceSpec& space) {
  json j = space_to_json(space);
  j.erase("space");
  return space_name(space) + j.dump();
}

std::size_t q_index(const ExperimentConfig& c, std::size_t space_index) { return c.q.size() == 1 ? 0 : space_index; }

double q_for(const ExperimentConfig& c, std::size_t space_index) { return c.q.at(q_index(c, space_index)); }

// Random smooth field: four bumps with random centres inside [-support, support].
GridFunction random_field(const Lattice& lat, std::mt19937_64& rng, double support) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(lat.size());
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd c(lat.dim());
    for (int a = 0; a < lat.dim(); ++a) c(a) = 0.7 * support * uni(rng);
    const double r = support * (0.15 + 0.15 * std::abs(uni(rng)));
    v += sample(smooth_bump(c, r, gauss(rng)), lat).values();
  }
  return GridFunction(lat, v);
}

// ---------------------------------------------------------------- defaults

std::vector<Index> ladder(Index first, int rungs, Index plus = 1) {
  std::vector<Index> g;
  for (int i = 0; i < rungs; ++i) g.push_back((first << i) + plus);
  return g;
}

OrliczSpec power_phi(double p) { return {OrliczSpec::Family::Power, p}; }

void default_if_empty(std::map<std::string, double>& t, const std::string& k, double v) {
  t.emplace(k, v);
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"limit-identity", "sandwich",        "s1-divergence", "poincare",
                                              "ap-necessity",   "sobolev-interp",  "gn-interp",     "rubio",
                                              "dyadic-cover",   "space-identities", "duality",      "riesz-bound",
                                              "br-uniform"};
  return kinds;
}

std::vector<FunctionSpec> smooth_catalog(int dim) {
  if (dim == 1) {
    const auto c = [](double x) { return point({x}); };
    return {smooth_bump(c(0.0), 1.0),
            smooth_bump(c(0.3), 0.6, 2.0),
            smooth_bump(c(-0.5), 1.2, 0.5),
            gaussian_like(c(0.0), 0.4),
            gaussian_like(c(0.2), 0.25, 1.5),
            smoothed_hat(0.0, 1.0, 16),
            smoothed_hat(0.1, 0.6, 8),
            sum_of({smooth_bump(c(-0.6), 0.5), smooth_bump(c(0.5), 0.7, -1.0)}),
            sum_of({gaussian_like(c(0.0), 0.3), smooth_bump(c(0.4), 0.5, 0.5)}),
            smooth_bump(c(0.2), 0.35, 1.0)};
  }
  if (dim == 2) {
    return {smooth_bump(point({0.0, 0.0}), 1.0),
            smooth_bump(point({0.3, -0.2}), 0.6, 2.0),
            smooth_bump(point({-0.4, 0.3}), 1.2, 0.5),
            gaussian_like(point({0.0, 0.0}), 0.4),
            gaussian_like(point({0.2, 0.1}), 0.25, 1.5),
            tensor_of({smooth_bump(point({0.0}), 0.9), smooth_bump(point({0.1}), 0.6)}),
            tensor_of({gaussian_like(point({0.2}), 0.3), smooth_bump(point({0.0}), 1.0)}),
            sum_of({smooth_bump(point({-0.5, 0.0}), 0.5), smooth_bump(point({0.5, 0.2}), 0.7, -1.0)}),
            sum_of({gaussian_like(point({0.0, 0.0}), 0.3), smooth_bump(point({0.4, -0.3}), 0.5, 0.5)}),
            smooth_bump(point({0.2, 0.2}), 0.4, 1.0)};
  }
  throw std::invalid_argument("smooth_catalog: dim must be 1 or 2");
}

FunctionSpec dilate(const FunctionSpec& f, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("dilate: R must be positive");
  FunctionSpec g = f;
  switch (f.family) {
    case Family::Hat:
    case Family::SmoothBump:
    case Family::GaussianLike:
      g.center = f.center * R;
      g.radius = f.radius * R;
      return g;
    case Family::Sum:
    case Family::TensorProduct:
      for (auto& p : g.parts) p = dilate(p, R);
      return g;
    case Family::Constant: return g;
    case Family::Linear:
      g.slope = f.slope / R;
      g.center = f.center * R;
      return g;
    case Family::SmoothedHat: break;
  }
  throw std::invalid_argument("dilate: the smoothed hat does not dilate within its family");
}

ExperimentConfig resolve(const ExperimentConfig& in) {
  ExperimentConfig c = in;
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw std::invalid_argument("unknown experiment kind '" + c.kind + "'");
  auto& t = c.tolerances;
  const bool no_window = c.window[0] == 0.0 && c.window[1] == 0.0;
  auto window = [&](double lo, double hi) {
    if (no_window) c.window = {lo, hi};
  };
  auto grids = [&](std::vector<Index> g) {
    if (c.grids.empty()) c.grids = std::move(g);
  };

  if (c.kind == "limit-identity") {
    if (c.dim == 1) {
      window(-2.0, 2.0);
      grids(ladder(512, 4));
      if (c.functions.empty()) c.functions = {smoothed_hat(0.0, 1.0, 16)};
      if (c.spaces.empty()) c.spaces = {Lebesgue{1.0}};
    } else {
      window(-1.2, 1.2);
      grids({257});
      if (c.functions.empty()) c.functions = {smooth_bump(Eigen::VectorXd::Zero(c.dim), 1.0)};
      if (c.spaces.empty()) c.spaces = {Lebesgue{2.0}};
    }
    if (c.q.empty()) c.q = {natural_exponent(c.spaces[0])};
    if (!c.s) c.s = 1.0;
    default_if_empty(t, "rel_err", 0.03);
    default_if_empty(t, "sup_slack", 0.01);
  } else if (c.kind == "sandwich") {
    if (c.dim == 1) {
      window(-3.0, 3.0);
      grids({2049});
      if (c.spaces.empty())
        c.spaces = {Lebesgue{1.0}, Lebesgue{2.0}, WeightedLebesgue{1.5, power_weight(-0.5)}, Morrey{1.0, 2.0},
                    Orlicz{power_phi(2.0)}};
    } else {
      window(-2.0, 2.0);
      grids({193});
      if (c.spaces.empty()) c.spaces = {MixedNorm{{2.0, 2.0}}};
    }
    if (c.functions.empty()) c.functions = smooth_catalog(c.dim);
    if (c.q.empty())
      for (const auto& sp : c.spaces) c.q.push_back(natural_exponent(sp));
    // 2D lattices are coarse in cells per feature; a smaller clamp keeps
    // the top decade inside the smooth regime.
    if (c.dim >= 2 && c.min_radius_cells.empty()) c.min_radius_cells.assign(c.q.size(), 4.0);
    if (!c.s) c.s = 1.0;
    default_if_empty(t, "lower_slack", 0.95);
    default_if_empty(t, "upper_factor", 20.0);
    default_if_empty(t, "spread", 10.0);
  } else if (c.kind == "s1-divergence") {
    window(-2.0, 2.0);
    grids(ladder(512, 4));
    if (c.functions.empty()) c.functions = {hat(0.0, 1.0)};
    if (c.spaces.empty()) c.spaces = {Lebesgue{2.0}};
    if (c.q.empty()) c.q = {2.0};
    if (!c.s) c.s = 1.0;
    default_if_empty(t, "min_growth", 0.10);
    default_if_empty(t, "control_change", 0.02);
    default_if_empty(t, "control_s", 0.5);
  } else if (c.kind == "poincare") {
    if (c.dim == 1) {
      window(-5.0, 5.0);
      grids({4001});
    } else {
      window(-4.4, 4.4);
      grids({221});
    }
    if (c.functions.empty()) {
      if (c.dim == 1)
        c.functions = {smooth_bump(point({0.3}), 1.2), gaussian_like(point({-0.4}), 0.8),
                       sum_of({smooth_bump(point({1.2}), 0.6), smooth_bump(point({-1.0}), 0.7, -1.0)}),
                       smooth_bump(point({1.5}), 1.0)};
      else
        c.functions = {smooth_bump(point({0.3, 0.2}), 1.2), gaussian_like(point({-0.4, 0.5}), 0.8),
                       sum_of({smooth_bump(point({1.2, 0.3}), 0.6), smooth_bump(point({-1.0, -0.8}), 0.7, -1.0)}),
                       smooth_bump(point({1.5, -0.5}), 1.0)};
    }
    if (c.spaces.empty()) c.spaces = {Lebesgue{2.0}, Orlicz{power_phi(2.0)}};
    if (c.radii.empty()) c.radii = {0.5, 1.0, 2.0};
    default_if_empty(t, "max_slope", 0.15);
  } else if (c.kind == "ap-necessity") {
    window(-3.0, 3.0);
    grids({3073});
    if (!c.p) c.p = 1.0;
    if (c.epsilons.empty()) c.epsilons = {1.0, 1e-2, 1e-3};
    default_if_empty(t, "min_growth_factor", 5.0);
  } else if (c.kind == "sobolev-interp" || c.kind == "gn-interp") {
    window(-16.0, 16.0);
    grids({4097, 8193});
    if (c.functions.empty()) {
      auto cat = smooth_catalog(1);
      c.functions.assign(cat.begin(), cat.begin() + 5);
    }
    if (c.spaces.empty()) c.spaces = {Lebesgue{2.0}};
    if (!c.theta) c.theta = 0.5;
    if (c.kind == "gn-interp") {
      if (!c.s1) c.s1 = 0.25;
      if (!c.q1) c.q1 = 2.0;
    } else if (!c.q1) {
      c.q1 = kInf;
    }
    const double th = *c.theta;
    const double inv_q = (1.0 - th) / *c.q1 + th;
    if (c.q.empty()) c.q = {1.0 / inv_q};
    if (!c.s) c.s = c.kind == "gn-interp" ? (1.0 - th) * *c.s1 + th : th;
    default_if_empty(t, "constant_spread", 0.5);
    default_if_empty(t, "bookkeeping", 1e-12);
  } else if (c.kind == "rubio") {
    window(-2.0, 2.0);
    grids({513});
    if (c.spaces.empty())
      c.spaces = {WeightedLebesgue{2.0, constant_weight(1.0)}, WeightedLebesgue{2.0, power_weight(-0.5)}};
    if (c.trials == 0) c.trials = 100;
    if (!c.p) c.p = 2.0;
    default_if_empty(t, "a1_slack", 1.25);
    default_if_empty(t, "k_max", 20.0);
  } else if (c.kind == "dyadic-cover") {
    if (c.trials == 0) c.trials = 10000;
    default_if_empty(t, "max_ratio", 6.01);
  } else if (c.kind == "space-identities") {
    c.dim = 2;
    window(-1.5, 1.5);
    grids({61});
    if (c.trials == 0) c.trials = 20;
    default_if_empty(t, "identity", 1e-8);
    default_if_empty(t, "identity_bisection", 1e-6);
  } else if (c.kind == "duality") {
    window(-12.0, 12.0);
    grids({4801});
    if (c.spaces.empty())
      c.spaces = {Lebesgue{2.0},
                  Lebesgue{1.5},
                  WeightedLebesgue{2.0, power_weight(0.5)},
                  WeightedLebesgue{2.0, power_weight(-0.5)},
                  Orlicz{power_phi(1.5)},
                  Orlicz{{OrliczSpec::Family::PowerLog, 2.0}}};
    if (c.radii.empty()) c.radii = {0.1, 0.3, 1.0, 3.0, 10.0};
    default_if_empty(t, "lebesgue_exact", 1e-10);
    default_if_empty(t, "lower_slack", 1e-10);
    default_if_empty(t, "upper", 10.0);
    default_if_empty(t, "spread", 0.5);
    default_if_empty(t, "center", 0.3);
  } else if (c.kind == "riesz-bound") {
    c.dim = 2;
    window(-2.5, 2.5);
    grids({201});
    if (c.functions.empty())
      c.functions = {constant(1.0), smooth_bump(point({0.2, 0.1}), 0.8), gaussian_like(point({-0.3, 0.2}), 0.4),
                     sum_of({smooth_bump(point({0.5, 0.0}), 0.4), smooth_bump(point({-0.4, -0.3}), 0.5, -1.0)})};
    if (c.spaces.empty()) c.spaces = {Lebesgue{2.0}};
    if (c.radii.empty()) c.radii = {0.5, 1.0, 2.0};
    default_if_empty(t, "spread", 0.25);
  } else if (c.kind == "br-uniform") {
    window(-4.0, 4.0);
    grids({1601});
    if (c.spaces.empty()) {
      ExponentProfile r;
      r.kind = ExponentProfile::Kind::SmoothStep;
      r.minus = 1.5;
      r.plus = 3.0;
      r.width = 0.25;
      c.spaces = {Orlicz{power_phi(2.0)}, OrliczSlice{power_phi(1.5), 3.0, 0.25}, VariableLebesgue{r}};
    }
    if (c.radii.empty())
      for (int i = 0; i <= 6; ++i) c.radii.push_back(0.02 * std::pow(10.0, i / 3.0));
    if (c.trials == 0) c.trials = 20;
    default_if_empty(t, "growth", 0.25);
  }
  if (c.grids.empty()) c.grids = {0};
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.dim < 1 || c.dim > 3) throw HypothesisError("dimension must be 1, 2 or 3");
  for (Index g : c.grids)
    if (c.kind != "dyadic-cover" && g < 3) throw HypothesisError("grid sizes must be >= 3 points per axis");
  if (c.kind != "dyadic-cover" && !(c.window[1] > c.window[0])) throw HypothesisError("window must satisfy lo < hi");
  for (const auto& sp : c.spaces) {
    try {
      weakgrad::validate(sp, c.dim);
    } catch (const std::invalid_argument& e) {
      throw HypothesisError(std::string("space: ") + e.what());
    }
  }
  for (const auto& f : c.functions) {
    try {
      f.validate(c.dim);
    } catch (const std::invalid_argument& e) {
      throw HypothesisError(std::string("function: ") + e.what());
    }
  }
  if (c.kind == "sandwich" && c.q.size() != 1 && c.q.size() != c.spaces.size())
    throw HypothesisError("q must hold one value or one per space");
  for (double q : c.q)
    if (!(q > 0.0)) throw HypothesisError("q > 0");
  if (!c.min_radius_cells.empty() && c.min_radius_cells.size() != c.q.size())
    throw HypothesisError("min_radius_cells must hold one value per q");

  if (c.kind == "limit-identity" || c.kind == "sandwich") {
    for (std::size_t i = 0; i < c.spaces.size(); ++i) {
      const double p = c.p ? *c.p : natural_exponent(c.spaces[i]);
      const auto qs = c.kind == "limit-identity" ? c.q : std::vector<double>{q_for(c, i)};
      for (double q : qs) {
        const double lhs = c.dim * (1.0 / p - 1.0 / q);
        if (!(lhs < 1.0))
          throw HypothesisError("n(1/p - 1/q) < 1 violated: n=" + std::to_string(c.dim) + ", p=" + fmt(p) +
                                ", q=" + fmt(q) + " gives " + fmt(lhs));
      }
      if (const auto* w = std::get_if<WeightedLebesgue>(&c.spaces[i]); w && c.kind == "limit-identity") {
        const auto adm = is_a1_admissible(w->w, c.dim);
        if (!adm.admissible) throw HypothesisError("weight must be A_1: " + adm.rationale);
      }
    }
    if (c.s && *c.s != 1.0) throw HypothesisError("s = 1 is required for the gradient identity");
  }
  if (c.kind == "sobolev-interp" || c.kind == "gn-interp") {
    const double th = c.theta.value_or(kNaN);
    if (!(th > 0.0 && th < 1.0)) throw HypothesisError("theta in (0, 1) violated: theta=" + fmt(th));
    const double q1 = c.q1.value_or(kNaN);
    if (!(q1 >= 1.0)) throw HypothesisError("q1 in [1, infinity] violated: q1=" + fmt(q1));
    if (c.q.size() != 1 || !c.s) throw HypothesisError("a single q and s are required");
    const double eps = c.tolerances.count("bookkeeping") ? c.tolerances.at("bookkeeping") : 1e-12;
    const double inv_q = (1.0 - th) / q1 + th;
    if (std::abs(1.0 / c.q[0] - inv_q) > eps)
      throw HypothesisError("interpolation relation 1/q = (1-theta)/q1 + theta violated: 1/q=" + fmt(1.0 / c.q[0]) +
                            ", (1-theta)/q1 + theta=" + fmt(inv_q));
    if (c.kind == "gn-interp") {
      const double s1 = c.s1.value_or(kNaN);
      if (!(s1 > 0.0 && s1 < 1.0)) throw HypothesisError("s1 in (0, 1) violated: s1=" + fmt(s1));
      if (std::isinf(q1)) throw HypothesisError("q1 < infinity is required for the weak s1 factor");
      const double s = (1.0 - th) * s1 + th;
      if (std::abs(*c.s - s) > eps)
        throw HypothesisError("interpolation relation s = (1-theta) s1 + theta violated: s=" + fmt(*c.s) +
                              ", (1-theta) s1 + theta=" + fmt(s));
    } else if (std::abs(*c.s - th) > eps) {
      throw HypothesisError("interpolation relation s = theta violated: s=" + fmt(*c.s) + ", theta=" + fmt(th));
    }
    if (c.dim != 1) throw HypothesisError("interpolation experiments are one-dimensional");
  }
  if (c.kind == "ap-necessity") {
    if (c.dim != 1) throw HypothesisError("A_p necessity is a one-dimensional statement");
    if (!(c.p.value_or(0.0) >= 1.0)) throw HypothesisError("p >= 1 violated");
    for (double e : c.epsilons)
      if (!(e > 0.0 && e <= 1.0)) throw HypothesisError("epsilon in (0, 1] violated: epsilon=" + fmt(e));
  }
  if (c.kind == "rubio") {
    if (!(c.p.value_or(0.0) >= 1.0)) throw HypothesisError("p >= 1 violated");
    for (const auto& sp : c.spaces)
      if (!std::holds_alternative<WeightedLebesgue>(sp) && !std::holds_alternative<Lebesgue>(sp))
        throw HypothesisError("rubio needs Lebesgue or weighted Lebesgue spaces");
  }
  if (c.kind == "poincare" || c.kind == "riesz-bound" || c.kind == "duality" || c.kind == "br-uniform")
    for (double r : c.radii)
      if (!(r > 0.0)) throw HypothesisError("radii must be positive");
  if (c.kind == "riesz-bound" && c.dim < 2) throw HypothesisError("riesz-bound needs n >= 2");
  if ((c.kind == "s1-divergence" || c.kind == "poincare") && c.dim > 2)
    throw HypothesisError("dimension must be 1 or 2 for this experiment");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unreliable: return "unreliable";
  }
  return "?";
}

Verdict ExperimentReport::verdict() const {
  bool unreliable = false;
  for (const auto& a : assertions) {
    if (a.verdict == Verdict::Fail) return Verdict::Fail;
    if (a.verdict == Verdict::Unreliable) unreliable = true;
  }
  return unreliable ? Verdict::Unreliable : Verdict::Pass;
}

int exit_status(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Fail: return 1;
    case Verdict::Unreliable: return 2;
  }
  return 1;
}

ApProbe ap_necessity_probe(double eps, double p, Index points) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("ap_necessity_probe: epsilon must lie in (0, 1]");
  if (!(p >= 1.0)) throw std::invalid_argument("ap_necessity_probe: p must be >= 1");
  const Lattice lat = make_lattice(1, -3.0, 3.0, points);
  // g: indicator of [-1 + d, -d] mollified at radius d, so supp g stays in
  // [-1, 0] and f' = g vanishes where the weight is 1. f is the trapezoid
  // primitive of g.
  const int k = 16;
  const double d = 1.0 / k;
  Eigen::ArrayXd ind(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const double x = lat.coordinate(0, i);
    ind(i) = x >= -1.0 + d && x <= -d ? 1.0 : 0.0;
  }
  const GridFunction g = mollify(GridFunction(lat, ind), k);
  Eigen::ArrayXd prim(lat.size());
  prim(0) = 0.0;
  for (Index i = 1; i < lat.size(); ++i) prim(i) = prim(i - 1) + 0.5 * lat.spacing(0) * (g[i - 1] + g[i]);
  const GridFunction f(lat, prim);
  const WeightSpec w = step_weight(eps, 1.0);
  const GridFunction ws = sample_weight(w, lat);
  const GridFunction grad = g;
  ApProbe out;
  out.eps = eps;
  out.rhs = integrate(grad.with_values(grad.values().pow(p)), ws);
  LambdaGridSpec spec;
  const auto prof = weak_functional(f, WeightedLebesgue{p, w}, p, 1.0, spec);
  out.lhs = std::pow(prof.sup_value, p);
  out.ratio = out.lhs / out.rhs;
  return out;
}

namespace {

// ------------------------------------------------------------ experiments

void run_limit_identity(const ExperimentConfig& c, ExperimentReport& r) {
  for (std::size_t fi = 0; fi < c.functions.size(); ++fi)
    for (std::size_t si = 0; si < c.spaces.size(); ++si)
      for (std::size_t qi = 0; qi < c.q.size(); ++qi) {
        const double q = c.q[qi];
        LambdaGridSpec spec = c.lambda;
        if (!c.min_radius_cells.empty()) spec.min_radius_cells = c.min_radius_cells[qi];
        const std::string label =
            "f" + std::to_string(fi) + "/" + space_label(c.spaces[si]) + "/q=" + fmt(q);
        std::vector<double> errs;
        LevelSetProfile last;
        for (Index g : c.grids) {
          const auto t0 = Clock::now();
          const GridFunction f = sample(c.functions[fi], lattice_for(c, g));
          last = weak_functional(f, c.spaces[si], q, *c.s, spec);
          const double target = limit_target(f, c.spaces[si], q);
          const double ratio = last.limit_estimate / target;
          const double err = std::pow(ratio, q) - 1.0;
          errs.push_back(err);
          r.table.push_back({g, last.limit_estimate, target, ratio, err, label});
          r.wall_times[label + "/" + std::to_string(g)] = seconds_since(t0);
          add(r, label + "/sup_dominates_limit/" + std::to_string(g),
              last.sup_value >= last.limit_estimate * (1.0 - tol(c, "sup_slack")), last.sup_value,
              last.limit_estimate);
        }
        r.constants[label + "/limit_over_target"] = r.table.back().ratio;
        r.constants[label + "/diagnostic"] = last.limit_diagnostic;
        if (!last.reliable)
          add_unreliable(r, label + "/limit_reliable",
                         "top-decade spread " + fmt(last.limit_diagnostic) + " exceeds the threshold");
        add(r, label + "/rel_err_finest", std::abs(errs.back()) <= tol(c, "rel_err"), std::abs(errs.back()),
            tol(c, "rel_err"), "relative error of the q-th powers");
        if (errs.size() > 1) {
          bool decreasing = true;
          for (std::size_t i = 1; i < errs.size(); ++i) decreasing &= std::abs(errs[i]) < std::abs(errs[i - 1]);
          add(r, label + "/error_decreasing", decreasing, std::abs(errs.back()), std::abs(errs.front()));
        }
      }
}

void run_sandwich(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  std::vector<GridFunction> fs, grads;
  for (const auto& spec : c.functions) {
    fs.push_back(sample(spec, lat));
    grads.push_back(analytic_gradient_magnitude(spec, lat));
  }
  for (std::size_t si = 0; si < c.spaces.size(); ++si) {
    const auto t0 = Clock::now();
    const double q = q_for(c, si);
    const double lower = std::pow(sphere_constant(q, c.dim).value / c.dim, 1.0 / q);
    LambdaGridSpec spec = c.lambda;
    if (!c.min_radius_cells.empty()) spec.min_radius_cells = c.min_radius_cells[q_index(c, si)];
    const std::string sname = space_label(c.spaces[si]) + "/q=" + fmt(q);
    double lo = kInf, hi = 0.0;
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const auto prof = weak_functional(fs[fi], c.spaces[si], q, *c.s, spec);
      const double gn = norm(c.spaces[si], grads[fi]);
      const double ratio = prof.sup_value / gn;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      r.table.push_back({lat.points(0), prof.sup_value, gn, ratio, kNaN, sname + "/f" + std::to_string(fi)});
    }
    r.constants[sname + "/lower_constant"] = lower;
    r.constants[sname + "/measured_min"] = lo;
    r.constants[sname + "/measured_upper"] = hi;
    add(r, sname + "/above_lower", lo >= tol(c, "lower_slack") * lower, lo, tol(c, "lower_slack") * lower);
    add(r, sname + "/below_upper", hi <= tol(c, "upper_factor") * lower, hi, tol(c, "upper_factor") * lower);
    add(r, sname + "/spread", hi / lo <= tol(c, "spread"), hi / lo, tol(c, "spread"));
    r.wall_times[sname] = seconds_since(t0);
  }
}

void run_s1_divergence(const ExperimentConfig& c, ExperimentReport& r) {
  const double q = c.q[0];
  const double sc = tol(c, "control_s");
  std::vector<double> main, control;
  for (Index g : c.grids) {
    const auto t0 = Clock::now();
    const GridFunction f = sample(c.functions[0], lattice_for(c, g));
    main.push_back(strong_functional(f, c.spaces[0], q, *c.s));
    control.push_back(strong_functional(f, c.spaces[0], q, sc));
    r.table.push_back({g, main.back(), control.back(), main.back() / control.back(), kNaN, "s=" + fmt(*c.s)});
    r.wall_times["grid/" + std::to_string(g)] = seconds_since(t0);
  }
  for (std::size_t i = 1; i < main.size(); ++i) {
    const std::string step = std::to_string(c.grids[i - 1]) + "->" + std::to_string(c.grids[i]);
    const double growth = main[i] / main[i - 1] - 1.0;
    const double change = std::abs(control[i] / control[i - 1] - 1.0);
    r.table[i].rel_err = growth;
    r.constants["growth/" + step] = growth;
    r.constants["control_change/" + step] = change;
    add(r, "growth/" + step, growth >= tol(c, "min_growth"), growth, tol(c, "min_growth"));
    add(r, "control/" + step, change <= tol(c, "control_change"), change, tol(c, "control_change"));
  }
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GridFunction annulus_indicator(const Lattice& lat, double r_in, double r_out) {
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const double d = lat.node(i).norm();
    v(i) = d > r_in && d < r_out ? 1.0 : 0.0;
  }
  return GridFunction(lat, v);
}

void run_poincare(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  std::vector<std::string> domains{"ball"};
  if (c.dim >= 2) domains.push_back("annulus");
  std::vector<double> logR;
  for (double R : c.radii) logR.push_back(std::log(R));
  for (const auto& dom : domains)
    for (const auto& space : c.spaces)
      for (std::size_t fi = 0; fi < c.functions.size(); ++fi) {
        const auto t0 = Clock::now();
        const std::string label = dom + "/" + space_label(space) + "/f" + std::to_string(fi);
        std::vector<double> logratio;
        for (double R : c.radii) {
          const GridFunction mask = dom == "ball" ? ball_indicator(lat, Eigen::VectorXd::Zero(c.dim), R)
                                                  : annulus_indicator(lat, R, 2.0 * R);
          const FunctionSpec spec = dilate(c.functions[fi], R);
          const GridFunction f = sample(spec, lat);
          const GridFunction grad = analytic_gradient_magnitude(spec, lat);
          const double mean = integrate(f, mask) / integrate(mask);
          const double lhs = norm(space, f.with_values((f.values() - mean) * mask.values()));
          const double rhs = R * norm(space, grad.with_values(grad.values() * mask.values()));
          logratio.push_back(std::log(lhs / rhs));
          r.table.push_back({lat.points(0), lhs, rhs, lhs / rhs, kNaN, label + "/R=" + fmt(R)});
        }
        const double slope = slope_fit(logR, logratio);
        r.constants[label + "/slope"] = slope;
        r.constants[label + "/constant"] = std::exp(*std::max_element(logratio.begin(), logratio.end()));
        add(r, label + "/slope", std::abs(slope) <= tol(c, "max_slope"), std::abs(slope), tol(c, "max_slope"));
        r.wall_times[label] = seconds_since(t0);
      }
}

void run_ap_necessity(const ExperimentConfig& c, ExperimentReport& r) {
  std::vector<ApProbe> probes;
  for (double e : c.epsilons) {
    const auto t0 = Clock::now();
    probes.push_back(ap_necessity_probe(e, *c.p, c.grids.back()));
    const auto& pr = probes.back();
    r.table.push_back({c.grids.back(), pr.lhs, pr.rhs, pr.ratio, kNaN, "eps=" + fmt(e)});
    r.constants["ratio/eps=" + fmt(e)] = pr.ratio;
    r.wall_times["eps=" + fmt(e)] = seconds_since(t0);
  }
  const double k = tol(c, "min_growth_factor");
  for (std::size_t i = 1; i < probes.size(); ++i) {
    const double g = probes[i].ratio / probes[i - 1].ratio;
    add(r, "growth/eps=" + fmt(probes[i - 1].eps) + "->" + fmt(probes[i].eps), g >= k, g, k);
  }
}

void run_interp(const ExperimentConfig& c, ExperimentReport& r) {
  const bool gn = c.kind == "gn-interp";
  const double th = *c.theta, q = c.q[0], s = *c.s, q1 = *c.q1;
  const SpaceSpec& X = c.spaces[0];
  const SpaceSpec Xq = convexify(X, q);
  const std::optional<SpaceSpec> Xq1 = std::isinf(q1) ? std::nullopt : std::optional<SpaceSpec>(convexify(X, q1));
  r.constants["q"] = q;
  r.constants["s"] = s;
  std::map<Index, std::vector<double>> C;
  for (Index g : c.grids) {
    const Lattice lat = lattice_for(c, g);
    for (std::size_t fi = 0; fi < c.functions.size(); ++fi) {
      const auto t0 = Clock::now();
      const GridFunction f = sample(c.functions[fi], lat);
      const double grad = norm(X, analytic_gradient_magnitude(c.functions[fi], lat));
      const double lhs = weak_functional(f, Xq, q, s, c.lambda).sup_value;
      double first;
      if (gn)
        first = weak_functional(f, *Xq1, q1, *c.s1, c.lambda).sup_value;
      else
        first = Xq1 ? norm(*Xq1, f) : f.values().abs().maxCoeff();
      const double rhs = std::pow(first, 1.0 - th) * std::pow(grad, th);
      C[g].push_back(lhs / rhs);
      const std::string label = "f" + std::to_string(fi);
      r.table.push_back({g, lhs, rhs, lhs / rhs, kNaN, label});
      r.wall_times[label + "/" + std::to_string(g)] = seconds_since(t0);
    }
  }
  const double spread = tol(c, "constant_spread");
  for (const auto& [g, cs] : C) {
    const double mean = std::accumulate(cs.begin(), cs.end(), 0.0) / static_cast<double>(cs.size());
    double worst = 0.0;
    for (double v : cs) worst = std::max(worst, std::abs(v / mean - 1.0));
    r.constants["fitted_C/" + std::to_string(g)] = *std::max_element(cs.begin(), cs.end());
    r.constants["mean_C/" + std::to_string(g)] = mean;
    add(r, "spread_across_functions/" + std::to_string(g), worst <= spread, worst, spread);
  }
  for (std::size_t i = 1; i < c.grids.size(); ++i) {
    const auto& a = C[c.grids[i - 1]];
    const auto& b = C[c.grids[i]];
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(b[k] / a[k] - 1.0));
    add(r, "grid_doubling/" + std::to_string(c.grids[i - 1]) + "->" + std::to_string(c.grids[i]), worst <= spread,
        worst, spread);
  }
  const std::vector<double>& fin = C[c.grids.back()];
  const double fitted = *std::max_element(fin.begin(), fin.end());
  for (std::size_t k = 0; k < fin.size(); ++k) {
    const auto& row = r.table[r.table.size() - fin.size() + k];
    add(r, "lhs_le_C_rhs/f" + std::to_string(k), row.lhs <= fitted * row.rhs * (1.0 + 1e-12), row.lhs,
        fitted * row.rhs);
  }
}

void run_rubio(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  std::mt19937_64 rng(c.seed);
  std::vector<GridFunction> probes;
  for (int t = 0; t < c.trials; ++t) probes.push_back(random_field(lat, rng, 0.5 * c.window[1]));
  const int k_max = static_cast<int>(tol(c, "k_max"));
  const double slack = tol(c, "a1_slack");
  for (const auto& space : c.spaces) {
    const auto t0 = Clock::now();
    const std::string sname = space_label(space);
    std::optional<GridFunction> weight;
    if (const auto* w = std::get_if<WeightedLebesgue>(&space)) weight = sample_weight(w->w, lat);
    const double m = operator_norm_probe(space, probes);
    r.constants[sname + "/m_norm"] = m;
    RdFConfig cfg;
    cfg.p = *c.p;
    cfg.weight = weight;
    cfg.k_max = k_max;
    cfg.m_norm = m;
    const double norm_factor = 2.0 + std::pow(2.0, 1 - k_max);
    int dominated = 0, bounded = 0, a1 = 0;
    double worst_norm = 0.0, worst_a1 = 0.0;
    for (const auto& g : probes) {
      const RdFResult res = rubio_de_francia(g, cfg);
      dominated += (res.value.values() >= g.values().abs()).all();
      const double ng = norm(space, g), nr = norm(space, res.value);
      worst_norm = std::max(worst_norm, nr / ng);
      bounded += nr <= norm_factor * ng;
      const double a = ap_constant(res.value, 1.0).value;
      worst_a1 = std::max(worst_a1, a);
      a1 += a <= 2.0 * m * slack;
    }
    const int n = static_cast<int>(probes.size());
    r.table.push_back({lat.points(0), worst_norm, norm_factor, worst_norm / norm_factor, kNaN, sname + "/norm"});
    r.table.push_back({lat.points(0), worst_a1, 2.0 * m, worst_a1 / (2.0 * m), kNaN, sname + "/a1"});
    r.constants[sname + "/max_norm_ratio"] = worst_norm;
    r.constants[sname + "/max_a1"] = worst_a1;
    add(r, sname + "/dominates", dominated == n, dominated, n, "probes with |g| <= Rg at every node");
    add(r, sname + "/norm_bound", bounded == n, worst_norm, norm_factor);
    add(r, sname + "/a1_bound", a1 == n, worst_a1, 2.0 * m * slack);
    r.wall_times[sname] = seconds_since(t0);
  }
}

void run_dyadic_cover(const ExperimentConfig& c, ExperimentReport& r) {
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<int> shift(0, 2), level(-6, 6), dimd(1, 2), steps(0, 4);
  std::uniform_real_distribution<double> coord(-10.0, 10.0), logr(std::log(1e-3), std::log(1e3)), unit(0.0, 1.0);
  const int n = c.trials;
  auto t0 = Clock::now();
  // Same-shift pairs: the second cube is an ancestor of a cube near the first.
  int partial = 0, nested = 0, disjoint = 0;
  for (int t = 0; t < n; ++t) {
    const int d = dimd(rng);
    std::array<int, 3> sh{shift(rng), shift(rng), shift(rng)};
    std::array<double, 3> x{coord(rng), coord(rng), coord(rng)};
    const DyadicCube a = locate(std::span<const double>(x.data(), d), d, sh, level(rng));
    std::array<double, 3> y = x;
    for (int k = 0; k < d; ++k) y[k] += std::ldexp(unit(rng) - 0.5, level(rng));
    DyadicCube b = locate(std::span<const double>(y.data(), d), d, sh, level(rng));
    for (int up = steps(rng); up > 0; --up) b = parent(b);
    try {
      const Nesting rel = nesting_check(a, b);
      (rel == Nesting::Disjoint ? disjoint : nested) += 1;
    } catch (const std::logic_error&) {
      ++partial;
    }
  }
  r.constants["pairs/nested"] = nested;
  r.constants["pairs/disjoint"] = disjoint;
  add(r, "no_partial_overlap", partial == 0, partial, 0);
  r.wall_times["pairs"] = seconds_since(t0);

  t0 = Clock::now();
  double worst = 0.0;
  int uncovered = 0;
  for (int t = 0; t < n; ++t) {
    const int d = dimd(rng);
    std::array<double, 3> x{coord(rng), coord(rng), 0.0};
    const double radius = std::exp(logr(rng));
    const BallCover cov = cover_ball(std::span<const double>(x.data(), d), radius, d);
    const Box box = cube_geometry(cov.cube);
    bool inside = true;
    for (int k = 0; k < d; ++k) inside &= box.lo[k] <= x[k] - radius && x[k] + radius <= box.hi[k];
    uncovered += !inside;
    worst = std::max(worst, cov.ratio);
  }
  r.constants["cover/max_side_over_diameter"] = worst;
  add(r, "balls_covered", uncovered == 0, uncovered, 0);
  add(r, "cover_ratio", worst <= tol(c, "max_ratio"), worst, tol(c, "max_ratio"));
  r.wall_times["cover"] = seconds_since(t0);

  t0 = Clock::now();
  int not_unique = 0;
  for (int t = 0; t < n; ++t) {
    const int d = dimd(rng);
    std::array<int, 3> sh{shift(rng), shift(rng), shift(rng)};
    std::array<double, 3> x{coord(rng), coord(rng), 0.0};
    const DyadicCube q = locate(std::span<const double>(x.data(), d), d, sh, level(rng));
    int hits = 0;
    // The located cube and its neighbours: exactly one must contain x.
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = (d > 1 ? -1 : 0); dy <= (d > 1 ? 1 : 0); ++dy) {
        DyadicCube nb = q;
        nb.k[0] += dx;
        if (d > 1) nb.k[1] += dy;
        hits += cube_geometry(nb).contains(std::span<const double>(x.data(), d));
      }
    not_unique += hits != 1;
  }
  add(r, "tiling_unique", not_unique == 0, not_unique, 0);
  r.wall_times["tiling"] = seconds_since(t0);
}

void run_space_identities(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  std::mt19937_64 rng(c.seed);
  const double slice_t = 0.25;
  // Fields vanish within slice_t of the edge so the slice averages see the
  // whole ball.
  const double support = c.window[1] - slice_t - 0.25;
  const std::vector<double> ps{1.2, 1.5, 2.0, 3.0, 4.0};
  std::map<std::string, double> worst{{"morrey", 0}, {"mixed", 0}, {"variable", 0}, {"orlicz", 0}, {"slice", 0}};
  for (int t = 0; t < c.trials; ++t) {
    const GridFunction f = random_field(lat, rng, support);
    const double p = ps[static_cast<std::size_t>(t) % ps.size()];
    const double ref = norm(Lebesgue{p}, f);
    ExponentProfile prof;
    prof.minus = prof.plus = p;
    auto rel = [&](const SpaceSpec& sp) { return std::abs(norm(sp, f) / ref - 1.0); };
    worst["morrey"] = std::max(worst["morrey"], rel(Morrey{p, p}));
    worst["mixed"] = std::max(worst["mixed"], rel(MixedNorm{std::vector<double>(static_cast<std::size_t>(c.dim), p)}));
    worst["variable"] = std::max(worst["variable"], rel(VariableLebesgue{prof}));
    worst["orlicz"] = std::max(worst["orlicz"], rel(Orlicz{power_phi(p)}));
    worst["slice"] = std::max(worst["slice"], rel(OrliczSlice{power_phi(p), p, slice_t}));
  }
  for (const auto& [name, w] : worst) {
    const bool bisection = name == "variable" || name == "orlicz";
    const double bound = tol(c, bisection ? "identity_bisection" : "identity");
    r.table.push_back({lat.points(0), w, bound, w / bound, w, name});
    r.constants["max_rel_diff/" + name] = w;
    add(r, name + "_equals_lebesgue", w <= bound, w, bound);
  }
}

void run_duality(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  const Eigen::VectorXd center = Eigen::VectorXd::Constant(c.dim, tol(c, "center"));
  for (const auto& space : c.spaces) {
    const auto t0 = Clock::now();
    const std::string sname = space_label(space);
    std::vector<double> vals;
    for (double R : c.radii) {
      vals.push_back(indicator_duality(space, lat, center, R));
      r.table.push_back({lat.points(0), vals.back(), 1.0, vals.back(), vals.back() - 1.0, sname + "/R=" + fmt(R)});
    }
    const double lo = *std::min_element(vals.begin(), vals.end());
    const double hi = *std::max_element(vals.begin(), vals.end());
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    r.constants[sname + "/min"] = lo;
    r.constants[sname + "/max"] = hi;
    if (std::holds_alternative<Lebesgue>(space)) {
      const double dev = std::max(std::abs(hi - 1.0), std::abs(lo - 1.0));
      add(r, sname + "/exactly_one", dev <= tol(c, "lebesgue_exact"), dev, tol(c, "lebesgue_exact"));
    } else {
      add(r, sname + "/lower", lo >= 1.0 - tol(c, "lower_slack"), lo, 1.0 - tol(c, "lower_slack"));
      add(r, sname + "/upper", hi <= tol(c, "upper"), hi, tol(c, "upper"));
      const double spread = std::max(hi / mean - 1.0, 1.0 - lo / mean);
      add(r, sname + "/spread", spread <= tol(c, "spread"), spread, tol(c, "spread"));
    }
    r.wall_times[sname] = seconds_since(t0);
  }
}

void run_riesz_bound(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  for (const auto& space : c.spaces) {
    const auto t0 = Clock::now();
    const std::string sname = space_label(space);
    std::vector<double> cs;
    for (double R : c.radii) {
      const GridFunction mask = ball_indicator(lat, Eigen::VectorXd::Zero(c.dim), R);
      double best = 0.0;
      for (std::size_t fi = 0; fi < c.functions.size(); ++fi) {
        const GridFunction g = sample(dilate(c.functions[fi], R), lat);
        const GridFunction ag = g.with_values(g.values().abs());
        const double lhs = norm(space, riesz_potential(ag, mask));
        const double rhs = 2.0 * R * norm(space, g.with_values(g.values() * mask.values()));
        best = std::max(best, lhs / rhs);
        r.table.push_back({lat.points(0), lhs, rhs, lhs / rhs, kNaN,
                           sname + "/R=" + fmt(R) + "/f" + std::to_string(fi)});
      }
      cs.push_back(best);
      r.constants[sname + "/C/R=" + fmt(R)] = best;
    }
    const double mean = std::accumulate(cs.begin(), cs.end(), 0.0) / static_cast<double>(cs.size());
    double worst = 0.0;
    for (double v : cs) worst = std::max(worst, std::abs(v / mean - 1.0));
    add(r, sname + "/constant_stable", worst <= tol(c, "spread"), worst, tol(c, "spread"));
    r.wall_times[sname] = seconds_since(t0);
  }
}

void run_br_uniform(const ExperimentConfig& c, ExperimentReport& r) {
  const Lattice lat = lattice_for(c, c.grids.back());
  std::mt19937_64 rng(c.seed);
  std::vector<GridFunction> probes;
  for (int t = 0; t < c.trials; ++t) probes.push_back(random_field(lat, rng, 1.0));
  std::vector<double> radii = c.radii;
  std::sort(radii.begin(), radii.end());
  for (const auto& space : c.spaces) {
    const auto t0 = Clock::now();
    const std::string sname = space_label(space);
    std::vector<double> norms;
    for (const auto& f : probes) norms.push_back(norm(space, f));
    std::vector<double> sup;
    for (double R : radii) {
      double best = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k)
        best = std::max(best, norm(space, ball_average(probes[k], R)) / norms[k]);
      sup.push_back(best);
      r.table.push_back({lat.points(0), best, sup.front(), best / sup.front(), kNaN, sname + "/r=" + fmt(R)});
    }
    const double top = *std::max_element(sup.begin(), sup.end());
    r.constants[sname + "/sup_over_r"] = top;
    r.constants[sname + "/smallest_r"] = sup.front();
    const double growth = top / sup.front() - 1.0;
    add(r, sname + "/uniform", growth <= tol(c, "growth"), growth, tol(c, "growth"),
        "sup over r relative to the smallest radius");
    r.wall_times[sname] = seconds_since(t0);
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport r;
  r.config = resolve(config);
  validate(r.config);
  const auto t0 = Clock::now();
  const auto& k = r.config.kind;
  if (k == "limit-identity") run_limit_identity(r.config, r);
  else if (k == "sandwich") run_sandwich(r.config, r);
  else if (k == "s1-divergence") run_s1_divergence(r.config, r);
  else if (k == "poincare") run_poincare(r.config, r);
  else if (k == "ap-necessity") run_ap_necessity(r.config, r);
  else if (k == "sobolev-interp" || k == "gn-interp") run_interp(r.config, r);
  else if (k == "rubio") run_rubio(r.config, r);
  else if (k == "dyadic-cover") run_dyadic_cover(r.config, r);
  else if (k == "space-identities") run_space_identities(r.config, r);
  else if (k == "duality") run_duality(r.config, r);
  else if (k == "riesz-bound") run_riesz_bound(r.config, r);
  else if (k == "br-uniform") run_br_uniform(r.config, r);
  r.wall_times["total"] = seconds_since(t0);
  if (!r.config.output.empty()) write_report(r, r.config.output);
  return r;
}

// ---------------------------------------------------------------- json

namespace {

json opt(const std::optional<double>& v) { return v ? inf_or_number(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return number_or_inf(j[key]);
}

json num(double v) { return std::isfinite(v) ? json(v) : (std::isnan(v) ? json(nullptr) : inf_or_number(v)); }

double num_from(const json& j) { return j.is_null() ? kNaN : number_or_inf(j); }

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json spaces = json::array();
  for (const auto& s : c.spaces) spaces.push_back(space_to_json(s));
  json j{{"kind", c.kind},
         {"dim", c.dim},
         {"grids", c.grids},
         {"window", c.window},
         {"functions", c.functions},
         {"spaces", spaces},
         {"q", c.q},
         {"s", opt(c.s)},
         {"p", opt(c.p)},
         {"theta", opt(c.theta)},
         {"s1", opt(c.s1)},
         {"q1", opt(c.q1)},
         {"lambda", c.lambda},
         {"min_radius_cells", c.min_radius_cells},
         {"radii", c.radii},
         {"epsilons", c.epsilons},
         {"trials", c.trials},
         {"tolerances", c.tolerances},
         {"seed", c.seed},
         {"output", c.output}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  static const std::vector<std::string> known{
      "kind",   "dim",     "grids",  "window", "functions", "function",         "spaces", "space",  "q",
      "s",      "p",       "theta",  "s1",     "q1",        "lambda",           "radii",  "epsilons", "trials",
      "tolerances", "seed", "output", "min_radius_cells"};
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key '" + key + "'");
  ExperimentConfig c;
  c.kind = j.at("kind").get<std::string>();
  c.dim = j.value("dim", 1);
  if (j.contains("grids")) c.grids = j["grids"].get<std::vector<Index>>();
  if (j.contains("window")) c.window = j["window"].get<std::array<double, 2>>();
  if (j.contains("functions")) c.functions = j["functions"].get<std::vector<FunctionSpec>>();
  if (j.contains("function")) c.functions.push_back(j["function"].get<FunctionSpec>());
  if (j.contains("spaces"))
    for (const auto& s : j["spaces"]) c.spaces.push_back(space_from_json(s));
  if (j.contains("space")) c.spaces.push_back(space_from_json(j["space"]));
  if (j.contains("q")) {
    if (j["q"].is_array())
      for (const auto& v : j["q"]) c.q.push_back(number_or_inf(v));
    else
      c.q.push_back(number_or_inf(j["q"]));
  }
  c.s = opt_from(j, "s");
  c.p = opt_from(j, "p");
  c.theta = opt_from(j, "theta");
  c.s1 = opt_from(j, "s1");
  c.q1 = opt_from(j, "q1");
  if (j.contains("lambda")) c.lambda = j["lambda"].get<LambdaGridSpec>();
  if (j.contains("min_radius_cells")) c.min_radius_cells = j["min_radius_cells"].get<std::vector<double>>();
  if (j.contains("radii")) c.radii = j["radii"].get<std::vector<double>>();
  if (j.contains("epsilons")) c.epsilons = j["epsilons"].get<std::vector<double>>();
  c.trials = j.value("trials", 0);
  if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<std::map<std::string, double>>();
  c.seed = j.value("seed", std::uint64_t{0});
  c.output = j.value("output", std::string());
  return c;
}

json report_to_json(const ExperimentReport& r, bool include_times) {
  json table = json::array();
  for (const auto& row : r.table)
    table.push_back({{"grid", row.grid},
                     {"lhs", num(row.lhs)},
                     {"rhs", num(row.rhs)},
                     {"ratio", num(row.ratio)},
                     {"rel_err", num(row.rel_err)},
                     {"case", row.label}});
  json assertions = json::array();
  for (const auto& a : r.assertions)
    assertions.push_back({{"name", a.name},
                          {"verdict", to_string(a.verdict)},
                          {"measured", num(a.measured)},
                          {"bound", num(a.bound)},
                          {"detail", a.detail}});
  json constants = json::object();
  for (const auto& [k, v] : r.constants) constants[k] = num(v);
  json j{{"config", config_to_json(r.config)},
         {"seed", r.config.seed},
         {"table", table},
         {"constants", constants},
         {"assertions", assertions},
         {"verdict", to_string(r.verdict())}};
  if (include_times) j["wall_times"] = r.wall_times;
  return j;
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  r.config = config_from_json(j.at("config"));
  for (const auto& row : j.at("table"))
    r.table.push_back({row.at("grid").get<Index>(), num_from(row.at("lhs")), num_from(row.at("rhs")),
                       num_from(row.at("ratio")), num_from(row.at("rel_err")), row.at("case").get<std::string>()});
  for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = num_from(v);
  for (const auto& a : j.at("assertions")) {
    const auto v = a.at("verdict").get<std::string>();
    Verdict verdict = v == "pass" ? Verdict::Pass : v == "fail" ? Verdict::Fail : Verdict::Unreliable;
    if (v != "pass" && v != "fail" && v != "unreliable") throw std::invalid_argument("unknown verdict '" + v + "'");
    r.assertions.push_back({a.at("name").get<std::string>(), verdict, num_from(a.at("measured")),
                            num_from(a.at("bound")), a.at("detail").get<std::string>()});
  }
  if (j.contains("wall_times")) r.wall_times = j["wall_times"].get<std::map<std::string, double>>();
  return r;
}

void write_table_csv(std::ostream& out, const ExperimentReport& r) {
  out << "grid,lhs,rhs,ratio,rel_err,case\n" << std::setprecision(17);
  auto cell = [&](double v) {
    if (!std::isnan(v)) out << v;
  };
  for (const auto& row : r.table) {
    out << row.grid << ',';
    cell(row.lhs);
    out << ',';
    cell(row.rhs);
    out << ',';
    cell(row.ratio);
    out << ',';
    cell(row.rel_err);
    out << ',' << row.label << '\n';
  }
}

void write_report(const ExperimentReport& r, const std::string& stem) {
  std::ofstream js(stem + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write '" + stem + ".json'");
  js << report_to_json(r).dump(2) << '\n';
  std::ofstream csv(stem + ".csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + stem + ".csv'");
  write_table_csv(csv, r);
}

}  // namespace weakgrad
