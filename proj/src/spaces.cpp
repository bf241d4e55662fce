#include "weakgrad/spaces.hpp"

#include "weakgrad/ball_sums.hpp"
#include "weakgrad/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace weakgrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double conjugate(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

Eigen::ArrayXd unit_trapezoid(const Lattice& lat) { return quadrature_weights(lat) / lat.cell_measure(); }

double lebesgue_norm(const GridFunction& f, double p, const Eigen::ArrayXd* w) {
  const Eigen::ArrayXd a = f.values().abs();
  if (std::isinf(p)) {
    if (w) return (a / *w).maxCoeff();
    return a.maxCoeff();
  }
  Eigen::ArrayXd v = a.pow(p);
  if (w) v *= *w;
  const double integral = integrate(f.with_values(std::move(v)));
  return std::pow(integral, 1.0 / p);
}

double morrey_norm(const Morrey& m, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const int n = lat.dim();
  const Index stride = m.center_stride > 0 ? m.center_stride : (n == 1 ? 1 : (n == 2 ? 2 : 4));
  const Eigen::ArrayXd uw = unit_trapezoid(lat);
  const Eigen::ArrayXd v = f.values().abs().pow(m.r) * uw;
  const double cm = lat.cell_measure();
  std::vector<double> radii;
  const double top = lat.diameter();
  for (double r = lat.min_spacing(); r < top; r *= m.radius_ratio) radii.push_back(r);
  radii.push_back(top);
  double best = 0.0;
  for (double r : radii) {
    const BallStencil st = ball_stencil(lat, r);
    const Eigen::ArrayXd mass = ball_sum(lat, st, v, stride);
    const Eigen::ArrayXd meas = ball_sum(lat, st, uw, stride);
    for (Index i = 0; i < lat.size(); ++i) {
      if (meas(i) <= 0.0) continue;
      const double val = std::pow(meas(i) * cm, 1.0 / m.alpha - 1.0 / m.r) * std::pow(mass(i) * cm, 1.0 / m.r);
      best = std::max(best, val);
    }
  }
  return best;
}

double mixed_norm(const MixedNorm& m, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const int n = lat.dim();
  // Collapse axes innermost first. `cur` holds |f| on the remaining axes.
  Eigen::ArrayXd cur = f.values().abs();
  std::array<Index, 3> ext{1, 1, 1};
  for (int a = 0; a < n; ++a) ext[a] = lat.points(a);
  for (int a = 0; a < n; ++a) {
    const double p = m.r[static_cast<std::size_t>(a)];
    const double h = lat.extent(a) / static_cast<double>(lat.points(a) - 1);
    const Index len = ext[a];
    Index outer = 1;
    for (int b = a + 1; b < n; ++b) outer *= ext[b];
    Eigen::ArrayXd next(outer);
    for (Index o = 0; o < outer; ++o) {
      double s = 0.0;
      if (std::isinf(p)) {
        for (Index i = 0; i < len; ++i) s = std::max(s, cur(o * len + i));
        next(o) = s;
        continue;
      }
      for (Index i = 0; i < len; ++i) {
        const double w = (i == 0 || i == len - 1) ? 0.5 : 1.0;
        s += w * std::pow(cur(o * len + i), p);
      }
      next(o) = std::pow(s * h, 1.0 / p);
    }
    cur = std::move(next);
  }
  return cur(0);
}

double slice_norm(const OrliczSlice& sp, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const BallStencil st = ball_stencil(lat, sp.t);
  const double cm = lat.cell_measure();
  const double ball_measure = static_cast<double>(st.size()) * cm;
  const Eigen::ArrayXd a = f.values().abs();
  Eigen::ArrayXd ratio(lat.size());
  if (sp.phi.family == OrliczSpec::Family::Power) {
    const Eigen::ArrayXd s = ball_sum(lat, st, a.pow(sp.phi.p));
    ratio = (s.max(0.0) / static_cast<double>(st.size())).pow(1.0 / sp.phi.p);
  } else {
    const double ind = luxemburg([&](double l) { return ball_measure * sp.phi(1.0 / l); }, 1.0);
    const Index p0 = lat.points(0);
    const Index p1 = lat.dim() > 1 ? lat.points(1) : 1;
    const Index p2 = lat.dim() > 2 ? lat.points(2) : 1;
    parallel_for(lat.size(), [&](Index begin, Index end) {
      std::vector<double> vals;
      for (Index i = begin; i < end; ++i) {
        const Index i0 = i % p0, i1 = (i / p0) % p1, i2 = i / (p0 * p1);
        vals.clear();
        double mx = 0.0;
        for (const auto& run : st.runs) {
          const Index j1 = i1 + run.o1, j2 = i2 + run.o2;
          if (j1 < 0 || j1 >= p1 || j2 < 0 || j2 >= p2) continue;
          for (Index j0 = std::max<Index>(0, i0 - run.half); j0 <= std::min<Index>(p0 - 1, i0 + run.half); ++j0) {
            const double v = a((j2 * p1 + j1) * p0 + j0);
            if (v > 0.0) {
              vals.push_back(v);
              mx = std::max(mx, v);
            }
          }
        }
        if (vals.empty()) {
          ratio(i) = 0.0;
          continue;
        }
        const double local = luxemburg(
            [&](double l) {
              double s = 0.0;
              for (double v : vals) s += sp.phi(v / l);
              return s * cm;
            },
            mx);
        ratio(i) = local / ind;
      }
    }, 8);
  }
  return std::pow(integrate(f.with_values(ratio.pow(sp.r))), 1.0 / sp.r);
}

}  // namespace

double OrliczSpec::operator()(double t) const {
  const double base = std::pow(t, p);
  return family == Family::Power ? base : base * std::log(std::numbers::e + t);
}

void OrliczSpec::validate() const { require(p >= 1.0 && std::isfinite(p), "orlicz: p must be in [1, inf)"); }

double ExponentProfile::value(double x0) const {
  if (kind == Kind::Constant) return minus;
  return minus + (plus - minus) * 0.5 * (1.0 + std::tanh((x0 - center) / width));
}

void ExponentProfile::validate() const {
  require(minus >= 1.0 && std::isfinite(minus), "variable exponent: r_minus must be in [1, inf)");
  if (kind == Kind::SmoothStep) {
    require(plus >= 1.0 && std::isfinite(plus), "variable exponent: r_plus must be in [1, inf)");
    require(width > 0.0, "variable exponent: width must be positive");
  }
}

std::string space_name(const SpaceSpec& space) {
  return std::visit(overloaded{[](const Lebesgue&) { return std::string("lebesgue"); },
                               [](const WeightedLebesgue&) { return std::string("weighted"); },
                               [](const Morrey&) { return std::string("morrey"); },
                               [](const MixedNorm&) { return std::string("mixed"); },
                               [](const VariableLebesgue&) { return std::string("variable"); },
                               [](const Orlicz&) { return std::string("orlicz"); },
                               [](const OrliczSlice&) { return std::string("orlicz_slice"); }},
                    space);
}

void validate(const SpaceSpec& space, int dim) {
  std::visit(overloaded{
                 [](const Lebesgue& s) { require(s.p >= 1.0, "lebesgue: p must be >= 1"); },
                 [dim](const WeightedLebesgue& s) {
                   require(s.p >= 1.0, "weighted: p must be >= 1");
                   s.w.validate(dim);
                 },
                 [](const Morrey& s) {
                   require(s.r >= 1.0 && std::isfinite(s.r), "morrey: r must be in [1, inf)");
                   require(s.alpha >= s.r, "morrey: need r <= alpha");
                   require(s.radius_ratio > 1.0, "morrey: radius ratio must exceed 1");
                 },
                 [dim](const MixedNorm& s) {
                   require(static_cast<int>(s.r.size()) == dim, "mixed: need one exponent per axis");
                   for (double r : s.r) require(r >= 1.0, "mixed: exponents must be >= 1");
                 },
                 [](const VariableLebesgue& s) { s.r.validate(); },
                 [](const Orlicz& s) { s.phi.validate(); },
                 [](const OrliczSlice& s) {
                   s.phi.validate();
                   require(s.r >= 1.0 && std::isfinite(s.r), "orlicz_slice: r must be in [1, inf)");
                   require(s.t > 0.0, "orlicz_slice: t must be positive");
                 }},
             space);
}

double luxemburg(const std::function<double(double)>& modular, double seed) {
  if (!(seed > 0.0) || !std::isfinite(seed)) seed = 1.0;
  double lo = seed, hi = seed;
  int guard = 0;
  while (modular(hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 2000) throw std::runtime_error("luxemburg: no upper bracket");
  }
  guard = 0;
  while (modular(lo) <= 1.0) {
    lo *= 0.5;
    if (++guard > 2000) throw std::runtime_error("luxemburg: no lower bracket");
  }
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-14; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (modular(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double variable_modular(const VariableLebesgue& space, const GridFunction& f, double lambda) {
  const Lattice& lat = f.lattice();
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const double x0 = lat.coordinate(0, lat.unflatten(i)[0]);
    v(i) = std::pow(std::abs(f[i]) / lambda, space.r.value(x0));
  }
  return integrate(f.with_values(std::move(v)));
}

double orlicz_modular(const OrliczSpec& phi, const GridFunction& f, double lambda) {
  Eigen::ArrayXd v = f.values().abs() / lambda;
  if (phi.family == OrliczSpec::Family::Power)
    v = v.pow(phi.p);
  else
    v = v.unaryExpr([&](double t) { return phi(t); });
  return integrate(f.with_values(std::move(v)));
}

double norm(const SpaceSpec& space, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  validate(space, lat.dim());
  if ((f.values() == 0.0).all()) return 0.0;
  const double seed = f.values().abs().maxCoeff();
  return std::visit(
      overloaded{
          [&](const Lebesgue& s) { return lebesgue_norm(f, s.p, nullptr); },
          [&](const WeightedLebesgue& s) {
            const Eigen::ArrayXd w = sample_weight(s.w, lat).values();
            return lebesgue_norm(f, s.p, &w);
          },
          [&](const Morrey& s) { return morrey_norm(s, f); },
          [&](const MixedNorm& s) { return mixed_norm(s, f); },
          [&](const VariableLebesgue& s) {
            return luxemburg([&](double l) { return variable_modular(s, f, l); }, seed);
          },
          [&](const Orlicz& s) { return luxemburg([&](double l) { return orlicz_modular(s.phi, f, l); }, seed); },
          [&](const OrliczSlice& s) { return slice_norm(s, f); }},
      space);
}

SpaceSpec convexify(const SpaceSpec& space, double s) {
  require(s > 0.0 && std::isfinite(s), "convexify: s must be positive");
  SpaceSpec out = std::visit(
      overloaded{[&](const Lebesgue& x) -> SpaceSpec { return Lebesgue{x.p * s}; },
                 [&](const WeightedLebesgue& x) -> SpaceSpec { return WeightedLebesgue{x.p * s, x.w}; },
                 [&](const Morrey& x) -> SpaceSpec {
                   Morrey m = x;
                   m.r *= s;
                   m.alpha *= s;
                   return m;
                 },
                 [&](const MixedNorm& x) -> SpaceSpec {
                   MixedNorm m = x;
                   for (double& r : m.r) r *= s;
                   return m;
                 },
                 [&](const VariableLebesgue& x) -> SpaceSpec {
                   VariableLebesgue v = x;
                   v.r.minus *= s;
                   v.r.plus *= s;
                   return v;
                 },
                 [&](const Orlicz& x) -> SpaceSpec {
                   if (x.phi.family != OrliczSpec::Family::Power)
                     throw std::invalid_argument("convexify: power-log Orlicz convexification is not representable");
                   Orlicz o = x;
                   o.phi.p *= s;
                   return o;
                 },
                 [&](const OrliczSlice& x) -> SpaceSpec {
                   if (x.phi.family != OrliczSpec::Family::Power)
                     throw std::invalid_argument("convexify: power-log Orlicz-slice convexification is not representable");
                   OrliczSlice o = x;
                   o.phi.p *= s;
                   o.r *= s;
                   return o;
                 }},
      space);
  // the result must itself be a Banach-range space
  if (const auto* m = std::get_if<MixedNorm>(&out)) {
    for (double r : m->r) require(r >= 1.0, "convexify: result leaves the Banach range");
  } else if (const auto* l = std::get_if<Lebesgue>(&out)) {
    require(l->p >= 1.0, "convexify: result leaves the Banach range");
  } else if (const auto* w = std::get_if<WeightedLebesgue>(&out)) {
    require(w->p >= 1.0, "convexify: result leaves the Banach range");
  } else if (const auto* mo = std::get_if<Morrey>(&out)) {
    require(mo->r >= 1.0, "convexify: result leaves the Banach range");
  } else if (const auto* v = std::get_if<VariableLebesgue>(&out)) {
    require(v->r.minus >= 1.0 && (v->r.kind == ExponentProfile::Kind::Constant || v->r.plus >= 1.0),
            "convexify: result leaves the Banach range");
  } else if (const auto* o = std::get_if<Orlicz>(&out)) {
    require(o->phi.p >= 1.0, "convexify: result leaves the Banach range");
  } else if (const auto* sl = std::get_if<OrliczSlice>(&out)) {
    require(sl->phi.p >= 1.0 && sl->r >= 1.0, "convexify: result leaves the Banach range");
  }
  return out;
}

std::optional<SpaceSpec> associate(const SpaceSpec& space) {
  if (const auto* l = std::get_if<Lebesgue>(&space)) return Lebesgue{conjugate(l->p)};
  if (const auto* w = std::get_if<WeightedLebesgue>(&space)) {
    WeightedLebesgue out{conjugate(w->p), w->w};
    // p = 1: sup |g| / w, expressed through the infinite exponent convention
    if (w->p > 1.0) out.w.exponent = w->w.exponent * (1.0 - conjugate(w->p));
    return out;
  }
  if (const auto* m = std::get_if<MixedNorm>(&space)) {
    MixedNorm out = *m;
    for (double& r : out.r) r = conjugate(r);
    return out;
  }
  if (const auto* o = std::get_if<Orlicz>(&space)) {
    if (o->phi.family == OrliczSpec::Family::Power) return Lebesgue{conjugate(o->phi.p)};
  }
  return std::nullopt;
}

HolderPair holder_pairing(const GridFunction& f, const GridFunction& g, const SpaceSpec& space) {
  require_same_lattice(f, g, "holder_pairing");
  const auto dual = associate(space);
  if (!dual) throw std::invalid_argument("holder_pairing: associate of " + space_name(space) + " is not catalogued");
  HolderPair out;
  out.lhs = integrate(f.with_values((f.values() * g.values()).abs()));
  out.rhs = norm(space, f) * norm(*dual, g);
  return out;
}

GridFunction ball_indicator(const Lattice& lattice, const Eigen::VectorXd& center, double radius) {
  Eigen::ArrayXd v(lattice.size());
  for (Index i = 0; i < lattice.size(); ++i)
    v(i) = (lattice.node(i) - center).norm() <= radius * (1.0 + 1e-12) ? 1.0 : 0.0;
  return GridFunction(lattice, std::move(v));
}

double indicator_duality(const SpaceSpec& space, const Lattice& lattice, const Eigen::VectorXd& center,
                         double radius) {
  const GridFunction ind = ball_indicator(lattice, center, radius);
  const double measure = integrate(ind);
  require(measure > 0.0, "indicator_duality: ball contains no lattice nodes");
  const double nx = norm(space, ind);
  if (const auto dual = associate(space)) return nx * norm(*dual, ind) / measure;
  // probe sup of integral_B |g| over ||g||_X = 1
  double sup = 0.0;
  std::vector<GridFunction> probes{ind};
  for (double frac : {0.25, 0.5, 0.75}) probes.push_back(ball_indicator(lattice, center, frac * radius));
  for (double e : {0.5, 1.0, 2.0}) {
    Eigen::ArrayXd v(lattice.size());
    for (Index i = 0; i < lattice.size(); ++i) {
      const double d = (lattice.node(i) - center).norm() / radius;
      v(i) = d <= 1.0 ? std::pow(1.0 - d, e) : 0.0;
    }
    probes.emplace_back(lattice, std::move(v));
  }
  for (const auto& g : probes) {
    const double ng = norm(space, g);
    if (ng <= 0.0) continue;
    sup = std::max(sup, integrate(g.with_values(g.values().abs() * ind.values())) / ng);
  }
  return nx * sup / measure;
}

}  // namespace weakgrad
