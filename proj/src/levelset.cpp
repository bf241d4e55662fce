#include "weakgrad/levelset.hpp"

#include "weakgrad/parallel.hpp"
#include "weakgrad/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weakgrad {

void LevelSetParams::validate(int dim) const {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("level set: q must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("level set: s must be non-negative");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("level set: lambda must be positive");
  if (!(exponent(dim) > 0.0)) throw std::invalid_argument("level set: need n/q + s > 0");
}

std::int64_t MeasureField::pair_count() const {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

double r_max(const GridFunction& f, double lambda, double exponent) {
  const double top = 2.0 * f.values().abs().maxCoeff();
  return std::pow(top / lambda, 1.0 / exponent);
}

namespace {

// |o h|^e, shared by both scan modes so thresholds agree bit for bit.
double offset_power(const Lattice& lat, const std::array<Index, 3>& o, double e) {
  double r2 = 0.0;
  for (int a = 0; a < lat.dim(); ++a) {
    const double d = static_cast<double>(o[a]) * lat.spacing(a);
    r2 += d * d;
  }
  return std::pow(std::sqrt(r2), e);
}

struct Offsets {
  std::vector<std::array<Index, 3>> off;
  std::vector<double> power;
};

Offsets offsets_within(const Lattice& lat, double radius, double e) {
  Offsets out;
  std::array<Index, 3> m{0, 0, 0};
  for (int a = 0; a < lat.dim(); ++a)
    m[a] = std::min<Index>(lat.points(a) - 1, static_cast<Index>(std::floor(radius / lat.spacing(a))));
  for (Index o2 = -m[2]; o2 <= m[2]; ++o2)
    for (Index o1 = -m[1]; o1 <= m[1]; ++o1)
      for (Index o0 = -m[0]; o0 <= m[0]; ++o0) {
        if (o0 == 0 && o1 == 0 && o2 == 0) continue;
        const std::array<Index, 3> o{o0, o1, o2};
        double r2 = 0.0;
        for (int a = 0; a < lat.dim(); ++a) r2 += std::pow(static_cast<double>(o[a]) * lat.spacing(a), 2);
        if (r2 > radius * radius) continue;
        out.off.push_back(o);
        out.power.push_back(offset_power(lat, o, e));
      }
  return out;
}

// Discrete Lipschitz constant along lattice edges.
double edge_lipschitz(const GridFunction& f) {
  const Lattice& lat = f.lattice();
  double lip = 0.0;
  for (int a = 0; a < lat.dim(); ++a) {
    const Index s = lat.stride(a);
    for (Index i = 0; i < lat.size(); ++i)
      if (lat.unflatten(i)[a] + 1 < lat.points(a))
        lip = std::max(lip, std::abs(f[i + s] - f[i]) / lat.spacing(a));
  }
  return lip;
}

struct SphereRule {
  std::vector<Eigen::Vector3d> dirs;
  std::vector<double> weights;
};

const SphereRule& sphere_rule(int dim) {
  static const std::array<SphereRule, 3> rules = [] {
    std::array<SphereRule, 3> r;
    r[0].dirs = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)};
    r[0].weights = {1.0, 1.0};
    const int m2 = 256;
    for (int t = 0; t < m2; ++t) {
      const double th = 2.0 * std::numbers::pi * (t + 0.5) / m2;
      r[1].dirs.emplace_back(std::cos(th), std::sin(th), 0.0);
      r[1].weights.push_back(2.0 * std::numbers::pi / m2);
    }
    const auto& g = quad::gauss_legendre(32);
    const int m3 = 64;
    for (Index j = 0; j < g.nodes.size(); ++j) {
      const double ct = g.nodes(j), st = std::sqrt(1.0 - ct * ct);
      for (int t = 0; t < m3; ++t) {
        const double ph = 2.0 * std::numbers::pi * (t + 0.5) / m3;
        r[2].dirs.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
        r[2].weights.push_back(g.weights(j) * 2.0 * std::numbers::pi / m3);
      }
    }
    return r;
  }();
  return rules[dim - 1];
}

// Measure of {z in cell : |g . z| > lambda |z|^e} in polar form.
double self_cell_measure(const Lattice& lat, const Eigen::Vector3d& g, double lambda, double e) {
  const int n = lat.dim();
  const SphereRule& rule = sphere_rule(n);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
    const Eigen::Vector3d& u = rule.dirs[k];
    double t_cell = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
      if (u(a) != 0.0) t_cell = std::min(t_cell, 0.5 * lat.spacing(a) / std::abs(u(a)));
    const double slope = std::abs(g.dot(u));
    if (slope == 0.0) continue;
    double inner = 0.0, outer = 0.0;  // radial range [inner, outer) qualifies
    if (e > 1.0) {
      outer = std::min(t_cell, std::pow(slope / lambda, 1.0 / (e - 1.0)));
    } else if (e < 1.0) {
      inner = std::min(t_cell, std::pow(lambda / slope, 1.0 / (1.0 - e)));
      outer = t_cell;
    } else {
      outer = slope > lambda ? t_cell : 0.0;
    }
    total += rule.weights[k] * (std::pow(outer, n) - std::pow(inner, n)) / n;
  }
  return total;
}

void count_accelerated(const GridFunction& f, const Offsets& offs, double lambda, std::vector<std::int32_t>& counts) {
  const Lattice& lat = f.lattice();
  const Index p0 = lat.points(0);
  const Index p1 = lat.dim() > 1 ? lat.points(1) : 1;
  const Index p2 = lat.dim() > 2 ? lat.points(2) : 1;
  const double* v = f.values().data();
  parallel_for(p1 * p2, [&](Index begin, Index end) {
    for (Index line = begin; line < end; ++line) {
      const Index i1 = line % p1, i2 = line / p1;
      const Index base = line * p0;
      std::int32_t* cnt = counts.data() + base;
      for (std::size_t k = 0; k < offs.off.size(); ++k) {
        const auto& o = offs.off[k];
        const Index j1 = i1 + o[1], j2 = i2 + o[2];
        if (j1 < 0 || j1 >= p1 || j2 < 0 || j2 >= p2) continue;
        const double thr = lambda * offs.power[k];
        const Index other = (j2 * p1 + j1) * p0 + o[0];
        const Index lo = std::max<Index>(0, -o[0]);
        const Index hi = std::min<Index>(p0, p0 - o[0]);
        for (Index i0 = lo; i0 < hi; ++i0) cnt[i0] += std::abs(v[base + i0] - v[other + i0]) > thr;
      }
    }
  }, 1);
}

void count_brute(const GridFunction& f, double e, double lambda, std::vector<std::int32_t>& counts) {
  const Lattice& lat = f.lattice();
  const int n = lat.dim();
  // full offset table indexed by o + (points - 1)
  std::array<Index, 3> span{1, 1, 1};
  for (int a = 0; a < n; ++a) span[a] = 2 * lat.points(a) - 1;
  std::vector<double> table(static_cast<std::size_t>(span[0] * span[1] * span[2]));
  for (Index t = 0; t < static_cast<Index>(table.size()); ++t) {
    std::array<Index, 3> o{t % span[0], (t / span[0]) % span[1], t / (span[0] * span[1])};
    for (int a = 0; a < n; ++a) o[a] -= lat.points(a) - 1;
    table[static_cast<std::size_t>(t)] = offset_power(lat, o, e);
  }
  const Eigen::ArrayXd& v = f.values();
  parallel_for(lat.size(), [&](Index begin, Index end) {
    for (Index x = begin; x < end; ++x) {
      const auto ix = lat.unflatten(x);
      std::int32_t c = 0;
      for (Index y = 0; y < lat.size(); ++y) {
        if (y == x) continue;
        const auto iy = lat.unflatten(y);
        Index t = 0, mul = 1;
        for (int a = 0; a < n; ++a) {
          t += (iy[a] - ix[a] + lat.points(a) - 1) * mul;
          mul *= span[a];
        }
        c += std::abs(v(x) - v(y)) > lambda * table[static_cast<std::size_t>(t)];
      }
      counts[static_cast<std::size_t>(x)] = c;
    }
  }, 16);
}

}  // namespace

MeasureField measure_field(const GridFunction& f, const LevelSetParams& params, ScanMode mode, SelfCell self) {
  const Lattice& lat = f.lattice();
  params.validate(lat.dim());
  const double e = params.exponent(lat.dim());
  const double lambda = params.lambda;
  MeasureField out;
  out.counts.assign(static_cast<std::size_t>(lat.size()), 0);

  if (mode == ScanMode::Brute) {
    count_brute(f, e, lambda, out.counts);
    out.scan_radius = lat.diameter();
  } else {
    double radius = r_max(f, lambda, e);
    if (e > 1.0) {
      const double lip = edge_lipschitz(f) * std::sqrt(static_cast<double>(lat.dim()));
      radius = std::min(radius, std::pow(lip / lambda, 1.0 / (e - 1.0)));
    }
    radius = radius * (1.0 + 1e-6) + lat.max_spacing();
    out.scan_radius = std::min(radius, lat.diameter());
    const Offsets offs = offsets_within(lat, out.scan_radius, e);
    count_accelerated(f, offs, lambda, out.counts);
  }

  const double cm = lat.cell_measure();
  Eigen::ArrayXd m(lat.size());
  for (Index i = 0; i < lat.size(); ++i) m(i) = cm * out.counts[static_cast<std::size_t>(i)];
  if (self == SelfCell::Linearized && (f.values() != f.values()(0)).any()) {
    const Gradient g = gradient(f);
    parallel_for(lat.size(), [&](Index begin, Index end) {
      for (Index i = begin; i < end; ++i) {
        Eigen::Vector3d gv = Eigen::Vector3d::Zero();
        for (int a = 0; a < lat.dim(); ++a) gv(a) = g.components[static_cast<std::size_t>(a)][i];
        if (gv.squaredNorm() > 0.0) m(i) += self_cell_measure(lat, gv, lambda, e);
      }
    });
  }
  out.measure = GridFunction(lat, std::move(m));
  return out;
}

std::vector<double> lambda_grid(const GridFunction& f, double q, double s, const LambdaGridSpec& spec) {
  const Lattice& lat = f.lattice();
  const double e = lat.dim() / q + s;
  auto geometric = [](double a, double b, int k, bool include_end) {
    std::vector<double> g;
    const int denom = include_end ? k - 1 : k;
    for (int i = 0; i < k; ++i) g.push_back(a * std::pow(b / a, static_cast<double>(i) / std::max(1, denom)));
    return g;
  };
  if (spec.lambda_min > 0.0 && spec.lambda_max > 0.0) {
    if (!(spec.lambda_max > spec.lambda_min)) throw std::invalid_argument("lambda grid: need lambda_min < lambda_max");
    return geometric(spec.lambda_min, spec.lambda_max, spec.points, true);
  }
  if (spec.points < 16 || spec.top_points < 8 || spec.top_points > spec.points)
    throw std::invalid_argument("lambda grid: need >= 16 points with 8..points in the top decade");
  const double h = lat.min_spacing();
  const double fmax = f.values().abs().maxCoeff();
  double top;
  if (e > 1.0) {
    const double grad = gradient(f).magnitude.values().maxCoeff();
    top = grad / std::pow(spec.min_radius_cells * h, e - 1.0);
  } else {
    top = 2.0 * fmax / std::pow(spec.min_radius_cells * h, e);
  }
  if (!(top > 0.0)) return geometric(0.1, 10.0, spec.points, true);
  const double bottom = 2.0 * fmax / std::pow(spec.max_window_fraction * lat.min_extent(), e);
  std::vector<double> grid;
  if (bottom < top / 10.0) {
    // no denser than the top decade
    const double step = std::log(10.0) / (spec.top_points - 1);
    const int fit = static_cast<int>(std::ceil(std::log(top / 10.0 / bottom) / step));
    grid = geometric(bottom, top / 10.0, std::min(spec.points - spec.top_points, std::max(1, fit)), false);
  }
  const auto upper = geometric(top / 10.0, top, spec.top_points, true);
  grid.insert(grid.end(), upper.begin(), upper.end());
  return grid;
}

LimitEstimate limit_estimate(const std::vector<double>& lambda, const std::vector<double>& values, double threshold) {
  if (lambda.size() != values.size() || lambda.empty()) throw std::invalid_argument("limit_estimate: bad profile");
  const double top = *std::max_element(lambda.begin(), lambda.end());
  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int count = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (lambda[i] >= top / 10.0 * (1.0 - 1e-12)) {
      sum += values[i];
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
      ++count;
    }
  if (count < 8) throw std::invalid_argument("limit_estimate: fewer than 8 points in the top decade");
  LimitEstimate out;
  out.points = count;
  out.value = sum / count;
  out.diagnostic = out.value > 0.0 ? (hi - lo) / out.value : 0.0;
  out.reliable = out.diagnostic <= threshold;
  return out;
}

LevelSetProfile weak_functional(const GridFunction& f, const SpaceSpec& space, double q, double s,
                                const LambdaGridSpec& spec) {
  const Lattice& lat = f.lattice();
  validate(space, lat.dim());
  LevelSetProfile prof;
  prof.lambda = lambda_grid(f, q, s, spec);
  const double e = lat.dim() / q + s;
  for (double lambda : prof.lambda) {
    const MeasureField mf = measure_field(f, {q, s, lambda}, spec.mode, spec.self);
    const double nm = norm(space, mf.measure.with_values(mf.measure.values().pow(1.0 / q)));
    prof.values.push_back(lambda * nm);
    prof.r_max_cells.push_back(r_max(f, lambda, e) / lat.min_spacing());
    prof.pair_count.push_back(mf.pair_count());
  }
  prof.sup_value = *std::max_element(prof.values.begin(), prof.values.end());
  const LimitEstimate lim = limit_estimate(prof.lambda, prof.values, spec.reliability_threshold);
  prof.limit_estimate = lim.value;
  prof.limit_diagnostic = lim.diagnostic;
  prof.limit_points = lim.points;
  prof.reliable = lim.reliable;
  return prof;
}

double strong_functional(const GridFunction& f, const SpaceSpec& space, double q, double s) {
  const Lattice& lat = f.lattice();
  if (!(q > 0.0)) throw std::invalid_argument("strong_functional: q must be positive");
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("strong_functional: s must be in (0, 1]");
  const int n = lat.dim();
  const double e = -(n + s * q);
  std::array<Index, 3> span{1, 1, 1};
  for (int a = 0; a < n; ++a) span[a] = 2 * lat.points(a) - 1;
  std::vector<double> kernel(static_cast<std::size_t>(span[0] * span[1] * span[2]));
  const double cm = lat.cell_measure();
  for (Index t = 0; t < static_cast<Index>(kernel.size()); ++t) {
    std::array<Index, 3> o{t % span[0], (t / span[0]) % span[1], t / (span[0] * span[1])};
    bool zero = true;
    for (int a = 0; a < n; ++a) {
      o[a] -= lat.points(a) - 1;
      zero = zero && o[a] == 0;
    }
    kernel[static_cast<std::size_t>(t)] = zero ? 0.0 : cm * offset_power(lat, o, e);
  }
  const Eigen::ArrayXd& v = f.values();
  Eigen::ArrayXd inner(lat.size());
  parallel_for(lat.size(), [&](Index begin, Index end) {
    for (Index x = begin; x < end; ++x) {
      const auto ix = lat.unflatten(x);
      double acc = 0.0;
      for (Index y = 0; y < lat.size(); ++y) {
        if (y == x) continue;
        const double d = std::abs(v(x) - v(y));
        if (d == 0.0) continue;
        const auto iy = lat.unflatten(y);
        Index t = 0, mul = 1;
        for (int a = 0; a < n; ++a) {
          t += (iy[a] - ix[a] + lat.points(a) - 1) * mul;
          mul *= span[a];
        }
        acc += (q == 2.0 ? d * d : std::pow(d, q)) * kernel[static_cast<std::size_t>(t)];
      }
      inner(x) = std::pow(acc, 1.0 / q);
    }
  }, 16);
  return norm(space, f.with_values(std::move(inner)));
}

SphereConstant sphere_constant(double q, int n) {
  if (!(q > 0.0)) throw std::invalid_argument("sphere_constant: q must be positive");
  if (n < 1 || n > 3) throw std::invalid_argument("sphere_constant: n must be 1, 2 or 3");
  SphereConstant k;
  k.q = q;
  k.n = n;
  k.closed_form = 2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) * std::tgamma(0.5 * (q + 1.0)) /
                  std::tgamma(0.5 * (n + q));
  switch (n) {
    case 1: k.quadrature = std::pow(1.0, q) + std::pow(std::abs(-1.0), q); break;
    case 2:
      k.quadrature = 4.0 * quad::tanh_sinh([q](double t) { return std::pow(std::cos(t), q); }, 0.0, 0.5 * std::numbers::pi);
      break;
    default:
      // the azimuth integral is exact; |xi . e| = |cos theta| with d(cos theta)
      k.quadrature = 2.0 * std::numbers::pi * 2.0 * quad::tanh_sinh([q](double t) { return std::pow(t, q); }, 0.0, 1.0);
      break;
  }
  k.value = k.quadrature;
  return k;
}

double limit_target(const GridFunction& f, const SpaceSpec& space, double q) {
  const Lattice& lat = f.lattice();
  const GridFunction grad = f.provenance() ? analytic_gradient_magnitude(*f.provenance(), lat) : gradient(f).magnitude;
  const double k = sphere_constant(q, lat.dim()).value;
  return std::pow(k / lat.dim(), 1.0 / q) * norm(space, grad);
}

}  // namespace weakgrad
