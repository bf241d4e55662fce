#include "weakgrad/operators.hpp"

#include "weakgrad/ball_sums.hpp"
#include "weakgrad/parallel.hpp"
#include "weakgrad/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace weakgrad {

std::vector<double> default_radii(const Lattice& lattice, double ratio) {
  if (!(ratio > 1.0)) throw std::invalid_argument("default_radii: ratio must exceed 1");
  std::vector<double> radii;
  const double top = lattice.diameter();
  for (double r = lattice.min_spacing(); r < top; r *= ratio) radii.push_back(r);
  radii.push_back(top);
  return radii;
}

GridFunction ball_average(const GridFunction& f, double r) {
  const Lattice& lat = f.lattice();
  if (r < lat.min_spacing() * (1.0 - 1e-12)) throw std::invalid_argument("ball_average: radius below the lattice spacing");
  const BallStencil st = ball_stencil(lat, r);
  const Eigen::ArrayXd s = ball_sum(lat, st, f.values().abs());
  const Eigen::ArrayXd c = ball_sum(lat, st, Eigen::ArrayXd::Ones(lat.size()));
  return GridFunction(lat, s / c);
}

GridFunction maximal(const GridFunction& f, const MaximalConfig& cfg) {
  const Lattice& lat = f.lattice();
  const std::vector<double> radii = cfg.radii.empty() ? default_radii(lat) : cfg.radii;
  if (radii.empty()) throw std::invalid_argument("maximal: empty radii set");
  const Eigen::ArrayXd a = f.values().abs();
  if (cfg.mode == MaximalConfig::Mode::Centered) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(lat.size());
    for (double r : radii) out = out.max(ball_average(f, r).values());
    return GridFunction(lat, out);
  }
  const Index stride = cfg.center_stride > 0 ? cfg.center_stride : (lat.dim() == 1 ? 1 : 2);
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(lat.size());
  Eigen::ArrayXd out = a;
  for (double r : radii) {
    const BallStencil st = ball_stencil(lat, r);
    const Eigen::ArrayXd s = ball_sum(lat, st, a, stride);
    const Eigen::ArrayXd c = ball_sum(lat, st, ones, stride);
    const Eigen::ArrayXd avg =
        (c > 0.0).select(s / c.max(1.0), Eigen::ArrayXd::Constant(lat.size(), -std::numeric_limits<double>::infinity()));
    out = out.max(ball_max(lat, st, avg));
  }
  return GridFunction(lat, out);
}

double riesz_self_cell(int dim, double h) {
  const double a = 0.5 * h;
  switch (dim) {
    case 1: return h;
    case 2: return 8.0 * a * std::asinh(1.0);
    case 3: {
      const double inner = quad::gauss(
          [](double s) {
            return quad::gauss([s](double t) { return 1.0 / (1.0 + s * s + t * t); }, -1.0, 1.0, 64);
          },
          -1.0, 1.0, 64);
      return 6.0 * a * inner;
    }
    default: throw std::invalid_argument("riesz_self_cell: dim must be 1, 2 or 3");
  }
}

namespace {

Index next_pow2(Index n) {
  Index m = 1;
  while (m < n) m *= 2;
  return m;
}

// In-place n-D FFT over a row-major (axis 0 fastest) complex array.
void fft_nd(std::vector<std::complex<double>>& data, const std::array<Index, 3>& ext, int dim, bool inverse) {
  Eigen::FFT<double> fft;
  Index stride = 1;
  for (int a = 0; a < dim; ++a) {
    const Index len = ext[a];
    const Index total = static_cast<Index>(data.size());
    std::vector<std::complex<double>> line(static_cast<std::size_t>(len)), out(static_cast<std::size_t>(len));
    for (Index base = 0; base < total; ++base) {
      if ((base / stride) % len != 0) continue;
      for (Index i = 0; i < len; ++i) line[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(base + i * stride)];
      if (inverse)
        fft.inv(out, line);
      else
        fft.fwd(out, line);
      for (Index i = 0; i < len; ++i) data[static_cast<std::size_t>(base + i * stride)] = out[static_cast<std::size_t>(i)];
    }
    stride *= len;
  }
}

}  // namespace

GridFunction riesz_potential(const GridFunction& g, const std::optional<GridFunction>& mask) {
  const Lattice& lat = g.lattice();
  const int n = lat.dim();
  Eigen::ArrayXd src = g.values();
  if (mask) {
    require_same_lattice(g, *mask, "riesz_potential");
    src *= mask->values();
  }
  if (n == 1) {
    const double total = src.sum() * lat.spacing(0);
    Eigen::ArrayXd out = Eigen::ArrayXd::Constant(lat.size(), total);
    if (mask) out *= mask->values();
    return GridFunction(lat, out);
  }
  const double h = lat.spacing(0);
  for (int a = 1; a < n; ++a)
    if (std::abs(lat.spacing(a) - h) > 1e-12 * h)
      throw std::invalid_argument("riesz_potential: needs equal spacing on every axis");
  std::array<Index, 3> ext{1, 1, 1};
  Index total = 1;
  for (int a = 0; a < n; ++a) {
    ext[a] = next_pow2(2 * lat.points(a) - 1);
    total *= ext[a];
  }
  std::vector<std::complex<double>> gs(static_cast<std::size_t>(total)), ks(static_cast<std::size_t>(total));
  const double cm = lat.cell_measure();
  for (Index i = 0; i < lat.size(); ++i) {
    const auto idx = lat.unflatten(i);
    const Index at = idx[0] + ext[0] * (idx[1] + ext[1] * idx[2]);
    gs[static_cast<std::size_t>(at)] = src(i);
  }
  const double self = riesz_self_cell(n, h);
  for (Index t = 0; t < total; ++t) {
    std::array<Index, 3> o{t % ext[0], (t / ext[0]) % ext[1], t / (ext[0] * ext[1])};
    double r2 = 0.0;
    bool reachable = true;
    for (int a = 0; a < n; ++a) {
      Index d = o[a] > ext[a] / 2 ? o[a] - ext[a] : o[a];
      if (std::abs(d) >= lat.points(a)) reachable = false;
      r2 += static_cast<double>(d * d);
    }
    if (!reachable) continue;
    ks[static_cast<std::size_t>(t)] = r2 == 0.0 ? self : cm * std::pow(std::sqrt(r2) * h, 1.0 - n);
  }
  fft_nd(gs, ext, n, false);
  fft_nd(ks, ext, n, false);
  for (Index t = 0; t < total; ++t) gs[static_cast<std::size_t>(t)] *= ks[static_cast<std::size_t>(t)];
  fft_nd(gs, ext, n, true);
  Eigen::ArrayXd out(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const auto idx = lat.unflatten(i);
    out(i) = gs[static_cast<std::size_t>(idx[0] + ext[0] * (idx[1] + ext[1] * idx[2]))].real();
  }
  if (mask) out *= mask->values();
  return GridFunction(lat, out);
}

RdFResult rubio_de_francia(const GridFunction& g, const RdFConfig& cfg) {
  if (cfg.k_max < 1) throw std::invalid_argument("rubio_de_francia: k_max must be >= 1");
  if (!(cfg.m_norm >= 1.0)) throw std::invalid_argument("rubio_de_francia: m_norm must be >= 1");
  if (!(cfg.p >= 1.0)) throw std::invalid_argument("rubio_de_francia: p must be >= 1");
  MaximalConfig mc = cfg.maximal;
  mc.mode = MaximalConfig::Mode::Uncentered;
  GridFunction term = g.with_values(g.values().abs());
  Eigen::ArrayXd sum = term.values();
  for (int k = 1; k <= cfg.k_max; ++k) {
    term = maximal(term, mc);
    term.values() /= 2.0 * cfg.m_norm;
    sum += term.values();
  }
  Eigen::ArrayXd pw = g.values().abs().pow(cfg.p);
  if (cfg.weight) {
    require_same_lattice(g, *cfg.weight, "rubio_de_francia");
    pw *= cfg.weight->values();
  }
  const double gn = std::pow(integrate(g.with_values(pw)), 1.0 / cfg.p);
  return {g.with_values(sum), std::pow(2.0, 1 - cfg.k_max) * gn};
}

double operator_norm_probe(const SpaceSpec& space, const std::vector<GridFunction>& probes, const MaximalConfig& cfg) {
  double best = 1.0;
  for (const auto& f : probes) {
    const double nf = norm(space, f);
    if (!(nf > 0.0)) throw std::invalid_argument("operator_norm_probe: zero-norm probe");
    best = std::max(best, norm(space, maximal(f, cfg)) / nf);
  }
  return best;
}

}  // namespace weakgrad
