#include "weakgrad/field.hpp"

#include "weakgrad/parallel.hpp"
#include "weakgrad/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace weakgrad {

// ---------------------------------------------------------------- Lattice

Lattice make_lattice(int dim, std::span<const double> lo, std::span<const double> hi,
                     std::span<const Index> points) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_lattice: dim must be 1, 2 or 3");
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
      static_cast<int>(points.size()) != dim)
    throw std::invalid_argument("make_lattice: bounds and point counts need one entry per axis");
  Lattice lat;
  lat.dim_ = dim;
  lat.size_ = 1;
  for (int a = 0; a < dim; ++a) {
    if (points[a] < 2) throw std::invalid_argument("make_lattice: need at least 2 points per axis");
    if (!(lo[a] < hi[a])) throw std::invalid_argument("make_lattice: need lo < hi on every axis");
    lat.lo_[a] = lo[a];
    lat.hi_[a] = hi[a];
    lat.points_[a] = points[a];
    lat.spacing_[a] = (hi[a] - lo[a]) / static_cast<double>(points[a] - 1);
    lat.strides_[a] = lat.size_;
    lat.size_ *= points[a];
  }
  for (int a = dim; a < 3; ++a) lat.strides_[a] = lat.size_;
  return lat;
}

Lattice make_lattice(int dim, std::initializer_list<double> lo, std::initializer_list<double> hi,
                     std::initializer_list<Index> points) {
  return make_lattice(dim, std::span<const double>(lo.begin(), lo.size()),
                      std::span<const double>(hi.begin(), hi.size()),
                      std::span<const Index>(points.begin(), points.size()));
}

Lattice make_lattice(int dim, double lo, double hi, Index points) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_lattice: dim must be 1, 2 or 3");
  std::vector<double> l(static_cast<std::size_t>(dim), lo), h(static_cast<std::size_t>(dim), hi);
  std::vector<Index> p(static_cast<std::size_t>(dim), points);
  return make_lattice(dim, l, h, p);
}

double Lattice::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= spacing_[a];
  return m;
}

double Lattice::min_spacing() const {
  double m = spacing_[0];
  for (int a = 1; a < dim_; ++a) m = std::min(m, spacing_[a]);
  return m;
}

double Lattice::max_spacing() const {
  double m = spacing_[0];
  for (int a = 1; a < dim_; ++a) m = std::max(m, spacing_[a]);
  return m;
}

double Lattice::min_extent() const {
  double m = extent(0);
  for (int a = 1; a < dim_; ++a) m = std::min(m, extent(a));
  return m;
}

double Lattice::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += extent(a) * extent(a);
  return std::sqrt(s);
}

std::array<Index, 3> Lattice::unflatten(Index flat) const {
  std::array<Index, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = flat % points_[a];
    flat /= points_[a];
  }
  return idx;
}

Index Lattice::flatten(const std::array<Index, 3>& idx) const {
  Index flat = 0;
  for (int a = 0; a < dim_; ++a) flat += idx[a] * strides_[a];
  return flat;
}

Eigen::VectorXd Lattice::node(Index flat) const {
  const auto idx = unflatten(flat);
  Eigen::VectorXd x(dim_);
  for (int a = 0; a < dim_; ++a) x(a) = coordinate(a, idx[a]);
  return x;
}

bool Lattice::operator==(const Lattice& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (lo_[a] != other.lo_[a] || hi_[a] != other.hi_[a] || points_[a] != other.points_[a])
      return false;
  return true;
}

// ----------------------------------------------------------- mollifier eta

namespace {

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

double bump_profile(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

double mollifier_mass(int dim) {
  static const std::array<double, 3> mass = [] {
    std::array<double, 3> m{};
    for (int n = 1; n <= 3; ++n)
      m[n - 1] = sphere_area(n) *
                 quad::gauss([n](double r) { return std::pow(r, n - 1) * bump_profile(r); }, 0.0, 1.0, 200);
    return m;
  }();
  return mass[dim - 1];
}

double hat_profile(double dist, double radius) { return std::max(0.0, 1.0 - dist / radius); }

Eigen::VectorXd center_or_origin(const FunctionSpec& s, Index dim) {
  return s.center.size() == 0 ? Eigen::VectorXd::Zero(dim) : s.center;
}

// Smoothed hat: (radial hat) * eta_k evaluated by quadrature over the kernel
// support. In 1D the integration range is split at the hat kinks.
template <typename Integrand>
double smoothed_integral_1d(double x, double c, double r, int k, Integrand&& g) {
  std::array<double, 5> cuts{-1.0, 1.0, k * (x - (c - r)), k * (x - c), k * (x - (c + r))};
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  double prev = -1.0;
  for (double cut : cuts) {
    const double b = std::clamp(cut, -1.0, 1.0);
    if (b > prev) {
      sum += quad::gauss([&](double z) { return g(x - z / k) * bump_profile(std::abs(z)); }, prev, b, 48);
      prev = b;
    }
  }
  return sum / mollifier_mass(1);
}

// nD: polar rule, Gauss in the radius and uniform in the angles.
template <typename Integrand>
Eigen::VectorXd smoothed_integral_nd(const Eigen::VectorXd& x, int k, int out_size, Integrand&& g) {
  const Index n = x.size();
  const auto& radial = quad::gauss_legendre(32);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(out_size);
  Eigen::VectorXd z(n);
  for (Index i = 0; i < radial.nodes.size(); ++i) {
    const double rho = 0.5 * (radial.nodes(i) + 1.0);
    const double wr = 0.5 * radial.weights(i) * std::pow(rho, static_cast<double>(n - 1)) * bump_profile(rho);
    if (wr == 0.0) continue;
    if (n == 2) {
      const int m = 96;
      for (int t = 0; t < m; ++t) {
        const double th = 2.0 * std::numbers::pi * (t + 0.5) / m;
        z << rho * std::cos(th), rho * std::sin(th);
        acc += (wr * 2.0 * std::numbers::pi / m) * g(x - z / k);
      }
    } else {
      const auto& polar = quad::gauss_legendre(16);
      const int m = 32;
      for (Index j = 0; j < polar.nodes.size(); ++j) {
        const double ct = polar.nodes(j);
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int t = 0; t < m; ++t) {
          const double ph = 2.0 * std::numbers::pi * (t + 0.5) / m;
          z << rho * st * std::cos(ph), rho * st * std::sin(ph), rho * ct;
          acc += (wr * polar.weights(j) * 2.0 * std::numbers::pi / m) * g(x - z / k);
        }
      }
    }
  }
  return acc / mollifier_mass(static_cast<int>(n));
}

}  // namespace

double mollifier(double radius, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("mollifier: dim must be 1, 2 or 3");
  return bump_profile(radius) / mollifier_mass(dim);
}

// ------------------------------------------------------------ FunctionSpec

std::string to_string(Family family) {
  switch (family) {
    case Family::Hat: return "hat";
    case Family::SmoothBump: return "smooth-bump";
    case Family::SmoothedHat: return "smoothed-hat";
    case Family::GaussianLike: return "gaussian-like";
    case Family::Linear: return "linear";
    case Family::Constant: return "constant";
    case Family::TensorProduct: return "tensor-product";
    case Family::Sum: return "sum";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::Hat, Family::SmoothBump, Family::SmoothedHat, Family::GaussianLike,
                   Family::Linear, Family::Constant, Family::TensorProduct, Family::Sum})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown function family '" + name + "'");
}

void FunctionSpec::validate(int dim) const {
  const bool radial = family == Family::Hat || family == Family::SmoothBump ||
                      family == Family::SmoothedHat || family == Family::GaussianLike;
  if (radial) {
    if (!(radius > 0.0)) throw std::invalid_argument(to_string(family) + ": radius must be positive");
    if (center.size() != 0 && center.size() != dim)
      throw std::invalid_argument(to_string(family) + ": center needs one entry per axis");
  }
  if (family == Family::SmoothedHat && smoothing < 1)
    throw std::invalid_argument("smoothed-hat: smoothing index k must be >= 1");
  if (family == Family::Linear) {
    if (slope.size() != 1 && slope.size() != dim)
      throw std::invalid_argument("linear: slope needs one entry or one per axis");
    if (center.size() != 0 && center.size() != dim)
      throw std::invalid_argument("linear: center needs one entry per axis");
  }
  if (family == Family::TensorProduct) {
    if (static_cast<int>(parts.size()) != dim)
      throw std::invalid_argument("tensor-product: need one factor per axis");
    for (const auto& p : parts) p.validate(1);
  }
  if (family == Family::Sum) {
    if (parts.empty()) throw std::invalid_argument("sum: need at least one term");
    for (const auto& p : parts) p.validate(dim);
  }
}

double FunctionSpec::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Index n = x.size();
  switch (family) {
    case Family::Constant: return height;
    case Family::Linear: {
      const Eigen::VectorXd c = center_or_origin(*this, n);
      if (slope.size() == 1) return height + slope(0) * (x(0) - c(0));
      return height + slope.dot(x - c);
    }
    case Family::Hat: {
      const double d = (x - center_or_origin(*this, n)).norm();
      return height * hat_profile(d, radius);
    }
    case Family::SmoothBump: {
      const double rho = (x - center_or_origin(*this, n)).norm() / radius;
      return rho < 1.0 ? height * std::exp(1.0 - 1.0 / (1.0 - rho * rho)) : 0.0;
    }
    case Family::GaussianLike: {
      const double d2 = (x - center_or_origin(*this, n)).squaredNorm() / (radius * radius);
      return height * std::exp(-d2);
    }
    case Family::SmoothedHat: {
      const Eigen::VectorXd c = center_or_origin(*this, n);
      if (n == 1)
        return height * smoothed_integral_1d(x(0), c(0), radius, smoothing,
                                             [&](double y) { return hat_profile(std::abs(y - c(0)), radius); });
      const Eigen::VectorXd v = smoothed_integral_nd(Eigen::VectorXd(x), smoothing, 1, [&](const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, hat_profile((y - c).norm(), radius));
      });
      return height * v(0);
    }
    case Family::TensorProduct: {
      double prod = 1.0;
      for (Index a = 0; a < n; ++a) prod *= parts[static_cast<std::size_t>(a)].value(x.segment(a, 1));
      return prod;
    }
    case Family::Sum: {
      double sum = 0.0;
      for (const auto& p : parts) sum += p.value(x);
      return sum;
    }
  }
  return 0.0;
}

Eigen::VectorXd FunctionSpec::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Index n = x.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  switch (family) {
    case Family::Constant: break;
    case Family::Linear:
      if (slope.size() == 1)
        g(0) = slope(0);
      else
        g = slope;
      break;
    case Family::Hat: {
      const Eigen::VectorXd d = x - center_or_origin(*this, n);
      const double r = d.norm();
      if (r > 0.0 && r < radius) g = -(height / radius) * d / r;
      break;
    }
    case Family::SmoothBump: {
      const Eigen::VectorXd d = x - center_or_origin(*this, n);
      const double rho2 = d.squaredNorm() / (radius * radius);
      if (rho2 < 1.0) {
        const double f = height * std::exp(1.0 - 1.0 / (1.0 - rho2));
        g = f * (-2.0 / ((1.0 - rho2) * (1.0 - rho2))) * d / (radius * radius);
      }
      break;
    }
    case Family::GaussianLike: {
      const Eigen::VectorXd d = x - center_or_origin(*this, n);
      const double f = height * std::exp(-d.squaredNorm() / (radius * radius));
      g = f * (-2.0 / (radius * radius)) * d;
      break;
    }
    case Family::SmoothedHat: {
      const Eigen::VectorXd c = center_or_origin(*this, n);
      if (n == 1) {
        g(0) = height * smoothed_integral_1d(x(0), c(0), radius, smoothing, [&](double y) {
                 const double d = y - c(0);
                 if (d == 0.0 || std::abs(d) >= radius) return 0.0;
                 return d > 0.0 ? -1.0 / radius : 1.0 / radius;
               });
      } else {
        g = height * smoothed_integral_nd(Eigen::VectorXd(x), smoothing, static_cast<int>(n), [&](const Eigen::VectorXd& y) {
              const Eigen::VectorXd d = y - c;
              const double r = d.norm();
              if (r > 0.0 && r < radius) return Eigen::VectorXd(-d / (r * radius));
              return Eigen::VectorXd(Eigen::VectorXd::Zero(d.size()));
            });
      }
      break;
    }
    case Family::TensorProduct: {
      Eigen::VectorXd vals(n), ders(n);
      for (Index a = 0; a < n; ++a) {
        const auto& p = parts[static_cast<std::size_t>(a)];
        vals(a) = p.value(x.segment(a, 1));
        ders(a) = p.gradient(x.segment(a, 1))(0);
      }
      for (Index a = 0; a < n; ++a) {
        double prod = ders(a);
        for (Index b = 0; b < n; ++b)
          if (b != a) prod *= vals(b);
        g(a) = prod;
      }
      break;
    }
    case Family::Sum:
      for (const auto& p : parts) g += p.gradient(x);
      break;
  }
  return g;
}

FunctionSpec hat(double center, double halfwidth, double height) {
  FunctionSpec s;
  s.family = Family::Hat;
  s.center = Eigen::VectorXd::Constant(1, center);
  s.radius = halfwidth;
  s.height = height;
  return s;
}

FunctionSpec smooth_bump(Eigen::VectorXd center, double radius, double height) {
  FunctionSpec s;
  s.family = Family::SmoothBump;
  s.center = std::move(center);
  s.radius = radius;
  s.height = height;
  return s;
}

FunctionSpec smoothed_hat(double center, double halfwidth, int k, double height) {
  FunctionSpec s = hat(center, halfwidth, height);
  s.family = Family::SmoothedHat;
  s.smoothing = k;
  return s;
}

FunctionSpec gaussian_like(Eigen::VectorXd center, double length, double height) {
  FunctionSpec s;
  s.family = Family::GaussianLike;
  s.center = std::move(center);
  s.radius = length;
  s.height = height;
  return s;
}

FunctionSpec linear(Eigen::VectorXd slope, double offset) {
  FunctionSpec s;
  s.family = Family::Linear;
  s.slope = std::move(slope);
  s.height = offset;
  return s;
}

FunctionSpec constant(double value) {
  FunctionSpec s;
  s.family = Family::Constant;
  s.height = value;
  return s;
}

// ------------------------------------------------------------ GridFunction

GridFunction::GridFunction(Lattice lattice, Eigen::ArrayXd values, std::optional<FunctionSpec> provenance)
    : lattice_(std::move(lattice)), values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.size() != lattice_.size())
    throw std::invalid_argument("GridFunction: value count does not match the lattice");
  if (!values_.allFinite()) throw std::invalid_argument("GridFunction: values must be finite");
}

GridFunction GridFunction::zeros(const Lattice& lattice) {
  return GridFunction(lattice, Eigen::ArrayXd::Zero(lattice.size()));
}

GridFunction GridFunction::filled(const Lattice& lattice, double value) {
  return GridFunction(lattice, Eigen::ArrayXd::Constant(lattice.size(), value));
}

GridFunction GridFunction::with_values(Eigen::ArrayXd values) const {
  return GridFunction(lattice_, std::move(values));
}

void require_same_lattice(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!(a.lattice() == b.lattice())) throw std::invalid_argument(std::string(what) + ": lattice mismatch");
}

GridFunction sample(const FunctionSpec& spec, const Lattice& lattice) {
  spec.validate(lattice.dim());
  Eigen::ArrayXd values(lattice.size());
  parallel_for(lattice.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) values(i) = spec.value(lattice.node(i));
  });
  return GridFunction(lattice, std::move(values), spec);
}

GridFunction analytic_gradient_magnitude(const FunctionSpec& spec, const Lattice& lattice) {
  spec.validate(lattice.dim());
  Eigen::ArrayXd values(lattice.size());
  parallel_for(lattice.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) values(i) = spec.gradient(lattice.node(i)).norm();
  });
  return GridFunction(lattice, std::move(values));
}

// -------------------------------------------------------------- calculus


namespace {

// Trapezoid weights divided by the cell measure: 1, 1/2, 1/4, ... exactly.
Eigen::ArrayXd unit_weights(const Lattice& lattice) {
  Eigen::ArrayXd w = Eigen::ArrayXd::Ones(lattice.size());
  for (Index i = 0; i < lattice.size(); ++i) {
    const auto idx = lattice.unflatten(i);
    for (int a = 0; a < lattice.dim(); ++a)
      if (idx[a] == 0 || idx[a] == lattice.points(a) - 1) w(i) *= 0.5;
  }
  return w;
}

// Multiplies by the cell measure as extent / cells per axis, so constants
// integrate exactly.
double scale_by_cells(double sum, const Lattice& lattice) {
  for (int a = 0; a < lattice.dim(); ++a) sum = sum * lattice.extent(a) / static_cast<double>(lattice.points(a) - 1);
  return sum;
}

}  // namespace

Eigen::ArrayXd quadrature_weights(const Lattice& lattice) { return unit_weights(lattice) * lattice.cell_measure(); }

double integrate(const GridFunction& f) {
  return scale_by_cells((f.values() * unit_weights(f.lattice())).sum(), f.lattice());
}

double integrate(const GridFunction& f, const GridFunction& weight) {
  require_same_lattice(f, weight, "integrate");
  if ((weight.values() < 0.0).any()) throw std::invalid_argument("integrate: weight must be non-negative");
  return scale_by_cells((f.values() * weight.values() * unit_weights(f.lattice())).sum(), f.lattice());
}

Gradient gradient(const GridFunction& f) {
  const Lattice& lat = f.lattice();
  for (int a = 0; a < lat.dim(); ++a)
    if (lat.points(a) < 3) throw std::invalid_argument("gradient: need at least 3 points per axis");
  Gradient out;
  Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(lat.size());
  const Eigen::ArrayXd& v = f.values();
  for (int a = 0; a < lat.dim(); ++a) {
    Eigen::ArrayXd d(lat.size());
    const Index s = lat.stride(a);
    const Index n = lat.points(a);
    const double inv2h = 0.5 / lat.spacing(a);
    parallel_for(lat.size(), [&](Index begin, Index end) {
      for (Index i = begin; i < end; ++i) {
        const Index k = lat.unflatten(i)[a];
        if (k == 0)
          d(i) = (-3.0 * v(i) + 4.0 * v(i + s) - v(i + 2 * s)) * inv2h;
        else if (k == n - 1)
          d(i) = (3.0 * v(i) - 4.0 * v(i - s) + v(i - 2 * s)) * inv2h;
        else
          d(i) = (v(i + s) - v(i - s)) * inv2h;
      }
    });
    mag2 += d.square();
    out.components.emplace_back(lat, std::move(d));
  }
  out.magnitude = GridFunction(lat, mag2.sqrt());
  return out;
}

GridFunction mollify(const GridFunction& f, int k) {
  const Lattice& lat = f.lattice();
  if (k < 1) throw std::invalid_argument("mollify: k must be positive");
  const double support = 1.0 / k;
  if (support < 2.0 * lat.max_spacing())
    throw std::invalid_argument("mollify: kernel radius 1/k is below two lattice spacings");
  const int n = lat.dim();
  std::array<Index, 3> reach{0, 0, 0};
  for (int a = 0; a < n; ++a) reach[a] = static_cast<Index>(std::floor(support / lat.spacing(a)));
  struct Tap {
    std::array<Index, 3> offset;
    double weight;
  };
  std::vector<Tap> taps;
  double mass = 0.0;
  for (Index o2 = -reach[2]; o2 <= reach[2]; ++o2)
    for (Index o1 = -reach[1]; o1 <= reach[1]; ++o1)
      for (Index o0 = -reach[0]; o0 <= reach[0]; ++o0) {
        const std::array<Index, 3> o{o0, o1, o2};
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double z = static_cast<double>(o[a]) * lat.spacing(a) * k;
          r2 += z * z;
        }
        const double w = bump_profile(std::sqrt(r2));
        if (w > 0.0) {
          taps.push_back({o, w});
          mass += w;
        }
      }
  for (auto& t : taps) t.weight /= mass;

  Eigen::ArrayXd out(lat.size());
  const Eigen::ArrayXd& v = f.values();
  parallel_for(lat.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const auto idx = lat.unflatten(i);
      double acc = 0.0;
      for (const Tap& t : taps) {
        std::array<Index, 3> j{0, 0, 0};
        for (int a = 0; a < n; ++a) j[a] = std::clamp<Index>(idx[a] - t.offset[a], 0, lat.points(a) - 1);
        acc += t.weight * v(lat.flatten(j));
      }
      out(i) = acc;
    }
  });
  return GridFunction(lat, std::move(out));
}

void write_csv(std::ostream& out, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  for (int a = 0; a < lat.dim(); ++a) out << 'x' << a << ',';
  out << "value\n";
  out << std::setprecision(17);
  for (Index i = 0; i < lat.size(); ++i) {
    const auto idx = lat.unflatten(i);
    for (int a = 0; a < lat.dim(); ++a) out << lat.coordinate(a, idx[a]) << ',';
    out << f[i] << '\n';
  }
}

}  // namespace weakgrad
