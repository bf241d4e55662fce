#include "weakgrad/weights.hpp"

#include "weakgrad/parallel.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace weakgrad {

std::string to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::Constant: return "constant";
    case WeightFamily::Power: return "power";
    case WeightFamily::Step: return "step";
    case WeightFamily::Product: return "product";
  }
  return "unknown";
}

WeightFamily weight_family_from_string(const std::string& name) {
  for (auto f : {WeightFamily::Constant, WeightFamily::Power, WeightFamily::Step, WeightFamily::Product})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown weight family '" + name + "'");
}

void WeightSpec::validate(int dim) const {
  if (!std::isfinite(exponent)) throw std::invalid_argument("weight: exponent must be finite");
  switch (family) {
    case WeightFamily::Constant:
      if (!(value > 0.0)) throw std::invalid_argument("constant weight: value must be positive");
      break;
    case WeightFamily::Power:
      if (!std::isfinite(a)) throw std::invalid_argument("power weight: exponent a must be finite");
      if (center.size() != 0 && center.size() != dim && center.size() != 1)
        throw std::invalid_argument("power weight: center needs one entry per axis");
      break;
    case WeightFamily::Step:
      if (!(minus > 0.0) || !(plus > 0.0)) throw std::invalid_argument("step weight: values must be positive");
      break;
    case WeightFamily::Product:
      if (static_cast<int>(parts.size()) != dim)
        throw std::invalid_argument("product weight: need one factor per axis");
      for (const auto& p : parts) p.validate(1);
      break;
  }
}

WeightSpec constant_weight(double value) {
  WeightSpec w;
  w.value = value;
  return w;
}

WeightSpec power_weight(double a, double center) {
  WeightSpec w;
  w.family = WeightFamily::Power;
  w.a = a;
  w.center = Eigen::VectorXd::Constant(1, center);
  return w;
}

WeightSpec step_weight(double minus, double plus) {
  WeightSpec w;
  w.family = WeightFamily::Step;
  w.minus = minus;
  w.plus = plus;
  return w;
}

namespace {

// Mean of |t|^a over [u1, u2].
double power_mean_1d(double a, double u1, double u2) {
  auto prim = [a](double u) {
    const double m = std::pow(std::abs(u), a + 1.0) / (a + 1.0);
    return u < 0.0 ? -m : m;
  };
  return (prim(u2) - prim(u1)) / (u2 - u1);
}

double power_cell_average(const WeightSpec& spec, const Eigen::VectorXd& x, const Lattice& lat) {
  const int n = lat.dim();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  if (spec.center.size() == n)
    c = spec.center;
  else if (spec.center.size() == 1)
    c.setConstant(spec.center(0));
  if (n == 1 && spec.a > -1.0) {
    const double h = lat.spacing(0);
    return power_mean_1d(spec.a, x(0) - c(0) - 0.5 * h, x(0) - c(0) + 0.5 * h);
  }
  // 4 midpoint sub-samples per axis.
  const int m = 4;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= m;
  double sum = 0.0;
  Eigen::VectorXd y(n);
  for (int t = 0; t < total; ++t) {
    int r = t;
    for (int a = 0; a < n; ++a) {
      y(a) = x(a) + ((r % m) + 0.5 - 0.5 * m) / m * lat.spacing(a);
      r /= m;
    }
    double d = (y - c).norm();
    if (d == 0.0) d = 1e-3 * lat.min_spacing();
    sum += std::pow(d, spec.a);
  }
  return sum / total;
}

double weight_value(const WeightSpec& spec, const Eigen::VectorXd& x, const Lattice& lat) {
  switch (spec.family) {
    case WeightFamily::Constant: return spec.value;
    case WeightFamily::Power: return power_cell_average(spec, x, lat);
    case WeightFamily::Step: return x(0) < 0.0 ? spec.minus : spec.plus;
    case WeightFamily::Product: {
      double prod = 1.0;
      for (int a = 0; a < lat.dim(); ++a) {
        const double lo = lat.lo(a), hi = lat.hi(a);
        const Lattice axis = make_lattice(1, {lo}, {hi}, {lat.points(a)});
        const auto& part = spec.parts[static_cast<std::size_t>(a)];
        prod *= std::pow(weight_value(part, x.segment(a, 1), axis), part.exponent);
      }
      return prod;
    }
  }
  return 1.0;
}

// Prefix sums over lattice cells of the corner-mean, so that a node-box
// trapezoid integral is one inclusion-exclusion lookup.
class CellPrefix {
 public:
  CellPrefix(const Lattice& lat, const Eigen::ArrayXd& v) : lat_(lat) {
    const int n = lat.dim();
    std::array<Index, 3> cells{1, 1, 1};
    for (int a = 0; a < 3; ++a) {
      cells[a] = a < n ? lat.points(a) - 1 : 1;
      ext_[a] = a < n ? lat.points(a) : 1;
    }
    data_ = Eigen::ArrayXd::Zero(ext_[0] * ext_[1] * ext_[2]);
    const int corners = 1 << n;
    for (Index c = 0; c < cells[0] * cells[1] * cells[2]; ++c) {
      const std::array<Index, 3> low{c % cells[0], (c / cells[0]) % cells[1], c / (cells[0] * cells[1])};
      double s = 0.0;
      for (int k = 0; k < corners; ++k) {
        std::array<Index, 3> idx = low;
        for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
        s += v(lat.flatten(idx));
      }
      std::array<Index, 3> slot{0, 0, 0};
      for (int a = 0; a < n; ++a) slot[a] = low[a] + 1;
      data_(at(slot[0], slot[1], slot[2])) = s / corners;
    }
    for (int a = 0; a < n; ++a) {
      const Index stride = a == 0 ? 1 : (a == 1 ? ext_[0] : ext_[0] * ext_[1]);
      for (Index i = 0; i < data_.size(); ++i) {
        const Index coord = (i / stride) % ext_[a];
        if (coord > 0) data_(i) += data_(i - stride);
      }
    }
  }

  /// Trapezoid integral over the node box [lo, lo + len] divided by the cell
  /// measure (len cells per axis).
  double box_sum(const std::array<Index, 3>& lo, Index len) const {
    const int n = lat_.dim();
    double s = 0.0;
    for (int c = 0; c < (1 << n); ++c) {
      std::array<Index, 3> idx{0, 0, 0};
      int parity = 0;
      for (int a = 0; a < n; ++a) {
        const bool upper = (c >> a) & 1;
        idx[a] = upper ? lo[a] + len : lo[a];
        if (!upper) ++parity;
      }
      const double val = data_(at(idx[0], idx[1], idx[2]));
      s += (parity % 2 == 0) ? val : -val;
    }
    return s;
  }

 private:
  Index at(Index i0, Index i1, Index i2) const { return i0 + ext_[0] * (i1 + ext_[1] * i2); }
  const Lattice& lat_;
  std::array<Index, 3> ext_{1, 1, 1};
  Eigen::ArrayXd data_;
};

// Minimum over node boxes [i, i + len]^n for every node i (where it fits).
Eigen::ArrayXd box_min(const Lattice& lat, const Eigen::ArrayXd& prev, Index half) {
  const int n = lat.dim();
  Eigen::ArrayXd out = prev;
  parallel_for(lat.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const auto idx = lat.unflatten(i);
      double m = prev(i);
      for (int c = 1; c < (1 << n); ++c) {
        std::array<Index, 3> j = idx;
        bool inside = true;
        for (int a = 0; a < n; ++a)
          if ((c >> a) & 1) {
            j[a] += half;
            if (j[a] >= lat.points(a)) inside = false;
          }
        if (inside) m = std::min(m, prev(lat.flatten(j)));
      }
      out(i) = m;
    }
  });
  return out;
}

}  // namespace

GridFunction sample_weight(const WeightSpec& spec, const Lattice& lattice) {
  spec.validate(lattice.dim());
  Eigen::ArrayXd values(lattice.size());
  parallel_for(lattice.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) values(i) = weight_value(spec, lattice.node(i), lattice);
  });
  if (spec.exponent != 1.0) values = values.pow(spec.exponent);
  return GridFunction(lattice, std::move(values));
}

ApEstimate ap_constant(const GridFunction& w, double p, const CubeFamily& family) {
  if (!(p >= 1.0)) throw std::invalid_argument("ap_constant: p must be >= 1");
  const Lattice& lat = w.lattice();
  if (!(w.values() > 0.0).all()) throw std::invalid_argument("ap_constant: weight must be positive at every node");
  if (family.corner_stride < 1 || family.min_side_cells < 1)
    throw std::invalid_argument("ap_constant: cube family needs positive stride and side");
  const int n = lat.dim();
  Index max_cells = lat.points(0) - 1;
  for (int a = 1; a < n; ++a) max_cells = std::min(max_cells, lat.points(a) - 1);
  if (family.max_side_cells > 0) max_cells = std::min(max_cells, family.max_side_cells);

  std::vector<Index> sides;
  for (Index L = family.min_side_cells; L <= max_cells; L *= 2) sides.push_back(L);
  if (sides.empty()) throw std::invalid_argument("ap_constant: empty cube family");

  const CellPrefix wsum(lat, w.values());
  std::optional<CellPrefix> dual;
  Eigen::ArrayXd dual_values;
  if (p > 1.0) {
    dual_values = w.values().pow(1.0 / (1.0 - p));
    dual.emplace(lat, dual_values);
  }

  // p = 1 needs box minima; build them by doubling from the smallest side.
  Eigen::ArrayXd mins;
  if (p == 1.0) {
    mins = w.values();
    Index have = 0;
    Index target = sides.front();
    // grow single steps up to the first side, then double
    while (have < target) {
      mins = box_min(lat, mins, 1);
      ++have;
    }
  }

  ApEstimate best;
  best.p = p;
  best.value = -1.0;
  std::mutex mutex;
  for (std::size_t si = 0; si < sides.size(); ++si) {
    const Index L = sides[si];
    if (p == 1.0 && si > 0) mins = box_min(lat, mins, sides[si - 1]);
    std::array<Index, 3> count{1, 1, 1};
    for (int a = 0; a < n; ++a) count[a] = (lat.points(a) - 1 - L) / family.corner_stride + 1;
    const Index total = count[0] * count[1] * count[2];
    const double measure = std::pow(static_cast<double>(L), n);
    std::vector<std::pair<double, Index>> chunk_best;
    parallel_for(total, [&](Index begin, Index end) {
      double local = -1.0;
      Index arg = -1;
      for (Index c = begin; c < end; ++c) {
        std::array<Index, 3> lo{0, 0, 0};
        Index r = c;
        for (int a = 0; a < n; ++a) {
          lo[a] = (r % count[a]) * family.corner_stride;
          r /= count[a];
        }
        const double avg_w = wsum.box_sum(lo, L) / measure;
        double val;
        if (p == 1.0)
          val = avg_w / mins(lat.flatten(lo));
        else
          val = avg_w * std::pow(dual->box_sum(lo, L) / measure, p - 1.0);
        if (val > local) {
          local = val;
          arg = c;
        }
      }
      std::lock_guard lock(mutex);
      chunk_best.emplace_back(local, arg);
    });
    // deterministic: prefer larger value, then smaller index
    for (const auto& [val, arg] : chunk_best) {
      if (arg < 0) continue;
      std::array<Index, 3> lo{0, 0, 0};
      Index r = arg;
      for (int a = 0; a < n; ++a) {
        lo[a] = (r % count[a]) * family.corner_stride;
        r /= count[a];
      }
      Box box;
      box.dim = n;
      for (int a = 0; a < n; ++a) {
        box.lo[a] = lat.coordinate(a, lo[a]);
        box.hi[a] = lat.coordinate(a, lo[a] + L);
      }
      const bool better = val > best.value ||
                          (val == best.value && (box.lo < best.attaining_cube.lo));
      if (better) {
        best.value = val;
        best.attaining_cube = box;
      }
    }
    best.cube_family_size += total;
  }
  return best;
}

Admissibility is_a1_admissible(const WeightSpec& spec, int dim) {
  switch (spec.family) {
    case WeightFamily::Constant:
      return {spec.value > 0.0, "positive constants are A_1 with constant 1"};
    case WeightFamily::Step:
      return {spec.minus > 0.0 && spec.plus > 0.0,
              "a step between two positive values is A_1 with constant at most max/min"};
    case WeightFamily::Power: {
      const double a = spec.a * spec.exponent;
      const bool ok = a > -static_cast<double>(dim) && a <= 0.0;
      return {ok, "|x|^a is A_1 on R^" + std::to_string(dim) + " iff -" + std::to_string(dim) +
                      " < a <= 0; here a = " + std::to_string(a)};
    }
    case WeightFamily::Product: {
      for (const auto& part : spec.parts) {
        auto r = is_a1_admissible(part, 1);
        if (!r.admissible) return {false, "factor not A_1: " + r.rationale};
      }
      return {true, "product of one-dimensional A_1 factors"};
    }
  }
  throw std::invalid_argument("is_a1_admissible: unknown family");
}

}  // namespace weakgrad
