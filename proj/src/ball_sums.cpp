#include "weakgrad/ball_sums.hpp"

#include "weakgrad/parallel.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace weakgrad {

Index BallStencil::size() const {
  Index s = 0;
  for (const Run& r : runs) s += 2 * r.half + 1;
  return s;
}

BallStencil ball_stencil(const Lattice& lattice, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball_stencil: radius must be non-negative");
  BallStencil st;
  st.radius = radius;
  const int n = lattice.dim();
  const double r2 = radius * radius * (1.0 + 1e-12);
  const Index m1 = n > 1 ? static_cast<Index>(std::floor(radius / lattice.spacing(1) * (1.0 + 1e-12))) : 0;
  const Index m2 = n > 2 ? static_cast<Index>(std::floor(radius / lattice.spacing(2) * (1.0 + 1e-12))) : 0;
  for (Index o2 = -m2; o2 <= m2; ++o2)
    for (Index o1 = -m1; o1 <= m1; ++o1) {
      double rest = r2;
      if (n > 1) rest -= std::pow(static_cast<double>(o1) * lattice.spacing(1), 2);
      if (n > 2) rest -= std::pow(static_cast<double>(o2) * lattice.spacing(2), 2);
      if (rest < 0.0) continue;
      const double h0 = lattice.spacing(0);
      auto half = static_cast<Index>(std::floor(std::sqrt(rest) / h0));
      while (std::pow(static_cast<double>(half + 1) * h0, 2) <= rest) ++half;
      while (half > 0 && std::pow(static_cast<double>(half) * h0, 2) > rest) --half;
      st.runs.push_back({o1, o2, half});
    }
  return st;
}

namespace {

// Prefix sums along axis 0 with one leading zero per line.
Eigen::ArrayXd line_prefix(const Lattice& lat, const Eigen::ArrayXd& v) {
  const Index p0 = lat.points(0);
  const Index lines = lat.size() / p0;
  Eigen::ArrayXd pre(lines * (p0 + 1));
  for (Index l = 0; l < lines; ++l) {
    double acc = 0.0;
    pre(l * (p0 + 1)) = 0.0;
    for (Index i = 0; i < p0; ++i) {
      acc += v(l * p0 + i);
      pre(l * (p0 + 1) + i + 1) = acc;
    }
  }
  return pre;
}

}  // namespace

Eigen::ArrayXd ball_sum(const Lattice& lat, const BallStencil& st, const Eigen::ArrayXd& v, Index stride) {
  if (v.size() != lat.size()) throw std::invalid_argument("ball_sum: size mismatch");
  if (stride < 1) throw std::invalid_argument("ball_sum: stride must be >= 1");
  const Eigen::ArrayXd pre = line_prefix(lat, v);
  const Index p0 = lat.points(0);
  const Index p1 = lat.dim() > 1 ? lat.points(1) : 1;
  const Index p2 = lat.dim() > 2 ? lat.points(2) : 1;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(lat.size());
  parallel_for(lat.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const Index i0 = i % p0, i1 = (i / p0) % p1, i2 = i / (p0 * p1);
      if (i0 % stride || i1 % stride || i2 % stride) continue;
      double s = 0.0;
      for (const auto& run : st.runs) {
        const Index j1 = i1 + run.o1, j2 = i2 + run.o2;
        if (j1 < 0 || j1 >= p1 || j2 < 0 || j2 >= p2) continue;
        const Index line = (j2 * p1 + j1) * (p0 + 1);
        const Index lo = std::max<Index>(0, i0 - run.half);
        const Index hi = std::min<Index>(p0 - 1, i0 + run.half);
        s += pre(line + hi + 1) - pre(line + lo);
      }
      out(i) = s;
    }
  });
  return out;
}

Eigen::ArrayXd ball_max(const Lattice& lat, const BallStencil& st, const Eigen::ArrayXd& v) {
  if (v.size() != lat.size()) throw std::invalid_argument("ball_max: size mismatch");
  const Index p0 = lat.points(0);
  const Index p1 = lat.dim() > 1 ? lat.points(1) : 1;
  const Index p2 = lat.dim() > 2 ? lat.points(2) : 1;
  const Index lines = lat.size() / p0;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::ArrayXd out = Eigen::ArrayXd::Constant(lat.size(), neg_inf);

  std::map<Index, std::vector<const BallStencil::Run*>> by_half;
  for (const auto& run : st.runs) by_half[run.half].push_back(&run);

  Eigen::ArrayXd slide(lat.size());
  for (const auto& [half, runs] : by_half) {
    // sliding max of width 2*half+1 along axis 0
    parallel_for(lines, [&](Index begin, Index end) {
      std::deque<Index> dq;
      for (Index l = begin; l < end; ++l) {
        dq.clear();
        const Index base = l * p0;
        Index next = 0;
        for (Index i = 0; i < p0; ++i) {
          const Index hi = std::min<Index>(p0 - 1, i + half);
          while (next <= hi) {
            while (!dq.empty() && v(base + dq.back()) <= v(base + next)) dq.pop_back();
            dq.push_back(next++);
          }
          while (dq.front() < i - half) dq.pop_front();
          slide(base + i) = v(base + dq.front());
        }
      }
    }, 1);
    parallel_for(lat.size(), [&](Index begin, Index end) {
      for (Index i = begin; i < end; ++i) {
        const Index i0 = i % p0, i1 = (i / p0) % p1, i2 = i / (p0 * p1);
        double m = out(i);
        for (const auto* run : runs) {
          const Index j1 = i1 + run->o1, j2 = i2 + run->o2;
          if (j1 < 0 || j1 >= p1 || j2 < 0 || j2 >= p2) continue;
          m = std::max(m, slide((j2 * p1 + j1) * p0 + i0));
        }
        out(i) = m;
      }
    });
  }
  return out;
}

}  // namespace weakgrad
