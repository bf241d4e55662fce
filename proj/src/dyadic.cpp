#include "weakgrad/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace weakgrad {

namespace {

int sign_of_scale(int j) { return (j % 2 == 0) ? 1 : -1; }

void check_cube(const DyadicCube& c) {
  if (c.dim < 1 || c.dim > 3) throw std::invalid_argument("dyadic cube: dim must be 1, 2 or 3");
  for (int a = 0; a < c.dim; ++a)
    if (c.shift[a] < 0 || c.shift[a] > 2) throw std::invalid_argument("dyadic cube: shift index must be 0, 1 or 2");
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
  for (int a = 0; a < dim; ++a)
    if (!(x[a] >= lo[a] && x[a] < hi[a])) return false;
  return true;
}

bool Box::closure_contains(std::span<const double> x) const {
  for (int a = 0; a < dim; ++a)
    if (!(x[a] >= lo[a] && x[a] <= hi[a])) return false;
  return true;
}

Box cube_geometry(const DyadicCube& c) {
  check_cube(c);
  Box b;
  b.dim = c.dim;
  const double scale = std::ldexp(1.0, c.j);
  const int sgn = sign_of_scale(c.j);
  for (int a = 0; a < c.dim; ++a) {
    b.lo[a] = scale * (static_cast<double>(c.k[a]) + sgn * c.shift[a] / 3.0);
    b.hi[a] = b.lo[a] + scale;
  }
  return b;
}

Nesting nesting_check(const DyadicCube& a, const DyadicCube& b) {
  check_cube(a);
  check_cube(b);
  if (a.dim != b.dim) throw std::invalid_argument("nesting_check: dimension mismatch");
  for (int i = 0; i < a.dim; ++i)
    if (a.shift[i] != b.shift[i]) throw std::invalid_argument("nesting_check: cubes from different systems");
  // Coordinates in units of 2^min(j) / 3.
  const int jmin = std::min(a.j, b.j);
  if (std::max(a.j, b.j) - jmin > 60) throw std::invalid_argument("nesting_check: scale gap too large");
  auto interval = [&](const DyadicCube& c, int axis) {
    const __int128 mult = static_cast<__int128>(1) << (c.j - jmin);
    const __int128 lo = mult * (3 * static_cast<__int128>(c.k[axis]) + sign_of_scale(c.j) * c.shift[axis]);
    return std::pair<__int128, __int128>{lo, lo + 3 * mult};
  };
  bool a_in_b = true, b_in_a = true;
  for (int i = 0; i < a.dim; ++i) {
    const auto [alo, ahi] = interval(a, i);
    const auto [blo, bhi] = interval(b, i);
    if (ahi <= blo || bhi <= alo) return Nesting::Disjoint;
    a_in_b = a_in_b && blo <= alo && ahi <= bhi;
    b_in_a = b_in_a && alo <= blo && bhi <= ahi;
  }
  if (a_in_b && b_in_a) return Nesting::Equal;
  if (a_in_b) return Nesting::FirstInSecond;
  if (b_in_a) return Nesting::SecondInFirst;
  throw std::logic_error("nesting_check: partial overlap between same-system dyadic cubes");
}

DyadicCube locate(std::span<const double> x, int dim, const std::array<int, 3>& shift, int j) {
  DyadicCube c;
  c.dim = dim;
  c.shift = shift;
  c.j = j;
  check_cube(c);
  const double scale = std::ldexp(1.0, j);
  const int sgn = sign_of_scale(j);
  for (int a = 0; a < dim; ++a) {
    auto k = static_cast<std::int64_t>(std::floor(x[a] / scale - sgn * shift[a] / 3.0));
    // Guard against rounding at the faces.
    const double lo = scale * (static_cast<double>(k) + sgn * shift[a] / 3.0);
    if (x[a] < lo) --k;
    else if (x[a] >= lo + scale) ++k;
    c.k[a] = k;
  }
  return c;
}

DyadicCube parent(const DyadicCube& c) {
  const Box b = cube_geometry(c);
  std::array<double, 3> mid{};
  for (int a = 0; a < c.dim; ++a) mid[a] = 0.5 * (b.lo[a] + b.hi[a]);
  return locate(std::span<const double>(mid.data(), static_cast<std::size_t>(c.dim)), c.dim, c.shift, c.j + 1);
}

BallCover cover_ball(std::span<const double> center, double radius, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("cover_ball: dim must be 1, 2 or 3");
  if (!(radius > 0.0)) throw std::invalid_argument("cover_ball: radius must be positive");
  const double diam = 2.0 * radius;
  const int j_lo = static_cast<int>(std::ceil(std::log2(diam) - 1e-12));
  const int systems = dim == 1 ? 3 : (dim == 2 ? 9 : 27);
  const double tol = 1e-12 * diam;
  for (int j = j_lo; std::ldexp(1.0, j) <= 8.0 * diam * (1.0 + 1e-12); ++j) {
    for (int sys = 0; sys < systems; ++sys) {
      std::array<int, 3> shift{sys % 3, (sys / 3) % 3, sys / 9};
      for (int a = dim; a < 3; ++a) shift[a] = 0;
      const DyadicCube c = locate(center, dim, shift, j);
      const Box b = cube_geometry(c);
      bool ok = true;
      for (int a = 0; a < dim && ok; ++a)
        ok = b.lo[a] <= center[a] - radius + tol && center[a] + radius <= b.hi[a] + tol;
      if (ok) return {c, std::ldexp(1.0, j) / diam};
    }
  }
  throw std::logic_error("cover_ball: no covering cube in the searched scale range");
}

}  // namespace weakgrad
