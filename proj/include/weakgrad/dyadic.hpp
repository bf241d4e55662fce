#ifndef WEAKGRAD_DYADIC_HPP
#define WEAKGRAD_DYADIC_HPP

#include <array>
#include <cstdint>
#include <span>

namespace weakgrad {

/// Half-open axis-aligned box [lo, hi).
struct Box {
  int dim = 1;
  std::array<double, 3> lo{}, hi{};

  double side(int axis) const { return hi[axis] - lo[axis]; }
  bool contains(std::span<const double> x) const;
  /// Containment in the closure.
  bool closure_contains(std::span<const double> x) const;
};

/// Cube 2^j (k + [0,1)^n + (-1)^j alpha) with alpha_i = shift[i] / 3.
struct DyadicCube {
  int dim = 1;
  std::array<int, 3> shift{0, 0, 0};  // each in {0, 1, 2}
  int j = 0;
  std::array<std::int64_t, 3> k{0, 0, 0};

  bool operator==(const DyadicCube&) const = default;
};

Box cube_geometry(const DyadicCube& c);

enum class Nesting { Disjoint, FirstInSecond, SecondInFirst, Equal };

/// Exact classification in integer arithmetic. Both cubes must share the
/// shift; a partial overlap throws std::logic_error.
Nesting nesting_check(const DyadicCube& a, const DyadicCube& b);

/// The cube of system (shift, j) containing x.
DyadicCube locate(std::span<const double> x, int dim, const std::array<int, 3>& shift, int j);

/// Same-shift cube one scale up containing c.
DyadicCube parent(const DyadicCube& c);

struct BallCover {
  DyadicCube cube;
  double ratio = 0.0;  // side / diameter
};

/// Smallest cube over all 3^n shifted systems and scales 2^j in
/// [diam, 8 diam] whose closure contains the closed ball.
BallCover cover_ball(std::span<const double> center, double radius, int dim);

}  // namespace weakgrad

#endif  // WEAKGRAD_DYADIC_HPP
