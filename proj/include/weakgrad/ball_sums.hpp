#ifndef WEAKGRAD_BALL_SUMS_HPP
#define WEAKGRAD_BALL_SUMS_HPP

#include "weakgrad/field.hpp"

#include <vector>

namespace weakgrad {

/// Lattice offsets within Euclidean distance r, stored as axis-0 runs
/// [-half, half] for every (o1, o2).
struct BallStencil {
  struct Run {
    Index o1 = 0, o2 = 0, half = 0;
  };
  double radius = 0.0;
  std::vector<Run> runs;
  Index size() const;
};

BallStencil ball_stencil(const Lattice& lattice, double radius);

/// sum(x) = sum of v over the stencil around x clipped to the window,
/// evaluated at nodes whose indices are multiples of stride (other entries
/// are left at zero).
Eigen::ArrayXd ball_sum(const Lattice& lattice, const BallStencil& stencil, const Eigen::ArrayXd& v,
                        Index stride = 1);

/// out(x) = max of v over the stencil around x clipped to the window.
Eigen::ArrayXd ball_max(const Lattice& lattice, const BallStencil& stencil, const Eigen::ArrayXd& v);

}  // namespace weakgrad

#endif  // WEAKGRAD_BALL_SUMS_HPP
