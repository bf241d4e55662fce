#ifndef WEAKGRAD_WEIGHTS_HPP
#define WEAKGRAD_WEIGHTS_HPP

#include "weakgrad/dyadic.hpp"
#include "weakgrad/field.hpp"

#include <string>
#include <vector>

namespace weakgrad {

enum class WeightFamily { Constant, Power, Step, Product };

std::string to_string(WeightFamily family);
WeightFamily weight_family_from_string(const std::string& name);

struct WeightSpec {
  WeightFamily family = WeightFamily::Constant;
  double value = 1.0;                      // constant
  double a = 0.0;                          // power |x - center|^a
  Eigen::VectorXd center;                  // power; empty means the origin
  double minus = 1.0, plus = 1.0;          // step on axis 0: minus for x<0, plus for x>=0
  std::vector<WeightSpec> parts;           // product: one 1D factor per axis
  double exponent = 1.0;                   // sampled values are raised to this power

  void validate(int dim) const;
};

WeightSpec constant_weight(double value = 1.0);
WeightSpec power_weight(double a, double center = 0.0);
WeightSpec step_weight(double minus, double plus);

/// Samples the weight. Power weights use the cell average over the cell of
/// side h centred at each node, so singular points are never evaluated.
GridFunction sample_weight(const WeightSpec& spec, const Lattice& lattice);

struct CubeFamily {
  Index corner_stride = 4;   // corners on every corner_stride-th node
  Index min_side_cells = 4;  // smallest side, doubled up to the window
  Index max_side_cells = 0;  // 0 means the largest power-of-two multiple that fits
};

struct ApEstimate {
  double p = 1.0;
  double value = 0.0;
  Box attaining_cube;
  Index cube_family_size = 0;
};

/// Sup over the cube family of the A_p product of averages. Averages use
/// trapezoid integrals over the node box divided by its measure.
ApEstimate ap_constant(const GridFunction& w, double p, const CubeFamily& family = {});

struct Admissibility {
  bool admissible = false;
  std::string rationale;
};

/// Catalogue lookup of A_1 membership on R^dim.
Admissibility is_a1_admissible(const WeightSpec& spec, int dim = 1);

}  // namespace weakgrad

#endif  // WEAKGRAD_WEIGHTS_HPP
