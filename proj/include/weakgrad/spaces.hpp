#ifndef WEAKGRAD_SPACES_HPP
#define WEAKGRAD_SPACES_HPP

#include "weakgrad/field.hpp"
#include "weakgrad/weights.hpp"

#include <optional>
#include <string>
#include <functional>
#include <variant>
#include <vector>

namespace weakgrad {

struct OrliczSpec {
  enum class Family { Power, PowerLog } family = Family::Power;
  double p = 1.0;

  /// Phi(t) = t^p or t^p log(e + t).
  double operator()(double t) const;
  void validate() const;
};

/// Exponent profile for variable Lebesgue spaces: a constant, or a smooth
/// tanh step from minus to plus along axis 0 centred at `center`.
struct ExponentProfile {
  enum class Kind { Constant, SmoothStep } kind = Kind::Constant;
  double minus = 2.0, plus = 2.0;
  double center = 0.0, width = 0.25;

  double value(double x0) const;
  void validate() const;
};

struct Lebesgue {
  double p = 2.0;
};
struct WeightedLebesgue {
  double p = 2.0;
  WeightSpec w;
};
struct Morrey {
  double r = 1.0;
  double alpha = 2.0;
  Index center_stride = 0;  // 0 picks 1, 2, 4 for n = 1, 2, 3
  double radius_ratio = 1.4142135623730951;
};
struct MixedNorm {
  std::vector<double> r;
};
struct VariableLebesgue {
  ExponentProfile r;
};
struct Orlicz {
  OrliczSpec phi;
};
struct OrliczSlice {
  OrliczSpec phi;
  double r = 2.0;
  double t = 0.5;
};

using SpaceSpec = std::variant<Lebesgue, WeightedLebesgue, Morrey, MixedNorm, VariableLebesgue, Orlicz, OrliczSlice>;

std::string space_name(const SpaceSpec& space);
void validate(const SpaceSpec& space, int dim);

double norm(const SpaceSpec& space, const GridFunction& f);

/// Luxemburg gauge inf{lambda : modular(lambda) <= 1} for a decreasing
/// modular, by log-space bisection to relative width 1e-14.
double luxemburg(const std::function<double(double)>& modular, double seed);

/// Variable-exponent modular at lambda, exposed for self-consistency checks.
double variable_modular(const VariableLebesgue& space, const GridFunction& f, double lambda);
double orlicz_modular(const OrliczSpec& phi, const GridFunction& f, double lambda);

/// Spec of X^s with ||f||_{X^s} = || |f|^s ||_X^{1/s}.
SpaceSpec convexify(const SpaceSpec& space, double s);

/// Catalogued associate space, if any.
std::optional<SpaceSpec> associate(const SpaceSpec& space);

struct HolderPair {
  double lhs = 0.0;  // integral of |f g|
  double rhs = 0.0;  // ||f||_X ||g||_X'
};
HolderPair holder_pairing(const GridFunction& f, const GridFunction& g, const SpaceSpec& space);

/// ||1_B||_X ||1_B||_X' / |B| for the closed ball B(center, radius). When X'
/// is not catalogued the associate norm is the pairing sup over a probe
/// family that includes 1_B / ||1_B||_X.
double indicator_duality(const SpaceSpec& space, const Lattice& lattice, const Eigen::VectorXd& center,
                         double radius);

GridFunction ball_indicator(const Lattice& lattice, const Eigen::VectorXd& center, double radius);

}  // namespace weakgrad

#endif  // WEAKGRAD_SPACES_HPP
