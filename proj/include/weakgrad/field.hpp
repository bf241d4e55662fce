#ifndef WEAKGRAD_FIELD_HPP
#define WEAKGRAD_FIELD_HPP

#include <Eigen/Core>

#include <array>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace weakgrad {

using Eigen::Index;

/// Uniform rectangular lattice in one to three dimensions. Node i along
/// axis a sits at lo(a) + i * spacing(a); flat indices run axis 0 fastest.
class Lattice {
 public:
  Lattice() = default;

  int dim() const { return dim_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  Index points(int axis) const { return points_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double extent(int axis) const { return hi_[axis] - lo_[axis]; }

  Index size() const { return size_; }
  double cell_measure() const;
  double min_spacing() const;
  double max_spacing() const;
  double min_extent() const;
  /// Length of the window diagonal.
  double diameter() const;

  Index stride(int axis) const { return strides_[axis]; }
  std::array<Index, 3> unflatten(Index flat) const;
  Index flatten(const std::array<Index, 3>& idx) const;

  double coordinate(int axis, Index i) const { return lo_[axis] + static_cast<double>(i) * spacing_[axis]; }
  Eigen::VectorXd node(Index flat) const;

  bool operator==(const Lattice& other) const;

 private:
  friend Lattice make_lattice(int, std::span<const double>, std::span<const double>,
                              std::span<const Index>);
  int dim_ = 0;
  std::array<double, 3> lo_{}, hi_{}, spacing_{};
  std::array<Index, 3> points_{1, 1, 1};
  std::array<Index, 3> strides_{1, 1, 1};
  Index size_ = 0;
};

Lattice make_lattice(int dim, std::span<const double> lo, std::span<const double> hi,
                     std::span<const Index> points);
Lattice make_lattice(int dim, std::initializer_list<double> lo, std::initializer_list<double> hi,
                     std::initializer_list<Index> points);
/// Same bounds and point count on every axis.
Lattice make_lattice(int dim, double lo, double hi, Index points);

/// Catalogue of analytic test functions. Radial families use |x - center|.
enum class Family { Hat, SmoothBump, SmoothedHat, GaussianLike, Linear, Constant, TensorProduct, Sum };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

struct FunctionSpec {
  Family family = Family::Constant;
  Eigen::VectorXd center;  // empty means the origin
  double radius = 1.0;     // hat half-width, bump radius, gaussian length
  double height = 1.0;     // peak value, constant value, or linear offset
  Eigen::VectorXd slope;   // linear family; a single entry acts on axis 0
  int smoothing = 16;      // mollifier index k of the smoothed hat
  std::vector<FunctionSpec> parts;  // per-axis factors or summands

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate(int dim) const;
  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

FunctionSpec hat(double center, double halfwidth, double height = 1.0);
FunctionSpec smooth_bump(Eigen::VectorXd center, double radius, double height = 1.0);
FunctionSpec smoothed_hat(double center, double halfwidth, int k, double height = 1.0);
FunctionSpec gaussian_like(Eigen::VectorXd center, double length, double height = 1.0);
FunctionSpec linear(Eigen::VectorXd slope, double offset = 0.0);
FunctionSpec constant(double value);

/// Real scalar field sampled on a lattice.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Lattice lattice, Eigen::ArrayXd values,
               std::optional<FunctionSpec> provenance = std::nullopt);
  static GridFunction zeros(const Lattice& lattice);
  static GridFunction filled(const Lattice& lattice, double value);

  const Lattice& lattice() const { return lattice_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Eigen::ArrayXd& values() { return values_; }
  const std::optional<FunctionSpec>& provenance() const { return provenance_; }

  double operator[](Index flat) const { return values_(flat); }
  double& operator[](Index flat) { return values_(flat); }
  Index size() const { return values_.size(); }

  /// Same lattice, new values.
  GridFunction with_values(Eigen::ArrayXd values) const;

 private:
  Lattice lattice_;
  Eigen::ArrayXd values_;
  std::optional<FunctionSpec> provenance_;
};

GridFunction sample(const FunctionSpec& spec, const Lattice& lattice);

/// Trapezoid node weights: cell measure with a factor 1/2 per boundary axis.
Eigen::ArrayXd quadrature_weights(const Lattice& lattice);

double integrate(const GridFunction& f);
double integrate(const GridFunction& f, const GridFunction& weight);

struct Gradient {
  std::vector<GridFunction> components;
  GridFunction magnitude;
};

/// Second-order central differences, one-sided second-order at the edges.
Gradient gradient(const GridFunction& f);

/// Analytic gradient magnitude of spec sampled on the lattice.
GridFunction analytic_gradient_magnitude(const FunctionSpec& spec, const Lattice& lattice);

/// Discrete convolution with eta_k = k^n eta(k .), eta the unit-ball bump
/// exp(-1/(1-|x|^2)) renormalised to unit discrete mass. Edge values are
/// replicated outside the window.
GridFunction mollify(const GridFunction& f, int k);

/// Continuous unit-mass mollifier eta on R^n evaluated at |z|.
double mollifier(double radius, int dim);

/// CSV: header x0[,x1[,x2]],value then one row per node.
void write_csv(std::ostream& out, const GridFunction& f);

void require_same_lattice(const GridFunction& a, const GridFunction& b, const char* what);

}  // namespace weakgrad

#endif  // WEAKGRAD_FIELD_HPP
