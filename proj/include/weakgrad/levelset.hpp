#ifndef WEAKGRAD_LEVELSET_HPP
#define WEAKGRAD_LEVELSET_HPP

#include "weakgrad/field.hpp"
#include "weakgrad/spaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace weakgrad {

struct LevelSetParams {
  double q = 1.0;
  double s = 1.0;
  double lambda = 1.0;

  /// n/q + s
  double exponent(int dim) const { return dim / q + s; }
  void validate(int dim) const;
};

enum class ScanMode { Brute, Accelerated };

/// Treatment of the node's own cell. Exclude drops it. Linearized adds the
/// measure of {z in cell : |grad f(x) . z| > lambda |z|^e}; the pair counts
/// are the same in both.
enum class SelfCell { Exclude, Linearized };

struct MeasureField {
  GridFunction measure;                // cell measure x count (+ self-cell term)
  std::vector<std::int32_t> counts;    // nodes y != x in the level set
  double scan_radius = 0.0;            // search radius used (physical units)
  std::int64_t pair_count() const;
};

MeasureField measure_field(const GridFunction& f, const LevelSetParams& params, ScanMode mode = ScanMode::Accelerated,
                           SelfCell self = SelfCell::Linearized);

/// (2 max|f| / lambda)^{1/e}: no pair beyond this distance can qualify.
double r_max(const GridFunction& f, double lambda, double exponent);

struct LambdaGridSpec {
  int points = 48;
  int top_points = 16;            // points inside the top decade
  double min_radius_cells = 8.0;  // upper clamp on lambda
  double max_window_fraction = 0.25;
  double lambda_min = 0.0;        // both > 0: explicit geometric grid
  double lambda_max = 0.0;
  ScanMode mode = ScanMode::Accelerated;
  SelfCell self = SelfCell::Linearized;
  double reliability_threshold = 0.1;
};

struct LevelSetProfile {
  std::vector<double> lambda;
  std::vector<double> values;
  std::vector<double> r_max_cells;
  std::vector<std::int64_t> pair_count;
  double sup_value = 0.0;
  double limit_estimate = 0.0;
  double limit_diagnostic = 0.0;
  int limit_points = 0;
  bool reliable = false;
};

/// Geometric lambda grid clamped to the discretization-valid range.
std::vector<double> lambda_grid(const GridFunction& f, double q, double s, const LambdaGridSpec& spec);

/// values(lambda) = lambda ||measure^{1/q}||_X over the grid.
LevelSetProfile weak_functional(const GridFunction& f, const SpaceSpec& space, double q, double s,
                                const LambdaGridSpec& spec = {});

struct LimitEstimate {
  double value = 0.0;
  double diagnostic = 0.0;
  int points = 0;
  bool reliable = false;
};

/// Average over the top decade [lambda_max / 10, lambda_max] of the grid.
/// Throws when fewer than 8 grid points fall inside it.
LimitEstimate limit_estimate(const std::vector<double>& lambda, const std::vector<double>& values,
                             double threshold = 0.1);

/// || (sum_{y != x} |f(x)-f(y)|^q |x-y|^{-n-sq} h^n)^{1/q} ||_X
double strong_functional(const GridFunction& f, const SpaceSpec& space, double q, double s);

struct SphereConstant {
  double q = 0.0;
  int n = 0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double value = 0.0;  // the quadrature value
};

SphereConstant sphere_constant(double q, int n);

/// (K(q,n)/n)^{1/q} ||grad f||_X, the large-lambda limit of the weak
/// functional. Uses the analytic gradient when f carries its spec.
double limit_target(const GridFunction& f, const SpaceSpec& space, double q);

}  // namespace weakgrad

#endif  // WEAKGRAD_LEVELSET_HPP
