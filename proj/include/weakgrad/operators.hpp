#ifndef WEAKGRAD_OPERATORS_HPP
#define WEAKGRAD_OPERATORS_HPP

#include "weakgrad/field.hpp"
#include "weakgrad/spaces.hpp"

#include <optional>
#include <vector>

namespace weakgrad {

/// Average of |f| over the nodes within distance r of each node, clipped to
/// the window.
GridFunction ball_average(const GridFunction& f, double r);

struct MaximalConfig {
  enum class Mode { Centered, Uncentered } mode = Mode::Uncentered;
  std::vector<double> radii;  // empty: default_radii of the lattice
  Index center_stride = 0;    // 0 picks 1 in 1D, 2 otherwise
};

/// Geometric radii h, h*ratio, ... up to the window diameter.
std::vector<double> default_radii(const Lattice& lattice, double ratio = 1.4142135623730951);

/// Uncentered: max over candidate balls containing the node (centres on
/// the stride sub-lattice), seeded with |f| (the single-node ball).
/// Centered: max over radii of ball_average.
GridFunction maximal(const GridFunction& f, const MaximalConfig& cfg = {});

/// I_1 g(x) = sum_{y != x} g(y) |x - y|^{1-n} h^n plus the exact integral of
/// |z|^{1-n} over the cell around x. With a mask the input and output are
/// both multiplied by it. Needs equal spacing on every axis when n >= 2.
GridFunction riesz_potential(const GridFunction& g, const std::optional<GridFunction>& mask = std::nullopt);

/// Integral of |z|^{1-n} over [-h/2, h/2]^n.
double riesz_self_cell(int dim, double h);

struct RdFConfig {
  double p = 2.0;
  std::optional<GridFunction> weight;  // none means Lebesgue measure
  int k_max = 20;
  double m_norm = 1.0;
  MaximalConfig maximal;
};

struct RdFResult {
  GridFunction value;
  double tail_bound = 0.0;  // 2^{1-k_max} ||g||
};

RdFResult rubio_de_francia(const GridFunction& g, const RdFConfig& cfg);

/// max over probes of ||Mf||_X / ||f||_X, floored at 1.
double operator_norm_probe(const SpaceSpec& space, const std::vector<GridFunction>& probes,
                           const MaximalConfig& cfg = {});

}  // namespace weakgrad

#endif  // WEAKGRAD_OPERATORS_HPP
