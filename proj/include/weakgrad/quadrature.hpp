#ifndef WEAKGRAD_QUADRATURE_HPP
#define WEAKGRAD_QUADRATURE_HPP

#include <Eigen/Core>

#include <functional>

namespace weakgrad::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

/// Rules are computed once per order and cached.
const GaussRule& gauss_legendre(int order);

/// Integral of fn over [a, b] using a Gauss-Legendre rule of the given order.
double gauss(const std::function<double(double)>& fn, double a, double b, int order = 64);

/// Double-exponential (tanh-sinh) quadrature on [a, b]. Converges to near
/// machine precision for integrands with algebraic endpoint singularities.
double tanh_sinh(const std::function<double(double)>& fn, double a, double b,
                 double tolerance = 1e-15);

}  // namespace weakgrad::quad

#endif  // WEAKGRAD_QUADRATURE_HPP
