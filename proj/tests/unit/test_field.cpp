#include <doctest.h>

#include "weakgrad/field.hpp"
#include "weakgrad/parallel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace weakgrad;

TEST_CASE("lattice spacing and validation") {
  const Lattice a = make_lattice(1, -2.0, 2.0, 5);
  CHECK(a.spacing(0) == 1.0);
  const Lattice b = make_lattice(2, {0.0, 0.0}, {1.0, 1.0}, {3, 5});
  CHECK(b.spacing(0) == 0.5);
  CHECK(b.spacing(1) == 0.25);
  CHECK(b.cell_measure() == 0.125);
  CHECK(b.size() == 15);
  CHECK(b.flatten(b.unflatten(11)) == 11);
  CHECK(b.node(11)(0) == doctest::Approx(1.0));
  CHECK(b.node(11)(1) == doctest::Approx(0.75));
  CHECK_THROWS_AS(make_lattice(1, 0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(1, 1.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(make_lattice(4, 0.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("sampling the catalogue") {
  const Lattice lat = make_lattice(1, -2.0, 2.0, 9);
  CHECK(sample(hat(0.0, 1.0), lat)[4] == 1.0);
  const GridFunction b = sample(smooth_bump(Eigen::VectorXd::Zero(1), 1.0), lat);
  for (Index i = 0; i < lat.size(); ++i)
    if (std::abs(lat.coordinate(0, i)) >= 1.0) CHECK(b[i] == 0.0);
  const GridFunction l = sample(linear(Eigen::VectorXd::Constant(1, 3.0)), lat);
  CHECK(l[8] == 6.0);
  CHECK(sample(hat(0.0, 1.0), lat).provenance().has_value());

  // nodewise agreement with direct evaluation
  const Lattice lat2 = make_lattice(2, -1.5, 1.5, 17);
  FunctionSpec g = gaussian_like(Eigen::Vector2d(0.2, -0.1), 0.5);
  const GridFunction gs = sample(g, lat2);
  for (Index i = 0; i < lat2.size(); ++i) {
    const Eigen::VectorXd x = lat2.node(i);
    const double expect = std::exp(-((x(0) - 0.2) * (x(0) - 0.2) + (x(1) + 0.1) * (x(1) + 0.1)) / 0.25);
    CHECK(std::abs(gs[i] - expect) <= 1e-15);
  }
}

TEST_CASE("smoothed hat matches a brute convolution") {
  // oracle: fine Riemann sum of hat * eta_k
  const int k = 4;
  const FunctionSpec s = smoothed_hat(0.0, 1.0, k);
  for (double x : {-1.2, -0.6, 0.0, 0.13, 0.97}) {
    const int m = 200000;
    double num = 0.0, mass = 0.0;
    for (int i = 0; i < m; ++i) {
      const double z = -1.0 + 2.0 * (i + 0.5) / m;
      const double eta = std::exp(-1.0 / (1.0 - z * z));
      num += eta * std::max(0.0, 1.0 - std::abs(x - z / k));
      mass += eta;
    }
    CHECK(s.value(Eigen::VectorXd::Constant(1, x)) == doctest::Approx(num / mass).epsilon(1e-8));
  }
  // gradient by central difference of the value
  const double x = 0.31, d = 1e-5;
  const double fd = (s.value(Eigen::VectorXd::Constant(1, x + d)) - s.value(Eigen::VectorXd::Constant(1, x - d))) / (2 * d);
  CHECK(s.gradient(Eigen::VectorXd::Constant(1, x))(0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("integration") {
  for (Index pts : {3, 10, 101}) {
    const Lattice lat = make_lattice(1, 0.0, 1.0, pts);
    CHECK(integrate(GridFunction::filled(lat, 1.0)) == 1.0);
  }
  const Lattice lat = make_lattice(1, -2.0, 2.0, 4097);
  CHECK(std::abs(integrate(sample(hat(0.0, 1.0), lat)) - 1.0) <= 1e-12);

  // refined-grid oracle for the 2D bump integral
  const FunctionSpec bump = smooth_bump(Eigen::Vector2d::Zero(), 1.0);
  const double coarse = integrate(sample(bump, make_lattice(2, -1.5, 1.5, 257)));
  const double fine = integrate(sample(bump, make_lattice(2, -1.5, 1.5, 1025)));
  CHECK(std::abs(coarse - fine) <= 1e-6);

  // linearity
  const GridFunction f = sample(gaussian_like(Eigen::VectorXd::Zero(1), 0.3), lat);
  const GridFunction g = sample(hat(0.4, 0.7), lat);
  const double lin = integrate(f.with_values(2.5 * f.values() - 0.75 * g.values()));
  CHECK(lin == doctest::Approx(2.5 * integrate(f) - 0.75 * integrate(g)).epsilon(1e-12));

  const GridFunction w = GridFunction::filled(lat, 2.0);
  CHECK(integrate(g, w) == doctest::Approx(2.0 * integrate(g)).epsilon(1e-14));
  CHECK_THROWS(integrate(g, GridFunction::filled(make_lattice(1, -2.0, 2.0, 11), 1.0)));
}

TEST_CASE("gradient") {
  const Lattice lat = make_lattice(2, {-1.0, 0.0}, {1.0, 2.0}, {9, 13});
  const GridFunction l = sample(linear(Eigen::Vector2d(3.0, -1.5), 0.5), lat);
  const Gradient g = gradient(l);
  for (Index i = 0; i < lat.size(); ++i) {
    CHECK(std::abs(g.components[0][i] - 3.0) <= 1e-12);
    CHECK(std::abs(g.components[1][i] + 1.5) <= 1e-12);
  }
  const Gradient z = gradient(GridFunction::filled(lat, 4.0));
  CHECK(z.magnitude.values().abs().maxCoeff() == 0.0);
  CHECK_THROWS(gradient(GridFunction::zeros(make_lattice(1, 0.0, 1.0, 2))));

  // O(h^2) against the analytic gradient of the bump
  const FunctionSpec bump = smooth_bump(Eigen::VectorXd::Zero(1), 1.0);
  double prev = 0.0;
  for (Index pts : {129, 257, 513}) {
    const Lattice l1 = make_lattice(1, -1.5, 1.5, pts);
    const Gradient gb = gradient(sample(bump, l1));
    const GridFunction exact = analytic_gradient_magnitude(bump, l1);
    const double err = (gb.magnitude.values() - exact.values()).abs().maxCoeff();
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("mollify") {
  const Lattice lat = make_lattice(1, -2.0, 2.0, 1025);
  const GridFunction c = GridFunction::filled(lat, 1.7);
  const GridFunction mc = mollify(c, 8);
  CHECK((mc.values() - 1.7).abs().maxCoeff() <= 1e-12);

  const GridFunction h = sample(hat(0.0, 1.0), lat);
  double prev = 1e300;
  for (int k : {2, 4, 8, 16}) {
    const GridFunction m = mollify(h, k);
    const double err = integrate(m.with_values((m.values() - h.values()).abs()));
    CHECK(err < prev);
    prev = err;
    for (Index i = 0; i < lat.size(); ++i)
      if (std::abs(lat.coordinate(0, i)) > 1.0 + 1.0 / k + lat.spacing(0)) CHECK(m[i] == 0.0);
  }
  CHECK_THROWS(mollify(h, 200));

  // whole-cell translation commutes
  const GridFunction s0 = sample(hat(0.0, 0.5), lat);
  const GridFunction s1 = sample(hat(5 * lat.spacing(0), 0.5), lat);
  const GridFunction m0 = mollify(s0, 8), m1 = mollify(s1, 8);
  for (Index i = 300; i < 700; ++i) CHECK(m1[i + 5] == doctest::Approx(m0[i]).epsilon(1e-13));
}

TEST_CASE("thread count does not change results") {
  const Lattice lat = make_lattice(2, -1.0, 1.0, 129);
  const GridFunction f = sample(smooth_bump(Eigen::Vector2d(0.1, 0.0), 0.7), lat);
  set_thread_count(1);
  const GridFunction a = mollify(f, 8);
  set_thread_count(4);
  const GridFunction b = mollify(f, 8);
  set_thread_count(1);
  CHECK((a.values() == b.values()).all());
}

TEST_CASE("csv dump") {
  std::ostringstream out;
  write_csv(out, sample(hat(0.0, 1.0), make_lattice(1, -1.0, 1.0, 3)));
  CHECK(out.str() == "x0,value\n-1,0\n0,1\n1,0\n");
}
