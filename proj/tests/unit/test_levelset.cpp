#include <doctest.h>

#include "weakgrad/levelset.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace weakgrad;

namespace {

GridFunction random_smooth(const Lattice& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) v(i) = u(rng);
  return mollify(GridFunction(lat, v), 4);
}

}  // namespace

TEST_CASE("measure field of simple functions") {
  const Lattice lat = make_lattice(1, -2.0, 2.0, 801);
  const double h = lat.spacing(0);
  const MeasureField c = measure_field(GridFunction::filled(lat, 3.0), {1.0, 1.0, 2.0});
  CHECK(c.measure.values().abs().maxCoeff() == 0.0);
  CHECK_THROWS(measure_field(GridFunction::filled(lat, 3.0), {1.0, 1.0, 0.0}));

  // f(x) = x: |x-y| < (1/lambda)^q
  const GridFunction lin = sample(linear(Eigen::VectorXd::Constant(1, 1.0)), lat);
  for (double q : {1.0, 2.0}) {
    for (double lambda : {4.0, 8.0}) {
      const double expect = 2.0 * std::pow(1.0 / lambda, q);
      const MeasureField a = measure_field(lin, {q, 1.0, lambda});
      const MeasureField b = measure_field(lin, {q, 1.0, lambda}, ScanMode::Brute);
      CHECK(a.counts == b.counts);
      CHECK(std::abs(a.measure[400] - expect) <= 2 * h);
      CHECK(std::abs(b.measure[400] - expect) <= 2 * h);
    }
  }
  // r_max below the spacing: nothing qualifies
  const GridFunction bump = sample(smooth_bump(Eigen::VectorXd::Zero(1), 1.0), lat);
  const double lambda = 2.0 * 1.0 / std::pow(0.5 * h, 2.0);
  CHECK(r_max(bump, lambda, 2.0) < h);
  const MeasureField z = measure_field(bump, {1.0, 1.0, lambda}, ScanMode::Accelerated, SelfCell::Exclude);
  CHECK(z.measure.values().abs().maxCoeff() == 0.0);
}

TEST_CASE("counts agree with an independent coordinate oracle") {
  std::mt19937_64 rng(21);
  const Lattice lat = make_lattice(2, -1.0, 1.0, 21);
  const GridFunction f = random_smooth(lat, rng);
  const double q = 1.5, s = 0.5, lambda = 2.0;
  const double e = 2.0 / q + s;
  const MeasureField mf = measure_field(f, {q, s, lambda});
  for (Index x = 0; x < lat.size(); ++x) {
    int count = 0, near = 0;
    for (Index y = 0; y < lat.size(); ++y) {
      if (y == x) continue;
      const double d = std::abs(f[x] - f[y]);
      const double thr = lambda * std::pow((lat.node(x) - lat.node(y)).norm(), e);
      if (std::abs(d - thr) <= 1e-12 * thr) ++near;
      count += d > thr;
    }
    CHECK(std::abs(count - mf.counts[static_cast<std::size_t>(x)]) <= near);
  }
}

TEST_CASE("scan invariants") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const int dim = 1 + t % 2;
    const Lattice lat = make_lattice(dim, -1.0, 1.0, dim == 1 ? 301 : 31);
    const GridFunction f = random_smooth(lat, rng);
    const double q = 0.5 + 2.0 * u(rng), s = u(rng), lambda = 0.5 + 20.0 * u(rng);
    const MeasureField a = measure_field(f, {q, s, lambda});
    CHECK(a.counts == measure_field(f, {q, s, lambda}, ScanMode::Brute).counts);
    // homogeneity under exact scalings
    for (double c : {2.0, -0.5, 4.0}) {
      const GridFunction cf = f.with_values(c * f.values());
      CHECK(measure_field(cf, {q, s, lambda}).counts == measure_field(f, {q, s, lambda / std::abs(c)}).counts);
    }
    // monotone in lambda
    const MeasureField b = measure_field(f, {q, s, 1.5 * lambda});
    for (std::size_t i = 0; i < a.counts.size(); ++i) CHECK(b.counts[i] <= a.counts[i]);
    CHECK((b.measure.values() <= a.measure.values() + 1e-15).all());
  }
  // reflection symmetry of the total pair count
  const Lattice lat = make_lattice(1, -1.0, 1.0, 401);
  const GridFunction f = random_smooth(lat, rng);
  const GridFunction r = f.with_values(f.values().reverse());
  CHECK(measure_field(f, {1.0, 1.0, 5.0}).pair_count() == measure_field(r, {1.0, 1.0, 5.0}).pair_count());
}

TEST_CASE("sphere constant") {
  for (double q : {0.5, 1.0, 2.0, 3.0}) {
    const SphereConstant k1 = sphere_constant(q, 1);
    CHECK(k1.value == 2.0);
    CHECK(k1.closed_form == doctest::Approx(2.0).epsilon(1e-14));
    for (int n : {2, 3}) {
      const SphereConstant k = sphere_constant(q, n);
      CHECK(std::abs(k.closed_form - k.quadrature) <= 1e-8 * k.quadrature);
    }
  }
  CHECK(std::abs(sphere_constant(2.0, 2).value - std::numbers::pi) <= 1e-8);
  CHECK(std::abs(sphere_constant(1.0, 2).value - 4.0) <= 1e-8);
  CHECK(std::abs(sphere_constant(2.0, 3).value - 4.0 * std::numbers::pi / 3.0) <= 1e-8);
  // independent oracle: fine midpoint rule on the circle for q = 1/2
  const int m = 1 << 20;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += std::sqrt(std::abs(std::cos(2.0 * std::numbers::pi * (i + 0.5) / m)));
  CHECK(sphere_constant(0.5, 2).value == doctest::Approx(sum * 2.0 * std::numbers::pi / m).epsilon(1e-6));
  CHECK_THROWS(sphere_constant(1.0, 4));
  CHECK_THROWS(sphere_constant(0.0, 2));
}

TEST_CASE("limit estimate") {
  std::vector<double> lambda, values;
  const double c = 3.0, a = 0.5;
  for (int i = 0; i < 20; ++i) {
    lambda.push_back(std::pow(10.0, i / 9.0));
    values.push_back(c - a / lambda.back());
  }
  const LimitEstimate est = limit_estimate(lambda, values);
  CHECK(std::abs(est.value - c) <= a / 10.0);
  const LimitEstimate zero = limit_estimate(lambda, std::vector<double>(20, 0.0));
  CHECK(zero.value == 0.0);
  CHECK(zero.diagnostic == 0.0);
  CHECK_THROWS(limit_estimate({1.0, 2.0}, {1.0, 1.0}));
}

TEST_CASE("weak functional") {
  const Lattice lat = make_lattice(1, -2.0, 2.0, 4097);
  const LevelSetProfile z = weak_functional(GridFunction::zeros(lat), Lebesgue{1.0}, 1.0, 1.0);
  CHECK(z.sup_value == 0.0);
  CHECK(z.limit_estimate == 0.0);

  const GridFunction f = sample(smoothed_hat(0.0, 1.0, 16), lat);
  const LevelSetProfile p = weak_functional(f, Lebesgue{1.0}, 1.0, 1.0);
  const double oracle = 2.0 * integrate(analytic_gradient_magnitude(*f.provenance(), lat));
  CHECK(std::abs(p.limit_estimate / oracle - 1.0) <= 0.03);
  CHECK(p.sup_value >= p.limit_estimate - 1e-12);
  CHECK(p.lambda.size() >= 16);
  CHECK(std::abs(limit_target(f, Lebesgue{1.0}, 1.0) - oracle) <= 1e-12 * oracle);

  // sup scales with |c| exactly
  const Lattice small = make_lattice(1, -2.0, 2.0, 513);
  const GridFunction g = sample(smoothed_hat(0.0, 1.0, 16), small);
  const double base = weak_functional(g, Lebesgue{1.0}, 2.0, 1.0).sup_value;
  for (double c : {4.0, -0.5})
    CHECK(weak_functional(g.with_values(c * g.values()), Lebesgue{1.0}, 2.0, 1.0).sup_value ==
          doctest::Approx(std::abs(c) * base).epsilon(1e-10));
}

TEST_CASE("strong functional") {
  const Lattice lat = make_lattice(1, -2.0, 2.0, 257);
  CHECK(strong_functional(GridFunction::filled(lat, 1.0), Lebesgue{2.0}, 2.0, 0.5) == 0.0);
  CHECK_THROWS(strong_functional(GridFunction::filled(lat, 1.0), Lebesgue{2.0}, 2.0, 1.5));
  // oracle: direct double sum
  const GridFunction f = sample(hat(0.0, 1.0), lat);
  const double h = lat.spacing(0);
  double total = 0.0;
  for (Index x = 0; x < lat.size(); ++x) {
    double acc = 0.0;
    for (Index y = 0; y < lat.size(); ++y)
      if (y != x) acc += std::pow(f[x] - f[y], 2) / std::pow(std::abs(lat.coordinate(0, x) - lat.coordinate(0, y)), 2.0) * h;
    total += acc * ((x == 0 || x == lat.size() - 1) ? 0.5 : 1.0) * h;
  }
  CHECK(strong_functional(f, Lebesgue{2.0}, 2.0, 0.5) == doctest::Approx(std::sqrt(total)).epsilon(1e-12));
}
