#include <doctest.h>

#include "weakgrad/operators.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace weakgrad;

namespace {

GridFunction interval_indicator(const Lattice& lat, double a, double b) {
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const double x = lat.coordinate(0, lat.unflatten(i)[0]);
    v(i) = x >= a && x <= b ? 1.0 : 0.0;
  }
  return GridFunction(lat, v);
}

GridFunction random_probe(const Lattice& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) v(i) = u(rng);
  return mollify(GridFunction(lat, v), 16);
}

}  // namespace

TEST_CASE("maximal and ball averages of constants") {
  const Lattice lat = make_lattice(2, -1.0, 1.0, 33);
  const GridFunction c = GridFunction::filled(lat, -1.25);
  CHECK((maximal(c).values() - 1.25).abs().maxCoeff() <= 1e-12);
  MaximalConfig centered;
  centered.mode = MaximalConfig::Mode::Centered;
  CHECK((maximal(c, centered).values() - 1.25).abs().maxCoeff() <= 1e-12);
  CHECK((ball_average(c, 0.3).values() - 1.25).abs().maxCoeff() <= 1e-12);
  CHECK_THROWS(ball_average(c, 0.01));
  MaximalConfig none;
  none.radii = {};
  CHECK_NOTHROW(maximal(c, none));
}

TEST_CASE("uncentered maximal of an indicator against brute force") {
  const Lattice lat = make_lattice(1, -4.0, 4.0, 257);
  const double h = lat.spacing(0);
  const GridFunction f = interval_indicator(lat, 0.0, 1.0);
  const GridFunction mf = maximal(f);
  const Index at = 192;  // x = 2
  REQUIRE(lat.coordinate(0, at) == 2.0);
  CHECK(std::abs(mf[at] - 0.5) <= 2.0 * h);
  // oracle: all discrete intervals [i, j] containing the node
  double brute = 0.0;
  for (Index i = 0; i <= at; ++i) {
    double s = 0.0;
    for (Index j = i; j < lat.size(); ++j) {
      s += f[j];
      if (j >= at) brute = std::max(brute, s / static_cast<double>(j - i + 1));
    }
  }
  CHECK(mf[at] <= brute + 1e-12);
  CHECK((mf.values() >= f.values().abs()).all());
  // centred ball averages never exceed the uncentered maximal function
  for (double r : {h, 4 * h, 0.5, 1.0}) CHECK((ball_average(f, r).values() <= mf.values() + 1e-12).all());
  for (double r : {4 * h, 0.25, 1.0}) CHECK(std::abs(ball_average(f, r)[128] - 0.5) <= h / r);
}

TEST_CASE("sublinearity and dilation covariance") {
  std::mt19937_64 rng(1);
  const Lattice lat = make_lattice(1, -2.0, 2.0, 257);
  const GridFunction f = random_probe(lat, rng), g = random_probe(lat, rng);
  const GridFunction sum = f.with_values(f.values() + g.values());
  CHECK((maximal(sum).values() <= maximal(f).values() + maximal(g).values() + 1e-12).all());

  const Lattice wide = make_lattice(1, -4.0, 4.0, 257);
  const FunctionSpec b = smooth_bump(Eigen::VectorXd::Constant(1, 0.5), 1.5);
  FunctionSpec b2 = b;  // b(2x): centre 0.25, radius 0.75
  b2.center(0) = 0.25;
  b2.radius = 0.75;
  const GridFunction narrow = sample(b2, lat), broad = sample(b, wide);
  for (double r : {0.125, 0.5}) {
    const GridFunction a = ball_average(narrow, r), c = ball_average(broad, 2 * r);
    CHECK((a.values() - c.values()).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("riesz potential") {
  const Lattice l1 = make_lattice(1, -3.0, 3.0, 601);
  const GridFunction g1 = riesz_potential(interval_indicator(l1, -1.0, 1.0));
  CHECK((g1.values() - 2.0).abs().maxCoeff() <= l1.spacing(0) + 1e-12);

  // 2D disc: I_1 1_B(0) = 2 pi
  const Lattice l2 = make_lattice(2, -1.28, 1.28, 257);
  const GridFunction disc = ball_indicator(l2, Eigen::Vector2d::Zero(), 1.0);
  const GridFunction i2 = riesz_potential(disc);
  CHECK(i2[l2.size() / 2] == doctest::Approx(2.0 * std::numbers::pi).epsilon(0.01));
  CHECK(i2.values().minCoeff() >= -1e-9);

  // FFT against a direct sum on a small grid
  const Lattice small = make_lattice(2, -1.0, 1.0, 17);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXd v(small.size());
  for (Index i = 0; i < small.size(); ++i) v(i) = u(rng);
  const GridFunction gs(small, v);
  const GridFunction fast = riesz_potential(gs);
  const double h = small.spacing(0);
  for (Index i = 0; i < small.size(); ++i) {
    double s = riesz_self_cell(2, h) * v(i);
    for (Index j = 0; j < small.size(); ++j)
      if (j != i) s += v(j) * h * h / (small.node(i) - small.node(j)).norm();
    CHECK(fast[i] == doctest::Approx(s).epsilon(1e-10));
  }
  // self cell integral by a fine midpoint oracle
  double oracle = 0.0;
  const int m = 2000;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double x = -0.5 + (a + 0.5) / m, y = -0.5 + (b + 0.5) / m;
      oracle += 1.0 / std::hypot(x, y) / (double(m) * m);
    }
  CHECK(riesz_self_cell(2, 1.0) == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("rubio de francia") {
  std::mt19937_64 rng(2);
  const Lattice lat = make_lattice(1, -2.0, 2.0, 257);
  RdFConfig cfg;
  cfg.m_norm = 3.0;
  for (int t = 0; t < 3; ++t) {
    const GridFunction g = random_probe(lat, rng);
    const RdFResult r = rubio_de_francia(g, cfg);
    CHECK((r.value.values() >= g.values().abs()).all());
    CHECK(r.tail_bound > 0.0);
    CHECK(ap_constant(r.value, 1.0).value <= 2.0 * cfg.m_norm * 1.25);
  }
  cfg.k_max = 0;
  CHECK_THROWS(rubio_de_francia(random_probe(lat, rng), cfg));
}

TEST_CASE("operator norm probe") {
  std::mt19937_64 rng(3);
  const Lattice lat = make_lattice(1, -2.0, 2.0, 257);
  std::vector<GridFunction> probes;
  for (int t = 0; t < 4; ++t) probes.push_back(random_probe(lat, rng));
  const double a = operator_norm_probe(Lebesgue{2.0}, probes);
  CHECK(a >= 1.0);
  std::vector<GridFunction> more = probes;
  for (int t = 0; t < 4; ++t) more.push_back(random_probe(lat, rng));
  CHECK(operator_norm_probe(Lebesgue{2.0}, more) >= a);
  double prev = 0.0;
  for (double d : {0.05, 0.1, 0.2}) probes.push_back(interval_indicator(lat, d, 2 * d));
  for (double e : {0.0, -0.25, -0.5}) {
    const double v = operator_norm_probe(WeightedLebesgue{2.0, power_weight(e)}, probes);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK_THROWS(operator_norm_probe(Lebesgue{2.0}, {GridFunction::zeros(lat)}));
}
