#include <doctest.h>

#include "weakgrad/spaces.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace weakgrad;

namespace {

// Random field supported in [-1, 1], smooth enough to be resolved.
GridFunction random_field(const Lattice& lat, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(-0.8, 0.8);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(lat.size());
  for (int t = 0; t < 4; ++t) {
    const FunctionSpec b = smooth_bump(Eigen::VectorXd::Constant(lat.dim(), uni(rng)), 0.2 + 0.1 * std::abs(uni(rng)), gauss(rng));
    v += sample(b, lat).values();
  }
  return GridFunction(lat, v);
}

OrliczSpec power(double p) { return {OrliczSpec::Family::Power, p}; }

}  // namespace

TEST_CASE("lebesgue basics") {
  const Lattice lat = make_lattice(1, -1.0, 2.0, 3001);
  Eigen::ArrayXd v(lat.size());
  for (Index i = 0; i < lat.size(); ++i) {
    const double x = lat.coordinate(0, i);
    v(i) = x >= 0.0 && x <= 1.0 ? 1.0 : 0.0;
  }
  const GridFunction ind(lat, v);
  CHECK(norm(Lebesgue{2.0}, ind) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(norm(Morrey{1.0, 2.0}, ind) == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(norm(Morrey{2.0, 1.0}, ind), std::invalid_argument);
  CHECK_THROWS_AS(norm(Lebesgue{0.5}, ind), std::invalid_argument);
}

TEST_CASE("parameter collapses agree with lebesgue") {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2}) {
    const Lattice lat = make_lattice(dim, -1.5, 1.5, dim == 1 ? 601 : 61);
    for (int t = 0; t < 3; ++t) {
      const GridFunction f = random_field(lat, rng);
      for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const double ref = norm(Lebesgue{p}, f);
        CHECK(norm(Morrey{p, p}, f) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(norm(MixedNorm{std::vector<double>(static_cast<std::size_t>(dim), p)}, f) ==
              doctest::Approx(ref).epsilon(1e-10));
        ExponentProfile prof;
        prof.minus = p;
        CHECK(norm(VariableLebesgue{prof}, f) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(norm(Orlicz{power(p)}, f) == doctest::Approx(ref).epsilon(1e-10));
        CHECK(norm(OrliczSlice{power(p), p, 0.3}, f) == doctest::Approx(ref).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("luxemburg self-consistency") {
  std::mt19937_64 rng(5);
  const Lattice lat = make_lattice(1, -1.5, 1.5, 801);
  const GridFunction f = random_field(lat, rng);
  ExponentProfile prof;
  prof.kind = ExponentProfile::Kind::SmoothStep;
  prof.minus = 1.5;
  prof.plus = 3.0;
  const VariableLebesgue var{prof};
  const double lv = norm(var, f);
  CHECK(variable_modular(var, f, lv) == doctest::Approx(1.0).epsilon(1e-8));
  const OrliczSpec pl{OrliczSpec::Family::PowerLog, 2.0};
  const double lo = norm(Orlicz{pl}, f);
  CHECK(orlicz_modular(pl, f, lo) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(norm(Orlicz{pl}, GridFunction::zeros(lat)) == 0.0);
}

TEST_CASE("lattice axioms, scaling, triangle") {
  std::mt19937_64 rng(9);
  const Lattice lat = make_lattice(1, -1.5, 1.5, 401);
  ExponentProfile prof;
  prof.kind = ExponentProfile::Kind::SmoothStep;
  prof.minus = 1.2;
  prof.plus = 2.5;
  const std::vector<SpaceSpec> spaces{Lebesgue{1.5},
                                      WeightedLebesgue{2.0, power_weight(-0.5, 0.1)},
                                      Morrey{1.0, 2.0},
                                      MixedNorm{{2.5}},
                                      VariableLebesgue{prof},
                                      Orlicz{{OrliczSpec::Family::PowerLog, 1.5}},
                                      OrliczSlice{power(2.0), 1.5, 0.25},
                                      OrliczSlice{{OrliczSpec::Family::PowerLog, 1.0}, 2.0, 0.25}};
  for (const auto& X : spaces) {
    CAPTURE(space_name(X));
    const GridFunction f = random_field(lat, rng), g = random_field(lat, rng);
    const double nf = norm(X, f), ng = norm(X, g);
    CHECK(norm(X, f.with_values(f.values() + g.values())) <= nf + ng + 1e-10);
    CHECK(norm(X, f.with_values(-2.0 * f.values())) == doctest::Approx(2.0 * nf).epsilon(1e-12));
    // domination
    const GridFunction smaller = f.with_values(f.values() * 0.5 * (1.0 + g.values().cos()));
    CHECK(norm(X, smaller) <= nf + 1e-12);
    // monotone truncations increase to the full norm
    double prev = 0.0;
    const double top = f.values().abs().maxCoeff();
    for (double c : {0.25, 0.5, 0.75, 1.0}) {
      const double nc = norm(X, f.with_values(f.values().abs().min(c * top)));
      CHECK(nc >= prev - 1e-12);
      prev = nc;
    }
    CHECK(prev == doctest::Approx(norm(X, f.with_values(f.values().abs()))).epsilon(1e-12));
    const double nb = norm(X, ball_indicator(lat, Eigen::VectorXd::Constant(1, 0.2), 0.3));
    CHECK(nb > 0.0);
    CHECK(std::isfinite(nb));
  }
}

TEST_CASE("convexification") {
  std::mt19937_64 rng(13);
  const Lattice lat = make_lattice(1, -1.5, 1.5, 601);
  const SpaceSpec l1 = convexify(Lebesgue{2.0}, 0.5);
  CHECK(std::get<Lebesgue>(l1).p == 1.0);
  const GridFunction f = random_field(lat, rng);
  const GridFunction sq = f.with_values(f.values().abs().pow(2.0));
  // ||f||_{X^{1/2}} = || |f|^{1/2} ||_X^2
  CHECK(norm(l1, f) == doctest::Approx(std::pow(norm(Lebesgue{2.0}, f.with_values(f.values().abs().sqrt())), 2.0)).epsilon(1e-12));
  const SpaceSpec m = convexify(Morrey{1.0, 2.0}, 2.0);
  CHECK(std::get<Morrey>(m).r == 2.0);
  CHECK(std::get<Morrey>(m).alpha == 4.0);
  CHECK(std::sqrt(norm(Morrey{1.0, 2.0}, sq)) == doctest::Approx(norm(m, f)).epsilon(1e-10));
  CHECK_THROWS(convexify(Lebesgue{2.0}, 0.0));
  CHECK_THROWS(convexify(Lebesgue{2.0}, 0.25));
  CHECK_THROWS(convexify(Orlicz{{OrliczSpec::Family::PowerLog, 2.0}}, 2.0));
}

TEST_CASE("hoelder pairing") {
  std::mt19937_64 rng(17);
  const Lattice lat = make_lattice(1, -1.5, 1.5, 601);
  const GridFunction f = random_field(lat, rng);
  const HolderPair eq = holder_pairing(f, f, Lebesgue{2.0});
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-12));
  const SpaceSpec weighted = WeightedLebesgue{2.0, power_weight(0.5)};
  for (int t = 0; t < 100; ++t) {
    const GridFunction a = random_field(lat, rng), b = random_field(lat, rng);
    const HolderPair u = holder_pairing(a, b, Lebesgue{2.0});
    CHECK(u.lhs <= u.rhs + 1e-10);
    const HolderPair w = holder_pairing(a, b, weighted);
    CHECK(w.lhs <= w.rhs + 1e-10);
  }
  const HolderPair w1 = holder_pairing(f, f, WeightedLebesgue{1.0, power_weight(-0.5)});
  CHECK(w1.lhs <= w1.rhs + 1e-10);
  CHECK_THROWS(holder_pairing(f, f, Morrey{1.0, 2.0}));
}

TEST_CASE("indicator duality") {
  const Lattice lat = make_lattice(1, -8.0, 8.0, 4097);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(1, 0.3);
  for (double r : {0.25, 1.0, 4.0}) {
    CHECK(indicator_duality(Lebesgue{3.0}, lat, c, r) == doctest::Approx(1.0).epsilon(1e-12));
    const double w = indicator_duality(WeightedLebesgue{2.0, power_weight(0.5)}, lat, c, r);
    CHECK(w >= 1.0 - 1e-10);
    CHECK(w <= 10.0);
    CHECK(indicator_duality(Orlicz{{OrliczSpec::Family::PowerLog, 2.0}}, lat, c, r) >= 1.0 - 1e-10);
  }
}
