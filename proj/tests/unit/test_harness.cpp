#include <doctest.h>

#include "weakgrad/harness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace weakgrad;

namespace {

std::string rejection(const ExperimentConfig& c) {
  try {
    validate(resolve(c));
  } catch (const HypothesisError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults and hypothesis checks") {
  ExperimentConfig c;
  c.kind = "limit-identity";
  const auto r = resolve(c);
  CHECK(r.grids == std::vector<Index>{513, 1025, 2049, 4097});
  CHECK(r.tolerances.at("rel_err") == 0.03);
  CHECK_NOTHROW(validate(r));

  c.dim = 3;
  c.p = 1.0;
  c.q = {100.0};
  c.spaces = {Lebesgue{1.0}};
  c.functions = {smooth_bump(Eigen::VectorXd::Zero(3), 1.0)};
  CHECK(rejection(c).find("n(1/p - 1/q) < 1") != std::string::npos);

  ExperimentConfig w;
  w.kind = "limit-identity";
  w.spaces = {WeightedLebesgue{1.0, power_weight(-1.5)}};
  CHECK(rejection(w).find("A_1") != std::string::npos);

  ExperimentConfig i;
  i.kind = "sobolev-interp";
  i.theta = 0.5;
  i.q1 = 4.0;
  i.q = {2.0};
  CHECK(rejection(i).find("1/q = (1-theta)/q1 + theta") != std::string::npos);
  i.q = {1.6};
  i.s = 0.4;
  CHECK(rejection(i).find("s = theta") != std::string::npos);

  ExperimentConfig g;
  g.kind = "gn-interp";
  g.s = 0.6;
  CHECK(rejection(g).find("s = (1-theta) s1 + theta") != std::string::npos);
  g.s.reset();
  CHECK(resolve(g).s.value() == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(resolve(g).q[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  ExperimentConfig bad;
  bad.kind = "nonsense";
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);
}

TEST_CASE("config and report json round trip") {
  ExperimentConfig c;
  c.kind = "sobolev-interp";
  c = resolve(c);
  const json j = config_to_json(c);
  CHECK(j.at("q1") == "inf");
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK_THROWS(config_from_json(json{{"kind", "duality"}, {"bogus", 1}}));

  ExperimentConfig d;
  d.kind = "dyadic-cover";
  d.trials = 300;
  d.seed = 9;
  const auto r = run_experiment(d);
  CHECK(r.verdict() == Verdict::Pass);
  const json rj = report_to_json(r);
  CHECK(report_to_json(report_from_json(rj)) == rj);
}

TEST_CASE("determinism excluding wall times") {
  ExperimentConfig c;
  c.kind = "rubio";
  c.trials = 5;
  c.seed = 42;
  const auto a = report_to_json(run_experiment(c), false).dump();
  const auto b = report_to_json(run_experiment(c), false).dump();
  CHECK(a == b);
  c.seed = 43;
  CHECK(report_to_json(run_experiment(c), false).dump() != a);
}

TEST_CASE("verdict aggregation and exit status") {
  ExperimentReport r;
  CHECK(r.verdict() == Verdict::Pass);
  r.assertions.push_back({"a", Verdict::Unreliable, 0, 0, ""});
  CHECK(exit_status(r.verdict()) == 2);
  r.assertions.push_back({"b", Verdict::Fail, 0, 0, ""});
  CHECK(exit_status(r.verdict()) == 1);
}

TEST_CASE("limit identity on a coarse ladder") {
  ExperimentConfig c;
  c.kind = "limit-identity";
  c.grids = {1025, 2049};
  c.tolerances["rel_err"] = 0.05;
  const auto r = run_experiment(c);
  CHECK(r.verdict() == Verdict::Pass);
  REQUIRE(r.table.size() == 2);
  CHECK(std::abs(r.table[1].rel_err) < std::abs(r.table[0].rel_err));
  std::ostringstream csv;
  write_table_csv(csv, r);
  CHECK(csv.str().rfind("grid,lhs,rhs,ratio,rel_err,case\n", 0) == 0);
}

TEST_CASE("dilation and the A_p probe") {
  const FunctionSpec f = smooth_bump(Eigen::VectorXd::Constant(1, 0.3), 0.7);
  const FunctionSpec g = dilate(f, 2.5);
  for (double x : {-0.2, 0.1, 0.5, 0.9}) {
    Eigen::VectorXd a(1), b(1);
    a << x;
    b << 2.5 * x;
    CHECK(g.value(b) == doctest::Approx(f.value(a)).epsilon(1e-14));
  }
  CHECK_THROWS(dilate(smoothed_hat(0.0, 1.0, 16), 2.0));
  CHECK_THROWS(ap_necessity_probe(0.0, 1.0));
  CHECK_THROWS(ap_necessity_probe(0.5, 0.5));
  const ApProbe one = ap_necessity_probe(1.0, 1.0, 1537);
  const ApProbe small = ap_necessity_probe(0.01, 1.0, 1537);
  CHECK(one.ratio > 0.0);
  CHECK(small.ratio > 5.0 * one.ratio);
  CHECK(small.rhs == doctest::Approx(0.01 * one.rhs).epsilon(1e-12));
}

TEST_CASE("catalogues") {
  for (int dim : {1, 2}) {
    const auto cat = smooth_catalog(dim);
    CHECK(cat.size() == 10);
    for (const auto& f : cat) CHECK_NOTHROW(f.validate(dim));
  }
  CHECK(experiment_kinds().size() == 13);
}
