#ifndef WEAKGRAD_HARNESS_HPP
#define WEAKGRAD_HARNESS_HPP

#include "weakgrad/field.hpp"
#include "weakgrad/io.hpp"
#include "weakgrad/levelset.hpp"
#include "weakgrad/spaces.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakgrad {

/// Configuration outside the hypotheses of the experiment. The message
/// names the violated condition.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string kind;
  int dim = 1;
  std::vector<Index> grids;            // points per axis, coarse to fine
  std::array<double, 2> window{0, 0};  // equal bounds on every axis; {0,0} picks the kind default
  std::vector<FunctionSpec> functions;
  std::vector<SpaceSpec> spaces;
  std::vector<double> q;               // one value, one per space, or empty for the kind default
  std::optional<double> s, p, theta, s1, q1;
  LambdaGridSpec lambda;
  std::vector<double> min_radius_cells;  // per q entry, overrides lambda.min_radius_cells
  std::vector<double> radii;
  std::vector<double> epsilons;
  int trials = 0;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::string output;  // report path stem: <output>.json and <output>.csv
};

const std::vector<std::string>& experiment_kinds();

/// Fills every unset field with the kind default.
ExperimentConfig resolve(const ExperimentConfig& config);

/// Throws HypothesisError naming the violated condition.
void validate(const ExperimentConfig& resolved);

enum class Verdict { Pass, Fail, Unreliable };
std::string to_string(Verdict v);

struct Assertion {
  std::string name;
  Verdict verdict = Verdict::Pass;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct TableRow {
  Index grid = 0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0, rel_err = 0.0;  // rel_err NaN where no reference exists
  std::string label;
};

struct ExperimentReport {
  ExperimentConfig config;  // resolved
  std::vector<TableRow> table;
  std::map<std::string, double> constants;
  std::vector<Assertion> assertions;
  std::map<std::string, double> wall_times;

  /// Fail if any assertion fails, else unreliable if any is, else pass.
  Verdict verdict() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// 0 pass, 1 fail, 2 unreliable.
int exit_status(Verdict v);

/// sup_lambda lambda^p (w x Leb)(E_f(lambda, p)) / int |f'|^p w for the step
/// weight w = eps on x < 0, 1 on x >= 0 and f the mollified primitive of the
/// indicator of (-1, 0).
struct ApProbe {
  double eps = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};
ApProbe ap_necessity_probe(double eps, double p, Index points = 3073);

/// Ten smooth compactly supported (or rapidly decaying) test functions.
std::vector<FunctionSpec> smooth_catalog(int dim);

/// f(x / R) for radial, sum and tensor-product specs.
FunctionSpec dilate(const FunctionSpec& f, double R);

json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const json& j);
json report_to_json(const ExperimentReport& report, bool include_times = true);
ExperimentReport report_from_json(const json& j);
/// CSV: grid,lhs,rhs,ratio,rel_err,case
void write_table_csv(std::ostream& out, const ExperimentReport& report);
/// Writes <stem>.json and <stem>.csv.
void write_report(const ExperimentReport& report, const std::string& stem);

}  // namespace weakgrad

#endif  // WEAKGRAD_HARNESS_HPP
