// wgrad: command-line front end over the weakgrad library.

#include "weakgrad/harness.hpp"
#include "weakgrad/io.hpp"
#include "weakgrad/levelset.hpp"
#include "weakgrad/operators.hpp"
#include "weakgrad/parallel.hpp"
#include "weakgrad/spaces.hpp"
#include "weakgrad/weights.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace weakgrad;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitSoftware = 70;

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<int> dim;
  std::optional<Index> n;
  std::optional<double> q, s;
  std::string space, function;
  std::optional<double> lambda_min, lambda_max;
  std::optional<int> lambda_points;
  std::string mode;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--dim", o.dim, "lattice dimension")->check(CLI::Range(1, 3));
  sub->add_option("--n", o.n, "points per axis")->check(CLI::Range(Index{3}, Index{1} << 20));
  sub->add_option("--q", o.q, "level-set exponent q");
  sub->add_option("--s", o.s, "smoothness s");
  sub->add_option("--space", o.space, "space spec: inline JSON or file");
  sub->add_option("--function", o.function, "function spec: catalogue name, inline JSON or file");
  sub->add_option("--lambda-min", o.lambda_min, "smallest lambda");
  sub->add_option("--lambda-max", o.lambda_max, "largest lambda");
  sub->add_option("--lambda-points", o.lambda_points, "lambda grid size")->check(CLI::Range(2, 100000));
  sub->add_option("--mode", o.mode, "level-set scan")->check(CLI::IsMember({"brute", "accelerated"}));
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

json read_json_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path);
  return parse_json_argument(path);
}

json spec_argument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) return json::parse(text);
  return read_json_file(text);
}

FunctionSpec named_function(const std::string& name, int dim) {
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
  if (name == "hat") return hat(0.0, 1.0);
  if (name == "smooth-bump" || name == "bump") return smooth_bump(origin, 1.0);
  if (name == "smoothed-hat") return smoothed_hat(0.0, 1.0, 16);
  if (name == "gaussian-like" || name == "gaussian") return gaussian_like(origin, 0.4);
  if (name == "constant") return constant(1.0);
  throw std::invalid_argument("unknown function name '" + name + "'");
}

// Resolved settings for the single-field subcommands.
struct Setup {
  int dim = 1;
  Index n = 1025;
  std::array<double, 2> window{-2.0, 2.0};
  double q = 1.0, s = 1.0;
  SpaceSpec space = Lebesgue{1.0};
  FunctionSpec function = hat(0.0, 1.0);
  LambdaGridSpec lambda;
};

Setup setup(const Options& o) {
  Setup st;
  json cfg = json::object();
  if (!o.config.empty()) cfg = read_json_file(o.config);
  st.dim = o.dim.value_or(cfg.value("dim", 1));
  st.n = o.n.value_or(cfg.value("n", Index{1025}));
  if (cfg.contains("window")) st.window = cfg["window"].get<std::array<double, 2>>();
  st.q = o.q.value_or(cfg.contains("q") ? number_or_inf(cfg["q"]) : 1.0);
  st.s = o.s.value_or(cfg.value("s", 1.0));
  if (!o.space.empty())
    st.space = space_from_json(spec_argument(o.space));
  else if (cfg.contains("space"))
    st.space = space_from_json(cfg["space"]);
  auto function_from = [&](const json& j) { return j.is_string() ? named_function(j.get<std::string>(), st.dim) : j.get<FunctionSpec>(); };
  if (!o.function.empty()) {
    const auto first = o.function.find_first_not_of(" \t");
    const bool inline_json = first != std::string::npos && o.function[first] == '{';
    if (inline_json || std::filesystem::exists(o.function))
      st.function = spec_argument(o.function).get<FunctionSpec>();
    else
      st.function = named_function(o.function, st.dim);
  } else if (cfg.contains("function")) {
    st.function = function_from(cfg["function"]);
  }
  if (cfg.contains("lambda")) st.lambda = cfg["lambda"].get<LambdaGridSpec>();
  if (o.lambda_min) st.lambda.lambda_min = *o.lambda_min;
  if (o.lambda_max) st.lambda.lambda_max = *o.lambda_max;
  if (o.lambda_points) st.lambda.points = *o.lambda_points;
  if (!o.mode.empty()) st.lambda.mode = o.mode == "brute" ? ScanMode::Brute : ScanMode::Accelerated;
  if ((st.lambda.lambda_min > 0.0) != (st.lambda.lambda_max > 0.0))
    throw std::invalid_argument("--lambda-min and --lambda-max must be given together");
  validate(st.space, st.dim);
  return st;
}

GridFunction sampled(const Setup& st) {
  st.function.validate(st.dim);
  return sample(st.function, make_lattice(st.dim, st.window[0], st.window[1], st.n));
}

// Writes data to --out (summary on stdout) or to stdout (summary on stderr).
void emit(const Options& o, const std::string& data, const std::string& summary) {
  if (o.out.empty()) {
    std::cout << data;
    std::cerr << summary << '\n';
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
    f << data;
    std::cout << summary << '\n';
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

int cmd_norm(const Options& o) {
  const Setup st = setup(o);
  const double v = norm(st.space, sampled(st));
  const json j{{"space", space_to_json(st.space)}, {"function", st.function}, {"n", st.n}, {"norm", v}};
  emit(o, o.format == "json" ? dump(j) : "norm\n" + num(v) + "\n", space_name(st.space) + " norm " + num(v));
  return 0;
}

// Profile table with the per-lambda pair counts so scan modes can be compared.
int cmd_bsvy_scan(const Options& o) {
  const Setup st = setup(o);
  const GridFunction f = sampled(st);
  const auto prof = weak_functional(f, st.space, st.q, st.s, st.lambda);
  std::ostringstream data;
  if (o.format == "json") {
    json j = profile_summary(prof);
    j["lambda"] = prof.lambda;
    j["values"] = prof.values;
    j["r_max_cells"] = prof.r_max_cells;
    j["pair_count"] = prof.pair_count;
    data << dump(j);
  } else {
    write_profile_csv(data, prof);
  }
  emit(o, data.str(), "bsvy-scan " + std::to_string(prof.lambda.size()) + " lambdas, sup " + num(prof.sup_value));
  return 0;
}

int cmd_bsvy_limit(const Options& o) {
  const Setup st = setup(o);
  const GridFunction f = sampled(st);
  const auto prof = weak_functional(f, st.space, st.q, st.s, st.lambda);
  json j = profile_summary(prof);
  if (st.s == 1.0) {
    const double target = limit_target(f, st.space, st.q);
    j["target"] = target;
    j["rel_err"] = prof.limit_estimate / target - 1.0;
  }
  std::string data = dump(j);
  if (o.format == "csv") {
    data = "sup,limit,diagnostic,reliable\n" + num(prof.sup_value) + "," + num(prof.limit_estimate) + "," +
           num(prof.limit_diagnostic) + "," + (prof.reliable ? "true" : "false") + "\n";
  }
  emit(o, data,
       "bsvy-limit " + num(prof.limit_estimate) + " diagnostic " + num(prof.limit_diagnostic) +
           (prof.reliable ? "" : " (unreliable)"));
  return prof.reliable ? 0 : 2;
}

int cmd_strong(const Options& o) {
  const Setup st = setup(o);
  const double v = strong_functional(sampled(st), st.space, st.q, st.s);
  const json j{{"strong", v}, {"q", st.q}, {"s", st.s}, {"n", st.n}};
  emit(o, o.format == "json" ? dump(j) : "strong\n" + num(v) + "\n", "strong " + num(v));
  return 0;
}

int cmd_maximal(const Options& o) {
  const Setup st = setup(o);
  const GridFunction f = sampled(st);
  const GridFunction m = maximal(f);
  std::ostringstream data;
  if (o.format == "json") {
    data << dump(json{{"max", m.values().maxCoeff()}, {"values", std::vector<double>(m.values().begin(), m.values().end())}});
  } else {
    write_csv(data, m);
  }
  emit(o, data.str(), "maximal max " + num(m.values().maxCoeff()));
  return 0;
}

int cmd_kconst(const Options& o) {
  const Setup st = setup(o);
  const SphereConstant k = sphere_constant(st.q, st.dim);
  const double diff = std::abs(k.closed_form - k.quadrature);
  const json j{{"q", k.q}, {"n", k.n}, {"closed_form", k.closed_form}, {"quadrature", k.quadrature}, {"difference", diff}};
  std::string data = o.format == "json" ? dump(j)
                                        : "q,n,closed_form,quadrature\n" + num(k.q) + "," + std::to_string(k.n) +
                                              "," + num(k.closed_form) + "," + num(k.quadrature) + "\n";
  emit(o, data, "K(" + num(k.q) + "," + std::to_string(k.n) + ") closed " + num(k.closed_form) + " quadrature " +
                    num(k.quadrature));
  return diff <= 1e-8 ? 0 : 1;
}

int cmd_apconst(const Options& o) {
  const Setup st = setup(o);
  const auto* w = std::get_if<WeightedLebesgue>(&st.space);
  if (!w) throw std::invalid_argument("apconst needs --space with a weighted space, e.g. {\"space\":\"weighted\",...}");
  const Lattice lat = make_lattice(st.dim, st.window[0], st.window[1], st.n);
  const ApEstimate est = ap_constant(sample_weight(w->w, lat), w->p);
  const auto adm = is_a1_admissible(w->w, st.dim);
  json j{{"p", est.p}, {"value", est.value}, {"cubes", est.cube_family_size}, {"a1_admissible", adm.admissible},
         {"rationale", adm.rationale}};
  std::string data = o.format == "json" ? dump(j) : "p,value,cubes\n" + num(est.p) + "," + num(est.value) + "," +
                                                        std::to_string(est.cube_family_size) + "\n";
  emit(o, data, "A_" + num(est.p) + " constant " + num(est.value));
  return 0;
}

ExperimentConfig experiment_config(const Options& o) {
  if (o.config.empty()) throw std::invalid_argument("verify needs --config");
  ExperimentConfig c = config_from_json(read_json_file(o.config));
  if (o.dim) c.dim = *o.dim;
  if (o.n) c.grids = {*o.n};
  if (o.q) c.q = {*o.q};
  if (o.s) c.s = *o.s;
  if (!o.space.empty()) c.spaces = {space_from_json(spec_argument(o.space))};
  if (!o.function.empty()) c.functions = {setup(o).function};
  if (o.lambda_min) c.lambda.lambda_min = *o.lambda_min;
  if (o.lambda_max) c.lambda.lambda_max = *o.lambda_max;
  if (o.lambda_points) c.lambda.points = *o.lambda_points;
  if (!o.mode.empty()) c.lambda.mode = o.mode == "brute" ? ScanMode::Brute : ScanMode::Accelerated;
  c.seed = o.seed ? o.seed : c.seed;
  c.output.clear();
  return c;
}

int cmd_verify(const Options& o) {
  const ExperimentReport r = run_experiment(experiment_config(o));
  if (!o.out.empty()) {
    std::string stem = o.out;
    for (const char* ext : {".json", ".csv"})
      if (stem.size() > 5 && stem.ends_with(ext)) stem.erase(stem.size() - std::string(ext).size());
    write_report(r, stem);
  } else if (o.format == "json") {
    std::cout << dump(report_to_json(r));
  } else {
    write_table_csv(std::cout, r);
  }
  int pass = 0, fail = 0, unreliable = 0;
  for (const auto& a : r.assertions) {
    (a.verdict == Verdict::Pass ? pass : a.verdict == Verdict::Fail ? fail : unreliable) += 1;
    if (a.verdict != Verdict::Pass)
      std::cerr << to_string(a.verdict) << ": " << a.name << " measured " << a.measured << " bound " << a.bound << '\n';
  }
  std::cout << r.config.kind << ": " << to_string(r.verdict()) << " (" << pass << " pass, " << fail << " fail, "
            << unreliable << " unreliable)\n";
  return exit_status(r.verdict());
}

// Re-reads a report and prints its table or summary.
int cmd_report(const Options& o) {
  if (o.config.empty()) throw std::invalid_argument("report needs --config <report.json>");
  const ExperimentReport r = report_from_json(read_json_file(o.config));
  std::ostringstream data;
  if (o.format == "json")
    data << dump(report_to_json(r));
  else
    write_table_csv(data, r);
  emit(o, data.str(), r.config.kind + ": " + to_string(r.verdict()) + ", " + std::to_string(r.table.size()) + " rows");
  return exit_status(r.verdict());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-functional experiments on uniform lattices"};
  app.require_subcommand(1, 1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {{"norm", "norm of a sampled function", cmd_norm},
                      {"bsvy-scan", "weak-functional profile over lambda", cmd_bsvy_scan},
                      {"bsvy-limit", "large-lambda limit and sup of the weak functional", cmd_bsvy_limit},
                      {"strong", "strong (Gagliardo-type) functional", cmd_strong},
                      {"maximal", "uncentered maximal function", cmd_maximal},
                      {"kconst", "sphere constant K(q, n)", cmd_kconst},
                      {"apconst", "A_p constant of a weight", cmd_apconst},
                      {"verify", "run an experiment config", cmd_verify},
                      {"report", "re-read a report", cmd_report}};
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    set_thread_count(o.threads);
    for (const auto& s : subs)
      if (app.got_subcommand(s.name)) return s.run(o);
  } catch (const MissingFile& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoInput;
  } catch (const HypothesisError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSoftware;
  }
  return kExitUsage;
}
