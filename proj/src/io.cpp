#include "weakgrad/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace weakgrad {

namespace {

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec(const json& j) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

double number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

json inf_or_number(double v) { return std::isinf(v) ? json("inf") : json(v); }

void to_json(json& j, const FunctionSpec& f) {
  j = json{{"family", to_string(f.family)}};
  switch (f.family) {
    case Family::Constant: j["height"] = f.height; break;
    case Family::Linear:
      j["slope"] = vec(f.slope);
      j["height"] = f.height;
      if (f.center.size()) j["center"] = vec(f.center);
      break;
    case Family::TensorProduct:
    case Family::Sum: j["parts"] = f.parts; break;
    default:
      j["center"] = vec(f.center);
      j["radius"] = f.radius;
      j["height"] = f.height;
      if (f.family == Family::SmoothedHat) j["k"] = f.smoothing;
  }
}

void from_json(const json& j, FunctionSpec& f) {
  f = FunctionSpec{};
  f.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("center")) f.center = vec(j["center"]);
  if (j.contains("radius")) f.radius = j["radius"].get<double>();
  if (j.contains("halfwidth")) f.radius = j["halfwidth"].get<double>();
  if (j.contains("height")) f.height = j["height"].get<double>();
  if (j.contains("value")) f.height = j["value"].get<double>();
  if (j.contains("slope")) f.slope = vec(j["slope"]);
  if (j.contains("k")) f.smoothing = j["k"].get<int>();
  if (j.contains("parts")) f.parts = j["parts"].get<std::vector<FunctionSpec>>();
  if (f.family == Family::Linear && f.slope.size() == 0) throw std::invalid_argument("linear: slope is required");
}

void to_json(json& j, const WeightSpec& w) {
  j = json{{"family", to_string(w.family)}};
  switch (w.family) {
    case WeightFamily::Constant: j["value"] = w.value; break;
    case WeightFamily::Power:
      j["a"] = w.a;
      j["center"] = w.center.size() == 1 ? json(w.center(0)) : vec(w.center);
      break;
    case WeightFamily::Step:
      j["minus"] = w.minus;
      j["plus"] = w.plus;
      break;
    case WeightFamily::Product: j["parts"] = w.parts; break;
  }
  if (w.exponent != 1.0) j["exponent"] = w.exponent;
}

void from_json(const json& j, WeightSpec& w) {
  w = WeightSpec{};
  w.family = weight_family_from_string(j.at("family").get<std::string>());
  if (j.contains("value")) w.value = j["value"].get<double>();
  if (j.contains("a")) w.a = j["a"].get<double>();
  if (j.contains("center")) w.center = vec(j["center"]);
  if (j.contains("minus")) w.minus = j["minus"].get<double>();
  if (j.contains("plus")) w.plus = j["plus"].get<double>();
  if (j.contains("parts")) w.parts = j["parts"].get<std::vector<WeightSpec>>();
  if (j.contains("exponent")) w.exponent = j["exponent"].get<double>();
}

void to_json(json& j, const OrliczSpec& phi) {
  j = json{{"family", phi.family == OrliczSpec::Family::Power ? "power" : "power-log"}, {"p", phi.p}};
}

void from_json(const json& j, OrliczSpec& phi) {
  const auto fam = j.value("family", std::string("power"));
  if (fam == "power")
    phi.family = OrliczSpec::Family::Power;
  else if (fam == "power-log")
    phi.family = OrliczSpec::Family::PowerLog;
  else
    throw std::invalid_argument("unknown Orlicz family '" + fam + "'");
  phi.p = j.at("p").get<double>();
}

void to_json(json& j, const ExponentProfile& r) {
  if (r.kind == ExponentProfile::Kind::Constant) {
    j = json{{"kind", "constant"}, {"value", r.minus}};
  } else {
    j = json{{"kind", "smooth-step"}, {"minus", r.minus}, {"plus", r.plus}, {"center", r.center}, {"width", r.width}};
  }
}

void from_json(const json& j, ExponentProfile& r) {
  r = ExponentProfile{};
  if (j.is_number()) {
    r.minus = r.plus = j.get<double>();
    return;
  }
  const auto kind = j.value("kind", std::string("constant"));
  if (kind == "constant") {
    r.kind = ExponentProfile::Kind::Constant;
    r.minus = r.plus = j.at("value").get<double>();
  } else if (kind == "smooth-step") {
    r.kind = ExponentProfile::Kind::SmoothStep;
    r.minus = j.at("minus").get<double>();
    r.plus = j.at("plus").get<double>();
    r.center = j.value("center", 0.0);
    r.width = j.value("width", 0.25);
  } else {
    throw std::invalid_argument("unknown exponent profile '" + kind + "'");
  }
}

void to_json(json& j, const DyadicCube& c) {
  json alpha = json::array(), k = json::array();
  for (int a = 0; a < c.dim; ++a) {
    alpha.push_back(c.shift[a] / 3.0);
    k.push_back(c.k[a]);
  }
  j = json{{"alpha", alpha}, {"j", c.j}, {"k", k}};
}

void from_json(const json& j, DyadicCube& c) {
  c = DyadicCube{};
  const auto& alpha = j.at("alpha");
  c.dim = static_cast<int>(alpha.size());
  for (int a = 0; a < c.dim; ++a) {
    c.shift[a] = static_cast<int>(std::lround(alpha[static_cast<std::size_t>(a)].get<double>() * 3.0));
    c.k[a] = j.at("k")[static_cast<std::size_t>(a)].get<std::int64_t>();
  }
  c.j = j.at("j").get<int>();
}

void to_json(json& j, const LambdaGridSpec& g) {
  j = json{{"points", g.points},
           {"top_points", g.top_points},
           {"min_radius_cells", g.min_radius_cells},
           {"max_window_fraction", g.max_window_fraction},
           {"mode", g.mode == ScanMode::Brute ? "brute" : "accelerated"},
           {"self_cell", g.self == SelfCell::Exclude ? "exclude" : "linearized"},
           {"reliability_threshold", g.reliability_threshold}};
  if (g.lambda_min > 0.0) j["lambda_min"] = g.lambda_min;
  if (g.lambda_max > 0.0) j["lambda_max"] = g.lambda_max;
}

void from_json(const json& j, LambdaGridSpec& g) {
  g = LambdaGridSpec{};
  g.points = j.value("points", g.points);
  g.top_points = j.value("top_points", g.top_points);
  g.min_radius_cells = j.value("min_radius_cells", g.min_radius_cells);
  g.max_window_fraction = j.value("max_window_fraction", g.max_window_fraction);
  g.lambda_min = j.value("lambda_min", 0.0);
  g.lambda_max = j.value("lambda_max", 0.0);
  g.reliability_threshold = j.value("reliability_threshold", g.reliability_threshold);
  const auto mode = j.value("mode", std::string("accelerated"));
  if (mode != "brute" && mode != "accelerated") throw std::invalid_argument("unknown scan mode '" + mode + "'");
  g.mode = mode == "brute" ? ScanMode::Brute : ScanMode::Accelerated;
  const auto self = j.value("self_cell", std::string("linearized"));
  if (self != "exclude" && self != "linearized") throw std::invalid_argument("unknown self_cell '" + self + "'");
  g.self = self == "exclude" ? SelfCell::Exclude : SelfCell::Linearized;
}

json space_to_json(const SpaceSpec& space) {
  json j{{"space", space_name(space)}};
  if (const auto* l = std::get_if<Lebesgue>(&space)) {
    j["p"] = inf_or_number(l->p);
  } else if (const auto* w = std::get_if<WeightedLebesgue>(&space)) {
    j["p"] = inf_or_number(w->p);
    j["w"] = w->w;
  } else if (const auto* m = std::get_if<Morrey>(&space)) {
    j["r"] = m->r;
    j["alpha"] = m->alpha;
    if (m->center_stride > 0) j["stride"] = m->center_stride;
  } else if (const auto* mx = std::get_if<MixedNorm>(&space)) {
    json r = json::array();
    for (double v : mx->r) r.push_back(inf_or_number(v));
    j["r"] = r;
  } else if (const auto* v = std::get_if<VariableLebesgue>(&space)) {
    j["r"] = v->r;
  } else if (const auto* o = std::get_if<Orlicz>(&space)) {
    j["phi"] = o->phi;
  } else if (const auto* s = std::get_if<OrliczSlice>(&space)) {
    j["phi"] = s->phi;
    j["r"] = s->r;
    j["t"] = s->t;
  }
  return j;
}

SpaceSpec space_from_json(const json& j) {
  const auto name = j.at("space").get<std::string>();
  if (name == "lebesgue") return Lebesgue{number_or_inf(j.at("p"))};
  if (name == "weighted") return WeightedLebesgue{number_or_inf(j.at("p")), j.at("w").get<WeightSpec>()};
  if (name == "morrey") {
    Morrey m;
    m.r = j.at("r").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.center_stride = j.value("stride", Index{0});
    return m;
  }
  if (name == "mixed") {
    MixedNorm m;
    for (const auto& v : j.at("r")) m.r.push_back(number_or_inf(v));
    return m;
  }
  if (name == "variable") return VariableLebesgue{j.at("r").get<ExponentProfile>()};
  if (name == "orlicz") return Orlicz{j.at("phi").get<OrliczSpec>()};
  if (name == "orlicz_slice") return OrliczSlice{j.at("phi").get<OrliczSpec>(), j.at("r").get<double>(), j.at("t").get<double>()};
  throw std::invalid_argument("unknown space '" + name + "'");
}

json parse_json_argument(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
    return json::parse(text);
  std::ifstream in(text);
  if (!in) throw std::runtime_error("cannot open file '" + text + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str());
}

json profile_summary(const LevelSetProfile& p) {
  return json{{"sup", p.sup_value},
              {"limit", p.limit_estimate},
              {"diagnostic", p.limit_diagnostic},
              {"limit_points", p.limit_points},
              {"reliable", p.reliable}};
}

void write_profile_csv(std::ostream& out, const LevelSetProfile& p) {
  out << "lambda,value,r_max_cells,pair_count\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.lambda.size(); ++i)
    out << p.lambda[i] << ',' << p.values[i] << ',' << p.r_max_cells[i] << ',' << p.pair_count[i] << '\n';
}

}  // namespace weakgrad
