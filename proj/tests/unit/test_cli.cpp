#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs wgrad with stderr folded into the captured output.
Run wgrad(const std::string& args) {
  const std::string cmd = std::string(WGRAD_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("kconst and norm") {
  const Run k = wgrad("kconst --q 2 --dim 2");
  CHECK(k.status == 0);
  CHECK(k.out.find("3.14159265358979") != std::string::npos);
  const Run n = wgrad(R"(norm --space '{"space":"lebesgue","p":2}' --function hat)");
  CHECK(n.status == 0);
  CHECK(n.out.find("0.8164") != std::string::npos);  // sqrt(2/3)
}

TEST_CASE("error paths") {
  const Run missing = wgrad("verify --config missing.json");
  CHECK(missing.status == 66);
  CHECK(missing.out.find("missing.json") != std::string::npos);
  CHECK(wgrad("norm --bogus-flag 1").status == 64);
  CHECK(wgrad("norm --threads 0").status == 64);
  CHECK(wgrad("").status == 64);
  const Run bad = wgrad(R"(norm --space '{"space":"lebesgue","p":0.5}')");
  CHECK(bad.status == 65);

  std::ofstream("cli_violating.json") << R"({"kind":"limit-identity","dim":3,"p":1,"q":100,
    "space":{"space":"lebesgue","p":1},"function":{"family":"smooth-bump","center":[0,0,0],"radius":1}})";
  const Run v = wgrad("verify --config cli_violating.json");
  CHECK(v.status == 65);
  CHECK(v.out.find("n(1/p - 1/q) < 1") != std::string::npos);
}

TEST_CASE("scan modes and thread counts agree") {
  const std::string base = "bsvy-scan --function smoothed-hat --n 513 --q 1.5 --s 0.7 --lambda-points 20";
  const Run brute = wgrad(base + " --mode brute");
  const Run fast = wgrad(base + " --mode accelerated");
  const Run threaded = wgrad(base + " --mode accelerated --threads 3");
  REQUIRE(brute.status == 0);
  CHECK(brute.out == fast.out);
  CHECK(fast.out == threaded.out);
  CHECK(fast.out.rfind("lambda,value,r_max_cells,pair_count\n", 0) == 0);
}

TEST_CASE("verify writes a report that re-parses") {
  std::ofstream("cli_dyadic.json") << R"({"kind":"dyadic-cover","trials":200,"seed":3})";
  const Run v = wgrad("verify --config cli_dyadic.json --out cli_report");
  CHECK(v.status == 0);
  const auto j = nlohmann::json::parse(slurp("cli_report.json"));
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("seed") == 3);
  const Run r = wgrad("report --config cli_report.json --format json");
  CHECK(r.status == 0);
  CHECK(slurp("cli_report.csv").rfind("grid,lhs,rhs,ratio,rel_err,case\n", 0) == 0);

  std::ofstream("cli_fail.json") << R"({"kind":"s1-divergence","grids":[257,513]})";
  CHECK(wgrad("verify --config cli_fail.json").status == 1);
}
