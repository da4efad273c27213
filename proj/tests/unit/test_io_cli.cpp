#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

#include "common.hpp"
#include "gapspec/denjoy.hpp"
#include "gapspec/errors.hpp"
#include "gapspec/io.hpp"

using namespace gapspec;
using io::json;

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1.0");
  CHECK(io::format_double(-2.5e-300) == "-2.5e-300");
  CHECK(io::format_double(std::nan("")) == "null");
  json j = {{"x", 1.0 / 3.0}, {"n", 3}, {"s", "a"}};
  CHECK(io::dump(j, -1) == R"({"x":0.33333333333333331,"n":3,"s":"a"})");
}

TEST_CASE("certificate carries version and a stable config hash") {
  json cfg = {{"args", {"denjoy", "build"}}, {"b1", 1.0}};
  auto c1 = io::certificate("denjoy build", cfg, {{"ok", true}});
  auto c2 = io::certificate("denjoy build", cfg, {{"ok", false}});
  CHECK(c1["version"] == io::version());
  CHECK(c1["config_hash"].get<std::string>().size() == 16);
  CHECK(c1["config_hash"] == c2["config_hash"]);
  cfg["b1"] = 2.0;
  CHECK(io::config_hash(cfg) != c1["config_hash"].get<std::string>());
  auto it = c1.begin();
  CHECK(it.key() == "version");
}

TEST_CASE("gap sets, divisors and ratio rules round-trip") {
  auto s = fixtures::three_gap();
  auto back = io::gapset_from_json(io::to_json(s));
  CHECK(back.E0 == s.E0);
  REQUIRE(back.size() == 3);
  CHECK(back.gaps[2].b == 7.0);

  auto ds = denjoy::build({});
  auto t = io::gapset_from_json(io::to_json(ds.set));
  REQUIRE(t.tail);
  CHECK(t.tail->first_index == ds.set.tail->first_index);
  CHECK(t.tail->b_first == ds.set.tail->b_first);

  auto d = io::divisor_from_json(io::to_json(fixtures::three_gap_mu()));
  CHECK(d.mu.mu == fixtures::three_gap_mu().mu);
  CHECK_FALSE(d.nu);
  auto dn = io::divisor_from_json(json::parse(R"({"mu":[1.2],"nu0":-1,"nu":[1.5]})"));
  REQUIRE(dn.nu);
  CHECK(dn.nu->nu0 == -1.0);
  CHECK(dn.mu.sigma == std::vector<int>{1});

  auto g = io::parse_ell("geometric:0.25,0.5");
  CHECK(g(3) == doctest::Approx(0.0625));
  auto p = io::parse_ell("power:1,4");
  CHECK(p(2) == doctest::Approx(1.0 / 16));
  auto l = io::parse_ell("list:0.1,0.2");
  CHECK(l.length() == 2);
  CHECK(io::ell_from_json(io::to_json(l)).values == l.values);
  CHECK_THROWS_AS(io::parse_ell("cubic:1"), ConfigError);
}

TEST_CASE("grid syntax") {
  CHECK(io::parse_grid("0:1:5").points() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(io::parse_grid("0:1:0.25").points().size() == 5);
  auto g = io::parse_grid("1e-3:1:4:geo").points();
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g.back() == 1.0);
  CHECK_THROWS_AS(io::parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(io::parse_grid("-1:1:3:geo").points(), ConfigError);
}

TEST_CASE("CSV writer") {
  std::ostringstream os;
  io::CsvWriter w(os, {"x", "y"});
  w.row(std::vector<double>{0.5, 1.0 / 3.0});
  CHECK(os.str() == "x,y\n0.5,0.33333333333333331\n");
}

TEST_CASE("measures with named densities") {
  auto m = io::measure_from_json(json::parse(R"({"ac":[{"l":0,"u":2,"density":"const:0.5"}],"pp":[{"loc":3,"w":1}]})"));
  REQUIRE(m.ac.size() == 1);
  CHECK(m.ac[0].density(1.0) == 0.5);
  CHECK(m.pp[0].weight == 1.0);
  CHECK_THROWS_AS(io::measure_from_json(json::parse(R"({"ac":[{"l":0,"u":1,"density":"mystery"}]})")), ConfigError);
}

// ---- command line ----------------------------------------------------------

namespace {
struct Run {
  int code;
  std::string out;
};
Run run(const std::string& args) {
  const std::string cmd = std::string(GAPSPEC_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}
std::string write_tmp(const std::string& name, const std::string& body) {
  const std::string path = std::string(GAPSPEC_TMP) + "/" + name;
  std::ofstream(path) << body;
  return path;
}
}  // namespace

TEST_CASE("cli: certificates and exit codes") {
  const auto set = write_tmp("one_gap.json", R"({"E0":0,"gaps":[[1,2]]})");
  const auto bad = write_tmp("bad_gap.json", R"({"E0":0,"gaps":[[2,1]]})");
  const auto div = write_tmp("one_gap_div.json", R"({"mu":[1.2],"nu0":-1,"nu":[1.5]})");

  auto r = run("set validate --set " + set);
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["version"] == io::version());
  CHECK(j["result"]["valid"] == true);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(run("set validate --set " + set).out == r.out);  // deterministic

  CHECK(run("set validate --set " + bad).code == 1);
  CHECK(run("set validate --set /nonexistent.json").code == 2);
  CHECK(run("set validate --bogus").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("denjoy build --ell geometric:0.7,0.2").code == 2);
  CHECK(run("denjoy gl-phi --x-grid 1:1:1 --R 1.01 --K 1").code == 3);
  CHECK(run("verify no-such-suite").code == 2);

  auto c = run("comb critical --set " + set);
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["result"]["c"][0].get<double>() == doctest::Approx(1.4569465810444636).epsilon(1e-13));

  auto p = run("denjoy pointmass");
  REQUIRE(p.code == 0);
  CHECK(json::parse(p.out)["result"]["pass"] == true);

  auto g = run("greens eval --set " + set + " --divisor " + div + " --grid 0.5:3.5:4");
  REQUIRE(g.code == 0);
  std::istringstream lines(g.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "lambda,re_g,im_g,xi");
  std::getline(lines, line);
  CHECK(line.rfind("0.5,0.0,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "0.5");
}
