#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "etlab/cli.hpp"
#include "etlab/generators.hpp"
#include "etlab/json_io.hpp"

using namespace etlab;

namespace {

Family fam(int n, std::vector<Mask> sets) { return Family::of(GroundSet{n}, std::move(sets)); }

Family pairs() { return fam(4, {0b0011, 0b1100}); }
Family triangle() { return fam(4, {0b0011, 0b0101, 0b0110}); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("etlab_test_" + name)).string();
}

std::string write_family(const std::string& name, const Family& f) {
  const std::string path = temp_path(name);
  std::ofstream out(path);
  out << family_to_json(f).dump();
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("family json shape is pinned") {
  const json j = family_to_json(pairs());
  CHECK(j.dump() == R"({"ground_size":4,"sets":[[0,1],[2,3]]})");
  const Family back = family_from_json(j);
  CHECK(back.ground.size == 4);
  CHECK(back.members == pairs().members);
  CHECK(back.bound_l == 2);
}

TEST_CASE("family json validation") {
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"sets":[]})")), std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"ground_size":64,"sets":[]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"ground_size":4,"sets":[[1,0]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"ground_size":4,"sets":[[0,4]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"ground_size":4,"sets":[[0.5]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(family_from_json(json::parse(R"({"ground_size":4,"sets":[[0,0]]})")),
                  std::invalid_argument);
  // empty member is legal, it just makes the family trivial to cover
  const Family f = family_from_json(json::parse(R"({"ground_size":2,"sets":[[]]})"));
  CHECK(f.has_empty_member());
}

TEST_CASE("profile json round trip") {
  const ConstantsProfile prof = build_profile(Mode::bell, 60.0, 0.5, 0.2);
  const ConstantsProfile back = profile_from_json(to_json(prof));
  CHECK(back.mode == Mode::bell);
  CHECK(back.L == prof.L);
  CHECK(back.delta == prof.delta);
  CHECK(back.c == prof.c);
  CHECK(back.epsilon == prof.epsilon);
  CHECK(back.l0 == prof.l0);
  CHECK(back.epsilon1 == prof.epsilon1);
  CHECK(back.bell_base == prof.bell_base);
  CHECK(back.paper_ok == prof.paper_ok);
}

TEST_CASE("trace recheck reproduces the run byte for byte") {
  const ConstantsProfile prof = build_profile(Mode::main3, 10.0);
  const FragmentationTrace tr = run_induction(triangle(), Probability(0.4), prof, 2);
  const json stored = trace_to_json(tr);
  CHECK(stored.at("schema") == "fragmentation-trace/v1");

  const RecheckResult ok = recheck_trace(stored);
  CHECK(ok.match);
  CHECK(ok.detail.empty());

  json tampered = stored;
  tampered["root"]["f_value"] = 0.123;
  const RecheckResult bad = recheck_trace(tampered);
  CHECK_FALSE(bad.match);
  CHECK(bad.detail.find("f_value") != std::string::npos);

  json unknown = stored;
  unknown["schema"] = "fragmentation-trace/v2";
  CHECK_FALSE(recheck_trace(unknown).match);
  CHECK(recheck_trace(unknown).detail == "unrecognized schema");
}

TEST_CASE("cli: generate emits the pinned family json") {
  const CliRun r = cli({"generate", "--kind", "cliques", "--n", "3", "--k", "2"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out) == json::parse(R"({"ground_size":3,"sets":[[0],[1],[2]]})"));
}

TEST_CASE("cli: thresholds of two disjoint pairs") {
  const std::string path = write_family("pairs.json", pairs());
  const CliRun r = cli({"thresholds", "--family", path});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("p_e").at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(j.at("q").at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(j.at("p_c").at("value").get<double>() ==
        doctest::Approx(0.541196100146197).epsilon(1e-9));
  CHECK(j.at("p_c").at("status") == "ok");
}

TEST_CASE("cli: cover and qvalue") {
  const std::string path = write_family("pairs.json", pairs());
  const CliRun c = cli({"cover", "--family", path, "--p", "0.3"});
  REQUIRE(c.code == 0);
  const json jc = json::parse(c.out);
  CHECK(jc.at("cost").get<double>() == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(jc.at("optimal").get<bool>());
  CHECK(jc.at("cover") == family_to_json(pairs()));  // the family covers itself best

  const CliRun q = cli({"qvalue", "--family", path});
  REQUIRE(q.code == 0);
  const json jq = json::parse(q.out);
  CHECK(jq.at("q").at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(jq.at("witness").at("cost").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("cli: verify flags a certified hypothesis failure with exit 1") {
  const std::string path = write_family("pairs.json", pairs());
  const CliRun r =
      cli({"verify", "--family", path, "--mode", "main3", "--L", "10", "--p", "0.02",
           "--l", "2"});
  CHECK(r.code == 1);
  const json j = json::parse(r.out);
  CHECK(j.at("m_l") == 1);
  CHECK_FALSE(j.at("degenerate").get<bool>());
  CHECK_FALSE(j.at("hypothesis_holds").get<bool>());
  CHECK_FALSE(j.at("pass").get<bool>());
  CHECK(j.at("certified").get<bool>());
}

TEST_CASE("cli: fragment records the induction and reports evidence quality") {
  const std::string path = write_family("triangle.json", triangle());
  // exhaustive run: the small-L dcl failure is certified, exit 1
  const CliRun r = cli({"fragment", "--family", path, "--mode", "main3", "--L", "10",
                        "--p", "0.4", "--l", "2"});
  CHECK(r.code == 1);
  const json tr = json::parse(r.out);
  CHECK(tr.at("schema") == "fragmentation-trace/v1");
  CHECK(tr.at("root").at("status") == "recursed");
  CHECK_FALSE(tr.at("root").at("dcl").at("holds").get<bool>());

  // written to a file, the summary names the trace and verify --recheck agrees
  const std::string trace_path = temp_path("triangle_trace.json");
  const CliRun w = cli({"fragment", "--family", path, "--mode", "main3", "--L", "10",
                        "--p", "0.4", "--l", "2", "--out", trace_path});
  CHECK(w.code == 1);
  const json summary = json::parse(w.out);
  CHECK(summary.at("trace_file") == trace_path);
  CHECK(summary.at("statuses") == json::array({"recursed", "recursed", "base"}));
  CHECK(summary.at("certified_fail").get<bool>());
  CHECK_FALSE(summary.at("sampled_only").get<bool>());

  const CliRun rc = cli({"verify", "--recheck", trace_path});
  CHECK(rc.code == 0);
  CHECK(json::parse(rc.out).at("match").get<bool>());

  // flip one digit in the stored trace and the recheck catches it
  std::string text = slurp(trace_path);
  const auto pos = text.find("\"p\":0.4");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 7, "\"p\":0.3");
  std::ofstream(trace_path) << text;
  const CliRun bad = cli({"verify", "--recheck", trace_path});
  CHECK(bad.code == 1);
  CHECK_FALSE(json::parse(bad.out).at("match").get<bool>());
}

TEST_CASE("cli: sampled fragment run downgrades to evidence-only exit 3") {
  const std::string path = write_family("triangle.json", triangle());
  const CliRun r = cli({"--seed", "7", "fragment", "--family", path, "--mode", "main3",
                        "--L", "10", "--p", "0.4", "--l", "2", "--sampled",
                        "--samples", "500"});
  CHECK(r.code == 3);
  const json tr = json::parse(r.out);
  CHECK_FALSE(tr.at("inputs").at("sampling").at("exhaustive").get<bool>());
  CHECK(tr.at("inputs").at("sampling").at("seed") == 7);
}

TEST_CASE("cli: kk-sweep emits the pinned clique rows") {
  const CliRun r = cli({"--threads", "2", "kk-sweep", "--kinds", "cliques,matchings",
                        "--n-min", "3", "--n-max", "4", "--clique-k-max", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("skip matchings n=3") != std::string::npos);

  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  REQUIRE(rows.size() == 6);  // header, clique-3-2, clique-3-3, clique-4-2, clique-4-3, matching-4
  CHECK(rows[0] == std::vector<std::string>{"family", "N", "l", "p_E", "q", "p_c",
                                            "ratio", "flags"});
  CHECK(rows[1][0] == "clique-3-2");
  CHECK(rows[1][1] == "3");
  CHECK(rows[1][2] == "1");
  CHECK(std::stod(rows[1][3]) == doctest::Approx(1.0 / 6).epsilon(1e-9));
  CHECK(std::stod(rows[1][4]) == doctest::Approx(1.0 / 6).epsilon(1e-9));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(0.206299474015900).epsilon(1e-9));
  CHECK(std::stod(rows[1][6]) == doctest::Approx(1.237796844095).epsilon(1e-6));
  CHECK(rows[1][7] == "-");

  // the single 3-clique of K3: all three thresholds coincide at 2^(-1/3)
  CHECK(rows[2][0] == "clique-3-3");
  const double third = std::pow(2.0, -1.0 / 3.0);
  CHECK(std::stod(rows[2][3]) == doctest::Approx(third).epsilon(1e-9));
  CHECK(std::stod(rows[2][4]) == doctest::Approx(third).epsilon(1e-9));
  CHECK(std::stod(rows[2][5]) == doctest::Approx(third).epsilon(1e-9));
  CHECK(std::stod(rows[2][6]) == doctest::Approx(0.5).epsilon(1e-9));  // l = 3, log2(4) = 2

  CHECK(rows[5][0] == "matching-4");
  CHECK(rows[5][2] == "2");
}

TEST_CASE("cli: usage problems exit 2, help exits 0") {
  CHECK(cli({"no-such-command"}).code == 2);
  CHECK(cli({"thresholds"}).code == 2);  // missing --family
  CHECK(cli({"thresholds", "--family", temp_path("absent.json")}).code == 2);
  CHECK(cli({"generate", "--kind", "dodecahedra"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  const CliRun h = cli({"--help"});
  CHECK(h.out.find("kk-sweep") != std::string::npos);
}
