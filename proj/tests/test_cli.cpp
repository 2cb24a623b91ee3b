/* End-to-end tests of the command line tool.  The test binary receives
 * the tool's path and the fixtures directory as its first two
 * arguments, runs the tool as a subprocess, and compares bytes and
 * exit codes against values computed in-process with the same library. */

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "expected_tables.hpp"
#include <linkhom/fixtures.hpp>
#include <linkhom/homology.hpp>
#include <linkhom/invariants.hpp>
#include <linkhom/tangle.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace linkhom;
using nlohmann::json;

namespace {

std::string g_cli;
std::string g_fixtures;

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = "'" + g_cli + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTrefoilTableGolden = "   i    j  group\n"
                                  "  -3   -9  Z\n"
                                  "  -2   -7  Z/2\n"
                                  "  -2   -5  Z\n"
                                  "   0   -3  Z\n"
                                  "   0   -1  Z\n";

} // namespace

TEST_CASE("jones strings in both variable conventions") {
    RunResult left = run_cli("jones --braid '1 1 1' --strands 2 --format table");
    CHECK(left.code == 0);
    CHECK(left.out == "-t^-4 + t^-3 + t^-1\n");

    RunResult right = run_cli("jones --braid '-1 -1 -1' --strands 2 --format table");
    CHECK(right.code == 0);
    CHECK(right.out == "t + t^3 - t^4\n");

    RunResult curl = run_cli("jones --braid '1' --strands 2 --format table");
    CHECK(curl.code == 0);
    CHECK(curl.out == "1\n");

    RunResult js = run_cli("jones --braid '1 1 1' --strands 2");
    CHECK(js.code == 0);
    json j = json::parse(js.out);
    CHECK(j.at("schema") == 1);
    CHECK(j.at("var") == "t^(1/2)");
    CHECK(j.at("jones") == "-t^-4 + t^-3 + t^-1");

    RunResult modern = run_cli("jones --braid '1 1 1' --strands 2 --modern");
    json jm = json::parse(modern.out);
    CHECK(jm.at("var") == "q");
    std::string want = jones(fixtures::get("trefoil_left_braid")).subst_neg().str("q");
    CHECK(jm.at("jones") == want);
}

TEST_CASE("bracket output matches the library computation") {
    Diagram curl = Diagram::parse_braid({1}, 2);
    std::string want = "bracket: " + kauffman_bracket(curl).str("q") + "\nscaled:  " + scaled_bracket(curl).str("q") + "\n";
    RunResult r = run_cli("bracket --braid '1' --strands 2 --format table");
    CHECK(r.code == 0);
    CHECK(r.out == want);
}

TEST_CASE("homology table and poincare formats") {
    RunResult table = run_cli("homology --braid '1 1 1' --strands 2 --ring z --format table");
    CHECK(table.code == 0);
    CHECK(table.out == kTrefoilTableGolden);

    RunResult poin = run_cli("homology --braid '1 1 1' --strands 2 --ring z --format poincare");
    CHECK(poin.code == 0);
    CHECK(poin.out == "t^-3*q^-9 + t^-2*q^-5 + q^-3 + q^-1\n");
}

TEST_CASE("homology json carries diagram data and the group list") {
    RunResult r = run_cli("homology --braid '1 1 1' --strands 2 --ring z");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("schema") == 1);
    CHECK(j.at("ring") == "z");
    CHECK(j.at("crossings") == 3);
    CHECK(j.at("writhe") == -3);
    CHECK(j.at("groups") == homology_z(fixtures::get("trefoil_left_braid")).to_json());
}

TEST_CASE("zc homology honors the window option") {
    RunResult r = run_cli("homology --braid '1 1 1' --strands 2 --ring zc --window -9:5");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("ring") == "zc");
    CHECK(j.at("window") == json({-9, 5}));
    CHECK(j.at("groups") == expected::t2k_zc(3, -9, 5).to_json());
}

TEST_CASE("output bytes are deterministic across runs and job counts") {
    std::string cmd = "homology --braid '1 1 1 1' --strands 2 --ring zc --window -12:4";
    RunResult once = run_cli(cmd + " --jobs 3");
    RunResult twice = run_cli(cmd + " --jobs 3");
    RunResult serial = run_cli(cmd + " --jobs 1");
    CHECK(once.code == 0);
    CHECK(once.out == twice.out);
    CHECK(once.out == serial.out);
}

TEST_CASE("exit codes follow the error taxonomy") {
    CHECK(run_cli("jones --pd 'PD[X(1,2,3)]'").code == 2);
    CHECK(run_cli("homology --pd 'PD[]' --braid '1' --strands 2").code == 2);
    CHECK(run_cli("homology --braid '1'").code == 2);
    CHECK(run_cli("check --braid '1' --strands 2 --all --property d2_z").code == 2);
    CHECK(run_cli("").code == 2);

    CHECK(run_cli("homology --braid '1' --strands 2 --window 5").code == 3);
    CHECK(run_cli("homology --braid '1' --strands 2 --window 9:-9").code == 3);
    CHECK(run_cli("tangle --pd 'PD[X(1,4,2,5)]' --module '" + g_fixtures + "/modules/a.json'").code == 3);

    std::string r3path = "r3_movie_tmp.json";
    {
        std::ofstream out(r3path);
        out << R"({"initial":"PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]","moves":[{"op":"r3"}]})";
    }
    CHECK(run_cli("movie " + r3path).code == 4);
    std::remove(r3path.c_str());
}

TEST_CASE("movie subcommand reports closed surface values") {
    RunResult sphere = run_cli("movie '" + g_fixtures + "/movies/sphere.json' --ring zc");
    CHECK(sphere.code == 0);
    json js = json::parse(sphere.out);
    CHECK(js.at("closed") == true);
    CHECK(js.at("commutes") == true);
    CHECK(js.at("dj") == 2);
    CHECK(js.at("ring") == "zc");
    CHECK(js.at("value") == "-c");
    CHECK(js.at("frames").size() == 3);

    json sz = json::parse(run_cli("movie '" + g_fixtures + "/movies/sphere.json' --ring z").out);
    CHECK(sz.at("value") == "0");

    for (const char* ring : {"z", "zc"}) {
        json jt = json::parse(run_cli("movie '" + g_fixtures + "/movies/torus.json' --ring " + std::string(ring)).out);
        CHECK(jt.at("value") == "2");
        CHECK(jt.at("dj") == 0);
        json jg = json::parse(run_cli("movie '" + g_fixtures + "/movies/genus2.json' --ring " + std::string(ring)).out);
        CHECK(jg.at("value") == "0");
    }
}

TEST_CASE("movie subcommand reports induced maps for open movies") {
    RunResult r = run_cli("movie '" + g_fixtures + "/movies/trefoil_r1.json' --ring z");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("closed") == false);
    CHECK(j.at("dj") == 0);
    CHECK(j.at("frames").size() == 3);
    REQUIRE(j.contains("induced"));
    CHECK(j.at("induced").size() > 0);
    for (const auto& m : j.at("induced")) CHECK(m.at("iso") == true);
}

TEST_CASE("tangle subcommand computes module-coefficient homology") {
    std::string pd = fixtures::trefoil_tangle_pd();

    RunResult table = run_cli("tangle --pd '" + pd + "' --module '" + g_fixtures + "/modules/a_c0.json' --format table");
    CHECK(table.code == 0);
    CHECK(table.out == kTrefoilTableGolden);

    RunResult r = run_cli("tangle --pd '" + pd + "' --module '" + g_fixtures + "/modules/a.json' --window -9:5");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("groups") == homology_zc(fixtures::get("trefoil_left_braid"), -9, 5).to_json());
}

TEST_CASE("fixtures command round-trips the shipped knot table") {
    RunResult r = run_cli("fixtures");
    CHECK(r.code == 0);
    CHECK(r.out == fixtures::knots_csv());
    CHECK(r.out == read_file(g_fixtures + "/knots.csv"));
}

TEST_CASE("table subcommand batches over the knot csv") {
    std::string cmd = "table '" + g_fixtures + "/knots.csv' --command jones";
    RunResult r = run_cli(cmd + " --jobs 2");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    std::string csv = fixtures::knots_csv();
    size_t rows = std::count(csv.begin(), csv.end(), '\n') - 1;
    CHECK(j.at("results").size() == rows);

    std::map<std::string, std::string> by_name;
    for (const auto& row : j.at("results"))
        by_name[row.at("name").get<std::string>()] = row.at("jones").get<std::string>();
    CHECK(by_name.at("trefoil_left_braid") == "-t^-4 + t^-3 + t^-1");
    CHECK(by_name.at("trefoil_right_braid") == "t + t^3 - t^4");
    CHECK(by_name.at("fig8_pd") == "t^-2 - t^-1 + 1 - t + t^2");
    CHECK(by_name.at("hopf_left") == "-t^(-5/2) - t^(-1/2)");

    RunResult serial = run_cli(cmd + " --jobs 1");
    CHECK(serial.out == r.out);
}

TEST_CASE("check subcommand runs single properties") {
    RunResult r = run_cli("check --braid '1 1 1' --strands 2 --property euler_c0");
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("ok") == true);
    REQUIRE(j.at("reports").size() == 1);
    CHECK(j.at("reports")[0].at("name") == "euler_c0");
    CHECK(j.at("reports")[0].at("status") == "pass");

    RunResult t = run_cli("check --braid '1 1 1' --strands 2 --property d2_zc --format table");
    CHECK(t.code == 0);
    CHECK(t.out.find("pass") == 0);
    CHECK(t.out.find("Z[c]") != std::string::npos);
    CHECK(t.out.find("all checks passed\n") != std::string::npos);
}

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <cli-binary> <fixtures-dir> [doctest options]\n", argv[0]);
        return 64;
    }
    g_cli = argv[1];
    g_fixtures = argv[2];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 2, argv + 2);
    return ctx.run();
}
